import json

import pytest

from mclab import io as mio
from mclab.cli import main
from mclab.errors import ConfigError
from mclab.experiments import (
    config_from_dict, expand_grid, parse_config, phase_points_csv, phase_trials_csv,
    run_phase_sweep, run_phase_trials, summarize_phase,
)
from mclab.model import make_random_low_rank

SMALL = {"n1": 10, "n2": 10, "r": 1, "m_grid": [20, 60, 100], "trials": 3, "seed": 5}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_defaults_applied(tmp_path):
    cfg = parse_config(write_config(tmp_path, {"n1": 5, "n2": 6, "r": 1, "m_grid": [10]}))
    assert cfg.beta == 2.0 and cfg.trials == 100 and cfg.tolerances["recovery"] == 1e-4


def test_grid_string_expansion():
    assert expand_grid("100:300:100") == [100, 200, 300]
    assert config_from_dict({"n1": 20, "n2": 20, "r": 1, "m_grid": "100:300:100"}).m_grid == [100, 200, 300]
    assert config_from_dict({"n1": 10, "n2": 10, "r": 1, "p_grid": [0.5, 1.0]}).m_grid == [50, 100]


def test_all_violations_listed():
    with pytest.raises(ConfigError) as err:
        config_from_dict({"n1": 5, "n2": 5, "r": -1, "m_grid": [], "trials": 0, "colour": 1})
    text = " ".join(err.value.violations)
    for needle in ("'colour'", "r must be", "trials", "m_grid"):
        assert needle in text


@pytest.mark.parametrize("bad", [
    {"n1": 5, "n2": 5, "r": 1},
    {"n1": 5, "n2": 5, "r": 1, "m_grid": [3], "p_grid": [0.5]},
    {"n1": 5, "n2": 5, "r": 1, "m_grid": [30]},
    {"n1": 5, "n2": 5, "r": 1, "m_grid": [3], "certify": True},
    {"n1": 5, "n2": 5, "r": 1, "m_grid": [3], "tolerances": {"recovery": 0}},
    {"n1": 6, "n2": 5, "r": 1, "m_grid": [3]},
])
def test_infeasible_configs_rejected(bad):
    with pytest.raises(ConfigError):
        config_from_dict(bad)


def test_phase_sweep_shape_and_full_grid():
    cfg = config_from_dict(dict(SMALL, m_grid=[20, 100]))
    points = run_phase_sweep(cfg)
    assert [p.m for p in points] == [20, 100]
    assert points[-1].success_rate == 1.0
    assert all(0 <= p.success_rate <= 1 and p.trials == 3 for p in points)


def test_csv_identical_across_workers():
    base = config_from_dict(SMALL)
    par = config_from_dict(dict(SMALL, workers=2))
    assert base.config_hash() == par.config_hash()
    rows_a, rows_b = run_phase_trials(base), run_phase_trials(par)
    assert phase_trials_csv(rows_a, base) == phase_trials_csv(rows_b, par)
    assert (phase_points_csv(summarize_phase(rows_a, 3), base)
            == phase_points_csv(summarize_phase(rows_b, 3), par))


def test_csv_rows_carry_seed_and_hash():
    cfg = config_from_dict(SMALL)
    lines = phase_trials_csv(run_phase_trials(cfg), cfg).splitlines()
    header = lines[0].split(",")
    for line in lines[1:]:
        row = dict(zip(header, line.split(",")))
        assert row["seed"] == "5" and row["config_hash"] == cfg.config_hash()


# -- command line ---------------------------------------------------------------------

def test_cli_phase_and_overrides(tmp_path):
    cfg = write_config(tmp_path, SMALL)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["phase", cfg, "--out", str(out1)]) == 0
    assert main(["phase", cfg, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    out3 = tmp_path / "c.csv"
    assert main(["phase", cfg, "--trials", "2", "--seed", "9", "--out", str(out3)]) == 0
    assert out3.read_text().splitlines()[1].split(",")[4] == "2"


def test_cli_config_errors_exit_2(tmp_path, capsys):
    bad = write_config(tmp_path, {"n1": 5, "n2": 5, "r": -2, "m_grid": [3], "extra": 0})
    assert main(["phase", bad]) == 2
    err = capsys.readouterr().err
    assert "'extra'" in err and "r must be" in err
    assert main(["phase", str(tmp_path / "missing.json")]) == 2
    good = write_config(tmp_path, SMALL, "ok.json")
    assert main(["verify-bounds", good, "--trials", "0"]) == 2


def test_cli_verify_bounds(tmp_path):
    cfg = write_config(tmp_path, {"n1": 10, "n2": 12, "r": 2, "m_grid": [1], "trials": 50})
    out = tmp_path / "b.csv"
    assert main(["verify-bounds", cfg, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) >= 8 and all(",PASS," in ln for ln in lines[1:])


def test_cli_analyze_sample_solve_certify(tmp_path, capsys):
    f = make_random_low_rank(10, 12, 2, "haar", seed=1)
    fpath, mpath = tmp_path / "f.txt", tmp_path / "m.txt"
    mio.write_factorization(fpath, f)
    mio.write_matrix(mpath, f.M)

    assert main(["analyze", str(fpath), "--out", str(tmp_path / "a.json")]) == 0
    prof = json.loads((tmp_path / "a.json").read_text())
    assert prof["r"] == 2 and prof["mu0"] >= 1
    assert main(["analyze", str(mpath)]) == 2
    assert main(["analyze", str(mpath), "--rank", "2"]) == 0

    opath = tmp_path / "o.txt"
    assert main(["sample", "--n1", "10", "--n2", "12", "--m", "120", "--model",
                 "uniform-no-replace", "--seed", "3", "--matrix", str(mpath),
                 "--out", str(opath)]) == 0
    capsys.readouterr()
    assert main(["solve", str(opath), "--out", str(tmp_path / "x.txt")]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["converged"] and summary["iterations"] == 1

    assert main(["certify", str(fpath), "--m", "5000", "--blocks", "3",
                 "--json-out", str(tmp_path / "v.json"), "--out", str(tmp_path / "t.csv")]) == 0
    verdict = json.loads((tmp_path / "v.json").read_text())
    assert set(verdict) == {"verdict_fro", "verdict_perp", "certified"}
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 4
    assert main(["certify", str(fpath)]) == 2
