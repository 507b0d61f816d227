"""Config-driven experiments: recovery phase sweeps and the bound suite.

Configs are JSON objects with a fixed set of keys; unknown keys are
rejected and every violation is reported at once.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
import hashlib
import io
import json
import math
from functools import partial

import numpy as np

from .certificate import build_certificate, optimality_check
from .errors import ConfigError
from .model import MATRIX_MODELS, make_random_low_rank
from .rng import stream
from .sampling import SAMPLING_MODELS, WITH_REPLACE, partition, sample
from .solver import RECOVERY_TOL, recovery_verdict, solve_nuclear_min
from .verify import default_suite

DEFAULT_TOLERANCES = {"recovery": RECOVERY_TOL, "solver": 1e-7}


@dataclass
class ExperimentConfig:
    n1: int
    n2: int
    r: int
    m_grid: list
    matrix_model: str = "haar"
    sampling_model: str = "uniform-no-replace"
    beta: float = 2.0
    trials: int = 100
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_path: str = None
    certify: bool = False
    blocks: int = 5
    workers: int = 1

    def config_hash(self):
        payload = asdict(self)
        payload.pop("output_path")
        payload.pop("workers")
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


_FIELDS = {
    "n1", "n2", "r", "m_grid", "p_grid", "matrix_model", "sampling_model", "beta",
    "trials", "seed", "tolerances", "output_path", "certify", "blocks", "workers",
}


def expand_grid(spec):
    """Expand ``"start:stop:step"`` (inclusive) or pass a list through."""
    if isinstance(spec, str):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid string must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + k * step for k in range(max(n, 0))]
        if all(float(v).is_integer() for v in (start, stop, step)):
            return [int(round(v)) for v in vals]
        return [round(v, 12) for v in vals]
    if isinstance(spec, (list, tuple)):
        return list(spec)
    raise ValueError(f"grid must be a list or a start:stop:step string, got {type(spec).__name__}")


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def config_from_dict(raw):
    """Validate a config mapping; raises :class:`ConfigError` listing all problems."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in sorted(set(raw) - _FIELDS):
        errors.append(f"unknown key {key!r}")
    for key in ("n1", "n2", "r"):
        if key not in raw:
            errors.append(f"missing required field {key!r}")
        elif not _is_int(raw[key]) or raw[key] < 1:
            errors.append(f"{key} must be a positive integer, got {raw[key]!r}")
    if not errors and not raw["r"] <= raw["n1"] <= raw["n2"]:
        errors.append("need r <= n1 <= n2")

    grid = None
    if ("m_grid" in raw) == ("p_grid" in raw):
        errors.append("give exactly one of 'm_grid' or 'p_grid'")
    else:
        key = "m_grid" if "m_grid" in raw else "p_grid"
        try:
            grid = expand_grid(raw[key])
        except ValueError as exc:
            errors.append(f"{key}: {exc}")
        if grid is not None and not grid:
            errors.append(f"{key} must be nonempty")
        elif grid is not None and key == "p_grid":
            if any(not isinstance(p, (int, float)) or not 0 < p <= 1 for p in grid):
                errors.append("p_grid values must lie in (0, 1]")
            elif not errors:
                grid = [max(1, int(round(p * raw["n1"] * raw["n2"]))) for p in grid]
        elif grid is not None:
            if any(not _is_int(m) or m < 1 for m in grid):
                errors.append("m_grid values must be positive integers")

    opts = {}
    if "matrix_model" in raw and raw["matrix_model"] not in MATRIX_MODELS:
        errors.append(f"matrix_model must be one of {MATRIX_MODELS}")
    if "sampling_model" in raw and raw["sampling_model"] not in SAMPLING_MODELS:
        errors.append(f"sampling_model must be one of {SAMPLING_MODELS}")
    if "beta" in raw and (not isinstance(raw["beta"], (int, float)) or not raw["beta"] > 1):
        errors.append("beta must be a number greater than 1")
    for key in ("trials", "blocks", "workers"):
        if key in raw and (not _is_int(raw[key]) or raw[key] < 1):
            errors.append(f"{key} must be a positive integer")
    if "seed" in raw and (not _is_int(raw["seed"]) or raw["seed"] < 0):
        errors.append("seed must be a nonnegative integer")
    if "certify" in raw and not isinstance(raw["certify"], bool):
        errors.append("certify must be true or false")
    tols = dict(DEFAULT_TOLERANCES)
    if "tolerances" in raw:
        if not isinstance(raw["tolerances"], dict):
            errors.append("tolerances must be an object")
        else:
            for k, v in raw["tolerances"].items():
                if k not in DEFAULT_TOLERANCES:
                    errors.append(f"unknown tolerance {k!r}")
                elif not isinstance(v, (int, float)) or not v > 0:
                    errors.append(f"tolerance {k!r} must be positive")
                else:
                    tols[k] = float(v)
    if raw.get("certify") and raw.get("sampling_model", "uniform-no-replace") != WITH_REPLACE:
        errors.append("certify requires sampling_model 'with-replace'")
    if (grid and not errors and raw.get("sampling_model", "uniform-no-replace") != WITH_REPLACE
            and max(grid) > raw["n1"] * raw["n2"]):
        errors.append("grid values exceed n1*n2 for a sampling model without replacement")
    if errors:
        raise ConfigError(errors)

    for key in ("matrix_model", "sampling_model", "trials", "seed", "output_path",
                "certify", "blocks", "workers"):
        if key in raw:
            opts[key] = raw[key]
    if "beta" in raw:
        opts["beta"] = float(raw["beta"])
    return ExperimentConfig(n1=raw["n1"], n2=raw["n2"], r=raw["r"], m_grid=grid,
                            tolerances=tols, **opts)


def parse_config(path):
    """Read and validate a JSON config file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return config_from_dict(raw)


@dataclass(frozen=True)
class PhasePoint:
    m: int
    success_rate: float
    cert_rate: float
    mean_error: float
    trials: int

    @property
    def stderr(self):
        p = self.success_rate
        return math.sqrt(p * (1 - p) / self.trials)


def _phase_trial(cfg, trial, m):
    """One (trial, m) cell.  The matrix depends on the trial only and the
    sample stream on the trial only, so samples are nested across ``m`` for
    the uniform model."""
    f = make_random_low_rank(cfg.n1, cfg.n2, cfg.r, cfg.matrix_model, stream(cfg.seed, trial, 0))
    obs = sample(cfg.n1, cfg.n2, m, cfg.sampling_model, stream(cfg.seed, trial, 1))
    obs = obs.with_values(f.M)
    res = solve_nuclear_min(obs)
    err = float(np.linalg.norm(res.X - f.M) / np.linalg.norm(f.M))
    ok = recovery_verdict(res.X, f, cfg.tolerances["recovery"])
    cert = None
    if cfg.certify:
        blocks = min(cfg.blocks, obs.m)
        trace = build_certificate(f, partition(obs, blocks), isometry=False)
        cert = optimality_check(f, obs, trace, cfg.beta).certified
    return {"m": m, "trial": trial, "seed": cfg.seed, "error": err, "success": ok,
            "certified": cert, "converged": res.converged, "iterations": res.iterations}


def _phase_job(cfg, job):
    return _phase_trial(cfg, *job)


def run_phase_trials(cfg):
    """All per-trial records, sorted by ``(m, trial)``."""
    jobs = [(t, m) for m in cfg.m_grid for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(partial(_phase_job, cfg), jobs))
    else:
        rows = [_phase_trial(cfg, t, m) for t, m in jobs]
    rows.sort(key=lambda r: (r["m"], r["trial"]))
    return rows


def summarize_phase(rows, trials):
    points = []
    for m in sorted({r["m"] for r in rows}):
        sub = [r for r in rows if r["m"] == m]
        certs = [r["certified"] for r in sub if r["certified"] is not None]
        points.append(PhasePoint(
            m=m,
            success_rate=float(np.mean([r["success"] for r in sub])),
            cert_rate=float(np.mean(certs)) if certs else float("nan"),
            mean_error=float(np.mean([r["error"] for r in sub])),
            trials=trials,
        ))
    return points


def run_phase_sweep(cfg):
    """Recovery (and optionally certification) rate at each grid point."""
    return summarize_phase(run_phase_trials(cfg), cfg.trials)


def run_verify_suite(cfg):
    """Every concentration-bound check at the configured size and seed."""
    return default_suite(cfg.n1, cfg.n2, cfg.r, cfg.beta, cfg.trials, cfg.seed, cfg.workers)


# -- CSV ----------------------------------------------------------------------------

def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x):
    return repr(float(x))


def phase_points_csv(points, cfg):
    h = cfg.config_hash()
    return _csv(
        ["m", "success_rate", "cert_rate", "mean_error", "trials", "stderr", "seed", "config_hash"],
        [[p.m, _num(p.success_rate), _num(p.cert_rate), _num(p.mean_error), p.trials,
          _num(p.stderr), cfg.seed, h] for p in points],
    )


def phase_trials_csv(rows, cfg):
    h = cfg.config_hash()
    return _csv(
        ["m", "trial", "seed", "config_hash", "error", "success", "certified", "converged",
         "iterations"],
        [[r["m"], r["trial"], r["seed"], h, _num(r["error"]), int(r["success"]),
          "" if r["certified"] is None else int(r["certified"]), int(r["converged"]),
          r["iterations"]] for r in rows],
    )


def bound_reports_csv(reports, cfg=None):
    h = cfg.config_hash() if cfg else ""
    seed = cfg.seed if cfg else ""
    return _csv(
        ["bound_name", "params", "theoretical", "empirical", "trials", "stderr", "verdict",
         "seed", "config_hash"],
        [[r.bound_name, json.dumps(r.params, sort_keys=True), _num(r.theoretical_tail),
          _num(r.empirical_exceed_frequency), r.trials, _num(r.stderr), r.verdict, seed, h]
         for r in reports],
    )
