"""Command-line entry point ``mclab``.

Exit status: 0 on success, 2 on invalid input or configuration, 3 on
numeric failure.
"""

import argparse
import json
import sys


from . import io as mio
from .certificate import build_certificate, optimality_check
from .errors import ConfigError, InvalidArgument, NumericFailure
from .experiments import (
    bound_reports_csv, parse_config, phase_points_csv, phase_trials_csv, run_phase_trials,
    run_verify_suite, summarize_phase,
)
from .model import LowRankFactorization, coherence, coherence_profile
from .sampling import SAMPLING_MODELS, WITH_REPLACE, partition, sample, sample_size_threshold
from .solver import solve_nuclear_min


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_factorization(path, rank):
    with open(path) as fh:
        text = fh.read()
    if len(text.split("\n", 1)[0][1:].split()) >= 3:
        return mio.parse_factorization(text)
    if rank is None:
        raise InvalidArgument("a plain matrix file needs --rank")
    return LowRankFactorization.from_matrix(mio.parse_matrix(text), rank)


def cmd_analyze(args):
    f = _load_factorization(args.matrix, args.rank)
    prof = coherence_profile(f)
    out = {
        "n1": f.n1, "n2": f.n2, "r": f.r,
        "mu_U": coherence(f.U @ f.U.T), "mu_V": coherence(f.V @ f.V.T),
        "mu0": prof.mu0, "mu1": prof.mu1,
        "beta": args.beta,
        "sample_threshold": sample_size_threshold(f.n1, f.n2, f.r, prof.mu0, prof.mu1, args.beta),
    }
    _emit(json.dumps(out, indent=2) + "\n", args.out)


def cmd_sample(args):
    obs = sample(args.n1, args.n2, args.m, args.model, args.seed)
    if args.matrix:
        obs = obs.with_values(mio.read_matrix(args.matrix))
    _emit(mio.format_observations(obs), args.out)


def cmd_solve(args):
    obs = mio.read_observations(args.observations)
    res = solve_nuclear_min(obs)
    if args.out:
        mio.write_matrix(args.out, res.X)
    print(json.dumps(res.summary()))


def cmd_certify(args):
    f = _load_factorization(args.factorization, args.rank)
    if args.observations:
        obs = mio.read_observations(args.observations)
    else:
        if args.m is None:
            raise InvalidArgument("give --m or --observations")
        obs = sample(f.n1, f.n2, args.m, WITH_REPLACE, args.seed)
    trace = build_certificate(f, partition(obs, args.blocks))
    report = optimality_check(f, obs, trace, args.beta)
    lines = ["k,q_k,w_fro,w_inf,step_deviation"]
    lines += [f"{r['k']},{r['q_k']},{r['w_fro']!r},{r['w_inf']!r},{r['step_deviation']!r}"
              for r in trace.rows()]
    _emit("\n".join(lines) + "\n", args.out)
    verdict = {"verdict_fro": trace.verdict_fro, "verdict_perp": trace.verdict_perp,
               "certified": report.certified}
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(verdict, fh)
    print(json.dumps(verdict))


def _apply_overrides(cfg, args):
    for key in ("seed", "trials", "beta"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    if args.out is not None:
        cfg.output_path = args.out
    if cfg.trials < 1:
        raise ConfigError("trials must be at least 1")
    if not cfg.beta > 1:
        raise ConfigError("beta must exceed 1")
    return cfg


def cmd_phase(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    rows = run_phase_trials(cfg)
    points = summarize_phase(rows, cfg.trials)
    _emit(phase_points_csv(points, cfg), cfg.output_path)
    if args.trials_out:
        with open(args.trials_out, "w") as fh:
            fh.write(phase_trials_csv(rows, cfg))


def cmd_verify_bounds(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    reports = run_verify_suite(cfg)
    _emit(bound_reports_csv(reports, cfg), cfg.output_path)
    if not all(r.passed for r in reports):
        return 1
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mclab", description="Matrix completion laboratory.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="coherence profile of a matrix or factorization file")
    a.add_argument("matrix")
    a.add_argument("--rank", type=int)
    a.add_argument("--beta", type=float, default=2.0)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sample", help="draw an observation set")
    s.add_argument("--n1", type=int, required=True)
    s.add_argument("--n2", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--model", choices=SAMPLING_MODELS, default=WITH_REPLACE)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--matrix", help="matrix file to read observed values from")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("solve", help="nuclear-norm completion of an observation file")
    v.add_argument("observations")
    v.add_argument("--out")
    v.set_defaults(func=cmd_solve)

    c = sub.add_parser("certify", help="build a golfing certificate")
    c.add_argument("factorization")
    c.add_argument("--rank", type=int)
    c.add_argument("--observations")
    c.add_argument("--m", type=int)
    c.add_argument("--blocks", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--beta", type=float, default=2.0)
    c.add_argument("--out")
    c.add_argument("--json-out")
    c.set_defaults(func=cmd_certify)

    for name, func, helptext in (("phase", cmd_phase, "recovery phase sweep"),
                                 ("verify-bounds", cmd_verify_bounds, "Monte-Carlo bound suite")):
        e = sub.add_parser(name, help=helptext)
        e.add_argument("config")
        e.add_argument("--seed", type=int)
        e.add_argument("--trials", type=int)
        e.add_argument("--beta", type=float)
        e.add_argument("--out")
        if name == "phase":
            e.add_argument("--trials-out")
        e.set_defaults(func=func)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2
    except (InvalidArgument, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
