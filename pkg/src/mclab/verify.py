"""Monte-Carlo verification of the concentration bounds.

Trial ``t`` of a check draws all of its randomness from
``stream(seed, 0, t)``; fixed objects shared by all trials (the low-rank
instance ``Z`` or ``T`` is built from) come from ``stream(seed, 1)``.
Counts are order independent, so results do not depend on ``workers``.
"""

from concurrent.futures import ProcessPoolExecutor
from functools import partial
import math

import numpy as np

from . import bounds
from .bounds import BoundReport
from .model import TangentSpace, coherence_profile, make_random_low_rank
from .rng import stream
from .sampling import duplicate_bound, max_multiplicity, sample_with_replacement


def run_trials(fn, seed, trials, workers=1):
    """Evaluate ``fn(stream(seed, 0, t))`` for ``t < trials``, in trial order."""
    gens = (stream(seed, 0, t) for t in range(trials))
    if workers <= 1:
        return [fn(g) for g in gens]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, gens, chunksize=max(1, trials // (4 * workers))))


def _instance(n1, n2, r, seed, model="haar"):
    f = make_random_low_rank(n1, n2, r, model, stream(seed, 1))
    return f, TangentSpace.from_factorization(f), coherence_profile(f)


# -- sampling-operator checks -------------------------------------------------

def _dup_trial(n1, n2, m, level, rng):
    return max_multiplicity(sample_with_replacement(n1, n2, m, rng)) >= level


def check_duplicate_count(n1=30, n2=30, m=900, beta=2.0, trials=1000, seed=0, workers=1):
    """Frequency of some cell repeating at least ``(8/3) beta log n2`` times."""
    level, tail = duplicate_bound(n2, beta)
    hits = run_trials(partial(_dup_trial, n1, n2, m, level), seed, trials, workers)
    return BoundReport("duplicate_count", tail, level, float(np.mean(hits)), trials,
                       params={"n1": n1, "n2": n2, "m": m, "beta": beta})


def _iso_trial(ts, n1, n2, m, level, rng):
    return bounds.superop_deviation_norm(ts, sample_with_replacement(n1, n2, m, rng)) > level


def check_near_isometry(n1=20, n2=20, r=2, beta=2.0, trials=1000, seed=0, workers=1, m=None):
    """Deviation of ``(n1 n2/m) P_T R P_T`` from ``P_T`` versus its bound.

    ``m`` defaults to the smallest sample size the bound allows.
    """
    f, ts, prof = _instance(n1, n2, r, seed)
    if m is None:
        m = bounds.near_isometry_min_m(n1, n2, r, prof.mu0, beta)
    level = bounds.near_isometry_bound(n1, n2, r, prof.mu0, beta, m)
    tail = 2 * float(n2) ** (2 - 2 * beta)
    hits = run_trials(partial(_iso_trial, ts, n1, n2, m, level), seed, trials, workers)
    return BoundReport("near_isometry", tail, level, float(np.mean(hits)), trials,
                       params={"n1": n1, "n2": n2, "r": r, "m": m, "beta": beta,
                               "mu0": round(prof.mu0, 6)})


def _inf_trial(Z, n1, n2, m, level, rng):
    return bounds.inf_norm_deviation(sample_with_replacement(n1, n2, m, rng), Z) > level


def check_inf_norm(n1=20, n2=20, r=2, beta=2.0, trials=1000, seed=0, workers=1, m=None):
    """Spectral deviation of ``(n1 n2/m) R(Z)`` from ``Z = U V^T``."""
    f, ts, prof = _instance(n1, n2, r, seed)
    Z = f.UV
    if m is None:
        m = bounds.inf_norm_min_m(n1, n2, beta)
    level = bounds.inf_norm_bound(n1, n2, beta, m) * np.max(np.abs(Z))
    tail = float(n1 + n2) ** (1 - beta)
    hits = run_trials(partial(_inf_trial, Z, n1, n2, m, level), seed, trials, workers)
    return BoundReport("inf_norm_deviation", tail, level, float(np.mean(hits)), trials,
                       params={"n1": n1, "n2": n2, "r": r, "m": m, "beta": beta})


def _contraction_trial(ts, Z, n1, n2, m, level, rng):
    obs = sample_with_replacement(n1, n2, m, rng)
    return bounds.pt_romega_inf_deviation(ts, obs, Z) > level


def check_norm_contraction(n1=20, n2=20, r=2, beta=3.0, trials=1000, seed=0, workers=1, m=None):
    """Entrywise deviation of ``(n1 n2/m) P_T R(Z)`` from ``Z = U V^T``.

    The lemma needs ``beta > 2``; ``params["regime"]`` records whether the
    run is inside that hypothesis.
    """
    f, ts, prof = _instance(n1, n2, r, seed)
    Z = f.UV
    if m is None:
        m = bounds.contraction_min_m(n1, n2, r, prof.mu0, beta)
    level = bounds.contraction_bound(n1, n2, r, prof.mu0, beta, m) * np.max(np.abs(Z))
    tail = 2 * float(n2) ** (2 - beta)
    hits = run_trials(partial(_contraction_trial, ts, Z, n1, n2, m, level), seed, trials, workers)
    return BoundReport("norm_contraction", tail, level, float(np.mean(hits)), trials,
                       params={"n1": n1, "n2": n2, "r": r, "m": m, "beta": beta,
                               "mu0": round(prof.mu0, 6),
                               "regime": "beta>2" if beta > 2 else "outside-hypothesis"})


# -- appendix chain -----------------------------------------------------------------

def _wishart(d, rng):
    G = rng.standard_normal((d, d))
    return G @ G.T / d


def check_operator_markov(d=3, level=4.0, trials=10000, seed=0):
    """Operator Markov bound for a normalized Wishart ensemble against ``level * I``."""
    rep = bounds.operator_markov_check(partial(_wishart, d), level * np.eye(d), trials,
                                       stream(seed, 0))
    rep.params.update({"ensemble": "wishart", "level": level})
    return rep


def check_golden_thompson(d=4, pairs=1000, seed=0):
    """Fraction of random symmetric pairs that violate Golden-Thompson (expected 0)."""
    bad = 0
    for t in range(pairs):
        rng = stream(seed, 0, t)
        A = rng.standard_normal((d, d))
        B = rng.standard_normal((d, d))
        if not bounds.golden_thompson_check(A + A.T, B + B.T).holds:
            bad += 1
    return BoundReport("golden_thompson", 0.0, 0.0, bad / pairs, pairs, params={"d": d})


def scalar_bernstein(variance_sum, M, tau):
    """Classical two-sided Bernstein bound for sums of bounded scalars."""
    return 2.0 * math.exp(-0.5 * tau ** 2 / (variance_sum + M * tau / 3.0))


def check_bernstein_scalar(L=50, trials=10000, seed=0):
    """Bernstein at ``d1 = d2 = 1`` on a weighted Rademacher sum.

    ``extra_ok`` additionally requires the matrix formula to agree with the
    scalar one to 1e-12 on a 100-point grid.
    """
    weights = np.linspace(0.2, 1.0, L)
    rho = float(np.sum(weights ** 2))
    M = float(weights.max())
    tau = 2.5 * math.sqrt(rho)
    signs = stream(seed, 0).choice([-1.0, 1.0], size=(trials, L))
    freq = float(np.mean(np.abs(signs @ weights) > tau))
    grid_err = 0.0
    for v in np.linspace(0.5, 5.0, 10):
        for t in np.linspace(0.0, 6.0, 10):
            grid_err = max(grid_err, abs(bounds.bernstein_tail(1, 1, v, 1.0, t, clamp=False)
                                         - scalar_bernstein(v, 1.0, t)))
    raw = bounds.bernstein_tail(1, 1, rho, M, tau, clamp=False)
    return BoundReport("bernstein_scalar", raw, tau, freq, trials, raw_tail=raw,
                       params={"L": L, "formula_max_abs_diff": grid_err},
                       extra_ok=grid_err <= 1e-12)


def check_bernstein_matrix(d1=4, d2=6, L=200, trials=2000, seed=0):
    """Matrix Bernstein for ``sum eps_k B_k`` with fixed ``B_k`` and Rademacher ``eps_k``."""
    B = stream(seed, 1).standard_normal((L, d1, d2)) / math.sqrt(d1 * d2)
    M = max(np.linalg.norm(b, 2) for b in B)
    rho = max(np.linalg.norm(np.einsum("kij,klj->il", B, B), 2),
              np.linalg.norm(np.einsum("kji,kjl->il", B, B), 2))
    tau = 3.0 * math.sqrt(rho)
    signs = stream(seed, 0).choice([-1.0, 1.0], size=(trials, L))
    sums = np.einsum("tk,kij->tij", signs, B)
    norms = np.linalg.norm(sums, ord=2, axis=(1, 2))
    raw = bounds.bernstein_tail(d1, d2, rho, M, tau, clamp=False)
    return BoundReport("bernstein_matrix", raw, tau, float(np.mean(norms > tau)), trials,
                       raw_tail=raw, params={"d1": d1, "d2": d2, "L": L})


def default_suite(n1=20, n2=20, r=2, beta=2.0, trials=1000, seed=0, workers=1):
    """Every bound check at the given size; returns a list of reports.

    The norm-contraction lemma is run at ``max(beta, 3)`` since it needs
    ``beta > 2``.
    """
    dup_n2 = max(n2, 9)
    return [
        check_duplicate_count(n1, dup_n2, n1 * dup_n2, beta, trials, seed, workers),
        check_near_isometry(n1, n2, r, beta, trials, seed, workers),
        check_inf_norm(n1, n2, r, beta, trials, seed, workers),
        check_norm_contraction(n1, n2, r, max(beta, 3.0), trials, seed, workers),
        check_operator_markov(trials=max(trials, 1000), seed=seed),
        check_golden_thompson(pairs=trials, seed=seed),
        check_bernstein_scalar(trials=max(trials, 1000), seed=seed),
        check_bernstein_matrix(trials=trials, seed=seed),
    ]
