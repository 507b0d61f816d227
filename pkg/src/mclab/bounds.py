"""Concentration bounds and the random quantities they control.

Formula evaluators are pure functions.  Each ``*_bound`` helper returns the
deviation level a theorem guarantees; the matching ``*_deviation`` function
computes the realized quantity for one observation set, so Monte-Carlo
drivers (see :mod:`mclab.verify`) can compare the two.
"""

from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError, EnsembleContractViolation, InvalidArgument
from .linalg import inf_norm, spectral_norm, sym_expm, sym_operator_norm
from .model import project_T, project_T_perp
from .rng import as_generator
from .sampling import apply_R_omega

PSD_EVENT_TOL = 1e-12
SYM_TOL = 1e-10


@dataclass
class BoundReport:
    """Theoretical tail versus Monte-Carlo exceedance for one inequality.

    ``theoretical_tail`` is clamped to [0, 1]; ``raw_tail`` keeps the
    unclamped formula value.
    """

    bound_name: str
    theoretical_tail: float
    theoretical_threshold: float
    empirical_exceed_frequency: float
    trials: int
    raw_tail: float = None
    params: dict = field(default_factory=dict)
    extra_ok: bool = True

    def __post_init__(self):
        if self.raw_tail is None:
            self.raw_tail = self.theoretical_tail
        self.theoretical_tail = min(1.0, max(0.0, float(self.theoretical_tail)))

    @property
    def stderr(self):
        f = self.empirical_exceed_frequency
        return math.sqrt(f * (1 - f) / self.trials) if self.trials else float("nan")

    @property
    def passed(self):
        """One-sided check: empirical tail within 3 standard errors of the bound."""
        return self.extra_ok and (
            self.empirical_exceed_frequency <= self.theoretical_tail + 3 * self.stderr
        )

    @property
    def verdict(self):
        return "PASS" if self.passed else "FAIL"


# -- Bernstein ---------------------------------------------------------------

def bernstein_tail(d1, d2, rho_sq_sum, M, tau, clamp=True):
    """Matrix Bernstein tail ``(d1+d2) exp(-(tau^2/2) / (sum rho^2 + M tau/3))``."""
    if d1 < 1 or d2 < 1 or rho_sq_sum <= 0 or M <= 0 or tau < 0:
        raise InvalidArgument("dimensions must be >= 1, variance and M positive, tau >= 0")
    val = (d1 + d2) * math.exp(-(tau * tau / 2) / (rho_sq_sum + M * tau / 3))
    return min(1.0, val) if clamp else val


def bernstein_condensed(d1, d2, rho_sq_sum, M, tau, clamp=False):
    """Simplified tail ``(d1+d2) exp(-(3/8) tau^2 / sum rho^2)``.

    Only an upper bound for :func:`bernstein_tail` when
    ``tau <= rho_sq_sum / M``; outside that range :class:`DomainError`.
    """
    if d1 < 1 or d2 < 1 or rho_sq_sum <= 0 or M <= 0 or tau < 0:
        raise InvalidArgument("dimensions must be >= 1, variance and M positive, tau >= 0")
    if tau > rho_sq_sum / M:
        raise DomainError(f"tau={tau} exceeds the validity limit sum(rho^2)/M={rho_sq_sum / M}")
    val = (d1 + d2) * math.exp(-0.375 * tau * tau / rho_sq_sum)
    return min(1.0, val) if clamp else val


def hermitian_dilation(X):
    """Symmetric embedding ``[[0, X], [X^T, 0]]``; its eigenvalues are
    ``+-sigma_i(X)`` padded with ``|d1 - d2|`` zeros."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d1, d2 = X.shape
    out = np.zeros((d1 + d2, d1 + d2))
    out[:d1, d1:] = X
    out[d1:, :d1] = X.T
    return out


# -- Operator Markov, Golden-Thompson, Chernoff -------------------------------

def operator_markov_check(sampler, A, trials, seed=0):
    """Monte-Carlo check of ``P[X not<= A] <= Tr(E[X] A^-1)``.

    Parameters
    ----------
    sampler : callable
        ``sampler(rng) -> (d, d)`` positive semidefinite matrix.
    A : (d, d) array
        Positive definite threshold.
    trials : int
    seed : int

    Returns
    -------
    BoundReport
        ``raw_tail`` is the trace bound evaluated with the empirical mean.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if np.linalg.eigvalsh(A).min() <= 0:
        raise InvalidArgument("A must be positive definite")
    rng = as_generator(seed)
    Ainv = np.linalg.inv(A)
    total = np.zeros_like(A)
    exceed = 0
    for _ in range(int(trials)):
        X = np.atleast_2d(np.asarray(sampler(rng), dtype=float))
        lam = np.linalg.eigvalsh((X + X.T) / 2)
        if lam.min() < -1e-10 * max(1.0, abs(lam).max()):
            raise EnsembleContractViolation(f"sampler returned a non-PSD matrix (min eig {lam.min():.3e})")
        total += X
        if np.linalg.eigvalsh(A - X).min() < -PSD_EVENT_TOL:
            exceed += 1
    mean = total / trials
    bound = float(np.trace(mean @ Ainv))
    return BoundReport("operator_markov", bound, bound, exceed / trials, int(trials),
                       raw_tail=bound, params={"d": A.shape[0]})


class TracePair(NamedTuple):
    lhs: float
    rhs: float

    @property
    def holds(self):
        return self.lhs <= self.rhs + 1e-9 * abs(self.rhs)


def _check_symmetric(A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1] or np.linalg.norm(A - A.T) > SYM_TOL:
        raise InvalidArgument("matrix is not symmetric")
    return (A + A.T) / 2


def golden_thompson_check(A, B):
    """``(Tr exp(A+B), Tr(exp A exp B))`` for symmetric ``A``, ``B``."""
    A, B = _check_symmetric(A), _check_symmetric(B)
    if A.shape != B.shape:
        raise InvalidArgument("A and B must have the same shape")
    lhs = float(np.trace(sym_expm(A + B)))
    rhs = float(np.trace(sym_expm(A) @ sym_expm(B)))
    return TracePair(lhs, rhs)


def chernoff_operator_bound(d, per_term_norms):
    """``d * prod ||E exp(T X_k T^T - T A T^T)||``."""
    norms = np.asarray(per_term_norms, dtype=float)
    if np.any(norms < 0):
        raise InvalidArgument("norms must be nonnegative")
    return float(d * np.prod(norms))


def chernoff_factor(samples, A, T):
    """Spectral norm of the empirical mean of ``exp(T X T^T - T A T^T)``.

    ``samples`` is a sequence of symmetric ``d x d`` matrices drawn from
    the ensemble of one term.
    """
    A = _check_symmetric(A)
    T = np.atleast_2d(np.asarray(T, dtype=float))
    TAT = T @ A @ T.T
    acc = np.zeros_like(A)
    n = 0
    for X in samples:
        X = _check_symmetric(X)
        acc += sym_expm(T @ X @ T.T - TAT)
        n += 1
    return spectral_norm(acc / n)


# -- Sampling-operator deviations -------------------------------------------------

def near_isometry_bound(n1, n2, r, mu0, beta, m):
    """Deviation level ``sqrt(16 mu0 r (n1+n2) beta log(n2) / (3 m))``."""
    return math.sqrt(16 * mu0 * r * (n1 + n2) * beta * math.log(n2) / (3 * m))


def near_isometry_min_m(n1, n2, r, mu0, beta):
    """Smallest integer ``m`` strictly above ``(16/3) mu0 r (n1+n2) beta log(n2)``."""
    return math.floor(16 / 3 * mu0 * r * (n1 + n2) * beta * math.log(n2)) + 1


def superop_deviation_norm(ts, obs, tol=1e-8, maxiter=10000):
    """Spectral norm of ``Z -> (n1 n2/m) P_T R_Omega P_T(Z) - P_T(Z)``.

    Computed matrix-free by Lanczos on the vectorized action.
    """
    if ts.shape != obs.shape:
        raise InvalidArgument("tangent space and observations disagree on shape")
    n1, n2 = obs.shape
    scale = n1 * n2 / obs.m

    def op(Z):
        PZ = project_T(ts, Z)
        return scale * project_T(ts, apply_R_omega(obs, PZ)) - PZ

    x0 = np.random.default_rng(12345).standard_normal(obs.shape)
    return sym_operator_norm(op, obs.shape, x0=x0, tol=tol, maxiter=maxiter)


def inf_norm_bound(n1, n2, beta, m):
    """``sqrt(8 beta n1 n2^2 log(n1+n2) / (3 m))``; multiply by ``||Z||_inf``."""
    return math.sqrt(8 * beta * n1 * n2 ** 2 * math.log(n1 + n2) / (3 * m))


def inf_norm_min_m(n1, n2, beta):
    return math.floor(6 * beta * n1 * math.log(n1 + n2)) + 1


def inf_norm_deviation(obs, Z):
    """Spectral norm of ``(n1 n2/m) R_Omega(Z) - Z``."""
    Z = np.asarray(Z, dtype=float)
    n1, n2 = obs.shape
    return spectral_norm(n1 * n2 / obs.m * apply_R_omega(obs, Z) - Z)


def contraction_bound(n1, n2, r, mu0, beta, m):
    """``sqrt(8 beta mu0 r (n1+n2) log(n2) / (3 m))``; multiply by ``||Z||_inf``."""
    return math.sqrt(8 * beta * mu0 * r * (n1 + n2) * math.log(n2) / (3 * m))


def contraction_min_m(n1, n2, r, mu0, beta):
    return math.floor(8 / 3 * beta * mu0 * r * (n1 + n2) * math.log(n2)) + 1


def pt_romega_inf_deviation(ts, obs, Z):
    """``||(n1 n2/m) P_T R_Omega(Z) - Z||_inf`` for ``Z`` in ``T``."""
    Z = np.asarray(Z, dtype=float)
    if np.linalg.norm(project_T_perp(ts, Z)) > 1e-8 * np.linalg.norm(Z):
        raise InvalidArgument("Z does not lie in the tangent space")
    n1, n2 = obs.shape
    return inf_norm(n1 * n2 / obs.m * project_T(ts, apply_R_omega(obs, Z)) - Z)


def spectral_vs_inf_bound_check(Z):
    """``(||Z||, sqrt(n1 n2) ||Z||_inf)``; the first never exceeds the second."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    n1, n2 = Z.shape
    return TracePair(spectral_norm(Z), math.sqrt(n1 * n2) * inf_norm(Z))
