"""Nuclear-norm minimization subject to agreement on observed entries.

The solver is an alternating-direction splitting of

    minimize ||X||_*   subject to   X_ab = M_ab  for (a, b) in Omega

into a singular-value shrinkage step and a step that re-imposes the
observed entries exactly.  The scaled multiplier lives on Omega only.
Repeated observations of one cell collapse to a single constraint.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .linalg import nuclear_norm, spectral_norm

DEFAULT_TOL = 1e-7
DEFAULT_MAXITER = 5000
RECOVERY_TOL = 1e-4


@dataclass(frozen=True)
class SolverParams:
    tol: float = DEFAULT_TOL
    maxiter: int = DEFAULT_MAXITER
    # shrinkage threshold as a fraction of the top singular value of the
    # zero-filled observation matrix
    threshold_ratio: float = 0.5


@dataclass(frozen=True)
class SolverResult:
    X: np.ndarray
    iterations: int
    residual: float
    objective: float
    converged: bool

    def summary(self):
        return {
            "iterations": self.iterations,
            "residual": self.residual,
            "objective": self.objective,
            "converged": self.converged,
        }


def sv_soft_threshold(Z, tau):
    """Proximal map of ``tau ||.||_*``: shrink every singular value by ``tau``."""
    if tau < 0:
        raise InvalidArgument("threshold must be nonnegative")
    Z = np.asarray(Z, dtype=float)
    if tau == 0:
        return Z.copy()
    u, s, vt = np.linalg.svd(Z, full_matrices=False)
    # shrinkage below a few ulps of the top singular value counts as zero, so
    # tau equal to a singular value computed by another LAPACK path still kills it
    s = s - tau
    s[s <= 8 * np.finfo(float).eps * (s[0] + tau)] = 0.0
    k = np.count_nonzero(s)
    return (u[:, :k] * s[:k]) @ vt[:k]


def solve_nuclear_min(obs, n1=None, n2=None, params=None):
    """Complete the matrix observed in ``obs``.

    Parameters
    ----------
    obs : ObservationSet
        Must carry values.
    n1, n2 : int, optional
        Checked against ``obs`` when given.
    params : SolverParams, optional

    Returns
    -------
    SolverResult
        ``X`` always agrees with every observation, converged or not.
    """
    params = params or SolverParams()
    if obs.m < 1:
        raise InvalidArgument("need at least one observation")
    if (n1 is not None and n1 != obs.n1) or (n2 is not None and n2 != obs.n2):
        raise InvalidArgument("dimensions disagree with the observation set")
    vals = obs.cell_values()
    rows, cols = obs.rows, obs.cols

    Z = np.zeros(obs.shape)
    Z[rows, cols] = vals
    if len(rows) == obs.n1 * obs.n2:
        return SolverResult(Z, 1, 0.0, nuclear_norm(Z), True)
    top = spectral_norm(Z)
    if top == 0:
        return SolverResult(Z, 1, 0.0, 0.0, True)

    tau = params.threshold_ratio * top
    lam = np.zeros_like(Z)  # scaled multiplier, supported on Omega
    residual = np.inf
    for it in range(1, params.maxiter + 1):
        X = sv_soft_threshold(Z - lam, tau)
        Z_new = X + lam
        Z_new[rows, cols] = vals
        lam += X - Z_new
        scale = max(np.linalg.norm(Z_new), 1e-300)
        change = np.linalg.norm(Z_new - Z) / scale
        gap = np.linalg.norm(X - Z_new) / scale
        Z = Z_new
        residual = max(change, gap)
        if residual < params.tol:
            return SolverResult(Z, it, float(residual), nuclear_norm(Z), True)
    return SolverResult(Z, params.maxiter, float(residual), nuclear_norm(Z), False)


def recovery_verdict(X, f, tol=RECOVERY_TOL):
    """True iff ``||X - M||_F <= tol ||M||_F``."""
    M = f.M if hasattr(f, "M") else np.asarray(f, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.shape != M.shape:
        raise InvalidArgument(f"shape mismatch {X.shape} vs {M.shape}")
    return bool(np.linalg.norm(X - M) <= tol * np.linalg.norm(M))
