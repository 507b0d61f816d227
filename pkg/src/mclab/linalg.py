"""Small dense linear-algebra kernels used across modules."""

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import NumericFailure


def spectral_norm(X):
    """Largest singular value (dense SVD)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.size == 0:
        return 0.0
    return float(np.linalg.norm(X, 2))


def nuclear_norm(X):
    return float(np.sum(np.linalg.svd(np.asarray(X, dtype=float), compute_uv=False)))


def inf_norm(X):
    """Largest absolute entry."""
    X = np.asarray(X, dtype=float)
    return float(np.max(np.abs(X))) if X.size else 0.0


def sym_expm(A):
    """Matrix exponential of a symmetric matrix via eigendecomposition."""
    w, Q = np.linalg.eigh(A)
    return (Q * np.exp(w)) @ Q.T


def sym_operator_norm(apply, shape, x0=None, tol=1e-8, maxiter=10000):
    """Spectral norm of a self-adjoint linear map on ``shape``-matrices.

    The map is never materialized; Lanczos (ARPACK) is run on the
    vectorized action.  ``apply`` must be self-adjoint with respect to the
    Frobenius inner product.

    Raises
    ------
    NumericFailure
        If the iteration cap is reached.  ``last_estimate`` carries the best
        Ritz value found, if any.
    """
    n = int(np.prod(shape))
    if n == 1:
        return float(abs(np.asarray(apply(np.ones(shape)))).ravel()[0])

    def matvec(v):
        return np.asarray(apply(v.reshape(shape)), dtype=float).ravel()

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    if x0 is None:
        x0 = np.random.default_rng(0).standard_normal(n)
    else:
        x0 = np.asarray(x0, dtype=float).ravel()
    if not np.any(x0) or not np.any(matvec(x0)):
        return 0.0
    if n <= 2:
        # ARPACK needs k < n - 1; materialize the tiny operator instead
        dense = np.column_stack([matvec(e) for e in np.eye(n)])
        return float(np.max(np.abs(np.linalg.eigvalsh((dense + dense.T) / 2))))
    try:
        vals = eigsh(op, k=1, which="LM", v0=x0, tol=tol, maxiter=maxiter,
                     return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        last = float(np.max(np.abs(exc.eigenvalues))) if len(exc.eigenvalues) else None
        raise NumericFailure(
            f"operator norm did not converge within {maxiter} iterations",
            last_estimate=last,
        ) from exc
    return float(abs(vals[0]))
