"""Ground-truth low-rank matrices, coherence, and tangent-space projections.

Conventions follow the usual completion setup: ``M = U diag(S) V^T`` is
``n1 x n2`` with ``r <= n1 <= n2``.  ``T`` is the space spanned by matrices
``u y^T`` and ``x v^T`` with ``u`` in the column space and ``v`` in the row
space of ``M``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .rng import as_generator

ORTHO_TOL = 1e-10
PROJ_TOL = 1e-8

MATRIX_MODELS = ("haar", "bounded-entry", "spiky")


def _freeze(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class LowRankFactorization:
    """Thin SVD ``M = U diag(S) V^T`` of a rank-``r`` matrix."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        U, S, V = _freeze(self.U), _freeze(np.ravel(self.S)), _freeze(self.V)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "V", V)
        if U.ndim != 2 or V.ndim != 2:
            raise InvalidArgument("U and V must be 2-D")
        n1, r = U.shape
        n2, rv = V.shape
        if r < 1 or rv != r or S.shape != (r,):
            raise InvalidArgument(f"inconsistent rank: U {U.shape}, S {S.shape}, V {V.shape}")
        if not r <= n1 <= n2:
            raise InvalidArgument(f"need r <= n1 <= n2, got r={r}, n1={n1}, n2={n2}")
        eye = np.eye(r)
        if np.linalg.norm(U.T @ U - eye) > ORTHO_TOL or np.linalg.norm(V.T @ V - eye) > ORTHO_TOL:
            raise InvalidArgument("U and V must have orthonormal columns")
        if np.any(S <= 0) or np.any(np.diff(S) > 0):
            raise InvalidArgument("singular values must be positive and nonincreasing")

    @property
    def n1(self):
        return self.U.shape[0]

    @property
    def n2(self):
        return self.V.shape[0]

    @property
    def r(self):
        return self.U.shape[1]

    @property
    def M(self):
        return (self.U * self.S) @ self.V.T

    @property
    def UV(self):
        """The sign matrix ``U V^T``."""
        return self.U @ self.V.T

    @classmethod
    def from_matrix(cls, M, r, rtol=1e-10):
        """Factor a dense matrix of known rank ``r``.

        The reconstruction error of the rank-``r`` truncation must not exceed
        ``rtol`` relative to ``||M||_F``.
        """
        M = np.asarray(M, dtype=float)
        u, s, vt = np.linalg.svd(M, full_matrices=False)
        f = cls(u[:, :r], s[:r], vt[:r].T)
        err = np.linalg.norm(f.M - M)
        if err > rtol * max(np.linalg.norm(M), 1e-300):
            raise InvalidArgument(f"matrix is not rank {r} (relative residual {err:.3e})")
        return f


@dataclass(frozen=True)
class TangentSpace:
    """Projectors ``PU`` (n1 x n1) and ``PV`` (n2 x n2) that define ``T``."""

    PU: np.ndarray
    PV: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "PU", _freeze(self.PU))
        object.__setattr__(self, "PV", _freeze(self.PV))

    @classmethod
    def from_factors(cls, U, V):
        return cls(U @ U.T, V @ V.T)

    @classmethod
    def from_factorization(cls, f):
        return cls.from_factors(f.U, f.V)

    @property
    def shape(self):
        return self.PU.shape[0], self.PV.shape[0]


@dataclass(frozen=True)
class CoherenceProfile:
    mu0: float
    mu1: float


def _check_projector(P, tol=PROJ_TOL):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise InvalidArgument("projector must be square")
    if np.linalg.norm(P @ P - P) > tol or np.linalg.norm(P - P.T) > tol:
        raise InvalidArgument("input is not an orthogonal projector")
    return P


def coherence(P):
    """Coherence ``(n/r) max_i ||P e_i||^2`` of the range of projector ``P``.

    Parameters
    ----------
    P : (n, n) array
        Orthogonal projector of rank ``r >= 1``.

    Returns
    -------
    float
        A value in ``[1, n/r]``.
    """
    P = _check_projector(P)
    n = P.shape[0]
    r = int(round(np.trace(P)))
    if r < 1:
        raise InvalidArgument("projector has rank zero")
    # ||P e_i||^2 = <e_i, P e_i> = P_ii for an orthogonal projector
    return float(n / r * np.max(np.diag(P)))


def coherence_profile(f):
    """Smallest ``mu0``, ``mu1`` satisfying the two incoherence assumptions."""
    mu_u = coherence(f.U @ f.U.T)
    mu_v = coherence(f.V @ f.V.T)
    mu1 = np.max(np.abs(f.UV)) * np.sqrt(f.n1 * f.n2 / f.r)
    return CoherenceProfile(mu0=max(mu_u, mu_v), mu1=float(mu1))


def _check_shape(ts, Z):
    Z = np.asarray(Z, dtype=float)
    if Z.shape != ts.shape:
        raise InvalidArgument(f"matrix shape {Z.shape} does not match tangent space {ts.shape}")
    return Z


def project_T(ts, Z):
    Z = _check_shape(ts, Z)
    PUZ = ts.PU @ Z
    return PUZ + Z @ ts.PV - PUZ @ ts.PV


def project_T_perp(ts, Z):
    Z = _check_shape(ts, Z)
    n1, n2 = ts.shape
    return (np.eye(n1) - ts.PU) @ Z @ (np.eye(n2) - ts.PV)


def pt_basis_norm_sq(ts, a, b):
    """``||P_T(e_a e_b^T)||_F^2`` by the closed form in the leverage scores."""
    n1, n2 = ts.shape
    if not (0 <= a < n1 and 0 <= b < n2):
        raise InvalidArgument(f"index ({a}, {b}) out of range for {n1}x{n2}")
    u = ts.PU[a, a]
    v = ts.PV[b, b]
    return float(u + v - u * v)


def pt_basis_norm_sq_all(ts):
    """All values of :func:`pt_basis_norm_sq` as an ``n1 x n2`` array."""
    u = np.diag(ts.PU)[:, None]
    v = np.diag(ts.PV)[None, :]
    return u + v - u * v


def _orthonormal(X):
    q, r = np.linalg.qr(X)
    # fix the sign so the result is a function of X alone
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def make_random_low_rank(n1, n2, r, model="haar", seed=0, singular_values=None):
    """Draw a seeded rank-``r`` test matrix.

    ``haar``
        Column and row spaces orthonormalized from Gaussian matrices.
    ``bounded-entry``
        Singular vectors with every entry at most ``sqrt(2/n)`` in
        magnitude (permuted cosine basis), so both coherences are <= 2.
    ``spiky``
        The first left singular vector is ``e_1``, giving ``mu(U) = n1/r``;
        the row space is bounded-entry.  Not an incoherent model, used for
        negative tests.

    Singular values default to ``r, r-1, ..., 1``.
    """
    n1, n2, r = int(n1), int(n2), int(r)
    if not 1 <= r <= n1 <= n2:
        raise InvalidArgument(f"need 1 <= r <= n1 <= n2, got r={r}, n1={n1}, n2={n2}")
    if model not in MATRIX_MODELS:
        raise InvalidArgument(f"unknown matrix model {model!r}; choose from {MATRIX_MODELS}")
    rng = as_generator(seed)
    if model == "haar":
        U = _orthonormal(rng.standard_normal((n1, r)))
        V = _orthonormal(rng.standard_normal((n2, r)))
    elif model == "bounded-entry":
        U = _bounded_entry_basis(n1, r, rng)
        V = _bounded_entry_basis(n2, r, rng)
    else:
        G = rng.standard_normal((n1, r))
        G[:, 0] = 0.0
        G[0, :] = 0.0
        G[0, 0] = 1.0
        U = _orthonormal(G)
        V = _bounded_entry_basis(n2, r, rng)
    if singular_values is None:
        S = np.arange(r, 0, -1, dtype=float)
    else:
        S = np.sort(np.asarray(singular_values, dtype=float))[::-1]
    return LowRankFactorization(U, S, V)


def _bounded_entry_basis(n, r, rng):
    """Orthonormal ``n x r`` basis whose entries are small in magnitude.

    Columns of a randomly sign-flipped, row-permuted discrete cosine basis.
    Every entry is at most ``sqrt(2/n)``, so the coherence is at most 2.
    """
    k = np.arange(n)
    freqs = rng.choice(n, size=r, replace=False)
    C = np.cos(np.pi * (k[:, None] + 0.5) * freqs[None, :] / n)
    C /= np.linalg.norm(C, axis=0)
    C = C[rng.permutation(n)] * rng.choice([-1.0, 1.0], size=r)
    return C
