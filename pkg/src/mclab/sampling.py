"""Observation sets, the multiplicity-weighted sampling operator, and
sample-size thresholds.

Indices are 0-based.  An :class:`ObservationSet` keeps the raw draw
sequence (needed to split a with-replacement sample into independent
blocks) together with its aggregated cell multiplicities.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from .errors import InvalidArgument, PreconditionViolation
from .rng import as_generator

WITH_REPLACE = "with-replace"
UNIFORM = "uniform-no-replace"
BERNOULLI = "bernoulli"
SAMPLING_MODELS = (UNIFORM, WITH_REPLACE, BERNOULLI)


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Multiset of observed cells.

    Parameters
    ----------
    n1, n2 : int
        Ambient matrix shape.
    draws : (m, 2) int array
        Observed ``(row, col)`` pairs in draw order, repeats allowed.
    model : str
        One of ``SAMPLING_MODELS``.
    seed : int or None
        Seed the draws were generated from (metadata only).
    values : (m,) float array, optional
        Observed matrix value for each draw.
    """

    n1: int
    n2: int
    draws: np.ndarray
    model: str = WITH_REPLACE
    seed: object = None
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        draws = _readonly(np.reshape(self.draws, (-1, 2)), np.int64)
        object.__setattr__(self, "draws", draws)
        if self.model not in SAMPLING_MODELS:
            raise InvalidArgument(f"unknown sampling model {self.model!r}")
        if self.n1 < 1 or self.n2 < 1:
            raise InvalidArgument("dimensions must be positive")
        if draws.size and (
            draws[:, 0].min() < 0 or draws[:, 0].max() >= self.n1
            or draws[:, 1].min() < 0 or draws[:, 1].max() >= self.n2
        ):
            raise InvalidArgument("observation index out of range")
        if self.values is not None:
            vals = _readonly(np.ravel(self.values), float)
            if vals.shape != (len(draws),):
                raise InvalidArgument("values must have one entry per draw")
            object.__setattr__(self, "values", vals)
        if self.model == UNIFORM and np.any(self.counts > 1):
            raise InvalidArgument("uniform-no-replace sample has repeated cells")

    @property
    def m(self):
        """Total number of draws, counting multiplicity."""
        return len(self.draws)

    @property
    def shape(self):
        return self.n1, self.n2

    @cached_property
    def _aggregate(self):
        flat = self.draws[:, 0] * self.n2 + self.draws[:, 1]
        cells, inverse, counts = np.unique(flat, return_inverse=True, return_counts=True)
        return cells, inverse, counts

    @property
    def rows(self):
        return self._aggregate[0] // self.n2

    @property
    def cols(self):
        return self._aggregate[0] % self.n2

    @property
    def counts(self):
        """Multiplicity of each distinct cell, aligned with ``rows``/``cols``."""
        return self._aggregate[2]

    @cached_property
    def count_matrix(self):
        C = np.bincount(
            self.draws[:, 0] * self.n2 + self.draws[:, 1], minlength=self.n1 * self.n2
        ).reshape(self.n1, self.n2).astype(float)
        C.setflags(write=False)
        return C

    @cached_property
    def mask(self):
        M = self.count_matrix > 0
        M.setflags(write=False)
        return M

    def cell_values(self):
        """Observed value per distinct cell.

        Raises :class:`InvalidArgument` if the set carries no values or if
        repeated draws of one cell disagree.
        """
        if self.values is None:
            raise InvalidArgument("observation set carries no values")
        cells, inverse, _ = self._aggregate
        first = np.full(len(cells), np.nan)
        # the first occurrence of each cell defines its value
        order = np.argsort(inverse, kind="stable")
        inv_sorted = inverse[order]
        starts = np.r_[0, np.flatnonzero(np.diff(inv_sorted)) + 1]
        first[inv_sorted[starts]] = self.values[order[starts]]
        spread = np.abs(self.values - first[inverse])
        if np.any(spread > 1e-12 * (1 + np.abs(first[inverse]))):
            raise InvalidArgument("inconsistent values for a repeated observation")
        return first

    def with_values(self, M):
        """Attach values read off a dense matrix ``M``."""
        M = np.asarray(M, dtype=float)
        if M.shape != self.shape:
            raise InvalidArgument(f"matrix shape {M.shape} does not match {self.shape}")
        return ObservationSet(self.n1, self.n2, self.draws, self.model, self.seed,
                              M[self.draws[:, 0], self.draws[:, 1]])

    def extended(self, extra_draws, model=None):
        """Return the superset obtained by appending ``extra_draws``."""
        extra = np.reshape(np.asarray(extra_draws, dtype=np.int64), (-1, 2))
        return ObservationSet(self.n1, self.n2, np.vstack([self.draws, extra]),
                              model or self.model, self.seed)


def _from_flat(n1, n2, flat, model, seed):
    flat = np.asarray(flat, dtype=np.int64)
    return ObservationSet(n1, n2, np.column_stack([flat // n2, flat % n2]), model, seed)


def sample_with_replacement(n1, n2, m, seed):
    """``m`` i.i.d. uniform draws from the ``n1 x n2`` grid."""
    if m < 1:
        raise InvalidArgument("m must be at least 1")
    rng = as_generator(seed)
    flat = rng.integers(0, n1 * n2, size=int(m))
    return _from_flat(n1, n2, flat, WITH_REPLACE, seed)


def sample_uniform(n1, n2, m, seed):
    """A uniformly random ``m``-subset of the grid (no repeats)."""
    if not 1 <= m <= n1 * n2:
        raise InvalidArgument(f"m must lie in [1, {n1 * n2}], got {m}")
    rng = as_generator(seed)
    flat = rng.permutation(n1 * n2)[: int(m)]
    return _from_flat(n1, n2, flat, UNIFORM, seed)


def sample_bernoulli(n1, n2, p, seed):
    """Include each cell independently with probability ``p``."""
    if not 0 < p <= 1:
        raise InvalidArgument(f"p must lie in (0, 1], got {p}")
    rng = as_generator(seed)
    flat = np.flatnonzero(rng.random(n1 * n2) < p)
    return _from_flat(n1, n2, flat, BERNOULLI, seed)


def sample(n1, n2, m, model, seed):
    """Dispatch on the sampling model; ``m`` is a count except for
    ``bernoulli``, where ``p = m / (n1 n2)``."""
    if model == WITH_REPLACE:
        return sample_with_replacement(n1, n2, m, seed)
    if model == UNIFORM:
        return sample_uniform(n1, n2, m, seed)
    if model == BERNOULLI:
        return sample_bernoulli(n1, n2, min(1.0, m / (n1 * n2)), seed)
    raise InvalidArgument(f"unknown sampling model {model!r}")


def apply_R_omega(obs, Z):
    """Keep observed entries, each scaled by its multiplicity; zero elsewhere."""
    Z = np.asarray(Z, dtype=float)
    if Z.shape != obs.shape:
        raise InvalidArgument(f"matrix shape {Z.shape} does not match {obs.shape}")
    return obs.count_matrix * Z


def max_multiplicity(obs):
    """Largest repetition count, which is also the operator norm of R_Omega."""
    return int(obs.counts.max()) if obs.m else 0


def sample_size_threshold(n1, n2, r, mu0, mu1, beta):
    """Number of samples sufficient for exact recovery.

    ``ceil(32 max(mu1^2, mu0) r (n1 + n2) beta log^2(2 n2))`` with natural log.
    """
    if not beta > 1:
        raise InvalidArgument(f"beta must exceed 1, got {beta}")
    value = 32 * max(mu1 ** 2, mu0) * r * (n1 + n2) * beta * math.log(2 * n2) ** 2
    return int(math.ceil(value))


def duplicate_bound(n2, beta):
    """Repetition bound ``(8/3) beta log(n2)`` and its failure probability.

    Returns
    -------
    bound : float
    failure_probability : float
        ``n2^(2 - 2 beta)``.
    """
    if n2 < 9:
        raise PreconditionViolation(f"the repetition bound needs n2 >= 9, got {n2}")
    if not beta > 1:
        raise InvalidArgument(f"beta must exceed 1, got {beta}")
    return 8.0 / 3.0 * beta * math.log(n2), float(n2) ** (2 - 2 * beta)


def partition(obs, p):
    """Split a with-replacement sample into ``p`` consecutive blocks.

    When ``p`` does not divide ``m`` the first ``m mod p`` blocks get one
    extra draw.
    """
    if obs.model != WITH_REPLACE:
        raise InvalidArgument("only with-replacement samples can be partitioned")
    p = int(p)
    if not 1 <= p <= obs.m:
        raise InvalidArgument(f"partition count must lie in [1, m={obs.m}], got {p}")
    if p == 1:
        return [obs]
    q, extra = divmod(obs.m, p)
    sizes = [q + 1 if j < extra else q for j in range(p)]
    bounds = np.cumsum([0] + sizes)
    blocks = []
    for j in range(p):
        sl = slice(bounds[j], bounds[j + 1])
        vals = None if obs.values is None else obs.values[sl]
        blocks.append(ObservationSet(obs.n1, obs.n2, obs.draws[sl], WITH_REPLACE, obs.seed, vals))
    return blocks
