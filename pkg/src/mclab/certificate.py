"""Approximate dual certificates built by golfing.

Starting from ``W_0 = U V^T``, block ``j`` of a with-replacement sample
adds ``(n1 n2 / q_j) R_j(W_{j-1})`` to ``Y`` and the residual is reset to
``W_j = U V^T - P_T(Y)``.  ``Y`` is supported on the observed cells by
construction.
"""

from dataclasses import dataclass
import math

import numpy as np

from .bounds import superop_deviation_norm
from .errors import InsufficientSamples, InvalidArgument
from .linalg import inf_norm, spectral_norm
from .model import TangentSpace, project_T, project_T_perp
from .sampling import apply_R_omega, max_multiplicity


@dataclass(frozen=True)
class CertificateTrace:
    """State of the golfing recursion.

    ``w_fro`` and ``w_inf`` hold norms of ``W_0 .. W_p``; the per-step lists
    hold one value per block.
    """

    p: int
    q_list: tuple
    w_fro: tuple
    w_inf: tuple
    per_step_isometry: tuple
    step_spectral: tuple
    Y: np.ndarray
    fro_residual: float
    perp_norm: float
    verdict_fro: bool
    verdict_perp: bool

    @property
    def verdicts(self):
        return self.verdict_fro and self.verdict_perp

    def rows(self):
        """One dict per golfing step, suitable for CSV output."""
        return [
            {"k": k + 1, "q_k": self.q_list[k], "w_fro": self.w_fro[k + 1],
             "w_inf": self.w_inf[k + 1], "step_deviation": self.per_step_isometry[k]}
            for k in range(self.p)
        ]


def golfing_q_min(n1, n2, r, mu0, mu1, beta):
    """Lower bound ``(128/3) max(mu0, mu1^2) r (n1+n2) beta log(n1+n2)`` on block size."""
    return 128 / 3 * max(mu0, mu1 ** 2) * r * (n1 + n2) * beta * math.log(n1 + n2)


def golfing_parameters(n1, n2, r, mu0, mu1, beta, m):
    """Block count ``p = ceil((3/4) log(2 n2))`` and block size ``q = m // p``.

    Raises
    ------
    InsufficientSamples
        When ``q`` falls below :func:`golfing_q_min`; ``required_m`` is the
        smallest ``m`` that works.
    """
    if not beta > 1:
        raise InvalidArgument(f"beta must exceed 1, got {beta}")
    p = math.ceil(0.75 * math.log(2 * n2))
    q = int(m) // p
    q_min = golfing_q_min(n1, n2, r, mu0, mu1, beta)
    if q < q_min:
        need = p * math.ceil(q_min)
        raise InsufficientSamples(
            f"block size {q} is below the required {q_min:.1f}; need m >= {need}", need)
    return p, q


def build_certificate(f, partitions, isometry=True):
    """Run the golfing recursion over ``partitions``.

    Each block is scaled by its own size.  Steps whose isometry deviation
    exceeds 1/2 are recorded, not rejected.  ``isometry=False`` skips the
    per-block operator-norm computation (recorded as NaN).
    """
    if not partitions:
        raise InvalidArgument("need at least one partition")
    ts = TangentSpace.from_factorization(f)
    n1, n2, r = f.n1, f.n2, f.r
    UV = f.UV
    Y = np.zeros((n1, n2))
    W = UV.copy()
    w_fro, w_inf = [float(np.linalg.norm(W))], [inf_norm(W)]
    q_list, iso, step_spec = [], [], []
    for block in partitions:
        if block.m == 0:
            raise InvalidArgument("empty partition")
        if block.shape != (n1, n2):
            raise InvalidArgument("partition shape does not match the factorization")
        q = block.m
        step = n1 * n2 / q * apply_R_omega(block, W)
        step_spec.append(spectral_norm(step - W))
        iso.append(superop_deviation_norm(ts, block) if isometry else float("nan"))
        Y = Y + step
        W = UV - project_T(ts, Y)
        q_list.append(q)
        w_fro.append(float(np.linalg.norm(W)))
        w_inf.append(inf_norm(W))
    fro_residual = float(np.linalg.norm(project_T(ts, Y) - UV))
    perp_norm = spectral_norm(project_T_perp(ts, Y))
    Y.setflags(write=False)
    return CertificateTrace(
        p=len(partitions), q_list=tuple(q_list), w_fro=tuple(w_fro), w_inf=tuple(w_inf),
        per_step_isometry=tuple(iso), step_spectral=tuple(step_spec), Y=Y,
        fro_residual=fro_residual, perp_norm=perp_norm,
        verdict_fro=fro_residual <= math.sqrt(r / (2 * n2)),
        verdict_perp=perp_norm < 0.5,
    )


def multiplicity_limit(n2, beta):
    """Bound ``(8/3) sqrt(beta) log(n2)`` on the norm of R_Omega."""
    return 8 / 3 * math.sqrt(beta) * math.log(n2)


def verify_big_set_conditions(ts, obs, beta):
    """Isometry deviation on the full sample and ``||R_Omega||``.

    Returns ``(deviation, romega_norm, ok)`` where ``ok`` requires the
    deviation to be at most 1/2 and the norm within :func:`multiplicity_limit`.
    """
    deviation = superop_deviation_norm(ts, obs)
    romega = max_multiplicity(obs)
    ok = deviation <= 0.5 and romega <= multiplicity_limit(obs.n2, beta)
    return deviation, romega, ok


def kernel_inequality_check(ts, obs, Z, beta):
    """Compare ``||P_T_perp(Z)||_F`` with ``sqrt(9m / (128 beta n1 n2 log^2 n2)) ||P_T(Z)||_F``.

    ``Z`` must be annihilated by R_Omega.  Returns ``(lhs, rhs, ok)``.
    """
    Z = np.asarray(Z, dtype=float)
    if np.linalg.norm(apply_R_omega(obs, Z)) > 1e-10 * np.linalg.norm(Z):
        raise InvalidArgument("Z is not in the kernel of R_Omega")
    n1, n2 = obs.shape
    if n2 < 2:
        raise InvalidArgument("need n2 >= 2")
    lhs = float(np.linalg.norm(project_T_perp(ts, Z)))
    const = math.sqrt(9 * obs.m / (128 * beta * n1 * n2 * math.log(n2) ** 2))
    rhs = const * float(np.linalg.norm(project_T(ts, Z)))
    return lhs, rhs, lhs >= rhs


def kernel_constant(obs, deviation, romega_norm):
    """Smallest ratio ``||P_T_perp Z||_F / ||P_T Z||_F`` over the kernel of R_Omega
    implied by measured conditions: ``sqrt((1 - deviation) m / (n1 n2)) / ||R_Omega||``."""
    if deviation >= 1:
        return 0.0
    return math.sqrt((1 - deviation) * obs.m / (obs.n1 * obs.n2)) / romega_norm


@dataclass(frozen=True)
class OptimalityReport:
    certified: bool
    quasi_multiplier: bool
    big_set: bool
    kernel_margin: float
    deviation: float
    romega_norm: int

    @property
    def verdict(self):
        return "certified-unique" if self.certified else "not-certified"


def optimality_check(f, obs, trace, beta=2.0):
    """Decide whether ``trace`` certifies ``M`` as the unique minimizer.

    Besides both certificate inequalities and the big-set conditions, the
    final step of the uniqueness argument is checked with measured
    constants: for every ``Z`` in the kernel of R_Omega,

        ||M + Z||_* - ||M||_* >= ((1 - ||P_T_perp Y||) c - ||P_T Y - UV^T||_F) ||P_T Z||_F

    with ``c`` from :func:`kernel_constant`, so the bracket must be positive.
    A negative answer does not mean recovery fails.
    """
    ts = TangentSpace.from_factorization(f)
    deviation, romega, big_ok = verify_big_set_conditions(ts, obs, beta)
    c = kernel_constant(obs, deviation, romega)
    margin = (1 - trace.perp_norm) * c - trace.fro_residual
    support_ok = not np.any(trace.Y[~obs.mask])
    certified = bool(trace.verdicts and big_ok and margin > 0 and support_ok)
    return OptimalityReport(certified, trace.verdicts, big_ok, float(margin), deviation, romega)
