"""Nuclear-norm matrix completion with executable checks of its recovery guarantees."""

from .errors import (
    ConfigError, DomainError, EnsembleContractViolation, InsufficientSamples, InvalidArgument,
    MCLabError, NumericFailure, PreconditionViolation,
)
from .model import (
    CoherenceProfile, LowRankFactorization, TangentSpace, coherence, coherence_profile,
    make_random_low_rank, project_T, project_T_perp, pt_basis_norm_sq,
    pt_basis_norm_sq_all,
)
from .sampling import (
    ObservationSet, apply_R_omega, duplicate_bound, max_multiplicity, partition,
    sample, sample_bernoulli, sample_size_threshold, sample_uniform, sample_with_replacement,
)
from .bounds import (
    BoundReport, bernstein_condensed, bernstein_tail, chernoff_operator_bound,
    golden_thompson_check, hermitian_dilation, inf_norm_deviation, near_isometry_bound,
    operator_markov_check, pt_romega_inf_deviation, spectral_vs_inf_bound_check, superop_deviation_norm,
)
from .certificate import (
    CertificateTrace, build_certificate, golfing_parameters, kernel_inequality_check,
    optimality_check, verify_big_set_conditions,
)
from .solver import (
    SolverParams, SolverResult, recovery_verdict, solve_nuclear_min, sv_soft_threshold,
)
from .experiments import ExperimentConfig, config_from_dict, parse_config, run_phase_sweep
from . import verify

__version__ = "0.1.0"
