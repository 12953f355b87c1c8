"""Finite-length bounds for joint source-channel coding with Markovian
sources over Markovian conditional additive channels."""

from .errors import (
    AssumptionViolatedError,
    ConfigError,
    DegenerateDispersionError,
    DomainError,
    MarkovJsccError,
    NonConvergenceError,
    OutOfRangeError,
    PeriodicChainError,
    RateOutOfRangeError,
    ReducibleMatrixError,
    SandwichViolationError,
    TooLargeError,
)
from .markov import (
    JointChannelChain,
    PerronResult,
    SourceChain,
    StochasticMatrix,
    binary_chain,
    check_assumption1,
    check_assumption2,
    perron_eigenpair,
    stationary_distribution,
)
from .measures import (
    ChainSpectra,
    CorrectionTerms,
    delta_bounds,
    dispersion_tm,
    entropy_rate_tm,
    h_down_shot,
    h_down_tm,
    h_two_param_shot,
    h_two_param_tm,
    h_up_shot,
    h_up_tm,
    h_zero_tm,
    renyi_entropy,
    xi_bounds,
    zeta_bounds,
)
from .tilted import TiltedFamily
from .finite_bounds import (
    BOUND_KINDS,
    BoundCurve,
    BoundQuery,
    BoundResult,
    bound_curve,
    bound_curve_over_n,
    converse_bound_a1,
    converse_bound_a2,
    direct_bound_a1,
    direct_bound_a2,
    evaluate_bound,
)
from .asymptotics import (
    AsymptoticSummary,
    critical_rate,
    exponent_converse,
    exponent_converse_forms,
    exponent_direct,
    md_approx,
    moderate_deviation,
    summarize,
)
from .oracle import (
    CodeSearchResult,
    ExplicitJoint,
    SandwichMargin,
    code_error,
    conditional_additive_table,
    exhaustive_min_error,
    nfold_joint,
    sandwich_check,
    single_shot_converse,
    single_shot_converse_renyi,
    single_shot_direct,
)

__version__ = "0.1.0"
