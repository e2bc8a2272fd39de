"""Certified numerical bounds on squashed entanglement for finite-dimensional
bipartite states, plus executable checks of the identities behind them."""

from .core import (
    DensityOperator,
    Instrument,
    PureState,
    QuantumChannel,
    SystemLayout,
    apply_channel,
    apply_instrument,
    fidelity,
    load_state,
    partial_trace,
    permute_systems,
    purify,
    random_state,
    save_state,
    state_from_json,
    state_rank,
    state_to_json,
    tensor,
    trace_distance,
)
from .entropy import (
    EntropyReport,
    conditional_entropy,
    conditional_fannes_bound,
    conditional_fannes_check,
    conditional_mutual_information,
    entropy_report,
    eta,
    fannes_bound,
    mutual_information,
    von_neumann_entropy,
)
from .errors import (
    DomainError,
    InvariantViolation,
    LabelClash,
    ShapeError,
    SquashError,
    UnknownSystem,
)
from .extensions import (
    Ensemble,
    Extension,
    eigen_ensemble,
    extend_via_channel,
    flag_extension,
    mix_extensions,
    product_extension,
    separable_flag_extension,
)
from .classical import (
    ClassicalJoint,
    StochasticChannel,
    apply_z_channel,
    classical_cond_fannes_check,
    classical_embed,
    intrinsic_information,
    intrinsic_information_grid,
    joint_from_json,
    joint_to_json,
    load_joint,
    save_joint,
    shannon_cmi,
)
from .optimizer import (
    BoundReport,
    EofBound,
    IterationRecord,
    OptimizerConfig,
    SquashedBound,
    bounds_report,
    eof_upper_bound,
    hashing_lower_bound,
    squashed_cmi_objective,
    squashed_upper_bound,
    trace_to_csv,
)
from .propcheck import (
    CheckResult,
    check_additivity,
    check_bound_chain,
    check_convexity_identity,
    check_distillation_estimate,
    check_monotonicity,
    check_ssa,
    check_superadditivity,
    run_suite,
)

__version__ = "0.1.0"
