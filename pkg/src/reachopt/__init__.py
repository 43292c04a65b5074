"""reachopt: constrained first-order ascent under reachability pricing.

Three layers: spectral geometry of PSD constraint operators (decomposition,
pseudoinversion, image projections), rank-k rule-kernel compression of the
ascent map with per-mode residual accounting, and compatibility analysis of
coupled circular-cone families (feasibility, thresholds, spherical measure).
An ascent runner ties the direction solver to budget constraints with full
trajectory logging.
"""

from .ascent import (
    ACTIVATION_TOLERANCE,
    BACKTRACK_LIMIT,
    BUDGET_SLACK,
    BudgetConstraint,
    Objective,
    TrajectoryRecord,
    TrajectoryStep,
    budget_from_config,
    feasible_direction,
    objective_from_config,
    quadratic_objective,
    rosenbrock_objective,
    run_ascent,
    spherical_budget,
    validate_gradient,
    write_trace_csv,
)
from .cones import (
    DEFAULT_ITERATIONS,
    DEFAULT_RESTARTS,
    FEASIBILITY_TOLERANCE,
    CircularCone,
    CouplingFamily,
    FeasibilityResult,
    ThresholdResult,
    find_gamma_star,
    is_feasible,
    phi,
    phi_curve,
    sample_sphere,
)
from .directions import (
    DEGENERACY_FACTOR,
    DirectionKind,
    DirectionResult,
    first_order_gain,
    optimal_direction,
    sample_unit_effort,
)
from .errors import (
    DegenerateDirectionError,
    DimensionMismatchError,
    InadmissibleDirectionError,
    InfeasibleAtMaxError,
    InfeasibleStartError,
    JacobiConvergenceError,
    NotPositiveSemidefiniteError,
    ReachoptError,
)
from .kernels import ResidualReport, RuleKernel, smallest_k_for_error, truncate
from .operators import (
    EFFORT_FLOOR,
    ConstraintOperator,
    EffortValue,
    OperatorField,
    constant_field,
    diag_decay_field,
    mask_field,
    operator_field_from_config,
)
from .spectral import (
    DEFAULT_MAX_SWEEPS,
    PSD_EIGENVALUE_FLOOR,
    RELATIVE_RANK_TOLERANCE,
    SpectralDecomposition,
    SymmetricMatrix,
    decompose,
    reciprocal_outer_sum,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIVATION_TOLERANCE",
    "BACKTRACK_LIMIT",
    "BUDGET_SLACK",
    "BudgetConstraint",
    "CircularCone",
    "ConstraintOperator",
    "CouplingFamily",
    "DEFAULT_ITERATIONS",
    "DEFAULT_MAX_SWEEPS",
    "DEFAULT_RESTARTS",
    "DEGENERACY_FACTOR",
    "DegenerateDirectionError",
    "DimensionMismatchError",
    "DirectionKind",
    "DirectionResult",
    "EFFORT_FLOOR",
    "EffortValue",
    "FEASIBILITY_TOLERANCE",
    "FeasibilityResult",
    "InadmissibleDirectionError",
    "InfeasibleAtMaxError",
    "InfeasibleStartError",
    "JacobiConvergenceError",
    "NotPositiveSemidefiniteError",
    "Objective",
    "OperatorField",
    "PSD_EIGENVALUE_FLOOR",
    "RELATIVE_RANK_TOLERANCE",
    "ReachoptError",
    "ResidualReport",
    "RuleKernel",
    "SpectralDecomposition",
    "SymmetricMatrix",
    "ThresholdResult",
    "TrajectoryRecord",
    "TrajectoryStep",
    "budget_from_config",
    "constant_field",
    "decompose",
    "diag_decay_field",
    "feasible_direction",
    "find_gamma_star",
    "first_order_gain",
    "is_feasible",
    "mask_field",
    "objective_from_config",
    "operator_field_from_config",
    "optimal_direction",
    "phi",
    "phi_curve",
    "quadratic_objective",
    "reciprocal_outer_sum",
    "rosenbrock_objective",
    "run_ascent",
    "sample_sphere",
    "sample_unit_effort",
    "smallest_k_for_error",
    "spherical_budget",
    "truncate",
    "validate_gradient",
    "write_trace_csv",
]
