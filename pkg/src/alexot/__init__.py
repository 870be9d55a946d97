"""Optimal transport on model geodesic surfaces.

Exact Kantorovich solver with dual certificates on the plane, the round
sphere and the flat cone, plus numerical certification suites for the
curvature comparison inequality and for the gradient-shooting structure of
optimal transport maps.
"""

from ._kernels import backend_name
from .comparison import (
    ComparisonReport,
    check_first_variation,
    check_triangle_comparison,
    comparison_angle,
    is_strained,
    model_distance,
)
from .costs import CostSpec, cost, cost_matrix, inverse_cost_derivative, power, quadratic
from .duality import (
    DiscreteMeasure,
    PotentialPair,
    c_transform,
    dual_objective,
    is_c_concave,
)
from .errors import (
    AlexotError,
    ChartError,
    DegenerateInputError,
    DomainError,
    NotDifferentiableError,
    SingularPointError,
    SizeLimitError,
    ValidationError,
)
from .monge import (
    MapVerificationReport,
    SemiDiscretePotential,
    UniquenessReport,
    monge_point,
    potential_gradient,
    potential_value,
    verify_graph_and_formula,
    verify_uniqueness,
)
from .solver import TransportPlan, duality_gap, oracle_bruteforce, solve_exact, solve_for_measures
from .spaces import (
    AnnulusRegion,
    CapRegion,
    Geodesic,
    LocalChart,
    RectRegion,
    SpaceDescriptor,
    TangentVector,
    cone,
    distance,
    exp_map,
    geodesic_between,
    geodesic_is_unique,
    grid_points,
    is_regular,
    local_chart,
    log_map,
    plane,
    sample_region,
    sphere,
)

__version__ = "0.1.0"
