from .bilinear import max_affinity, maximize_bilinear_simplex, min_feasible_rho
from .concave import maximize_concave
from .problem import (
    SQRT_FLOOR,
    DistanceConstraint,
    LinearEquality,
    ProblemSpec,
    SolveReport,
    SolverOptions,
    SolveStatus,
)
from .projection import max_sqrt_affinity, project_box_equality
from .separable import (
    SeparableResult,
    coordinate_argmax,
    dual_value,
    maximize_separable_sqrt,
    separable_objective,
)

__all__ = [
    "SQRT_FLOOR",
    "DistanceConstraint",
    "LinearEquality",
    "ProblemSpec",
    "SeparableResult",
    "SolveReport",
    "SolveStatus",
    "SolverOptions",
    "coordinate_argmax",
    "dual_value",
    "max_affinity",
    "max_sqrt_affinity",
    "maximize_bilinear_simplex",
    "maximize_concave",
    "maximize_separable_sqrt",
    "min_feasible_rho",
    "project_box_equality",
    "separable_objective",
]
