"""Semi-implicit splitting solver for Fisher/KPP growth and diffusion on masked maps."""

from .capacity import (PhysicalParams, ScaledQuantities, SigmoidSchedule, SmoothingFilter,
                       capacity_at, length_scale, scale_to_dimensionless, sigmoid_weight,
                       smooth_frame)
from .domain import (CapacityFrame, Field2D, GridSpec, MapMask, Segmentation, extract_segment,
                     segment_mask, write_segment)
from .kernels import (DivergenceError, GodunovStepper, SolverParams, StepWorkspace,
                      godunov_step_2d, integrate_1d, regularized_ratio, step_1d)
from .linalg import SingularSystemError, TridiagSystem, solve_tridiagonal
from .reference import (FrontTrace, ParameterError, RadialField, asymmetry, error_metrics,
                        front_position, front_velocity, reference_1d, reference_radial)

__all__ = [
    "CapacityFrame", "DivergenceError", "Field2D", "FrontTrace", "GodunovStepper", "GridSpec",
    "MapMask", "ParameterError", "PhysicalParams", "RadialField", "ScaledQuantities",
    "Segmentation", "SigmoidSchedule", "SingularSystemError", "SmoothingFilter",
    "SolverParams", "StepWorkspace", "TridiagSystem", "asymmetry", "capacity_at",
    "error_metrics", "extract_segment", "front_position", "front_velocity", "godunov_step_2d",
    "integrate_1d", "length_scale", "reference_1d", "reference_radial", "regularized_ratio",
    "scale_to_dimensionless", "segment_mask", "sigmoid_weight", "smooth_frame",
    "solve_tridiagonal", "step_1d", "write_segment",
]
