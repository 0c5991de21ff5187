"""Wall-aware Wi-Fi sensing coverage model and deployment planner."""

from .channel import (
    RfParameters,
    SsnrValue,
    cassini_constant,
    p_dyn_combined,
    p_dyn_los,
    p_dyn_wall,
    p_los,
    phase_difference,
    ssnr_full,
    ssnr_simplified,
    ssnr_wall_simplified,
)
from .coverage import (
    CoverageReport,
    GridSpec,
    ScalarField,
    coverage_report,
    evaluate_field,
    extract_boundary,
    smooth_boundary,
    threshold_mask,
)
from .geometry import (
    DevicePlacement,
    PathSet,
    Point2D,
    ReflectedPath,
    RoomLayout,
    WallSegment,
    mirror_point,
    path_set,
    reflected_path,
)
from .scenario import Scenario, canonical_scenario, load_scenario, save_scenario

__version__ = "0.1.0"

__all__ = [
    "RfParameters",
    "SsnrValue",
    "cassini_constant",
    "p_dyn_combined",
    "p_dyn_los",
    "p_dyn_wall",
    "p_los",
    "phase_difference",
    "ssnr_full",
    "ssnr_simplified",
    "ssnr_wall_simplified",
    "CoverageReport",
    "GridSpec",
    "ScalarField",
    "coverage_report",
    "evaluate_field",
    "extract_boundary",
    "smooth_boundary",
    "threshold_mask",
    "DevicePlacement",
    "PathSet",
    "Point2D",
    "ReflectedPath",
    "RoomLayout",
    "WallSegment",
    "mirror_point",
    "path_set",
    "reflected_path",
    "Scenario",
    "canonical_scenario",
    "load_scenario",
    "save_scenario",
    "__version__",
]
