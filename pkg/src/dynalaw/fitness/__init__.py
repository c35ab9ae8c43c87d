"""Lower-level candidate evaluation: validity, losses, parameter fitting."""

from .metrics import (
    FAILURE_SENTINEL,
    DimensionMismatch,
    EmptySet,
    StructureMismatch,
    chamfer_l2,
    dssim,
    mse,
    ssim,
    trajectory_chamfer,
    visual_loss,
)
from .observation import (
    CHAMFER,
    MIXED,
    VISUAL,
    SceneObservation,
    render_trajectory_frames,
    simulate_candidate,
    total_loss,
)
from .optimize import (
    Feedback,
    Fitted,
    ParamTransform,
    finite_diff_grad,
    optimize_params,
)
from .validity import BATTERY, ValidityReport, probe_validity

__all__ = [
    "BATTERY",
    "CHAMFER",
    "DimensionMismatch",
    "EmptySet",
    "FAILURE_SENTINEL",
    "Feedback",
    "Fitted",
    "MIXED",
    "ParamTransform",
    "SceneObservation",
    "StructureMismatch",
    "VISUAL",
    "ValidityReport",
    "chamfer_l2",
    "dssim",
    "finite_diff_grad",
    "mse",
    "optimize_params",
    "probe_validity",
    "render_trajectory_frames",
    "simulate_candidate",
    "ssim",
    "total_loss",
    "trajectory_chamfer",
    "visual_loss",
]
