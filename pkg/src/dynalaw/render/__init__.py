"""Minimal orthographic Gaussian-splat rasterizer."""

from .camera import AXES, Camera
from .ppm import read_ppm, write_ppm
from .splat import (
    COND_MIN,
    EARLY_EXIT_DEFAULT,
    CompositeStats,
    Frame,
    composite,
    project_splat,
    render_frame,
)

__all__ = [
    "AXES",
    "COND_MIN",
    "Camera",
    "CompositeStats",
    "EARLY_EXIT_DEFAULT",
    "Frame",
    "composite",
    "project_splat",
    "read_ppm",
    "render_frame",
    "write_ppm",
]
