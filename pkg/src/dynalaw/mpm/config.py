"""Simulation configuration."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

STICKY_WALLS = "sticky_walls"
SLIP_WALLS = "slip_walls"

V_MAX = 50.0  # m/s; exceeding this aborts the run as a velocity explosion
DET_F_MIN = 1e-6  # runs fail rather than regularize degenerate gradients


@dataclass
class SimConfig:
    """Explicit MLS-MPM settings on the unit cube.

    dt must satisfy dt <= dx / V_MAX so a node cannot cross a cell within
    one substep at the velocity guard limit.
    """

    dt: float = 2e-4
    substeps_per_frame: int = 20
    frames: int = 40
    gravity: tuple[float, float, float] = (0.0, -9.8, 0.0)
    boundary: str = STICKY_WALLS
    margin_cells: int = 3
    resolution: int = 32

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.resolution < 8:
            raise ValueError("resolution must be at least 8")
        if self.boundary not in (STICKY_WALLS, SLIP_WALLS):
            raise ValueError(f"unknown boundary '{self.boundary}'")
        if self.dt > self.dx / V_MAX:
            raise ValueError(
                f"dt={self.dt} violates CFL guard dt <= dx/v_max = {self.dx / V_MAX:.3e}"
            )
        if self.substeps_per_frame < 1:
            raise ValueError("substeps_per_frame must be >= 1")
        if self.frames < 0:
            raise ValueError("frames must be >= 0")

    @property
    def dx(self) -> float:
        return 1.0 / self.resolution

    @property
    def frame_dt(self) -> float:
        return self.dt * self.substeps_per_frame

    def to_dict(self) -> dict:
        return {
            "dt": self.dt,
            "substeps_per_frame": self.substeps_per_frame,
            "frames": self.frames,
            "gravity": list(self.gravity),
            "boundary": self.boundary,
            "margin_cells": self.margin_cells,
            "resolution": self.resolution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        d["gravity"] = tuple(d.get("gravity", (0.0, -9.8, 0.0)))
        return cls(**d)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]
