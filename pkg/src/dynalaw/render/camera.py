"""Axis-aligned orthographic cameras.

The view axis names the direction the camera looks along; depth is the
world coordinate along that signed axis, so smaller depth is closer.
In-plane coordinates are the remaining two world axes; sign flips keep the
(right, up, view) basis right-handed, which makes opposite-axis renders of
mirror scenes line up as horizontal flips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# axis -> (u_dim, u_sign, v_dim, v_sign, depth_dim, depth_sign)
AXES = {
    "+Z": (0, +1, 1, +1, 2, +1),
    "-Z": (0, -1, 1, +1, 2, -1),
    "+X": (2, -1, 1, +1, 0, +1),
    "-X": (2, +1, 1, +1, 0, -1),
    "+Y": (0, +1, 2, -1, 1, +1),
    "-Y": (0, +1, 2, +1, 1, -1),
}


@dataclass(frozen=True)
class Camera:
    axis: str = "+Z"
    image_size: tuple[int, int] = (64, 64)  # (width, height) pixels
    # ((u_lo, u_hi), (v_lo, v_hi)) in the in-plane positive world coordinates
    world_window: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 1.0), (0.0, 1.0))
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"unknown camera axis '{self.axis}'")
        w, h = self.image_size
        if w < 16 or h < 16:
            raise ValueError("image size must be at least 16x16")
        for lo, hi in self.world_window:
            if not (0.0 <= lo < hi <= 1.0):
                raise ValueError("world window must be within the unit domain")

    @property
    def basis(self):
        return AXES[self.axis]

    @property
    def pixels_per_meter(self) -> tuple[float, float]:
        (u0, u1), (v0, v1) = self.world_window
        w, h = self.image_size
        return w / (u1 - u0), h / (v1 - v0)

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "image_size": list(self.image_size),
            "world_window": [list(self.world_window[0]), list(self.world_window[1])],
            "background": list(self.background),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Camera":
        return cls(
            axis=d.get("axis", "+Z"),
            image_size=tuple(d.get("image_size", (64, 64))),
            world_window=(
                tuple(d.get("world_window", [[0, 1], [0, 1]])[0]),
                tuple(d.get("world_window", [[0, 1], [0, 1]])[1]),
            ),
            background=tuple(d.get("background", (0.0, 0.0, 0.0))),
        )
