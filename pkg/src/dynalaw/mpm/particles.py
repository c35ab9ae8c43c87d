"""Particle state arrays and scene seeding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ShapeOutOfDomain(Exception):
    """Seeded geometry does not fit inside the domain minus the boundary margin."""


@dataclass
class Particles:
    """Structure-of-arrays particle state.

    x: positions (m), v: velocities (m/s), F: deformation gradients,
    C: affine velocity matrices (1/s), A: splat covariances (m^2).
    """

    x: np.ndarray          # (n, 3)
    v: np.ndarray          # (n, 3)
    F: np.ndarray          # (n, 3, 3)
    C: np.ndarray          # (n, 3, 3)
    mass: np.ndarray       # (n,)
    volume0: np.ndarray    # (n,)
    color: np.ndarray      # (n, 3) in [0, 1]
    opacity: np.ndarray    # (n,) in [0, 1]
    A: np.ndarray          # (n, 3, 3)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def copy(self) -> "Particles":
        return Particles(
            x=self.x.copy(), v=self.v.copy(), F=self.F.copy(), C=self.C.copy(),
            mass=self.mass.copy(), volume0=self.volume0.copy(),
            color=self.color.copy(), opacity=self.opacity.copy(), A=self.A.copy(),
        )


def lattice_points(shape: str, center, extent: float, spacing: float) -> np.ndarray:
    """Cell-centered lattice positions for a cube (side = extent) or a
    sphere (diameter = extent) before jitter."""
    center = np.asarray(center, dtype=float)
    m = int(round(extent / spacing))
    if m < 1:
        raise ValueError("extent smaller than spacing")
    offsets = (np.arange(m) + 0.5) * spacing - extent / 2.0
    gx, gy, gz = np.meshgrid(offsets, offsets, offsets, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1) + center
    if shape == "sphere":
        r = extent / 2.0
        keep = np.linalg.norm(pts - center, axis=1) <= r
        pts = pts[keep]
    elif shape != "cube":
        raise ValueError(f"unknown shape '{shape}'")
    return pts


def seed_particles(
    shape: str,
    center,
    extent: float,
    spacing: float,
    density: float,
    init_velocity,
    seed: int = 0,
    jitter: float = 0.2,
    margin: float = 0.0,
    color=(0.7, 0.7, 0.75),
    opacity: float = 0.8,
) -> Particles:
    """Seed a jittered regular lattice with rest state F = I, C = 0.

    `jitter` is the uniform perturbation amplitude as a fraction of spacing.
    Raises ShapeOutOfDomain when the bounding box (plus jitter allowance)
    leaves [margin, 1 - margin]^3.
    """
    center = np.asarray(center, dtype=float)
    half = extent / 2.0 + jitter * spacing
    lo = center - half
    hi = center + half
    if (lo < margin).any() or (hi > 1.0 - margin).any():
        raise ShapeOutOfDomain(
            f"{shape} at {center.tolist()} with extent {extent} exceeds "
            f"[{margin}, {1.0 - margin}]^3"
        )

    pts = lattice_points(shape, center, extent, spacing)
    rng = np.random.default_rng(seed)
    pts = pts + rng.uniform(-jitter, jitter, size=pts.shape) * spacing

    n = pts.shape[0]
    vol = spacing ** 3
    return Particles(
        x=pts,
        v=np.tile(np.asarray(init_velocity, dtype=float), (n, 1)),
        F=np.tile(np.eye(3), (n, 1, 1)),
        C=np.zeros((n, 3, 3)),
        mass=np.full(n, density * vol),
        volume0=np.full(n, vol),
        color=np.tile(np.asarray(color, dtype=float), (n, 1)),
        opacity=np.full(n, float(opacity)),
        A=np.tile((spacing / 2.0) ** 2 * np.eye(3), (n, 1, 1)),
    )
