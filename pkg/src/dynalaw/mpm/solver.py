"""Explicit MLS-MPM substep on a uniform background grid.

Quadratic B-spline transfers with the fused stress/affine momentum term;
symplectic-Euler grid update. All scatter accumulation goes through
np.bincount on flattened node indices, which fixes the reduction order and
keeps runs bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dsl.errors import LawError
from ..dsl.interp import eval_elastic_batch, eval_plastic_batch
from ..dsl.typecheck import TypedLaw
from .config import DET_F_MIN, SLIP_WALLS, STICKY_WALLS, V_MAX, SimConfig
from .particles import Particles

_OFFSETS = np.array(
    [[i, j, k] for i in range(3) for j in range(3) for k in range(3)], dtype=np.int64
)  # (27, 3)
_OFFSETS_F = _OFFSETS.astype(float)


class SimulationFailure(Exception):
    """A run aborted; carries the substep index and the offending quantity."""

    def __init__(self, reason: str, step_index: int):
        self.reason = reason
        self.step_index = step_index
        super().__init__(f"step {step_index}: {reason}")


@dataclass
class Grid:
    resolution: int
    mass: np.ndarray = field(init=False)      # (res^3,)
    momentum: np.ndarray = field(init=False)  # (res^3, 3)
    velocity: np.ndarray = field(init=False)  # (res^3, 3) after grid_step

    def __post_init__(self):
        n = self.resolution ** 3
        self.mass = np.zeros(n)
        self.momentum = np.zeros((n, 3))
        self.velocity = np.zeros((n, 3))

    def clear(self):
        self.mass[:] = 0.0
        self.momentum[:] = 0.0
        self.velocity[:] = 0.0


def _spline(particles: Particles, cfg: SimConfig):
    """Quadratic B-spline weights and node indices for every particle.

    Returns (weight (27, n), node_flat (27, n), fx (n, 3)). p2g and g2p of
    one substep share this: positions only advance at the end of g2p.
    """
    inv_dx = float(cfg.resolution)
    Xg = particles.x * inv_dx
    base = np.floor(Xg - 0.5).astype(np.int64)  # (n, 3)
    fx = Xg - base  # in [0.5, 1.5]
    w = np.stack(
        [0.5 * (1.5 - fx) ** 2, 0.75 - (fx - 1.0) ** 2, 0.5 * (fx - 0.5) ** 2]
    )  # (3, n, 3)
    o = _OFFSETS
    weight = w[o[:, 0], :, 0] * w[o[:, 1], :, 1] * w[o[:, 2], :, 2]  # (27, n)
    node = base[None, :, :] + o[:, None, :]  # (27, n, 3)
    res = cfg.resolution
    node_flat = (node[..., 0] * res + node[..., 1]) * res + node[..., 2]
    return weight, node_flat, fx


def p2g(
    particles: Particles,
    grid: Grid,
    law: TypedLaw,
    theta,
    dt: float,
    cfg: SimConfig,
    spline=None,
) -> None:
    """Scatter mass and momentum (with the fused stress force) to the grid."""
    inv_dx = float(cfg.resolution)
    dx = cfg.dx
    tau = eval_elastic_batch(law, particles.F, theta)  # Kirchhoff stress (n, 3, 3)
    stress = (-dt * particles.volume0 * 4.0 * inv_dx * inv_dx)[:, None, None] * tau
    affine = stress + particles.mass[:, None, None] * particles.C

    weight, node_flat, fx = spline if spline is not None else _spline(particles, cfg)
    # affine @ dpos, decomposed over the fixed stencil:
    #   affine @ (offs - fx) dx = dx * (affine @ offs^T - affine @ fx)
    a_offs = np.moveaxis(affine @ _OFFSETS_F.T, 2, 0)        # (27, n, 3)
    a_fx = np.einsum("nij,nj->ni", affine, fx)               # (n, 3)
    mv = particles.mass[:, None] * particles.v
    contrib = weight[:, :, None] * ((mv - dx * a_fx)[None, :, :] + dx * a_offs)

    idx = node_flat.ravel()
    ncells = cfg.resolution ** 3
    grid.mass += np.bincount(
        idx, weights=(weight * particles.mass[None, :]).ravel(), minlength=ncells
    )
    for c in range(3):
        grid.momentum[:, c] += np.bincount(
            idx, weights=contrib[:, :, c].ravel(), minlength=ncells
        )


def grid_step(
    grid: Grid, dt: float, gravity, boundary: str, margin_cells: int, resolution: int
) -> None:
    """Normalize momentum to velocity, apply gravity, enforce wall conditions."""
    act = grid.mass > 0.0
    grid.velocity[:] = 0.0
    grid.velocity[act] = grid.momentum[act] / grid.mass[act, None]
    grid.velocity[act] += dt * np.asarray(gravity, dtype=float)

    res = resolution
    m = margin_cells
    v = grid.velocity.reshape(res, res, res, 3)
    if boundary == STICKY_WALLS:
        v[:m] = 0.0
        v[-m:] = 0.0
        v[:, :m] = 0.0
        v[:, -m:] = 0.0
        v[:, :, :m] = 0.0
        v[:, :, -m:] = 0.0
    elif boundary == SLIP_WALLS:
        v[:m, :, :, 0] = 0.0
        v[-m:, :, :, 0] = 0.0
        v[:, :m, :, 1] = 0.0
        v[:, -m:, :, 1] = 0.0
        v[:, :, :m, 2] = 0.0
        v[:, :, -m:, 2] = 0.0
    else:
        raise ValueError(f"unknown boundary '{boundary}'")


def g2p(grid: Grid, particles: Particles, dt: float, cfg: SimConfig, spline=None) -> None:
    """Gather velocity and affine matrix, advect, and update the trial F."""
    inv_dx = float(cfg.resolution)
    weight, node_flat, fx = spline if spline is not None else _spline(particles, cfg)
    vals = grid.velocity[node_flat]            # (27, n, 3)
    wv = weight[:, :, None] * vals
    v_new = wv.sum(axis=0)                     # (n, 3)
    # C = 4/dx^2 * sum_o w v (x_o - x_p) = 4 inv_dx (sum_o wv x offs - v_new x fx)
    moment = np.tensordot(wv, _OFFSETS_F, axes=([0], [0]))  # (n, 3, 3): wv_i offs_j
    C_new = 4.0 * inv_dx * (moment - v_new[:, :, None] * fx[:, None, :])

    particles.v = v_new
    particles.C = C_new
    particles.x = particles.x + dt * v_new
    particles.F = (np.eye(3)[None] + dt * C_new) @ particles.F

    # Keep every particle inside the band where its 3x3x3 stencil is valid.
    dx = cfg.dx
    np.clip(particles.x, 0.51 * dx, (cfg.resolution - 1.51) * dx, out=particles.x)


def apply_plasticity(particles: Particles, law: TypedLaw, theta) -> None:
    particles.F = eval_plastic_batch(law, particles.F, theta)


def update_covariance(A: np.ndarray, F_step: np.ndarray) -> np.ndarray:
    """Congruence transform A <- F A F^T; preserves symmetry and PSD-ness.

    Applied per substep with the incremental deformation so the splat
    covariance tracks the accumulated deformation of each kernel.
    """
    return F_step @ A @ np.swapaxes(F_step, -1, -2)


def step(
    particles: Particles,
    law: TypedLaw,
    theta,
    cfg: SimConfig,
    step_index: int = 0,
    grid: Grid | None = None,
) -> None:
    """One substep: p2g -> grid_step -> g2p -> plasticity -> covariance."""
    if grid is None:
        grid = Grid(cfg.resolution)
    else:
        grid.clear()
    try:
        spline = _spline(particles, cfg)
        p2g(particles, grid, law, theta, cfg.dt, cfg, spline=spline)
        grid_step(grid, cfg.dt, cfg.gravity, cfg.boundary, cfg.margin_cells, cfg.resolution)
        g2p(grid, particles, cfg.dt, cfg, spline=spline)
        f_step = np.eye(3)[None] + cfg.dt * particles.C
        apply_plasticity(particles, law, theta)
        particles.A = update_covariance(particles.A, f_step)
    except LawError as e:
        raise SimulationFailure(f"law evaluation failed: {e}", step_index) from e

    speed = np.abs(particles.v).max(initial=0.0)
    if not np.isfinite(speed) or speed > V_MAX:
        raise SimulationFailure(f"velocity explosion (max |v| = {speed:.3g} m/s)", step_index)
    if not np.isfinite(particles.x).all() or not np.isfinite(particles.F).all():
        raise SimulationFailure("non-finite particle state", step_index)
    dmin = np.linalg.det(particles.F).min()
    if not np.isfinite(dmin) or dmin <= DET_F_MIN:
        raise SimulationFailure(f"degenerate deformation gradient (det = {dmin:.3g})", step_index)
