"""Forward simulation driver."""

from __future__ import annotations

import hashlib

import numpy as np

from ..dsl.typecheck import TypedLaw
from .config import SimConfig
from .particles import Particles
from .solver import Grid, SimulationFailure, step
from .trajectory import Trajectory


def law_digest(law: TypedLaw) -> str:
    from ..dsl.printer import print_law

    return hashlib.sha256(print_law(law.ast).encode()).hexdigest()[:16]


def run_sim(
    particles: Particles,
    law: TypedLaw,
    theta,
    cfg: SimConfig,
    record_F: bool = False,
    scene_digest: str = "",
    seed: int | None = None,
) -> Trajectory:
    """Simulate cfg.frames frames, recording one frame every
    substeps_per_frame substeps. Frame 0 is the initial state, so the
    trajectory holds cfg.frames + 1 frames.

    Raises SimulationFailure with the substep index on any guard trip; no
    partial trajectory escapes.
    """
    state = particles.copy()
    grid = Grid(cfg.resolution)
    frames = [state.x.copy()]
    f_frames = [state.F.copy()] if record_F else None
    k = 0
    for _ in range(cfg.frames):
        for _ in range(cfg.substeps_per_frame):
            step(state, law, theta, cfg, step_index=k, grid=grid)
            k += 1
        frames.append(state.x.copy())
        if record_F:
            f_frames.append(state.F.copy())
    meta = {
        "config_digest": cfg.digest(),
        "law_digest": law_digest(law),
        "scene_digest": scene_digest,
        "seed": "" if seed is None else str(seed),
        "theta": ",".join(repr(float(t)) for t in np.asarray(theta, dtype=float)),
    }
    return Trajectory(frames=frames, F_frames=f_frames, metadata=meta)


def final_state(
    particles: Particles, law: TypedLaw, theta, cfg: SimConfig
) -> Particles:
    """Run all substeps and return the end state (no recording)."""
    state = particles.copy()
    grid = Grid(cfg.resolution)
    k = 0
    for _ in range(cfg.frames):
        for _ in range(cfg.substeps_per_frame):
            step(state, law, theta, cfg, step_index=k, grid=grid)
            k += 1
    return state


__all__ = ["run_sim", "final_state", "law_digest", "SimulationFailure"]
