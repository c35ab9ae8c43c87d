"""Scene observations: what a candidate law is scored against."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mpm.config import SimConfig
from ..mpm.particles import Particles
from ..mpm.runner import run_sim
from ..mpm.trajectory import Trajectory
from ..render.camera import Camera
from ..render.splat import render_frame
from .metrics import StructureMismatch, trajectory_chamfer, visual_loss

CHAMFER = "chamfer"
VISUAL = "visual"
MIXED = "mixed"


@dataclass
class SceneObservation:
    """Ground-truth observation plus everything needed to re-simulate it.

    gt_frames, when present, is a list per camera of per-time frames; lam
    weights the L2 term against D-SSIM in visual mode.
    """

    particles0: Particles
    sim_config: SimConfig
    gt_trajectory: Trajectory
    cameras: list[Camera] = field(default_factory=list)
    gt_frames: list[list] | None = None
    loss_mode: str = CHAMFER
    lam: float = 0.8
    scene_digest: str = ""

    def __post_init__(self):
        if self.loss_mode not in (CHAMFER, VISUAL, MIXED):
            raise ValueError(f"unknown loss mode '{self.loss_mode}'")
        if self.loss_mode in (VISUAL, MIXED):
            if not self.cameras:
                raise ValueError("visual loss requires at least one camera")
            if self.gt_frames is None:
                raise ValueError("visual loss requires ground-truth frames")
            if len(self.gt_frames) != len(self.cameras):
                raise StructureMismatch("one frame list per camera required")
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("lam must lie in [0, 1]")


def render_trajectory_frames(
    particles0: Particles, traj: Trajectory, cameras: list[Camera]
) -> list[list]:
    """Re-render a trajectory for each camera, carrying particle appearance
    from the initial state and deforming covariances when F is recorded."""
    out = []
    for cam in cameras:
        frames = []
        for k in range(traj.frame_count):
            p = particles0.copy()
            p.x = traj.frames[k].copy()
            if traj.F_frames is not None:
                Fk = traj.F_frames[k]
                p.A = Fk @ particles0.A @ np.swapaxes(Fk, 1, 2)
            frames.append(render_frame(p, cam))
        out.append(frames)
    return out


def total_loss(pred_traj: Trajectory, scene: SceneObservation) -> float:
    """Eq.-style dispatch on the configured loss mode; mixed sums both."""
    if pred_traj.frame_count != scene.gt_trajectory.frame_count:
        raise StructureMismatch(
            f"trajectory lengths differ: {pred_traj.frame_count} vs "
            f"{scene.gt_trajectory.frame_count}"
        )
    chamfer_val = None
    if scene.loss_mode in (CHAMFER, MIXED):
        chamfer_val = trajectory_chamfer(pred_traj.frames, scene.gt_trajectory.frames)
        if scene.loss_mode == CHAMFER:
            return chamfer_val
    pred_frames = render_trajectory_frames(scene.particles0, pred_traj, scene.cameras)
    vis = visual_loss(pred_frames, scene.gt_frames, scene.lam)
    if scene.loss_mode == VISUAL:
        return vis
    return chamfer_val + vis


def simulate_candidate(law, theta, scene: SceneObservation) -> Trajectory:
    record_f = scene.loss_mode in (VISUAL, MIXED)
    return run_sim(
        scene.particles0, law, theta, scene.sim_config,
        record_F=record_f, scene_digest=scene.scene_digest,
    )
