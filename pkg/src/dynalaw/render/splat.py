"""Orthographic Gaussian-splat rasterizer with front-to-back compositing.

Per pixel: C = sum_i sigma_i c_i prod_{j<i} (1 - sigma_j), remaining
transmittance times the background. sigma_i is opacity times the projected
2D Gaussian weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..mpm.particles import Particles
from .camera import Camera

EARLY_EXIT_DEFAULT = 1e-4
COND_MIN = 1e-10  # min/max eigenvalue ratio below this skips the splat


@dataclass
class Frame:
    pixels: np.ndarray  # (h, w, 3) float32 in [0, 1]

    @property
    def size(self) -> tuple[int, int]:
        h, w, _ = self.pixels.shape
        return (w, h)


@dataclass
class CompositeStats:
    skipped_singular: int = 0
    # per-pixel sum of compositing weights plus final transmittance; equals
    # one identically when early exit is disabled
    weight_total: np.ndarray | None = None


def project_splat(p: Particles, i: int, cam: Camera):
    """Project one particle: (center2d px, cov2d world-units minor, depth m,
    alpha, color)."""
    u_dim, u_sign, v_dim, v_sign, d_dim, d_sign = cam.basis
    x = p.x[i]
    center = _center_px(x[u_dim], x[v_dim], cam)
    A = p.A[i]
    cov2d = np.array(
        [[A[u_dim, u_dim], A[u_dim, v_dim]], [A[v_dim, u_dim], A[v_dim, v_dim]]]
    )
    depth = d_sign * x[d_dim]
    return center, cov2d, depth, float(p.opacity[i]), p.color[i].copy()


def _center_px(u: np.ndarray, v: np.ndarray, cam: Camera):
    (u0, u1), (v0, v1) = cam.world_window
    u_dim, u_sign, v_dim, v_sign, _, _ = cam.basis
    w, h = cam.image_size
    nu = (u - u0) / (u1 - u0)
    if u_sign < 0:
        nu = 1.0 - nu
    nv = (v - v0) / (v1 - v0)
    if v_sign < 0:
        nv = 1.0 - nv
    return np.stack(np.broadcast_arrays(nu * w, (1.0 - nv) * h), axis=-1)


def _project_all(p: Particles, cam: Camera):
    u_dim, u_sign, v_dim, v_sign, d_dim, d_sign = cam.basis
    centers = _center_px(p.x[:, u_dim], p.x[:, v_dim], cam)  # (n, 2)
    dims = [u_dim, v_dim]
    cov = p.A[:, dims][:, :, dims]  # (n, 2, 2) world minor
    depth = d_sign * p.x[:, d_dim]
    return centers, cov, depth


def _cov_to_pixels(cov: np.ndarray, cam: Camera) -> np.ndarray:
    """World-unit 2x2 minors -> pixel-space covariances (mirror-aware)."""
    _, u_sign, _, v_sign, _, _ = cam.basis
    ppm_u, ppm_v = cam.pixels_per_meter
    # image rows grow downward: the v axis contributes with flipped sign
    su = float(u_sign) * ppm_u
    sv = -float(v_sign) * ppm_v
    out = cov.copy()
    out[..., 0, 0] *= su * su
    out[..., 0, 1] *= su * sv
    out[..., 1, 0] *= su * sv
    out[..., 1, 1] *= sv * sv
    return out


def composite(
    splats,
    cam: Camera,
    early_exit: float = EARLY_EXIT_DEFAULT,
    return_stats: bool = False,
):
    """Alpha-composite depth-sorted splats (any iterable of project_splat
    tuples, already front-to-back)."""
    w, h = cam.image_size
    color = np.zeros((h, w, 3))
    trans = np.ones((h, w))
    weight_total = np.zeros((h, w)) if return_stats else None
    skipped = 0

    for center, cov_world, _depth, alpha, c in splats:
        cov = _cov_to_pixels(np.asarray(cov_world, dtype=float)[None], cam)[0]
        a, b, d = cov[0, 0], cov[0, 1], cov[1, 1]
        half_tr = 0.5 * (a + d)
        disc = np.sqrt(max(0.25 * (a - d) ** 2 + b * b, 0.0))
        lam_max = half_tr + disc
        lam_min = half_tr - disc
        if lam_max <= 0.0 or lam_min / lam_max < COND_MIN:
            skipped += 1
            continue
        r = 3.0 * np.sqrt(lam_max)
        x0 = max(int(np.floor(center[0] - r - 0.5)), 0)
        x1 = min(int(np.ceil(center[0] + r + 0.5)), w)
        y0 = max(int(np.floor(center[1] - r - 0.5)), 0)
        y1 = min(int(np.ceil(center[1] + r + 0.5)), h)
        if x0 >= x1 or y0 >= y1:
            continue

        xs = np.arange(x0, x1) + 0.5
        ys = np.arange(y0, y1) + 0.5
        dx = xs[None, :] - center[0]
        dy = ys[:, None] - center[1]
        det = a * d - b * b
        # quadratic form with the inverse covariance
        q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det
        sigma = alpha * np.exp(-0.5 * q)

        t_block = trans[y0:y1, x0:x1]
        contrib = t_block * sigma
        if early_exit > 0.0:
            contrib = np.where(t_block < early_exit, 0.0, contrib)
            keep = np.where(t_block < early_exit, 1.0, 1.0 - sigma)
        else:
            keep = 1.0 - sigma
        color[y0:y1, x0:x1] += contrib[:, :, None] * c[None, None, :]
        if weight_total is not None:
            weight_total[y0:y1, x0:x1] += contrib
        trans[y0:y1, x0:x1] = t_block * keep

    bg = np.asarray(cam.background, dtype=float)
    color += trans[:, :, None] * bg[None, None, :]
    if weight_total is not None:
        weight_total += trans
    frame = Frame(pixels=np.clip(color, 0.0, 1.0).astype(np.float32))
    if return_stats:
        return frame, CompositeStats(skipped_singular=skipped, weight_total=weight_total)
    return frame


def render_frame(
    p: Particles,
    cam: Camera,
    early_exit: float = EARLY_EXIT_DEFAULT,
    return_stats: bool = False,
):
    """Project all particles, depth-sort (ties by index), composite."""
    centers, cov, depth = _project_all(p, cam)
    order = np.lexsort((np.arange(p.n), depth))
    splats = (
        (centers[i], cov[i], depth[i], float(p.opacity[i]), p.color[i])
        for i in order
    )
    return composite(splats, cam, early_exit=early_exit, return_stats=return_stats)
