"""Loss functions: Chamfer, D-SSIM, and the blended visual loss."""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import correlate1d
from scipy.spatial import cKDTree

FAILURE_SENTINEL = 1e9  # ordered worse than any real loss; keeps sorting total

SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2
_SSIM_SIGMA = 1.5
_SSIM_WIN = 11

_BRUTE_LIMIT = 256  # below this, exact O(n^2) distances; KD-tree above


class EmptySet(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class StructureMismatch(Exception):
    pass


def chamfer_l2(A, B) -> float:
    """Symmetric mean squared nearest-neighbor distance between point sets."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.size == 0 or B.size == 0:
        raise EmptySet("chamfer_l2 requires non-empty point sets")
    if min(len(A), len(B)) <= _BRUTE_LIMIT:
        d2 = ((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2)
        min_a = d2.min(axis=1)
        min_b = d2.min(axis=0)
    else:
        min_a = cKDTree(B).query(A)[0] ** 2
        min_b = cKDTree(A).query(B)[0] ** 2
    return math.fsum(min_a) / len(A) + math.fsum(min_b) / len(B)


def trajectory_chamfer(frames_a, frames_b) -> float:
    """Mean per-frame Chamfer over two equally long frame sequences."""
    if len(frames_a) != len(frames_b):
        raise StructureMismatch(
            f"frame counts differ: {len(frames_a)} vs {len(frames_b)}"
        )
    vals = [chamfer_l2(a, b) for a, b in zip(frames_a, frames_b)]
    return math.fsum(vals) / len(vals)


def _gauss_kernel():
    x = np.arange(_SSIM_WIN) - (_SSIM_WIN - 1) / 2.0
    g = np.exp(-(x ** 2) / (2.0 * _SSIM_SIGMA ** 2))
    return g / g.sum()


_KERNEL = _gauss_kernel()


def _filt(img: np.ndarray) -> np.ndarray:
    out = correlate1d(img, _KERNEL, axis=0, mode="reflect")
    return correlate1d(out, _KERNEL, axis=1, mode="reflect")


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Channel-averaged SSIM on [0, 1] images, 11x11 Gaussian window."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim == 2:
        a = a[:, :, None]
        b = b[:, :, None]
    vals = []
    for c in range(a.shape[2]):
        x, y = a[:, :, c], b[:, :, c]
        mu_x = _filt(x)
        mu_y = _filt(y)
        sxx = _filt(x * x) - mu_x * mu_x
        syy = _filt(y * y) - mu_y * mu_y
        sxy = _filt(x * y) - mu_x * mu_y
        num = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * sxy + SSIM_C2)
        den = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (sxx + syy + SSIM_C2)
        vals.append(float((num / den).mean()))
    return math.fsum(vals) / len(vals)


def dssim(a, b) -> float:
    """(1 - SSIM) / 2; zero for identical images, bounded by [0, 1]."""
    pa = a.pixels if hasattr(a, "pixels") else a
    pb = b.pixels if hasattr(b, "pixels") else b
    return (1.0 - ssim(pa, pb)) / 2.0


def mse(a, b) -> float:
    pa = np.asarray(a.pixels if hasattr(a, "pixels") else a, dtype=float)
    pb = np.asarray(b.pixels if hasattr(b, "pixels") else b, dtype=float)
    if pa.shape != pb.shape:
        raise DimensionMismatch(f"image shapes differ: {pa.shape} vs {pb.shape}")
    return float(((pa - pb) ** 2).mean())


def visual_loss(pred_frames, gt_frames, lam: float) -> float:
    """Mean over views and times of lam * MSE + (1 - lam) * D-SSIM.

    Both arguments are lists (views) of lists (times) of frames.
    """
    if len(pred_frames) != len(gt_frames):
        raise StructureMismatch("view counts differ")
    vals = []
    for view_p, view_g in zip(pred_frames, gt_frames):
        if len(view_p) != len(view_g):
            raise StructureMismatch("frame counts differ within a view")
        for fp, fg in zip(view_p, view_g):
            vals.append(lam * mse(fp, fg) + (1.0 - lam) * dssim(fp, fg))
    if not vals:
        raise StructureMismatch("no frames to compare")
    return math.fsum(vals) / len(vals)
