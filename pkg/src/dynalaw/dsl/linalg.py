"""Rotation-consistent 3x3 SVD."""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteInputError


def svd3(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """SVD of a single 3x3 matrix with det(U) = det(V) = +1.

    The sign deficit of a reflection is pushed into the smallest-magnitude
    singular value, so entries of S may be negative when det(M) < 0.
    S is sorted by descending magnitude. U @ diag(S) @ V.T reconstructs M.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise NonFiniteInputError("svd3: input has non-finite entries")
    U, S, V = svd3_batch(M[None])
    return U[0], S[0], V[0]


def svd3_batch(M: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched rotation-consistent SVD; M has shape (n, 3, 3).

    Returns (U, S, V) with M = U @ diag(S) @ V^T per item. Inputs must be
    finite (callers pre-mask bad lanes).
    """
    U, S, Vt = np.linalg.svd(M)
    V = np.swapaxes(Vt, -1, -2)
    # LAPACK returns S >= 0 descending; fold any reflection into the last
    # (smallest) singular value so U and V are proper rotations.
    du = np.linalg.det(U)
    flip_u = du < 0
    U[flip_u, :, 2] *= -1.0
    S[flip_u, 2] *= -1.0
    dv = np.linalg.det(V)
    flip_v = dv < 0
    V[flip_v, :, 2] *= -1.0
    S[flip_v, 2] *= -1.0
    return U, S, V
