import numpy as np
import pytest

from dynalaw.dsl import NonFiniteInputError, svd3, svd3_batch

from oracles import random_F


def test_identity():
    U, S, V = svd3(np.eye(3))
    assert np.allclose(U, np.eye(3))
    assert np.allclose(S, [1.0, 1.0, 1.0])
    assert np.allclose(V, np.eye(3))


def test_reflection_matches_eigendecomposition_of_gram_matrix():
    # Reference: singular values are sqrt of eigenvalues of M^T M; the sign
    # deficit of det(M) < 0 must land in the smallest-magnitude entry.
    M = np.diag([-2.0, 1.0, 1.0])
    U, S, V = svd3(M)
    w = np.sort(np.sqrt(np.linalg.eigvalsh(M.T @ M)))[::-1]
    assert np.allclose(np.abs(S), w)
    assert np.prod(np.sign(S)) < 0  # one negative entry for det < 0
    assert abs(np.abs(S[2]) - w.min()) < 1e-12 or S[2] < 0  # deficit in smallest
    assert np.allclose(U @ np.diag(S) @ V.T, M, atol=1e-12)
    assert np.isclose(np.linalg.det(U), 1.0)
    assert np.isclose(np.linalg.det(V), 1.0)


def test_property_reconstruction_and_rotations():
    rng = np.random.default_rng(7)
    mats = np.stack([random_F(rng) for _ in range(1000)])
    U, S, V = svd3_batch(mats)
    recon = U @ (S[:, :, None] * np.swapaxes(V, 1, 2))
    rel = np.linalg.norm(recon - mats, axis=(1, 2)) / np.linalg.norm(mats, axis=(1, 2))
    assert rel.max() < 1e-9
    assert np.allclose(np.linalg.det(U), 1.0, atol=1e-9)
    assert np.allclose(np.linalg.det(V), 1.0, atol=1e-9)
    # magnitudes sorted descending
    mags = np.abs(S)
    assert (mags[:, 0] + 1e-15 >= mags[:, 1]).all()
    assert (mags[:, 1] + 1e-15 >= mags[:, 2]).all()


def test_negative_determinant_batch():
    rng = np.random.default_rng(3)
    mats = np.stack([random_F(rng) for _ in range(100)])
    mats[:, :, 0] *= -1.0  # flip orientation
    U, S, V = svd3_batch(mats)
    recon = U @ (S[:, :, None] * np.swapaxes(V, 1, 2))
    assert np.allclose(recon, mats, atol=1e-9)
    assert np.allclose(np.linalg.det(U), 1.0, atol=1e-9)
    assert np.allclose(np.linalg.det(V), 1.0, atol=1e-9)
    assert ((S < 0).sum(axis=1) % 2 == 1).all()


def test_nonfinite_rejected():
    M = np.eye(3)
    M[1, 1] = np.nan
    with pytest.raises(NonFiniteInputError):
        svd3(M)
