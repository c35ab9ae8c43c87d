import numpy as np
import pytest

from dynalaw.mpm import Particles
from dynalaw.render import Camera, Frame, composite, project_splat, read_ppm, render_frame, write_ppm

from oracles import random_rotation


def make_particles(xs, colors=None, opacity=0.8, cov_scale=1e-4, A=None):
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[0]
    if colors is None:
        colors = np.tile([0.9, 0.4, 0.2], (n, 1))
    if A is None:
        A = np.tile(cov_scale * np.eye(3), (n, 1, 1))
    return Particles(
        x=xs, v=np.zeros((n, 3)), F=np.tile(np.eye(3), (n, 1, 1)),
        C=np.zeros((n, 3, 3)), mass=np.ones(n), volume0=np.ones(n),
        color=np.asarray(colors, dtype=float),
        opacity=np.full(n, float(opacity)), A=A,
    )


def test_project_isotropic_covariance_and_depth():
    cam = Camera(axis="+Z", image_size=(32, 32))
    s2 = 2.5e-4
    p = make_particles([[0.25, 0.5, 0.75]], cov_scale=s2)
    center, cov2d, depth, alpha, color = project_splat(p, 0, cam)
    assert np.allclose(cov2d, s2 * np.eye(2))
    assert depth == 0.75
    assert np.allclose(center, [0.25 * 32, (1 - 0.5) * 32])


def test_project_drops_axis_coupling():
    cam = Camera(axis="+Z", image_size=(32, 32))
    A = np.array([[2e-4, 0.0, 5e-5], [0.0, 3e-4, -4e-5], [5e-5, -4e-5, 1e-4]])
    p = make_particles([[0.5, 0.5, 0.5]], A=A[None].copy())
    _, cov2d, _, _, _ = project_splat(p, 0, cam)
    assert np.allclose(cov2d, A[:2, :2])


def test_projected_covariance_matches_numerical_marginalization():
    # Integrate the unnormalized 3D Gaussian density over the view axis on a
    # fine grid and compare its second moments with the projected minor.
    rng = np.random.default_rng(1)
    Q = random_rotation(rng)
    A = Q @ np.diag([4e-4, 1.5e-4, 0.6e-4]) @ Q.T
    cam = Camera(axis="+Z", image_size=(32, 32))
    p = make_particles([[0.5, 0.5, 0.5]], A=A[None].copy())
    _, cov2d, _, _, _ = project_splat(p, 0, cam)

    L = 5.0 * np.sqrt(np.linalg.eigvalsh(A).max())
    grid = np.linspace(-L, L, 121)
    X, Y, Z = np.meshgrid(grid, grid, grid, indexing="ij")
    pts = np.stack([X, Y, Z], axis=-1)
    Ainv = np.linalg.inv(A)
    q = np.einsum("...i,ij,...j->...", pts, Ainv, pts)
    rho = np.exp(-0.5 * q)
    marg = rho.sum(axis=2)  # drop the +Z axis
    total = marg.sum()
    mx = (marg * X[:, :, 0]).sum() / total
    my = (marg * Y[:, :, 0]).sum() / total
    cxx = (marg * (X[:, :, 0] - mx) ** 2).sum() / total
    cyy = (marg * (Y[:, :, 0] - my) ** 2).sum() / total
    cxy = (marg * (X[:, :, 0] - mx) * (Y[:, :, 0] - my)).sum() / total
    num = np.array([[cxx, cxy], [cxy, cyy]])
    assert np.abs(num - cov2d).max() / np.abs(cov2d).max() < 5e-3


def test_composite_no_splats_gives_background():
    cam = Camera(axis="+Z", image_size=(16, 16), background=(0.1, 0.2, 0.3))
    frame = composite([], cam)
    assert np.allclose(frame.pixels, [0.1, 0.2, 0.3], atol=1e-7)


def test_composite_opaque_splat_center_pixel():
    cam = Camera(axis="+Z", image_size=(32, 32), background=(0.0, 0.0, 0.0))
    # world position mapping exactly onto the center of pixel (15, 15)
    u = 15.5 / 32.0
    v = 1.0 - 15.5 / 32.0
    p = make_particles([[u, v, 0.5]], colors=[[0.3, 0.6, 0.9]], opacity=1.0)
    frame = render_frame(p, cam)
    assert np.allclose(frame.pixels[15, 15], [0.3, 0.6, 0.9], atol=1e-6)


def test_composite_two_coincident_splats_closed_form():
    cam = Camera(axis="+Z", image_size=(32, 32), background=(1.0, 1.0, 1.0))
    u = 16.5 / 32.0
    v = 1.0 - 16.5 / 32.0
    c1, c2, b = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), 1.0
    p = make_particles([[u, v, 0.3], [u, v, 0.6]], colors=[c1, c2], opacity=0.5)
    frame = render_frame(p, cam)
    want = 0.5 * c1 + 0.25 * c2 + 0.25 * np.array([b, b, b])
    assert np.allclose(frame.pixels[16, 16], want, atol=1e-6)


def test_weight_identity_with_early_exit_disabled():
    rng = np.random.default_rng(3)
    xs = 0.3 + 0.4 * rng.random((40, 3))
    p = make_particles(xs, opacity=0.9, cov_scale=4e-3)
    cam = Camera(axis="+Z", image_size=(24, 24))
    _, stats = render_frame(p, cam, early_exit=0.0, return_stats=True)
    assert np.abs(stats.weight_total - 1.0).max() < 1e-6


def test_opaque_convergence_monotone():
    cam = Camera(axis="+Z", image_size=(32, 32), background=(0.0, 0.0, 0.0))
    u = 16.5 / 32.0
    v = 1.0 - 16.5 / 32.0
    prev = 0.0
    for n in (1, 2, 4, 8, 16):
        xs = [[u, v, 0.1 + 0.01 * k] for k in range(n)]
        p = make_particles(xs, colors=[[0.0, 0.0, 1.0]] * n, opacity=0.9)
        frame = render_frame(p, cam)
        val = frame.pixels[16, 16, 2]
        assert val >= prev - 1e-7
        prev = val
    assert prev > 0.999


def test_singular_covariance_skipped_with_counter():
    cam = Camera(axis="+Z", image_size=(16, 16), background=(0.5, 0.5, 0.5))
    A = np.zeros((1, 3, 3))
    A[0] = np.diag([1e-4, 1e-18, 1e-4])  # flat in one in-plane direction
    p = make_particles([[0.5, 0.5, 0.5]], A=A)
    frame, stats = render_frame(p, cam, return_stats=True)
    assert stats.skipped_singular == 1
    assert np.allclose(frame.pixels, 0.5, atol=1e-7)


def test_render_deterministic():
    rng = np.random.default_rng(5)
    xs = 0.3 + 0.4 * rng.random((30, 3))
    p = make_particles(xs, cov_scale=2e-3, opacity=0.7)
    cam = Camera(axis="+Z", image_size=(32, 32))
    a = render_frame(p, cam)
    b = render_frame(p, cam)
    assert np.array_equal(a.pixels, b.pixels)


def test_integer_pixel_shift_theorem():
    cam = Camera(axis="+Z", image_size=(64, 64))
    rng = np.random.default_rng(7)
    xs = np.column_stack([
        0.35 + 0.1 * rng.random(12), 0.35 + 0.1 * rng.random(12), rng.random(12)
    ])
    p0 = make_particles(xs, cov_scale=1e-3, opacity=0.8)
    k = 8  # pixels; 8/64 = 0.125 m shift along +x
    p1 = make_particles(xs + np.array([k / 64.0, 0.0, 0.0]), cov_scale=1e-3, opacity=0.8)
    f0 = render_frame(p0, cam).pixels
    f1 = render_frame(p1, cam).pixels
    rolled = np.roll(f0, k, axis=1)
    assert np.abs(f1[:, k:] - rolled[:, k:]).max() < 2e-6
    # cross-correlation peak sits at the shift
    g0 = f0.sum(axis=2)
    g1 = f1.sum(axis=2)
    scores = [
        (g1 * np.roll(g0, s, axis=1))[:, 16:-16].sum() for s in range(-12, 13)
    ]
    assert int(np.argmax(scores)) - 12 == k or int(np.argmax(scores)) - 12 == -k


def test_opposite_axis_of_symmetric_scene_is_horizontal_flip():
    cam_p = Camera(axis="+Z", image_size=(32, 32))
    cam_m = Camera(axis="-Z", image_size=(32, 32))
    xs = [[0.375, 0.5, 0.4], [0.625, 0.5, 0.6]]  # x-mirror-symmetric pair
    colors = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    p = make_particles(xs, colors=colors, cov_scale=8e-4, opacity=0.6)
    fp = render_frame(p, cam_p).pixels
    fm = render_frame(p, cam_m).pixels
    assert np.abs(fm - np.flip(fp, axis=1)).max() < 1e-6


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    frame = Frame(pixels=rng.random((20, 24, 3)).astype(np.float32))
    path = tmp_path / "f.ppm"
    write_ppm(frame, path)
    back = read_ppm(path)
    assert back.pixels.shape == (20, 24, 3)
    assert np.abs(back.pixels - frame.pixels).max() <= 0.5 / 255 + 1e-6


def test_ppm_write_deterministic(tmp_path):
    frame = Frame(pixels=np.full((16, 16, 3), 0.25, dtype=np.float32))
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    write_ppm(frame, a)
    write_ppm(frame, b)
    assert a.read_bytes() == b.read_bytes()
