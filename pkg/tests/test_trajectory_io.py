import numpy as np
import pytest

from dynalaw.mpm import Trajectory, TrajectoryFormatError


def make_traj(n=7, frames=3, with_f=True, seed=0):
    rng = np.random.default_rng(seed)
    pos = [rng.random((n, 3)) for _ in range(frames)]
    fs = [np.eye(3) + 0.01 * rng.standard_normal((n, 3, 3)) for _ in range(frames)] if with_f else None
    return Trajectory(frames=pos, F_frames=fs,
                      metadata={"seed": "0", "law_digest": "abc", "config_digest": "def",
                                "scene_digest": "xyz"})


def test_round_trip(tmp_path):
    t = make_traj()
    path = tmp_path / "t.vltj"
    t.save(path)
    back = Trajectory.load(path)
    assert back.frame_count == t.frame_count
    assert back.particle_count == t.particle_count
    for a, b in zip(t.frames, back.frames):
        assert np.allclose(a, b, atol=1e-6)  # f32 storage
    for a, b in zip(t.F_frames, back.F_frames):
        assert np.allclose(a, b, atol=1e-6)
    assert back.metadata["law_digest"] == "abc"


def test_header_layout(tmp_path):
    t = make_traj(n=5, frames=2, with_f=False)
    path = tmp_path / "t.vltj"
    t.save(path)
    raw = path.read_bytes()
    assert raw[:4] == b"VLTJ"
    assert int.from_bytes(raw[4:8], "little") == 1   # version
    assert int.from_bytes(raw[8:12], "little") == 2  # frames
    assert int.from_bytes(raw[12:16], "little") == 5  # particles
    assert raw[16] == 0  # has_F
    assert len(raw) == 17 + 2 * 5 * 3 * 4


def test_save_is_byte_stable(tmp_path):
    t = make_traj(seed=5)
    p1, p2 = tmp_path / "a.vltj", tmp_path / "b.vltj"
    t.save(p1)
    t.save(p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.vltj"
    path.write_bytes(b"NOPE" + b"\0" * 20)
    with pytest.raises(TrajectoryFormatError):
        Trajectory.load(path)


def test_inconsistent_counts_rejected(tmp_path):
    t = make_traj(with_f=False)
    t.frames[1] = t.frames[1][:-1]
    with pytest.raises(TrajectoryFormatError):
        t.save(tmp_path / "x.vltj")
