"""Trajectory container and its binary file format.

Layout (all little-endian):

    magic   4 bytes  "VLTJ"
    version u32      1
    frames  u32
    count   u32      particles per frame
    has_F   u8       0 or 1
    per frame: count * 3 f32 positions, then count * 9 f32 row-major F
               (only when has_F)

A human-readable sidecar at <path>.meta carries provenance (scene digest,
config, law digest, seed) as `key: value` lines.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"VLTJ"
VERSION = 1


class TrajectoryFormatError(Exception):
    pass


@dataclass
class Trajectory:
    frames: list[np.ndarray]                    # each (n, 3) float
    F_frames: list[np.ndarray] | None = None    # each (n, 3, 3)
    metadata: dict = field(default_factory=dict)

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def particle_count(self) -> int:
        return self.frames[0].shape[0] if self.frames else 0

    def positions(self) -> np.ndarray:
        """All frames stacked, shape (frames, n, 3)."""
        return np.stack(self.frames)

    def save(self, path) -> None:
        path = Path(path)
        has_f = self.F_frames is not None
        n = self.particle_count
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<IIIB", VERSION, self.frame_count, n, 1 if has_f else 0))
            for i, x in enumerate(self.frames):
                if x.shape != (n, 3):
                    raise TrajectoryFormatError("inconsistent particle count across frames")
                fh.write(np.ascontiguousarray(x, dtype="<f4").tobytes())
                if has_f:
                    fh.write(np.ascontiguousarray(self.F_frames[i], dtype="<f4").tobytes())
        meta_lines = [f"{k}: {v}" for k, v in sorted(self.metadata.items())]
        Path(str(path) + ".meta").write_text("\n".join(meta_lines) + "\n")

    @classmethod
    def load(cls, path) -> "Trajectory":
        path = Path(path)
        raw = path.read_bytes()
        if raw[:4] != MAGIC:
            raise TrajectoryFormatError(f"{path}: bad magic {raw[:4]!r}")
        version, nframes, n, has_f = struct.unpack_from("<IIIB", raw, 4)
        if version != VERSION:
            raise TrajectoryFormatError(f"{path}: unsupported version {version}")
        pos = 17
        frames, f_frames = [], [] if has_f else None
        for _ in range(nframes):
            x = np.frombuffer(raw, dtype="<f4", count=n * 3, offset=pos)
            pos += n * 3 * 4
            frames.append(x.reshape(n, 3).astype(float))
            if has_f:
                F = np.frombuffer(raw, dtype="<f4", count=n * 9, offset=pos)
                pos += n * 9 * 4
                f_frames.append(F.reshape(n, 3, 3).astype(float))
        metadata = {}
        meta_path = Path(str(path) + ".meta")
        if meta_path.exists():
            for line in meta_path.read_text().splitlines():
                if ": " in line:
                    k, v = line.split(": ", 1)
                    metadata[k] = v
        if len(frames) != nframes:
            raise TrajectoryFormatError(f"{path}: truncated file")
        return cls(frames=frames, F_frames=f_frames, metadata=metadata)
