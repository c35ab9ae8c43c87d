"""Binary PPM (P6, maxval 255) export/import for frame inspection."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .splat import Frame


def write_ppm(frame: Frame, path) -> None:
    h, w, _ = frame.pixels.shape
    data = np.clip(np.rint(frame.pixels.astype(float) * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(data.tobytes())


def read_ppm(path) -> Frame:
    raw = Path(path).read_bytes()
    if not raw.startswith(b"P6"):
        raise ValueError(f"{path}: not a binary PPM")
    # header: magic, dimensions, maxval; single whitespace after maxval
    parts = raw.split(b"\n", 3)
    w, h = (int(t) for t in parts[1].split())
    maxval = int(parts[2])
    body = parts[3][: w * h * 3]
    pix = np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3).astype(np.float32)
    return Frame(pixels=pix / float(maxval))
