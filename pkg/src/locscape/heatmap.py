"""8-bit grayscale PGM heatmaps of grid fields."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .grid import ScalarField


def to_pixels(f: ScalarField) -> np.ndarray:
    v = f.values
    lo, hi = v.min(), v.max()
    if not hi > lo:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.rint(255.0 * (v - lo) / (hi - lo)).astype(np.uint8)


def render_heatmap(f: ScalarField, path, minima=(), centers=()) -> Path:
    """Write a binary PGM (P5), min -> 0 and max -> 255.

    Overlay mode: ``minima`` locations are drawn black (0) and eigenfunction
    ``centers`` white (255).
    """
    pix = to_pixels(f)
    for x, y in minima:
        pix[x, y] = 0
    for x, y in centers:
        pix[x, y] = 255
    n = f.shape.n
    path = Path(path)
    path.write_bytes(f"P5\n{n} {n}\n255\n".encode("ascii") + pix.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        end = pos
        while not raw[end:end + 1].isspace():
            end += 1
        tokens.append(raw[pos:end].decode("ascii"))
        pos = end
    if tokens[0] != "P5":
        raise ValueError(f"{path}: not a binary PGM")
    width, height, maxval = map(int, tokens[1:])
    if maxval > 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    data = np.frombuffer(raw[pos + 1: pos + 1 + width * height], dtype=np.uint8)
    return data.reshape(height, width).copy()
