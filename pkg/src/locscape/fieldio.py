"""LSF1 field files: ``LSF1 n=<n> h=<h>\\n`` followed by n*n little-endian float64 values, row-major."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .grid import GridShape, ScalarField, UnitConvention

MAGIC = "LSF1"
_HEADER = re.compile(r"^LSF1 n=(\d+) h=(\S+)$")


def shape_from_header(n: int, h: float) -> GridShape:
    if h == 1.0:
        return GridShape(n, UnitConvention.LATTICE)
    if h == 1.0 / n:
        return GridShape(n, UnitConvention.DOMAIN)
    raise ValueError(f"mesh size h={h!r} matches neither 1/n nor 1 for n={n}")


def write_field(path, field: ScalarField) -> None:
    header = f"{MAGIC} n={field.shape.n} h={field.shape.h!r}\n".encode("ascii")
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def read_field(path) -> ScalarField:
    raw = Path(path).read_bytes()
    newline = raw.find(b"\n")
    if newline < 0:
        raise ValueError(f"{path}: missing LSF1 header line")
    try:
        header = raw[:newline].decode("ascii")
    except UnicodeDecodeError as exc:
        raise ValueError(f"{path}: malformed header") from exc
    m = _HEADER.match(header)
    if m is None:
        raise ValueError(f"{path}: malformed header {header!r}")
    n = int(m.group(1))
    try:
        h = float(m.group(2))
    except ValueError as exc:
        raise ValueError(f"{path}: malformed mesh size {m.group(2)!r}") from exc
    shape = shape_from_header(n, h)
    payload = raw[newline + 1:]
    if len(payload) != 8 * n * n:
        raise ValueError(f"{path}: payload holds {len(payload)} bytes, header n={n} needs {8 * n * n}")
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(n, n)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{path}: non-finite values in payload")
    return ScalarField(shape, values)
