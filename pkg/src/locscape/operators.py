"""Fourier symbols and matrix-free application of L + V.

Three choices of L are supported: the 5-point discrete Laplacian -Delta_h,
the spectrally defined fractional Laplacian (-Delta)^alpha, and the square
of the 5-point Laplacian. Every symbol M stored here is that of -L, so
M <= 0 with M = 0 only at the zero frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import GridShape, ScalarField, inner
from .spectral import SymbolTable, filter_real

DENSE_MAX_N = 32


@dataclass(frozen=True)
class DiscreteLaplacian:
    def describe(self) -> str:
        return "lap"


@dataclass(frozen=True)
class SpectralFractional:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"fractional order must lie in (0, 1], got {self.alpha}")

    def describe(self) -> str:
        return f"frac:{self.alpha:g}"


@dataclass(frozen=True)
class DiscreteBiLaplacian:
    def describe(self) -> str:
        return "bilap"


OperatorKind = DiscreteLaplacian | SpectralFractional | DiscreteBiLaplacian


def parse_operator(text: str) -> OperatorKind:
    """Parse ``lap``, ``bilap`` or ``frac:<alpha>``."""
    text = text.strip().lower()
    if text == "lap":
        return DiscreteLaplacian()
    if text == "bilap":
        return DiscreteBiLaplacian()
    if text.startswith("frac:"):
        return SpectralFractional(float(text[5:]))
    raise ValueError(f"unknown operator {text!r}; expected lap, bilap or frac:<alpha>")


def _laplacian_values(shape: GridShape) -> np.ndarray:
    s = np.sin(np.pi * np.arange(shape.n) / shape.n) ** 2
    return -(4.0 / shape.h ** 2) * (s[:, None] + s[None, :])


@lru_cache(maxsize=64)
def operator_symbol(kind: OperatorKind, shape: GridShape) -> SymbolTable:
    if isinstance(kind, DiscreteLaplacian):
        values = _laplacian_values(shape)
    elif isinstance(kind, SpectralFractional):
        xi = shape.frequencies(signed=True)
        values = -((xi[:, None] ** 2 + xi[None, :] ** 2) ** kind.alpha)
    elif isinstance(kind, DiscreteBiLaplacian):
        values = -(_laplacian_values(shape) ** 2)
    else:
        raise TypeError(f"not an operator kind: {kind!r}")
    return SymbolTable(shape, kind.describe(), values)


def _check(V: ScalarField, f: ScalarField):
    if V.shape != f.shape:
        raise ValueError(f"shape mismatch: potential {V.shape} vs field {f.shape}")


def apply_operator(kind: OperatorKind, V: np.ndarray, shape: GridShape, x: np.ndarray) -> np.ndarray:
    """(L + V) x on raw arrays; ``x`` is (n, n) or (n, n, batch)."""
    neg = operator_symbol(kind, shape)
    lx = -filter_real(x, neg)
    if x.ndim > 2:
        return lx + V[..., None] * x
    return lx + V * x


def apply_schrodinger(kind: OperatorKind, V: ScalarField, f: ScalarField) -> ScalarField:
    _check(V, f)
    return ScalarField(f.shape, apply_operator(kind, V.values, f.shape, f.values))


def laplacian_stencil(f: ScalarField) -> ScalarField:
    """Delta_h f by the periodic 5-point stencil (reference route, no FFTs)."""
    v = f.values
    out = (np.roll(v, 1, 0) + np.roll(v, -1, 0) + np.roll(v, 1, 1) + np.roll(v, -1, 1) - 4.0 * v)
    return ScalarField(f.shape, out / f.shape.h ** 2)


def dense_matrix(kind: OperatorKind, V: ScalarField) -> np.ndarray:
    """Assemble L + V as an (n^2, n^2) symmetric matrix; small grids only."""
    shape = V.shape
    n = shape.n
    if n > DENSE_MAX_N:
        raise ValueError(f"dense assembly limited to n <= {DENSE_MAX_N}, got n={n}")
    # L is a circulant: column j is the impulse response shifted to site j.
    delta = np.zeros((n, n))
    delta[0, 0] = 1.0
    response = -filter_real(delta, operator_symbol(kind, shape))
    idx = np.arange(n)
    dx = (idx[:, None, None, None] - idx[None, None, :, None]) % n
    dy = (idx[None, :, None, None] - idx[None, None, None, :]) % n
    A = response[dx, dy].reshape(n * n, n * n)
    A = 0.5 * (A + A.T)
    A[np.diag_indices_from(A)] += V.values.ravel()
    return A


def rayleigh_quotient(kind: OperatorKind, V: ScalarField, f: ScalarField) -> float:
    norm2 = inner(f, f)
    if norm2 == 0.0:
        raise ValueError("Rayleigh quotient of the zero field")
    return inner(f, apply_schrodinger(kind, V, f)) / norm2
