"""Discrete Fourier transform on the torus grid.

Coefficients are ``F(k, l) = h^2 * sum_{x,y} exp(-i(xi_k x + eta_l y)) f(x, y)``
with ``xi_k = 2*pi*k / (n*h)``, so that on the unit torus the transform is
the usual h^2-weighted sum and the inverse is a plain sum over frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .grid import GridShape, ScalarField, _frozen


@dataclass(frozen=True, eq=False)
class SpectralField:
    shape: GridShape
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        n = self.shape.n
        if c.size != n * n:
            raise ValueError(f"spectrum has {c.size} coefficients, grid needs {n * n}")
        object.__setattr__(self, "coeffs", _frozen(c.reshape(n, n)))


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """A real Fourier multiplier over the full (n, n) frequency grid, FFT index order."""

    shape: GridShape
    kind: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        n = self.shape.n
        if v.shape != (n, n):
            raise ValueError(f"symbol must have shape {(n, n)}, got {v.shape}")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def half(self) -> np.ndarray:
        """Columns 0..n/2, the part used with real-to-complex transforms."""
        return self.values[:, : self.shape.n // 2 + 1]


def fft2(f: ScalarField) -> SpectralField:
    h = f.shape.h
    return SpectralField(f.shape, h * h * sfft.fft2(f.values))


def ifft2(F: SpectralField) -> ScalarField:
    """Inverse transform; the imaginary residue of a conjugate-symmetric spectrum is dropped."""
    h = F.shape.h
    return ScalarField(F.shape, sfft.ifft2(F.coeffs).real / (h * h))


def apply_multiplier(F: SpectralField, m: SymbolTable) -> SpectralField:
    if F.shape != m.shape:
        raise ValueError(f"shape mismatch: spectrum {F.shape} vs symbol {m.shape}")
    return SpectralField(F.shape, F.coeffs * m.values)


def filter_real(values: np.ndarray, symbol: SymbolTable) -> np.ndarray:
    """Apply a real, even multiplier to real data via real-to-complex FFTs.

    ``values`` may carry trailing batch axes after the two grid axes.
    Normalization cancels, so no h factors appear.
    """
    n = symbol.shape.n
    half = symbol.half
    if values.ndim > 2:
        half = half.reshape(half.shape + (1,) * (values.ndim - 2))
    spec = sfft.rfft2(values, axes=(0, 1))
    spec *= half
    return sfft.irfft2(spec, s=(n, n), axes=(0, 1))
