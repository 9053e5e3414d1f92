"""Filtered potentials W = G * V and the smoothing-scale helpers.

The averaged heat filter is the time average of the heat semigroup of the
chosen operator, with multiplier ``(exp(tM) - 1) / (tM)``. Applying it
costs one forward and one inverse FFT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .grid import GridShape, ScalarField
from .operators import DiscreteLaplacian, OperatorKind, operator_symbol
from .spectral import SymbolTable, filter_real

# Below this value of t*M the averaged heat multiplier is -1/(tM) to machine precision.
ASYMPTOTIC_SWITCH = -700.0


@dataclass(frozen=True)
class AveragedHeat:
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"smoothing time must be positive, got {self.t}")

    method = "heat"

    @property
    def param(self) -> float:
        return self.t


@dataclass(frozen=True)
class Gaussian:
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"smoothing time must be positive, got {self.t}")

    method = "gauss"

    @property
    def param(self) -> float:
        return self.t


@dataclass(frozen=True)
class Box:
    """Plain average over the (2w+1) x (2w+1) block of sites around each point."""

    halfwidth: int

    def __post_init__(self):
        if int(self.halfwidth) != self.halfwidth or self.halfwidth < 1:
            raise ValueError(f"box half-width must be an integer >= 1, got {self.halfwidth}")

    method = "box"

    @property
    def param(self) -> float:
        return self.halfwidth


FilterKind = AveragedHeat | Gaussian | Box


def averaged_heat_multiplier(tm: np.ndarray) -> np.ndarray:
    """(exp(x) - 1) / x for x = t*M <= 0, equal to 1 at x = 0."""
    tm = np.asarray(tm, dtype=np.float64)
    out = np.ones_like(tm)
    far = tm < ASYMPTOTIC_SWITCH
    mid = (tm != 0.0) & ~far
    out[mid] = np.expm1(tm[mid]) / tm[mid]
    out[far] = -1.0 / tm[far]
    return out


def box_multiplier(shape: GridShape, halfwidth: int) -> np.ndarray:
    n = shape.n
    if 2 * halfwidth + 1 > n:
        raise ValueError(f"box of half-width {halfwidth} does not fit on an n={n} torus")
    offsets = np.arange(-halfwidth, halfwidth + 1)
    k = np.arange(n)
    # 1D Dirichlet kernel; the 2D box is separable
    d = np.cos(2.0 * np.pi * np.outer(k, offsets) / n).sum(axis=1) / (2 * halfwidth + 1)
    return d[:, None] * d[None, :]


def filter_symbol(filt: FilterKind, op_symbol: SymbolTable) -> SymbolTable:
    M = op_symbol.values
    if np.any(M > 0):
        raise ValueError("operator symbol must be nonpositive")
    if isinstance(filt, AveragedHeat):
        values = averaged_heat_multiplier(filt.t * M)
    elif isinstance(filt, Gaussian):
        values = np.exp(filt.t * M)
    elif isinstance(filt, Box):
        values = box_multiplier(op_symbol.shape, filt.halfwidth)
    else:
        raise TypeError(f"not a filter kind: {filt!r}")
    return SymbolTable(op_symbol.shape, f"{filt.method}({filt.param:g})", values)


def smooth_potential(V: ScalarField, filt: FilterKind, kind: OperatorKind = DiscreteLaplacian()) -> ScalarField:
    """W = ifft2(G * fft2(V)) for the filter G built on the symbol of ``kind``."""
    G = filter_symbol(filt, operator_symbol(kind, V.shape))
    return ScalarField(V.shape, filter_real(V.values, G))


def kernel_profile(d: int, t: float, r: float) -> float:
    """Radial profile of the averaged heat kernel in R^d, closed form.

    k_t(r) = (1/t) int_0^t exp(-r^2/(4s)) / (4 pi s)^(d/2) ds. Substituting
    u = r^2/(4s) turns the integral into an upper incomplete gamma function:
    E1(r^2/4t) / (4 pi t) in two dimensions.
    """
    if d not in (1, 2):
        raise ValueError(f"kernel profile available for d in (1, 2), got {d}")
    if not t > 0:
        raise ValueError("t must be positive")
    if r < 0 or (d == 2 and r == 0):
        raise ValueError(f"radius must be positive in d={d}, got {r}")
    a = r * r / (4.0 * t)
    if d == 2:
        return float(special.exp1(a) / (4.0 * math.pi * t))
    if r == 0:
        return 1.0 / math.sqrt(math.pi * t)
    # Gamma(-1/2, a) via the recurrence from Gamma(1/2, a) = sqrt(pi) erfc(sqrt(a))
    sa = math.sqrt(a)
    gamma_mhalf = 2.0 * (math.exp(-a) / sa - math.sqrt(math.pi) * special.erfc(sa))
    return float((r / 2.0) * gamma_mhalf / (t * math.sqrt(4.0 * math.pi)))


def kernel_profile_quad(d: int, t: float, r: float) -> float:
    """Same profile by adaptive quadrature of the time average."""
    if d not in (1, 2):
        raise ValueError(f"kernel profile available for d in (1, 2), got {d}")
    if r < 0 or (d == 2 and r == 0):
        raise ValueError(f"radius must be positive in d={d}, got {r}")

    def integrand(s):
        return math.exp(-r * r / (4.0 * s)) / (4.0 * math.pi * s) ** (d / 2.0)

    # Integrate in log time so the early-time layer of width ~r^2 is resolved.
    val, _ = integrate.quad(lambda y: integrand(math.exp(y)) * math.exp(y),
                            -60.0, math.log(t), epsabs=0.0, epsrel=1e-12, limit=500)
    return val / t


def _distance_shells(shape: GridShape):
    idx = np.arange(shape.n)
    d = np.minimum(idx, shape.n - idx)
    d2 = (d[:, None] ** 2 + d[None, :] ** 2).ravel()
    order = np.argsort(d2, kind="stable")
    return d2, order


def fefferman_phong_radius(V: ScalarField, x0) -> float:
    """Largest ball radius around x0 whose potential mass h^2 * sum V stays <= 1.

    Radii are taken from the distinct torus distances to x0, so sites at the
    same distance enter together. Returns 0.0 when the site x0 alone already
    carries mass above 1 and ``inf`` when the whole torus does not reach 1.
    """
    v = V.values
    if np.any(v < 0):
        raise ValueError("potential must be nonnegative")
    shape = V.shape
    x, y = (int(c) % shape.n for c in x0)
    shifted = np.roll(np.roll(v, -x, axis=0), -y, axis=1).ravel()
    d2, order = _distance_shells(shape)
    d2s = d2[order]
    mass = np.cumsum(shifted[order]) * shape.h ** 2
    if mass[-1] <= 1.0:
        return math.inf
    # mass at the end of each shell of equal distance
    last = np.r_[np.flatnonzero(np.diff(d2s)), d2s.size - 1]
    ok = last[mass[last] <= 1.0]
    if ok.size == 0:
        return 0.0
    return float(math.sqrt(d2s[ok[-1]]) * shape.h)


def suggest_t(V: ScalarField, x0) -> float:
    """Smoothing time matched to the local scale, r(x0, V)^2."""
    r = fefferman_phong_radius(V, x0)
    return r * r
