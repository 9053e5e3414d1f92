"""Torus grid geometry, grid fields, random potentials and field norms."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


class UnitConvention(enum.Enum):
    """How the mesh size relates to the number of points per axis.

    DOMAIN puts the grid on the unit torus [0, 1)^2 with h = 1/n.
    LATTICE uses unit spacing, h = 1, on [0, n)^2.
    """

    DOMAIN = "domain"
    LATTICE = "lattice"


@dataclass(frozen=True)
class GridShape:
    n: int
    convention: UnitConvention = UnitConvention.DOMAIN

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4:
            raise ValueError(f"grid needs n >= 4 points per axis, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "convention", UnitConvention(self.convention))

    @classmethod
    def domain(cls, n: int) -> "GridShape":
        return cls(n, UnitConvention.DOMAIN)

    @classmethod
    def lattice(cls, n: int) -> "GridShape":
        return cls(n, UnitConvention.LATTICE)

    @property
    def h(self) -> float:
        return 1.0 / self.n if self.convention is UnitConvention.DOMAIN else 1.0

    @property
    def length(self) -> float:
        """Side length of the torus, n * h."""
        return self.n * self.h

    @property
    def size(self) -> int:
        return self.n * self.n

    def frequencies(self, signed: bool = False) -> np.ndarray:
        """Angular frequencies 2*pi*k/(n*h) per axis.

        With ``signed`` the index runs over -n/2..n/2-1 (stored in FFT
        order), otherwise over 0..n-1.
        """
        k = np.arange(self.n)
        if signed:
            k = np.where(k < self.n // 2, k, k - self.n)
        return 2.0 * np.pi * k / self.length

    def torus_distance(self, a, b) -> float:
        """Minimum-image Euclidean distance between two grid points, in length units."""
        d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % self.n
        d = np.minimum(d, self.n - d)
        return float(np.hypot(d[0], d[1]) * self.h)


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, copy=True)
    values.flags.writeable = False
    return values


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A real grid function, stored row-major as ``values[x, y]``."""

    shape: GridShape
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        n = self.shape.n
        if v.size != n * n:
            raise ValueError(f"field has {v.size} values, grid needs {n * n}")
        v = v.reshape(n, n)
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def constant(cls, shape: GridShape, c: float) -> "ScalarField":
        return cls(shape, np.full((shape.n, shape.n), float(c)))

    def __neg__(self):
        return ScalarField(self.shape, -self.values)

    def __repr__(self):
        return (f"ScalarField(n={self.shape.n}, h={self.shape.h!r}, "
                f"min={self.values.min():.6g}, max={self.values.max():.6g})")


@dataclass(frozen=True)
class PotentialSpec:
    """I.i.d. uniform potential on [0, vmax], reproducible from ``seed``."""

    vmax: float
    seed: int = 0

    def __post_init__(self):
        if not self.vmax >= 0:
            raise ValueError("vmax must be nonnegative")


def mix_seed(seed: int, index: int) -> int:
    """Derive a 64-bit stream key from a base seed and an index (splitmix64 finalizer)."""
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def make_potential(spec: PotentialSpec, shape: GridShape) -> ScalarField:
    # Philox is counter based: site i always consumes counter block i of the
    # stream keyed by the seed, independent of who else draws numbers.
    key = int(spec.seed) & MASK64
    rng = np.random.Generator(np.random.Philox(key=key))
    u = rng.random((shape.n, shape.n))
    return ScalarField(shape, spec.vmax * u)


def normalize01(f: ScalarField) -> ScalarField:
    lo, hi = f.values.min(), f.values.max()
    if not hi > lo:
        raise ValueError("degenerate range: cannot normalize a constant field")
    return ScalarField(f.shape, (f.values - lo) / (hi - lo))


def _check_same_shape(f: ScalarField, g: ScalarField):
    if f.shape != g.shape:
        raise ValueError(f"shape mismatch: {f.shape} vs {g.shape}")


def inner(f: ScalarField, g: ScalarField) -> float:
    """h^2-weighted inner product."""
    _check_same_shape(f, g)
    return float(f.shape.h ** 2 * np.vdot(f.values, g.values))


def lp_difference(f: ScalarField, g: ScalarField, p: str) -> float:
    """Distance between two fields in L1, L2 or Linf.

    The integral norms are normalized by the torus area, so under the
    domain convention L1 is the mean absolute difference and L2 the RMS
    difference; a constant offset c gives |c| for every p.
    """
    _check_same_shape(f, g)
    d = np.abs(f.values - g.values)
    p = str(p).lower()
    if p in ("l1", "1"):
        return float(d.mean())
    if p in ("l2", "2"):
        return float(np.sqrt(np.mean(d * d)))
    if p in ("linf", "inf"):
        return float(d.max())
    raise ValueError(f"unknown norm {p!r}, expected L1, L2 or Linf")
