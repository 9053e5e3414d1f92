"""Local minima of a predictor field, minima-to-eigenfunction matching, and the four scores.

The scores follow the usual localization benchmark: EigRat compares the
eigenvalues found against the smallest possible ones, FirstMissEig is the
first eigen-index nobody found, FirstMissMin the first minimum (by depth)
that found nothing, DismissedMin the number of minima that found nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import EigenSet
from .grid import GridShape, ScalarField


@dataclass(frozen=True)
class MinimaList:
    locations: list
    values: list
    source: str = ""

    def __len__(self):
        return len(self.locations)


@dataclass(frozen=True)
class Matching:
    """``assignments[i]`` is the 0-based eigen-index found by minimum i, or None."""

    assignments: list
    radius: float
    n_eigs: int

    @property
    def k(self) -> int:
        return len(self.assignments)

    @property
    def matched(self) -> list:
        return [a for a in self.assignments if a is not None]


@dataclass(frozen=True)
class StatsRecord:
    eig_rat: float  # nan when nothing matched
    first_miss_eig: int
    first_miss_min: int
    dismissed_min: int
    n_matched: int


def strict_minima_mask(values: np.ndarray) -> np.ndarray:
    """Sites strictly below all 8 torus neighbours."""
    mask = np.ones(values.shape, dtype=bool)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx or dy:
                mask &= values < np.roll(values, (dx, dy), axis=(0, 1))
    return mask


def find_local_minima(f: ScalarField, k: int = 16, source: str = "") -> MinimaList:
    if k < 1:
        raise ValueError("k must be >= 1")
    v = f.values
    flat = np.flatnonzero(strict_minima_mask(v).ravel())
    vals = v.ravel()[flat]
    order = np.lexsort((flat, vals))[:k]
    n = f.shape.n
    locations = [tuple(int(c) for c in divmod(int(i), n)) for i in flat[order]]
    return MinimaList(locations, [float(x) for x in vals[order]], source)


def match(minima: MinimaList, eigs, radius_in_h: float = 5.0, pool: int = 64,
          one_to_one: bool = True, shape: GridShape | None = None) -> Matching:
    """Greedy matching in minimum order.

    Each minimum takes the nearest eigenfunction (ties to the lower index)
    among the first ``pool`` whose center lies within radius_in_h * h on the
    torus. With ``one_to_one`` an eigenfunction can be taken only once.
    ``eigs`` is an EigenSet, or a sequence of centers together with ``shape``.
    """
    if isinstance(eigs, EigenSet):
        centers, shape = eigs.centers, eigs.phis[0].shape
    else:
        centers = eigs
        if shape is None:
            raise ValueError("matching against bare centers needs the grid shape")
    centers = np.asarray(list(centers)[:pool], dtype=float).reshape(-1, 2)
    n = shape.n
    radius = radius_in_h * shape.h
    taken = np.zeros(len(centers), dtype=bool)
    assignments = []
    for loc in minima.locations:
        d = np.abs(centers - np.asarray(loc, dtype=float)) % n
        d = np.minimum(d, n - d)
        dist = np.hypot(d[:, 0], d[:, 1]) * shape.h
        ok = dist <= radius * (1 + 1e-12)
        if one_to_one:
            ok &= ~taken
        if not ok.any():
            assignments.append(None)
            continue
        cand = np.flatnonzero(ok)
        j = int(cand[np.lexsort((cand, dist[cand]))[0]])
        taken[j] = True
        assignments.append(j)
    return Matching(assignments, radius, len(centers))


def eig_rat(matching: Matching, lambdas) -> float:
    matched = matching.matched
    if not matched:
        return math.nan
    lam = np.asarray(getattr(lambdas, "lambdas", lambdas), dtype=float)
    # many-to-one matchings can repeat an index; each eigenvalue found counts once
    found = sorted(set(matched))
    return float(lam[found].sum() / np.sort(lam)[:len(found)].sum())


def first_miss_eig(matching: Matching) -> int:
    found = set(matching.matched)
    j = 0
    while j in found:
        j += 1
    return j + 1


def first_miss_min(matching: Matching) -> int:
    for i, a in enumerate(matching.assignments):
        if a is None:
            return i + 1
    return matching.k + 1


def dismissed_min(matching: Matching) -> int:
    return sum(a is None for a in matching.assignments)


def score(matching: Matching, lambdas) -> StatsRecord:
    return StatsRecord(eig_rat(matching, lambdas), first_miss_eig(matching),
                       first_miss_min(matching), dismissed_min(matching), len(matching.matched))


STAT_COLUMNS = ("eig_rat", "first_miss_eig", "first_miss_min", "dismissed_min")


def summarize(records) -> dict:
    """Means of the four scores; EigRat averages skip records with nothing matched."""
    records = list(records)
    if not records:
        raise ValueError("cannot summarize an empty list of records")
    rats = [r.eig_rat for r in records if not math.isnan(r.eig_rat)]
    return {
        "eig_rat": math.fsum(rats) / len(rats) if rats else math.nan,
        "eig_rat_count": len(rats),
        "first_miss_eig": math.fsum(r.first_miss_eig for r in records) / len(records),
        "first_miss_min": math.fsum(r.first_miss_min for r in records) / len(records),
        "dismissed_min": math.fsum(r.dismissed_min for r in records) / len(records),
        "n_records": len(records),
    }
