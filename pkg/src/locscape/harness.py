"""Batch experiments: random instances, predictors, matching scores, CSV output."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .eigen import smallest_eigenpairs
from .grid import GridShape, PotentialSpec, ScalarField, lp_difference, make_potential, mix_seed, normalize01
from .heatmap import render_heatmap
from .landscape import effective_potential, solve_landscape
from .operators import DiscreteLaplacian, parse_operator
from .smoothing import AveragedHeat, Box, Gaussian, smooth_potential
from .stats import STAT_COLUMNS, find_local_minima, match, score, summarize

log = logging.getLogger(__name__)

PER_INSTANCE_COLUMNS = ("instance_seed", "method", "param", "eig_rat", "first_miss_eig",
                        "first_miss_min", "dismissed_min", "n_matched")
AGGREGATE_COLUMNS = ("vmax", "operator", "method", "param", "eig_rat", "eig_rat_count",
                     "first_miss_eig", "first_miss_min", "dismissed_min", "n_instances")
LP_COLUMNS = ("instance_seed", "method", "param", "l1", "l2", "linf")
DIAGNOSTIC_COLUMNS = ("instance", "instance_seed", "status", "lambda_1", "lambda_m",
                      "eig_max_residual", "landscape_iterations", "landscape_residual",
                      "bound_violations", "bound_max_ratio")
REPORT_HEADERS = ("EigRat", "FirstMissEig", "FirstMissMin", "DismissedMin")

METHOD_KINDS = ("landscape", "heat", "gauss", "box")


@dataclass
class ExperimentConfig:
    n: int = 128
    h_convention: str = "lattice"
    operator: str = "lap"
    vmax: float = 1.0
    instances: int = 20
    seed_base: int = 2024
    methods: list = field(default_factory=lambda: [{"kind": "landscape"}])
    k_minima: int = 16
    pool: int = 64
    radius_in_h: float = 5.0
    m: int = 64
    eig_tol: float = 1e-6
    eig_method: str = "lanczos"
    landscape_tol: float = 1e-10
    on_nonpositive: str = "error"
    one_to_one: bool = True
    out: str = "runs/experiment"
    workers: int = 1
    heatmaps: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        if self.vmax < 0:
            raise ValueError("vmax must be nonnegative")
        for key in ("k_minima", "pool", "m", "workers"):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be >= 1")
        for key in ("radius_in_h", "eig_tol", "landscape_tol"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be positive")
        self.shape()
        parse_operator(self.operator)
        self.predictors()

    def shape(self) -> GridShape:
        return GridShape(self.n, self.h_convention)

    def predictors(self) -> list:
        """Expanded (method, param, filter-or-None) list in config order."""
        out = []
        for spec in self.methods:
            kind = spec.get("kind")
            if kind == "landscape":
                out.append(("landscape", 0.0, None))
            elif kind in ("heat", "gauss"):
                ts = spec.get("t", [])
                ts = ts if isinstance(ts, list) else [ts]
                if not ts:
                    raise ValueError(f"method {kind!r} needs a list of t values")
                cls = AveragedHeat if kind == "heat" else Gaussian
                out.extend((kind, float(t), cls(float(t))) for t in ts)
            elif kind == "box":
                ws = spec.get("w", [1, 2])
                ws = ws if isinstance(ws, list) else [ws]
                out.extend(("box", float(w), Box(int(w))) for w in ws)
            else:
                raise ValueError(f"unknown method kind {kind!r}; expected one of {METHOD_KINDS}")
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path, **overrides) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def desk_profile(vmax: float, ts, **kw) -> ExperimentConfig:
    """n=128, 20 instances, 48 eigenpairs; landscape plus averaged heat and Gaussian over ``ts``."""
    base = dict(n=128, h_convention="lattice", operator="lap", vmax=vmax, instances=20, m=48, pool=48,
                methods=[{"kind": "landscape"}, {"kind": "heat", "t": list(ts)},
                         {"kind": "gauss", "t": list(ts)}])
    base.update(kw)
    return ExperimentConfig(**base)


def full_profile(vmax: float, ts, **kw) -> ExperimentConfig:
    """n=256, 100 instances, 64 eigenpairs. Takes hours on one core."""
    base = dict(n=256, h_convention="lattice", operator="lap", vmax=vmax, instances=100, m=64, pool=64,
                methods=[{"kind": "landscape"}, {"kind": "heat", "t": list(ts)}])
    base.update(kw)
    return ExperimentConfig(**base)


# 6-point dyadic t grids (lattice units) for the three desk regimes
DESK_REGIMES = {
    1.0: (1.0, 2.0, 4.0, 8.0, 16.0, 32.0),
    2.0: (0.5, 1.0, 2.0, 4.0, 8.0, 16.0),
    5.0: (0.25, 0.5, 1.0, 2.0, 4.0, 8.0),
}


@dataclass
class InstanceResult:
    index: int
    seed: int
    status: str = "ok"
    records: list = field(default_factory=list)  # (method, param, StatsRecord)
    lp: list = field(default_factory=list)  # (method, param, l1, l2, linf)
    diagnostics: dict = field(default_factory=dict)


def landscape_bound_ratio(eigs, u: ScalarField) -> np.ndarray:
    """Per eigenpair max_x |phi(x)| / (lambda u(x) ||phi||_inf); the bound says <= 1."""
    ratios = []
    for lam, phi in eigs.pairs:
        a = np.abs(phi.values)
        ratios.append(float((a / (lam * u.values * a.max())).max()))
    return np.array(ratios)


def run_instance(config: ExperimentConfig, index: int) -> InstanceResult:
    shape = config.shape()
    kind = parse_operator(config.operator)
    seed = mix_seed(config.seed_base, index)
    res = InstanceResult(index, seed)
    try:
        V = make_potential(PotentialSpec(config.vmax, seed), shape)
        eigs = smallest_eigenpairs(kind, V, config.m, config.eig_tol, seed=seed, method=config.eig_method)
        land = solve_landscape(kind, V, config.landscape_tol)
        inv_u = effective_potential(land, config.on_nonpositive)
    except Exception as exc:  # recorded per instance, excluded from aggregates
        res.status = f"failed: {type(exc).__name__}: {exc}"
        log.warning("instance %d failed: %s", index, exc)
        return res

    diag = res.diagnostics
    diag.update(lambda_1=float(eigs.lambdas[0]), lambda_m=float(eigs.lambdas[-1]),
                eig_max_residual=float(eigs.residuals.max()),
                landscape_iterations=land.iterations, landscape_residual=land.residual_inf)
    if isinstance(kind, DiscreteLaplacian) and V.values.min() >= 0:
        ratios = landscape_bound_ratio(eigs, land.u)
        diag.update(bound_violations=int(np.sum(ratios > 1 + 1e-6)), bound_max_ratio=float(ratios.max()))

    inv_u_norm = normalize01(inv_u)
    for method, param, filt in config.predictors():
        f = inv_u if filt is None else smooth_potential(V, filt, kind)
        minima = find_local_minima(f, config.k_minima, source=f"{method}({param:g})")
        matching = match(minima, eigs, config.radius_in_h, config.pool, config.one_to_one)
        res.records.append((method, param, score(matching, eigs.lambdas)))
        if filt is not None:
            g = normalize01(f)
            res.lp.append((method, param, *(lp_difference(inv_u_norm, g, p) for p in ("L1", "L2", "Linf"))))
        if config.heatmaps and index == 0:
            out = Path(config.out) / "heatmaps"
            out.mkdir(parents=True, exist_ok=True)
            render_heatmap(f, out / f"{method}_{param:g}.pgm", minima.locations, eigs.centers[:config.pool])
    if config.heatmaps and index == 0:
        render_heatmap(V, Path(config.out) / "heatmaps" / "potential.pgm")
    return res


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else _fmt(r) for r in row])


def run_experiment(config: ExperimentConfig) -> dict:
    """Run every instance, write the CSV set into ``config.out`` and return the aggregates.

    Output: per_instance.csv, aggregate.csv, lp.csv, lp_aggregate.csv,
    diagnostics.csv and config.json. Failed instances are listed in the
    diagnostics and left out of the aggregates.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    indices = range(config.instances)
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(run_instance, [config] * config.instances, indices))
    else:
        results = [run_instance(config, i) for i in indices]

    ok = [r for r in results if r.status == "ok"]
    failed = len(results) - len(ok)
    if failed:
        log.warning("%d of %d instances failed and are excluded", failed, len(results))

    per_rows = [(r.seed, m, p, s.eig_rat, s.first_miss_eig, s.first_miss_min, s.dismissed_min, s.n_matched)
                for r in ok for m, p, s in r.records]
    _write_csv(out / "per_instance.csv", PER_INSTANCE_COLUMNS, per_rows)

    aggregates = []
    for method, param, _ in config.predictors():
        recs = [s for r in ok for m, p, s in r.records if (m, p) == (method, param)]
        if not recs:
            continue
        agg = summarize(recs)
        aggregates.append({"vmax": config.vmax, "operator": config.operator, "method": method,
                           "param": param, **agg, "n_instances": agg["n_records"]})
    _write_csv(out / "aggregate.csv", AGGREGATE_COLUMNS,
               [[a[c] for c in AGGREGATE_COLUMNS] for a in aggregates])

    _write_csv(out / "lp.csv", LP_COLUMNS, [(r.seed, *row) for r in ok for row in r.lp])
    lp_agg = []
    for method, param, filt in config.predictors():
        rows = [row for r in ok for row in r.lp if row[:2] == (method, param)]
        if rows:
            arr = np.array([row[2:] for row in rows])
            lp_agg.append({"method": method, "param": param,
                           **{k: math.fsum(arr[:, i]) / len(rows) for i, k in enumerate(("l1", "l2", "linf"))},
                           "n_instances": len(rows)})
    _write_csv(out / "lp_aggregate.csv", ("method", "param", "l1", "l2", "linf", "n_instances"),
               [[a[c] for c in ("method", "param", "l1", "l2", "linf", "n_instances")] for a in lp_agg])

    diag_rows = []
    for r in results:
        d = r.diagnostics
        diag_rows.append([r.index, r.seed, r.status] +
                         [d.get(c, math.nan) for c in DIAGNOSTIC_COLUMNS[3:]])
    _write_csv(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, diag_rows)
    (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
    return {"aggregate": aggregates, "lp": lp_agg, "results": results, "failed": failed}


def read_aggregate(path) -> list:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({k: (v if k in ("method", "operator") else float(v)) for k, v in row.items()})
    return rows


def best_param(rows, method: str, key: str = "eig_rat") -> dict:
    """Aggregate row of ``method`` with the smallest mean ``key``."""
    cands = [r for r in rows if r["method"] == method and not math.isnan(r[key])]
    if not cands:
        raise ValueError(f"no aggregate rows for method {method!r}")
    return min(cands, key=lambda r: (r[key], r["param"]))


def sweep_report(paths) -> list:
    """Merge aggregate CSVs into rows of (vmax, method, param, EigRat, FirstMissEig, FirstMissMin, DismissedMin)."""
    paths = list(paths)
    if not paths:
        raise ValueError("no aggregate files given")
    table = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            p = p / "aggregate.csv"
        if not p.exists():
            raise FileNotFoundError(f"missing aggregate file {p}")
        rows = read_aggregate(p)
        if not rows:
            raise ValueError(f"{p}: empty aggregate")
        for r in rows:
            table.append((r["vmax"], r["method"], r["param"], *(r[c] for c in STAT_COLUMNS)))
    return table


def write_report(table, path) -> None:
    _write_csv(Path(path), ("vmax", "method", "param") + REPORT_HEADERS, table)


def format_report(table) -> str:
    lines = [f"{'vmax':>8} {'method':>10} {'param':>8} " + " ".join(f"{h:>13}" for h in REPORT_HEADERS)]
    for vmax, method, param, *vals in table:
        label = "1/u" if method == "landscape" else f"{param:g}"
        lines.append(f"{vmax:8g} {method:>10} {label:>8} "
                     f"{vals[0]:13.4f} {vals[1]:13.2f} {vals[2]:13.2f} {vals[3]:13.2f}")
    return "\n".join(lines)
