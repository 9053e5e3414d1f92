"""Command line entry point: ``locscape <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .eigen import read_eigs_csv, smallest_eigenpairs, write_eigenset
from .fieldio import read_field, write_field
from .grid import GridShape, PotentialSpec, make_potential
from .heatmap import render_heatmap
from .landscape import effective_potential, solve_landscape
from .operators import parse_operator
from .smoothing import AveragedHeat, Box, Gaussian, kernel_profile, smooth_potential
from .stats import find_local_minima, match, score


def _common(p, grid=True):
    if grid:
        p.add_argument("--n", type=int, help="points per axis")
        p.add_argument("--h-convention", choices=["domain", "lattice"], help="mesh size 1/n or 1")
    p.add_argument("--operator", help="lap, bilap or frac:<alpha>")
    p.add_argument("--out", help="output path")


def _filters(args):
    filters = []
    filters += [AveragedHeat(t) for t in args.t or []]
    filters += [Gaussian(t) for t in args.gauss or []]
    filters += [Box(w) for w in args.box or []]
    if not filters:
        raise SystemExit("smooth: give at least one --t, --gauss or --box")
    return filters


def cmd_generate(args):
    shape = GridShape(args.n or 128, args.h_convention or "domain")
    V = make_potential(PotentialSpec(args.vmax, args.seed), shape)
    write_field(args.out or "potential.lsf", V)


def cmd_smooth(args):
    V = read_field(args.input)
    kind = parse_operator(args.operator or "lap")
    filters = _filters(args)
    out = Path(args.out or "smoothed.lsf")
    for filt in filters:
        W = smooth_potential(V, filt, kind)
        target = out if len(filters) == 1 else out.with_name(f"{out.stem}_{filt.method}{filt.param:g}{out.suffix}")
        write_field(target, W)


def cmd_landscape(args):
    V = read_field(args.input)
    res = solve_landscape(parse_operator(args.operator or "lap"), V, args.tol)
    out = Path(args.out or "landscape.lsf")
    write_field(out, res.u)
    if args.inverse:
        write_field(out.with_name(out.stem + "_inv" + out.suffix), effective_potential(res, args.on_nonpositive))
    print(f"iterations={res.iterations} residual_inf={res.residual_inf:.3e}")


def cmd_eigs(args):
    V = read_field(args.input)
    es = smallest_eigenpairs(parse_operator(args.operator or "lap"), V, args.m, args.tol,
                             seed=args.seed, method=args.method)
    path = write_eigenset(es, args.out or "eigs")
    print(f"wrote {len(es)} eigenpairs to {path.parent}")


def cmd_localize(args):
    f = read_field(args.predictor)
    lambdas, centers = read_eigs_csv(Path(args.eigs) / "eigs.csv" if Path(args.eigs).is_dir() else args.eigs)
    minima = find_local_minima(f, args.k)
    m = match(minima, centers, args.radius, args.pool, shape=f.shape)
    rec = score(m, lambdas)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(harness.PER_INSTANCE_COLUMNS)
        w.writerow([args.seed if args.seed is not None else "", args.method, args.param,
                    repr(rec.eig_rat), rec.first_miss_eig, rec.first_miss_min, rec.dismissed_min, rec.n_matched])
    finally:
        if args.out:
            out.close()


def cmd_experiment(args):
    overrides = dict(n=args.n, h_convention=args.h_convention, operator=args.operator, vmax=args.vmax,
                     seed_base=args.seed, instances=args.instances, out=args.out, workers=args.workers)
    if args.config:
        cfg = harness.ExperimentConfig.from_json(args.config, **overrides)
    else:
        cfg = harness.ExperimentConfig.from_dict({k: v for k, v in overrides.items() if v is not None})
    if args.t:
        methods = [m for m in cfg.methods if m.get("kind") != "heat"]
        cfg.methods = methods + [{"kind": "heat", "t": list(args.t)}]
        cfg.validate()
    result = harness.run_experiment(cfg)
    table = [(r["vmax"], r["method"], r["param"], r["eig_rat"], r["first_miss_eig"],
              r["first_miss_min"], r["dismissed_min"]) for r in result["aggregate"]]
    print(harness.format_report(table))
    if result["failed"]:
        print(f"{result['failed']} instances failed; see diagnostics.csv", file=sys.stderr)


def cmd_report(args):
    table = harness.sweep_report(args.inputs)
    if args.out:
        harness.write_report(table, args.out)
    print(harness.format_report(table))


def cmd_profile_kernel(args):
    rmax = args.rmax if args.rmax is not None else 4.0 * np.sqrt(args.t_single)
    radii = np.linspace(rmax / args.points, rmax, args.points)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["r", "k_t"])
        for r in radii:
            w.writerow([repr(float(r)), repr(kernel_profile(args.d, args.t_single, float(r)))])
    finally:
        if args.out:
            out.close()


def cmd_heatmap(args):
    f = read_field(args.input)
    minima = find_local_minima(f, args.minima).locations if args.minima else ()
    centers = ()
    if args.eigs:
        _, centers = read_eigs_csv(Path(args.eigs) / "eigs.csv" if Path(args.eigs).is_dir() else args.eigs)
    render_heatmap(f, args.out or "field.pgm", minima, centers)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locscape", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="random i.i.d. uniform potential -> LSF1")
    _common(p)
    p.add_argument("--vmax", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("smooth", help="LSF1 potential + filter -> LSF1")
    p.add_argument("input")
    _common(p, grid=False)
    p.add_argument("--t", type=float, action="append", help="averaged heat time (repeatable)")
    p.add_argument("--gauss", type=float, action="append", help="Gaussian filter time (repeatable)")
    p.add_argument("--box", type=int, action="append", help="box half-width (repeatable)")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("landscape", help="solve (L + V) u = 1")
    p.add_argument("input")
    _common(p, grid=False)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--inverse", action="store_true", help="also write 1/u")
    p.add_argument("--on-nonpositive", choices=["error", "clamp"], default="error")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("eigs", help="lowest eigenpairs -> directory of LSF1 files + eigs.csv")
    p.add_argument("input")
    _common(p, grid=False)
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["lanczos", "lobpcg", "dense"], default="lanczos")
    p.set_defaults(func=cmd_eigs)

    p = sub.add_parser("localize", help="predictor LSF1 + eigs -> stats CSV row")
    p.add_argument("predictor")
    p.add_argument("eigs", help="eigs directory or eigs.csv")
    p.add_argument("--out")
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--pool", type=int, default=64)
    p.add_argument("--radius", type=float, default=5.0, help="matching radius in mesh units")
    p.add_argument("--seed", type=int)
    p.add_argument("--method", default="predictor")
    p.add_argument("--param", default="")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("experiment", help="JSON config -> full pipeline")
    p.add_argument("config", nargs="?")
    _common(p)
    p.add_argument("--vmax", type=float)
    p.add_argument("--t", type=float, action="append", help="averaged heat times (replace config list)")
    p.add_argument("--seed", type=int)
    p.add_argument("--instances", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="merge aggregate CSVs into one table")
    p.add_argument("inputs", nargs="+", help="aggregate.csv files or run directories")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("profile-kernel", help="radial profile of the averaged heat kernel as CSV")
    p.add_argument("--d", type=int, choices=[1, 2], default=2)
    p.add_argument("--t", dest="t_single", type=float, default=1.0)
    p.add_argument("--rmax", type=float)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_profile_kernel)

    p = sub.add_parser("heatmap", help="LSF1 -> PGM")
    p.add_argument("input")
    p.add_argument("--out")
    p.add_argument("--minima", type=int, default=0, help="overlay the k smallest local minima")
    p.add_argument("--eigs", help="overlay eigenfunction centers from an eigs directory")
    p.set_defaults(func=cmd_heatmap)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
