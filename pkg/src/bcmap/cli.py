"""Command line entry point: ``bcmap {analyze,clark,density,descent,diameter}``."""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__, kernels
from .carleson import dyadic_centers
from .clark import clark_measure, herglotz_real_part, poisson_extension
from .density import default_r_ladder, quasi_separation_count, separation_constant, uniform_upper_density
from .diagnostics import descent_search, image_diameter
from .errors import BCMapError, NumericalFailure, ParseError
from .report import FORMATS, SCHEMA_VERSION, AnalysisConfig, Report, _num, dumps_report, emit_grids, emit_report, \
    load_config, parse_zeros_file, run_battery

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config JSON")
    common.add_argument("--zeros", help="zeros CSV with 're,im' lines (overrides the config map)")
    common.add_argument("--alpha", type=float, help="boundary angle for Clark measures (replaces the alpha list)")
    common.add_argument("--rmax", type=float, help="largest grid radius")
    common.add_argument("--out", help="output JSON path (default: stdout)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--backend", choices=sorted(kernels.BACKENDS), help="kernel backend")

    p = argparse.ArgumentParser(prog="bcmap", description="Diagnostics for finite Blaschke products.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="run the full condition battery")
    a.add_argument("--grids", help="directory for grid CSV files")
    sub.add_parser("clark", parents=[common], help="Clark measure atoms and Herglotz check")
    sub.add_parser("density", parents=[common], help="separation and upper density of the critical set")
    sub.add_parser("descent", parents=[common], help="dyadic descent search over the center grid")
    sub.add_parser("diameter", parents=[common], help="image diameters of unit balls over the center grid")
    return p


def _config_from_args(args) -> AnalysisConfig:
    cfg = load_config(args.config) if args.config else AnalysisConfig()
    if args.zeros:
        cfg.zeros = parse_zeros_file(args.zeros)
    if args.alpha is not None:
        if not math.isfinite(args.alpha):
            raise ParseError("--alpha must be finite")
        cfg.alphas = [args.alpha]
    if args.rmax is not None:
        cfg.grid.r_max = args.rmax
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out:
        cfg.report_path = args.out
    if getattr(args, "grids", None):
        cfg.grids_dir = args.grids
    return cfg.validate()


def _document(command, cfg, body):
    return {"schema_version": SCHEMA_VERSION, "formats": FORMATS, "command": command,
            "config": _num(cfg.to_dict()), "result": _num(body)}


def _grid_params(cfg):
    g = cfg.grid
    return {"base_level": g.base_level, "max_level": g.max_level, "r_max": g.r_max}


def _clark(cfg, backend):
    F = cfg.product
    rows = []
    for alpha in cfg.alphas:
        mu = clark_measure(F, alpha)
        rows.append({"alpha": alpha, "angles": mu.angles, "masses": mu.masses, "total_mass": mu.total_mass,
                     "herglotz_constant": mu.herglotz_constant,
                     "herglotz_gap_at_0": abs(poisson_extension(mu, 0.0) - herglotz_real_part(F, alpha, 0.0))})
    return {"operation": "clark_measure", "measures": rows}


def _density(cfg, backend):
    crit = cfg.product.critical_points().points
    qs = quasi_separation_count(crit)
    dens = uniform_upper_density(crit, r_ladder=default_r_ladder())
    return {"operation": "uniform_upper_density", "critical_points": crit, "separation": separation_constant(crit),
            "quasi_separation": {"bound": qs.bound, "count": qs.count, "radius": qs.radius},
            "r_ladder": dens.r_ladder, "d_plus": dens.d_plus}


def _descent(cfg, backend):
    F = cfg.product
    _, _, squares = dyadic_centers(cfg.grid.base_level, cfg.grid.max_level, cfg.grid.r_max, include_origin=False)
    per_eps = []
    for eps in cfg.epsilons:
        rows = {}
        for q in squares:
            w = descent_search(F, q, eps, cfg.grid.descent_depth, backend)
            rows[q.key] = None if w is None else {"child": w.child.key, "depth": w.depth, "ratio": w.ratio}
        depths = [r["depth"] for r in rows.values() if r is not None]
        missing = sum(r is None for r in rows.values())
        per_eps.append({"eps": eps, "N": max(depths) if depths and not missing else None,
                        "not_found": missing, "squares": rows})
    return {"operation": "descent_search", "grid": _grid_params(cfg), "N_max": cfg.grid.descent_depth,
            "ladder": per_eps}


def _diameter(cfg, backend):
    F = cfg.product
    pts, _, squares = dyadic_centers(cfg.grid.base_level, cfg.grid.max_level, cfg.grid.r_max)
    vals = np.array([image_diameter(F, z, cfg.grid.ball_radius, cfg.grid.boundary_samples, backend) for z in pts])
    k = int(np.argmin(vals))
    keys = ["origin" if q is None else q.key for q in squares]
    return {"operation": "image_diameter", "grid": _grid_params(cfg), "R": cfg.grid.ball_radius,
            "n_boundary": cfg.grid.boundary_samples, "min": vals[k], "argmin": keys[k],
            "values": dict(zip(keys, vals))}


_SINGLE = {"clark": _clark, "density": _density, "descent": _descent, "diameter": _diameter}


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
    except (BCMapError, ValueError) as exc:
        print(f"bcmap: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    backend = args.backend
    try:
        if args.command == "analyze":
            report = run_battery(cfg, backend)
            if cfg.report_path:
                emit_report(report, cfg.report_path)
            else:
                sys.stdout.write(dumps_report(report))
            if cfg.grids_dir:
                emit_grids(report, cfg.grids_dir)
            if report.failed:
                print(f"bcmap: numerical failure in sections {', '.join(report.document['failures'])}",
                      file=sys.stderr)
                return EXIT_NUMERICAL
            return EXIT_OK
        body = _SINGLE[args.command](cfg, backend)
        _write(dumps_report(Report(_document(args.command, cfg, body))), cfg.report_path)
        return EXIT_OK
    except NumericalFailure as exc:
        print(f"bcmap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"bcmap: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BCMapError, ValueError) as exc:
        print(f"bcmap: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
