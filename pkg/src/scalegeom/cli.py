"""``scalegeom`` command line: hole curves, geodesics, crush curves and the property suites.

Exit status is 0 on success, 1 when a computation fails and 2 for bad
arguments.  Data goes to the files named on the command line (``-`` for
standard output); diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import cosmology, geodesics, holes
from ._kernels import BACKENDS
from .errors import ScalingError
from .fields import FieldCatalogEntry, make_field
from .quadrature import QuadratureOptions
from .tables import Table, emit_csv, emit_svg, render_csv, render_svg

__all__ = ["main", "run", "emit_csv", "emit_svg"]

# Charts of a black-hole curve are cut at this many reference radii.
BLACK_CHART_CAP = 30.0


class ArgumentError(Exception):
    pass


def _floats(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("coordinates must be finite")
    return vals


def _add_quadrature(p):
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--threshold", type=float, default=1e12, help="value reported as DIVERGED beyond this")


def _add_outputs(p, svg=True):
    p.add_argument("--out", required=True, help="CSV path, or - for standard output")
    if svg:
        p.add_argument("--svg", help="optional SVG chart path")
        p.add_argument("--series", help="comma-separated columns to chart")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scalegeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    h = sub.add_parser("holes", help="scaled vs unscaled distance toward a black or white hole")
    h.add_argument("--kind", choices=("black", "white"), required=True)
    h.add_argument("--K", type=float, default=1.0, help="magnitude of K; the sign follows --kind")
    h.add_argument("--r", type=float, default=1.0, help="reference radius")
    h.add_argument("--samples", type=int, default=200)
    h.add_argument("--w-max", type=float, help="largest fractional distance (0.99 black, 1 white)")
    h.add_argument("--y-max", type=float, help="chart cut-off (default 30 r for black holes)")
    h.add_argument("--backend", choices=BACKENDS, help="hole kernel implementation")
    _add_quadrature(h)
    _add_outputs(h)

    g = sub.add_parser("geodesic", help="minimize the scaled length between two points")
    g.add_argument("--field", choices=("constant", "radial", "cosmo", "cosmological", "linear"), required=True)
    g.add_argument("--value", type=float, default=0.0, help="constant field value")
    g.add_argument("--K", type=float, default=1.0, help="radial strength (negative for a white hole)")
    g.add_argument("--center", type=_floats, help="radial center (default origin)")
    g.add_argument("--alpha", type=float, default=1.0)
    g.add_argument("--t-now", type=float, default=cosmology.T_NOW_YEARS)
    g.add_argument("--kappa", type=float, default=1.0)
    g.add_argument("--direction", type=_floats, help="linear field direction (default first axis)")
    g.add_argument("--from", dest="start", type=_floats, required=True)
    g.add_argument("--to", dest="end", type=_floats, required=True)
    g.add_argument("--nodes", type=int, default=64)
    g.add_argument("--max-iter", type=int, default=10000)
    g.add_argument("--tol", type=float, default=1e-9, help="gradient norm tolerance")
    g.add_argument("--history", help="CSV of the objective per accepted iteration")
    _add_outputs(g, svg=False)

    c = sub.add_parser("cosmo", help="crush factor along the past light cone")
    c.add_argument("--alpha", type=float, default=2.0, help="exponent of the stand-in family (s/t_now)^alpha")
    c.add_argument("--t-now", type=float, default=cosmology.T_NOW_YEARS, help="present time (years)")
    c.add_argument("--c", type=float, default=1.0, help="signal speed (light years per year)")
    c.add_argument("--samples", type=int, default=100)
    _add_outputs(c)

    v = sub.add_parser("verify", help="run every property suite")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    v.add_argument("--list", action="store_true", help="list suite names and exit")
    return parser


def _check_target(path):
    if path is None or path == "-":
        return
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise ArgumentError(f"output directory {directory} does not exist")
    if not os.access(directory, os.W_OK):
        raise ArgumentError(f"output directory {directory} is not writable")


def _series(args, table_columns, default):
    if getattr(args, "series", None) is None:
        return list(default)
    names = [s for s in args.series.split(",") if s]
    if not names:
        raise ArgumentError("--series needs at least one ordinate column")
    unknown = [n for n in names if n not in table_columns[1:]]
    if unknown:
        raise ArgumentError(f"unknown series {unknown}; choose from {list(table_columns[1:])}")
    return names


def _write_csv(table: Table, path):
    if path == "-":
        sys.stdout.write(render_csv(table))
    else:
        emit_csv(table, path)


def _write_svg(table: Table, path, x_label, y_label, **kwargs):
    if path == "-":
        sys.stdout.write(render_svg(table, x_label, y_label, **kwargs))
    else:
        emit_svg(table, path, x_label, y_label, **kwargs)


def _quadrature_options(args) -> QuadratureOptions:
    try:
        return QuadratureOptions(rel_tol=args.rel_tol, abs_tol=args.abs_tol, divergence_threshold=args.threshold)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from None


def _run_holes(args):
    if not (args.K > 0 and math.isfinite(args.K)):
        raise ArgumentError("--K is a magnitude and must be positive")
    if not (args.r > 0 and math.isfinite(args.r)):
        raise ArgumentError("--r must be positive")
    if args.samples < 2:
        raise ArgumentError("--samples must be at least 2")
    if args.w_max is not None and not (0 < args.w_max <= (1.0 if args.kind == "white" else 1.0 - 1e-12)):
        raise ArgumentError("--w-max must lie in (0, 1], and below 1 for a black hole")
    columns = ("w", "unscaled", "scaled")
    series = _series(args, columns, ("scaled", "unscaled"))
    opts = _quadrature_options(args)
    _check_target(args.out)
    _check_target(args.svg)

    h = holes.HoleProfile(args.K if args.kind == "black" else -args.K, args.r)
    table = holes.hole_curve(h, args.samples, opts, w_max=args.w_max, backend=args.backend)
    _write_csv(table, args.out)
    if args.svg:
        y_max = args.y_max if args.y_max is not None else (BLACK_CHART_CAP * h.r if h.K > 0 else None)
        _write_svg(table, args.svg, "fractional distance w", "distance from x", y_columns=series, y_max=y_max,
                   title=f"{args.kind} hole, K = {h.K:g}, r = {h.r:g}")
    w_end, _, scaled = table.rows[-1]
    shown = repr(scaled) if math.isfinite(scaled) else "DIVERGED"
    print(f"{args.kind} hole: scaled {shown} at w = {w_end!r}", file=sys.stderr)


def _make_geodesic_field(args, dim):
    kind = args.field
    center = args.center if args.center is not None else (0.0,) * dim
    direction = args.direction if args.direction is not None else (1.0,) + (0.0,) * (dim - 1)
    try:
        entry = FieldCatalogEntry(kind, value=args.value, K=args.K, center=center, alpha=args.alpha,
                                  t_now=args.t_now, kappa=args.kappa, direction=direction, dim=dim)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from None
    if entry.kind == "radial" and len(entry.center) != dim:
        raise ArgumentError("--center must have the dimension of the endpoints")
    if entry.kind == "linear" and len(entry.direction) != dim:
        raise ArgumentError("--direction must have the dimension of the endpoints")
    return make_field(entry)


def _run_geodesic(args):
    x = np.array(args.start)
    y = np.array(args.end)
    if x.size != y.size or not 1 <= x.size <= 4:
        raise ArgumentError("--from and --to need the same dimension, between 1 and 4")
    if np.array_equal(x, y):
        raise ArgumentError("--from and --to must differ")
    try:
        opts = geodesics.OptimizerOptions(nodes=args.nodes, max_iterations=args.max_iter, gradient_tolerance=args.tol)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from None
    f = _make_geodesic_field(args, x.size)
    _check_target(args.out)
    _check_target(args.history)

    res = geodesics.minimize_scaled_length(x, y, f, opts)
    distance = geodesics.discrete_scaled_length(res.path, f, x)
    if not math.isfinite(distance):
        raise ScalingError("scaled distance is not finite")
    n = res.path.n_segments
    coords = [f"x{i + 1}" for i in range(x.size)]
    nodes = Table(("k", "s", *coords), [(k, k / n, *map(float, p)) for k, p in enumerate(res.path.nodes)])
    _write_csv(nodes, args.out)
    if args.history:
        _write_csv(Table(("iteration", "objective"), list(enumerate(res.history))), args.history)
    print(f"scaled distance {distance!r} after {res.iterations} iterations, "
          f"gradient norm {res.gradient_norm:.3e}", file=sys.stderr)


def _run_cosmo(args):
    if args.samples < 2:
        raise ArgumentError("--samples must be at least 2")
    try:
        p = cosmology.CrushProfile(args.alpha, args.t_now, args.c)
    except ValueError as exc:
        raise ArgumentError(str(exc)) from None
    columns = ("s", "lookback_distance", "factor")
    series = _series(args, columns, ("factor",))
    _check_target(args.out)
    _check_target(args.svg)
    table = cosmology.crush_curve(p, args.samples)
    _write_csv(table, args.out)
    if args.svg:
        _write_svg(table, args.svg, "emission time s", "crush factor", x_column="s", y_columns=series,
                   title=f"(s / t_now)^{args.alpha:g}")


def _run_verify(args):
    from . import verification

    if args.list:
        for name in verification.REGISTRY:
            print(name)
        return 0
    names = args.suite
    if names:
        unknown = [n for n in names if n not in verification.REGISTRY]
        if unknown:
            raise ArgumentError(f"unknown suite(s) {unknown}")
    outcomes = verification.run_all(args.seed, names)
    for o in outcomes:
        print(o.line())
    failed = sum(not o.passed for o in outcomes)
    print(f"{len(outcomes) - failed}/{len(outcomes)} suites passed (seed {args.seed})", file=sys.stderr)
    return 1 if failed else 0


COMMANDS = {"holes": _run_holes, "geodesic": _run_geodesic, "cosmo": _run_cosmo, "verify": _run_verify}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse has already printed usage
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args) or 0
    except ArgumentError as exc:
        parser.print_usage(sys.stderr)
        print(f"scalegeom: error: {exc}", file=sys.stderr)
        return 2
    except (ScalingError, ValueError, ArithmeticError) as exc:
        print(f"scalegeom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"scalegeom: cannot write output: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
