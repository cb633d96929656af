"""Command-line entry point: ``ufinsler <subcommand> --metric ...``.

Exit codes: 0 success (and, for ``check``, every point strongly convex),
2 some checked point is not strongly convex, 1 unexpected error, 64 usage
error, 65 domain error (guard violation, pole, singular tensor, aborted
geodesic).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .curvature import CURVATURE_HEADER, holomorphic_curvature
from .dynamics import integrate_geodesic, normalize_metric, polygonal_length
from .errors import DomainError, FinslerError, IntegrationAbort, ParseError, SingularTensor, ZeroDirection
from .geometry import PointDirection, point_from_ts
from .metrics import MetricDefn, resolve_metric
from .sampling import random_pair, random_points
from .tensors import STRICT_EPS, convexity_check, region_sweep

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NONCONVEX = 2
EXIT_USAGE = 64
EXIT_DOMAIN = 65

CONVENTIONS = (
    "Conventions: F(z,v) = sqrt(r*phi(t,s)) with r = |v|^2, t = |z|^2 and "
    "s = |<z,v>|^2/|v|^2, where <z,v> = sum z^a conj(v^a). All quantities are "
    "dimensionless. A point given as --point-ts t,s uses the witness "
    "z = (sqrt t, 0, ...), v = (sqrt(s/t), sqrt(1-s/t), 0, ...)."
)
CHECK_HEADER = "t,s,phi,c0,k1,ktilde,c0_plus_t_phis,pseudoconvex,convex,marginal"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def g17(x) -> str:
    return format(float(x), ".17g")


def _json(obj, indent=0) -> str:
    """JSON text with floats at 17 significant digits (non-finite values become null)."""
    pad = "  " * (indent + 1)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return g17(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_json(str(k))}: {_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _rows_to_csv(header: str, rows) -> str:
    keys = header.split(",")
    lines = [header]
    for row in rows:
        cells = []
        for k in keys:
            v = row[k]
            cells.append(str(int(v)) if isinstance(v, (bool, np.bool_)) else g17(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _emit(args, text: str):
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _pair(text: str, name: str):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"{name} expects two comma-separated numbers, got {text!r}") from None
    if len(parts) != 2:
        raise UsageError(f"{name} expects two comma-separated numbers, got {text!r}")
    return parts[0], parts[1]


def _vector(text: str, name: str, kind=complex):
    try:
        return np.array([kind(p.strip().replace(" ", "")) for p in text.split(",")])
    except ValueError:
        raise UsageError(f"{name}: cannot parse {text!r} as a comma-separated vector") from None


def _metric(args) -> MetricDefn:
    return resolve_metric(args.metric)


def _default_workers() -> int:
    raw = os.environ.get("UFINSLER_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items, workers: int):
    """Ordered map, optionally over a process pool; output order never depends on scheduling."""
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _points(args, metric: MetricDefn, require=None) -> list[tuple[np.ndarray, np.ndarray]]:
    given = [args.point_ts is not None, args.z is not None or args.v is not None, args.random is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --point-ts, --z/--v, or --random")
    if args.point_ts is not None:
        out = []
        for spec in args.point_ts:
            t, s = _pair(spec, "--point-ts")
            try:
                p = point_from_ts(t, s, args.n)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            out.append((p.z, p.v))
        return out
    if args.random is not None:
        if args.random < 1:
            raise UsageError("--random needs a positive count")
        rng = np.random.default_rng(args.seed)
        t_max = args.t_max if args.t_max is not None else metric.sample_t_max
        if require is not None:
            return [(p.z, p.v) for p in random_points(metric, args.random, args.n, rng, require=require, t_max=t_max)]
        return [random_pair(rng, args.n, t_max) for _ in range(args.random)]
    if args.z is None or args.v is None:
        raise UsageError("--z and --v must be given together")
    z, v = _vector(args.z, "--z"), _vector(args.v, "--v")
    if z.shape != v.shape:
        raise UsageError("--z and --v must have the same length")
    return [(z, v)]


# -- subcommands ---------------------------------------------------------------
def _check_one(job):
    metric, z, v, eps = job
    p = PointDirection.from_complex(z, v)
    rep = convexity_check(metric, p, eps=eps)
    return {
        "t": rep.t, "s": rep.s, "phi": rep.phi, "c0": rep.c0, "k1": rep.k1, "ktilde": rep.k_tilde,
        "c0_plus_t_phis": rep.c0_plus_t_phis, "pseudoconvex": rep.pseudoconvex, "convex": rep.convex,
        "marginal": rep.marginal, "complex_eigen": list(rep.complex_eigen), "real_eigen": list(rep.real_eigen),
    }


def cmd_check(args) -> int:
    metric = _metric(args)
    eps = STRICT_EPS if args.tol is None else args.tol
    jobs = [(metric, z, v, eps) for z, v in _points(args, metric)]
    rows = _map(_check_one, jobs, args.workers)
    if args.format == "json":
        _emit(args, _json({"metric": metric.name, "n": args.n, "points": rows}) + "\n")
    else:
        _emit(args, _rows_to_csv(CHECK_HEADER, rows))
    return EXIT_OK if all(r["convex"] for r in rows) else EXIT_NONCONVEX


def cmd_sweep(args) -> int:
    metric = _metric(args)
    eps = STRICT_EPS if args.tol is None else args.tol
    table = region_sweep(metric, _pair(args.t_range, "--t-range"), _pair(args.s_range, "--s-range"),
                         args.grid, n=args.n, eps=eps)
    if args.format == "json":
        keys = table.HEADER.split(",")
        cols = [getattr(table, k) for k in keys]
        rows = [{k: (bool(c[i]) if c.dtype == bool else float(c[i])) for k, c in zip(keys, cols)}
                for i in range(len(table))]
        _emit(args, _json({"metric": metric.name, "n": args.n, "cells": rows}) + "\n")
    else:
        _emit(args, table.to_csv())
    return EXIT_OK


def _curv_one(job):
    metric, z, v, lenient = job
    p = PointDirection.from_complex(z, v)
    try:
        rep = holomorphic_curvature(metric, p)
    except (DomainError, SingularTensor):
        if not lenient:
            raise
        nan = float("nan")
        return {"t": p.t, "s": p.s, "K_F": nan, "k1": nan, "k4": nan, "k5": nan}
    return {"t": p.t, "s": p.s, "K_F": rep.K_F, "k1": rep.k1, "k4": rep.k4, "k5": rep.k5}


def cmd_curvature(args) -> int:
    metric = _metric(args)
    if args.grid is not None:
        if args.point_ts or args.z or args.v or args.random is not None:
            raise UsageError("--grid cannot be combined with explicit or random points")
        ts = np.linspace(*_pair(args.t_range, "--t-range"), args.grid)
        ss = np.linspace(*_pair(args.s_range, "--s-range"), args.grid)
        pts = []
        for t in ts:
            for s in ss:
                if s <= t:
                    p = point_from_ts(float(t), float(s), args.n)
                    pts.append((p.z, p.v))
    else:
        pts = _points(args, metric, require="pseudoconvex")
    # grid cells outside the guard or the pseudoconvex region become NaN rows
    lenient = args.grid is not None
    rows = _map(_curv_one, [(metric, z, v, lenient) for z, v in pts], args.workers)
    if args.format == "json":
        _emit(args, _json({"metric": metric.name, "n": args.n, "points": rows}) + "\n")
    else:
        _emit(args, _rows_to_csv(CURVATURE_HEADER, rows))
    return EXIT_OK


def cmd_geodesic(args) -> int:
    metric = _metric(args)
    x0 = _vector(args.x0, "--x0", float)
    u0 = _vector(args.u0, "--u0", float)
    if x0.shape != u0.shape or x0.shape[0] % 2:
        raise UsageError("--x0 and --u0 must be real vectors of the same even length 2n")
    try:
        trace = integrate_geodesic(metric, x0, u0, args.h, args.steps)
    except IntegrationAbort as exc:
        if len(exc.trace):
            _emit(args, exc.trace.to_csv())
        raise
    _emit(args, trace.to_csv())
    return EXIT_OK


def cmd_sphere_length(args) -> int:
    metric = _metric(args)
    if args.normalize:
        metric = normalize_metric(metric)
    exp = polygonal_length(metric, args.alpha, args.m, n=args.n)
    payload = {"metric": metric.name, **exp.to_json_dict()}
    _emit(args, _json(payload) + "\n")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------
def _common(p: argparse.ArgumentParser, points=True):
    p.add_argument("--metric", required=True,
                   help="catalog name (euclidean, convex_ball, wrona, ...) or a phi(t,s) expression such as '(1+s)^2'")
    p.add_argument("--n", type=int, default=2, help="complex dimension n >= 2 (default 2)")
    p.add_argument("--seed", type=int, default=0, help="seed for --random sampling (default 0)")
    p.add_argument("--output", "-o", default="-", help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $UFINSLER_WORKERS or 1); output order is fixed")
    if points:
        p.add_argument("--point-ts", action="append", metavar="T,S",
                       help="abstract point (t, s) with 0 <= s <= t; may be repeated")
        p.add_argument("--z", help="base point as comma-separated complex numbers, e.g. '0.1+0.2j,0'")
        p.add_argument("--v", help="direction as comma-separated complex numbers")
        p.add_argument("--random", type=int, metavar="K", help="K random points, |z|^2 uniform below --t-max")
        p.add_argument("--t-max", type=float, help="upper bound on t for --random (default: metric's sampling bound)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ufinsler", description="U(n)-invariant complex Finsler metrics. " + CONVENTIONS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="pseudoconvexity and convexity verdicts",
                       description="Convexity report per point; exit 2 if any point is not strongly convex. "
                       + CONVENTIONS)
    _common(p)
    p.add_argument("--tol", type=float, help=f"strictness tolerance eps (default {STRICT_EPS:g})")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="verdicts on a (t, s) grid",
                       description="Row-major grid over t (outer) and s (inner), endpoints included, "
                       "cells with s > t dropped, guard-violating cells marked excluded. " + CONVENTIONS)
    _common(p, points=False)
    p.add_argument("--t-range", default="0,1", metavar="A,B")
    p.add_argument("--s-range", default="0,1", metavar="A,B")
    p.add_argument("--grid", type=int, default=50, help="points per axis (>= 2)")
    p.add_argument("--tol", type=float, help=f"strictness tolerance eps (default {STRICT_EPS:g})")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("curvature", help="holomorphic sectional curvature K_F",
                       description="CSV columns t,s,K_F,k1,k4,k5. --random draws only strongly pseudoconvex "
                       "points; --grid writes NaN for cells outside the guard or the pseudoconvex region. "
                       + CONVENTIONS)
    _common(p)
    p.add_argument("--grid", type=int, help="evaluate on a grid instead of explicit points")
    p.add_argument("--t-range", default="0,0.5", metavar="A,B")
    p.add_argument("--s-range", default="0,0.5", metavar="A,B")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("geodesic", help="RK4 geodesic trace",
                       description="Integrates x'' + 2G(x, x') = 0 in real coordinates "
                       "x = (Re z, Im z). CSV columns tau,x_1..x_2n,u_1..u_2n,F. " + CONVENTIONS)
    _common(p, points=False)
    p.add_argument("--x0", required=True, help="real start point, 2n comma-separated numbers")
    p.add_argument("--u0", required=True, help="real start velocity, 2n comma-separated numbers")
    p.add_argument("--h", type=float, default=1e-3, help="step in the curve parameter tau")
    p.add_argument("--steps", type=int, default=1000)
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("sphere-length", help="polygonal length of a unit-sphere great circle",
                       description="Length of z cos(tau) + w sin(tau), 0 <= tau <= alpha (radians), "
                       "with z = e1, w = e2, from m chords; phi is first scaled so phi(1,0) = 1. " + CONVENTIONS)
    _common(p, points=False)
    p.add_argument("--alpha", type=float, default=math.pi / 4, help="arc angle in radians, 0 < alpha < pi/2")
    p.add_argument("--m", type=int, default=4096, help="number of chords")
    p.add_argument("--no-normalize", dest="normalize", action="store_false",
                   help="use phi as given instead of phi/phi(1,0)")
    p.set_defaults(func=cmd_sphere_length, format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = _default_workers()
    if args.n < 2:
        parser.exit(EXIT_USAGE, "ufinsler: error: --n must be at least 2\n")
    try:
        return args.func(args)
    except (UsageError, ParseError, KeyError) as exc:
        print(f"ufinsler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, SingularTensor, ZeroDirection, IntegrationAbort) as exc:
        print(f"ufinsler: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"ufinsler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FinslerError as exc:
        print(f"ufinsler: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
