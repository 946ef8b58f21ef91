"""Command-line front end: distance queries, ball construction, property
checks, constant solving, counterexample verification, sweeps and figures.

Every subcommand prints a JSON report with the stable keys
{command, inputs, results, provenance, tolerances, timings}; identical
arguments produce byte-identical reports except for the timings block.
Exit codes: 0 success, 1 computation error (machine-readable report on
stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import analysis, balls, figures, geometry, metrics
from .metrics import MetricKind


def _parse_point(text: str) -> np.ndarray:
    try:
        coords = [float(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"malformed point {text!r}: {exc}") from exc
    return geometry.as_point(coords)


def _parse_domain(text: str):
    if text == "punctured":
        return metrics.PuncturedSpace((0.0, 0.0))
    if text == "slit":
        return metrics.SlitPlane(origin=(0.0, 0.0), direction=(-1.0, 0.0))
    if text.startswith("points:"):
        pts = [_parse_point(tok) for tok in text[len("points:"):].split(";") if tok]
        return metrics.FinitePointComplement(pts)
    raise ValueError(f"unknown domain {text!r}; use punctured, slit or points:<p1;p2;...>")


def _parse_metric(text: str) -> MetricKind:
    return MetricKind.QUASIHYPERBOLIC if text == "qh" else MetricKind.DISTANCE_RATIO


def _default_window(metric: MetricKind, domain, x, r: float) -> geometry.Window:
    """Square window with side 4x the largest outer-disk radius."""
    if metric is MetricKind.QUASIHYPERBOLIC:
        reach = float(np.linalg.norm(x - domain.puncture)) * math.exp(r)
        return geometry.Window.square(domain.puncture, 2.0 * reach)
    reach = metrics.distance_to_boundary(domain, x) * math.expm1(r)
    return geometry.Window.square(x, 2.0 * reach)


def _require_punctured(metric: MetricKind, domain):
    if metric is MetricKind.QUASIHYPERBOLIC and not isinstance(domain, metrics.PuncturedSpace):
        raise ValueError("the quasihyperbolic metric has a closed form only in "
                         "punctured space; use --domain punctured")


def _region_json(region: geometry.Region) -> dict:
    def disk(d):
        return {"center": d.center.tolist(), "radius": d.radius}

    constraints = []
    for c in region.intersected:
        if isinstance(c, geometry.Disk):
            constraints.append({"type": "disk", **disk(c)})
        else:
            constraints.append({"type": "half_plane", "normal": c.normal.tolist(),
                                "offset": c.offset})
    return {"outer": disk(region.outer),
            "subtracted": [disk(d) for d in region.subtracted],
            "intersected": constraints}


def _verdict_json(v) -> dict:
    out = {"holds": v.holds}
    if isinstance(v, analysis.CtcVerdict):
        out["regime"] = v.regime.value
    if getattr(v, "witness", None):
        out["witness"] = v.witness
    return out


def _cmd_dist(args):
    domain = _parse_domain(args.domain)
    x = _parse_point(args.x)
    y = _parse_point(args.y)
    metric = _parse_metric(args.metric)
    results, provenance, tolerances, timings = {}, [], {}, {}
    if metric is MetricKind.QUASIHYPERBOLIC:
        _require_punctured(metric, domain)
        results["distance"] = metrics.qh_distance_punctured(x, y, puncture=domain.puncture)
        provenance.append("punctured-space closed form hypot(angle, log radius ratio)")
    else:
        results["distance"] = metrics.j_distance(domain, x, y)
        provenance.append("distance ratio formula log(1 + |x-y|/min(d(x), d(y)))")
    if args.oracle:
        if metric is not MetricKind.QUASIHYPERBOLIC:
            raise ValueError("--oracle approximates the quasihyperbolic metric; "
                             "use --metric qh")
        t0 = time.perf_counter()
        results["oracle"] = metrics.qh_distance_grid_oracle(domain, x, y, args.resolution)
        timings["oracle_s"] = time.perf_counter() - t0
        results["oracle_resolution"] = args.resolution
        provenance.append("grid shortest-path oracle with path refinement")
        tolerances["oracle_relative"] = 0.03
    return results, provenance, tolerances, timings


def _cmd_ball(args):
    domain = _parse_domain(args.domain)
    x = _parse_point(args.x)
    metric = _parse_metric(args.metric)
    _require_punctured(metric, domain)
    results, provenance, tolerances, timings = {}, [], {}, {}
    window = (geometry.Window.from_any(_parse_point(args.window))
              if args.window else _default_window(metric, domain, x, args.r))
    if metric is MetricKind.QUASIHYPERBOLIC:
        boundary = balls.qh_disk_boundary(x, args.r, samples=args.samples,
                                          puncture=domain.puncture)
        results["boundary_vertices"] = [v.tolist() for v in boundary.polyline.vertices]
        results["vertex_count"] = len(boundary.polyline)
        provenance.append("disk boundary parameterization e^s (cos phi, sin phi), "
                          "phi = sqrt(r^2 - s^2)")
    else:
        region = balls.j_ball_general(domain, x, args.r, m=args.samples, window=window)
        results["region"] = _region_json(region)
        results["boundary_samples"] = args.samples
        provenance.append("j-ball disk decomposition (outer disk with companion "
                          "constraint per boundary point)")
    if args.out == "svg":
        radius_cap = args.r if metric is not MetricKind.QUASIHYPERBOLIC else min(args.r, math.pi)
        spec = figures.FigureSpec(metric, domain, x, [radius_cap],
                                  figures.figure_window(metric, domain, x, radius_cap))
        sys.stdout.write(figures.emit_svg(spec))
        return None
    if args.raster:
        nx, ny = args.raster
        t0 = time.perf_counter()
        raster = balls.ball_raster(metric, domain, x, args.r, window, nx, ny)
        timings["raster_s"] = time.perf_counter() - t0
        results["raster"] = {
            "nx": nx, "ny": ny,
            "window": [window.xmin, window.ymin, window.xmax, window.ymax],
            "filled_fraction": raster.filled_fraction(),
            "component_count": geometry.count_components(raster),
        }
        provenance.append("brute-force membership raster of {y : m(x, y) < r}")
    return results, provenance, tolerances, timings


def _j_ball_is_convex(domain, x, r: float, samples: int) -> geometry.Verdict:
    """A j-ball is convex exactly when no excluded disk survives pruning:
    the remaining shape is an intersection of disks and half-planes."""
    region = balls.j_ball_general(domain, x, r, m=samples)
    if region.subtracted:
        return geometry.Verdict(holds=False, witness={
            "active_excluded_disks": len(region.subtracted),
            "first": _region_json(region)["subtracted"][0]})
    return geometry.Verdict(holds=True)


def _j_ball_ctc(domain, x, r: float, samples: int) -> analysis.CtcVerdict:
    if r <= analysis.J_STARLIKE_RADIUS * (1.0 + 1e-12):
        return analysis.CtcVerdict(True, analysis.CtcRegime.STARLIKE,
                                   {"starlike_up_to": analysis.J_STARLIKE_RADIUS})
    region = balls.j_ball_general(domain, x, r, m=samples)
    return analysis.annular_ctc_check(region, x)


def _cmd_check(args):
    domain = _parse_domain(args.domain)
    x = _parse_point(args.x)
    metric = _parse_metric(args.metric)
    _require_punctured(metric, domain)
    results, provenance, tolerances, timings = {}, [], {}, {}
    prop = args.property
    t0 = time.perf_counter()
    if prop == "components":
        window = (geometry.Window.from_any(_parse_point(args.window))
                  if args.window else _default_window(metric, domain, x, args.r))
        raster = balls.ball_raster(metric, domain, x, args.r, window,
                                   args.resolution, args.resolution)
        results["component_count"] = geometry.count_components(raster)
        provenance.append("8-connected component count of the membership raster")
    elif metric is MetricKind.QUASIHYPERBOLIC:
        if prop == "ctc":
            results["verdict"] = _verdict_json(analysis.qh_ctc_verdict(args.r))
            provenance.append("tangent criterion for quasihyperbolic disks")
        else:
            boundary = balls.qh_disk_boundary(x, args.r, samples=args.samples,
                                              puncture=domain.puncture)
            if prop == "convex":
                results["verdict"] = _verdict_json(geometry.polygon_is_convex(boundary.polyline))
                provenance.append("cross-product scan of the boundary polygon")
            else:
                results["verdict"] = _verdict_json(
                    geometry.polygon_is_starlike(boundary.polyline, x))
                provenance.append("vertex visibility scan of the boundary polygon")
    else:
        if prop == "ctc":
            results["verdict"] = _verdict_json(_j_ball_ctc(domain, x, args.r, args.samples))
            provenance.append("excluded-disk tangency conditions for j-balls")
        elif prop == "convex":
            results["verdict"] = _verdict_json(
                _j_ball_is_convex(domain, x, args.r, args.samples))
            provenance.append("j-ball disk decomposition (convex iff no excluded disk)")
        else:
            results["verdict"] = _verdict_json(analysis.ball_starlike_verdict(
                metric, domain, x, args.r))
            provenance.append("radial membership scan from the center")
    timings["check_s"] = time.perf_counter() - t0
    return results, provenance, tolerances, timings


def _cmd_constants(args):
    results, provenance, tolerances, timings = {}, [], {}, {}
    if args.solve:
        tol = args.tol
        tolerances["tol"] = tol
        t0 = time.perf_counter()
        if args.solve == "lambda":
            value = analysis.solve_qh_ctc_radius(tol)
            residual = analysis.qh_ctc_equation(value)
            provenance.append("bisection of cos w + w sin w, w = sqrt(z^2 - 1), on [2, pi]")
        else:
            value = analysis.solve_j_ctc_radius(tol)
            residual = analysis.tangency_residual(value)
            provenance.append("bisection of the excluded-disk tangency residual "
                              "on (log 2, log 3)")
        timings["solve_s"] = time.perf_counter() - t0
        results[args.solve] = value
        results["residual"] = residual
    if args.table:
        results["tables"] = analysis.radii_table()
        provenance.append("radii tables (literature values plus solved constants)")
    if not args.solve and not args.table:
        c = analysis.sharp_constants()
        results["constants"] = {k: getattr(c, k) for k in c.__dataclass_fields__}
        provenance.append("sharp-radius constants")
    return results, provenance, tolerances, timings


def _cmd_counterexample(args):
    t0 = time.perf_counter()
    report = analysis.verify_disconnection_example(args.r, args.resolution)
    timings = {"verify_s": time.perf_counter() - t0}
    report["verdict"] = "disconnected" if report["disconnected"] else "connected"
    provenance = ["two-point complement disconnection certificate "
                  "(membership, separating line, raster components)"]
    return report, provenance, {"separation_threshold": report["separating_line_threshold"]}, timings


def _cmd_sweep(args):
    domain = _parse_domain(args.domain)
    x = _parse_point(args.x)
    metric = _parse_metric(args.metric)
    _require_punctured(metric, domain)
    samples = args.samples
    if metric is MetricKind.QUASIHYPERBOLIC:
        if args.property == "convex":
            checker = lambda r: geometry.polygon_is_convex(
                balls.qh_disk_boundary(x, r, samples=samples,
                                       puncture=domain.puncture).polyline).holds
        elif args.property == "starlike":
            checker = lambda r: geometry.polygon_is_starlike(
                balls.qh_disk_boundary(x, r, samples=samples,
                                       puncture=domain.puncture).polyline, x).holds
        else:
            checker = lambda r: analysis.qh_ctc_verdict(r).holds
    else:
        if args.property == "convex":
            checker = lambda r: _j_ball_is_convex(domain, x, r, samples).holds
        elif args.property == "starlike":
            checker = lambda r: analysis.ball_starlike_verdict(metric, domain, x, r).holds
        else:
            checker = lambda r: _j_ball_ctc(domain, x, r, samples).holds
    t0 = time.perf_counter()
    value = analysis.sweep_critical_radius(checker, args.lo, args.hi, args.tol)
    timings = {"sweep_s": time.perf_counter() - t0}
    results = {"critical_radius": value, "bracket": [args.lo, args.hi]}
    return results, ["bisection on the property flip"], {"tol": args.tol}, timings


def _cmd_figure(args):
    spec = figures.figure_preset(args.preset, r0=args.r0,
                                 resolution=args.resolution or 0)
    t0 = time.perf_counter()
    svg = figures.emit_svg(spec)
    timings = {"render_s": time.perf_counter() - t0}
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    results = {
        "out": args.out,
        "bytes": len(svg.encode("utf-8")),
        "sha256": hashlib.sha256(svg.encode("utf-8")).hexdigest(),
        "radii": spec.radii,
    }
    return results, ["deterministic SVG rendering of ball boundaries"], {}, timings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metricballs",
        description="Quasihyperbolic and distance-ratio metric balls: distances, "
                    "constructions, property checks, sharp constants and figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_y=False, with_r=False):
        p.add_argument("--metric", choices=["j", "qh"], required=True)
        p.add_argument("--domain", default="punctured",
                       help="punctured | slit | points:<x,y;x,y;...>")
        p.add_argument("--x", required=True, help="comma-separated coordinates")
        if with_y:
            p.add_argument("--y", required=True, help="comma-separated coordinates")
        if with_r:
            p.add_argument("--r", type=float, required=True, help="ball radius")

    p = sub.add_parser("dist", help="metric distance between two points")
    add_common(p, with_y=True)
    p.add_argument("--oracle", action="store_true",
                   help="also run the grid shortest-path oracle (qh only)")
    p.add_argument("--resolution", type=int, default=400)

    p = sub.add_parser("ball", help="construct a metric ball")
    add_common(p, with_r=True)
    p.add_argument("--samples", type=int, default=256,
                   help="boundary samples (qh polyline / j boundary budget)")
    p.add_argument("--raster", type=int, nargs=2, metavar=("NX", "NY"))
    p.add_argument("--window", help="x0,y0,x1,y1")
    p.add_argument("--out", choices=["json", "svg"], default="json")

    p = sub.add_parser("check", help="check a geometric property of a ball")
    p.add_argument("--property", choices=["convex", "starlike", "ctc", "components"],
                   required=True)
    add_common(p, with_r=True)
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--resolution", type=int, default=400)
    p.add_argument("--window", help="x0,y0,x1,y1")

    p = sub.add_parser("constants", help="solve or tabulate the sharp radii")
    p.add_argument("--solve", choices=["lambda", "jctc"])
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--table", action="store_true")

    p = sub.add_parser("counterexample", help="verify the disconnected j-ball example")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--resolution", type=int, default=600)

    p = sub.add_parser("sweep", help="bisect a property flip radius")
    p.add_argument("--property", choices=["convex", "starlike", "ctc"], required=True)
    p.add_argument("--metric", choices=["j", "qh"], default="qh")
    p.add_argument("--domain", default="punctured")
    p.add_argument("--x", default="1,0")
    p.add_argument("--samples", type=int, default=2048)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-4)

    p = sub.add_parser("figure", help="emit an SVG figure preset")
    p.add_argument("--preset", choices=["fig1-punctured", "fig1-slit", "fig2"],
                   required=True)
    p.add_argument("--r0", type=float, default=0.1)
    p.add_argument("--resolution", type=int, default=0)
    p.add_argument("--out", required=True, help="output SVG path")

    return parser


_HANDLERS = {
    "dist": _cmd_dist,
    "ball": _cmd_ball,
    "check": _cmd_check,
    "constants": _cmd_constants,
    "counterexample": _cmd_counterexample,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
}


def _echo_inputs(args) -> dict:
    skip = {"command"}
    return {k: v for k, v in sorted(vars(args).items())
            if k not in skip and v is not None and v is not False}


def run(argv) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    inputs = _echo_inputs(args)
    t0 = time.perf_counter()
    try:
        out = _HANDLERS[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        report = {"command": args.command, "inputs": inputs,
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(report, sort_keys=True, indent=2))
        return 1
    if out is None:  # raw (non-JSON) output already written, e.g. SVG
        return 0
    results, provenance, tolerances, timings = out
    timings = {**timings, "total_s": time.perf_counter() - t0}
    report = {
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "provenance": provenance,
        "tolerances": tolerances,
        "timings": timings,
    }
    print(json.dumps(report, sort_keys=True, indent=2, allow_nan=False))
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
