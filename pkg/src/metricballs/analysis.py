"""Close-to-convexity deciders, sharp-radius solvers and the radii tables.

Two transcendental conditions drive everything here.

Quasihyperbolic disks in the punctured plane: the boundary tangent
(a(s), b(s)) with phi(s) = sqrt(r^2 - s^2),

    a(s) = phi cos phi + s sin phi,      b(s) = phi sin phi - s cos phi,

turns horizontal exactly once on the relevant arc iff b(-1) >= 0, and
b(-1) equals cos w + w sin w at w = sqrt(r^2 - 1).  The unique root of
that expression on (2, pi) is the sharp close-to-convexity radius
(~2.97169).

j-metric balls: the ball is an outer disk of radius R = e^r - 1 with one
excluded closed disk (center c, radius s); it stays close-to-convex while
the right-triangle tangency s^2 + |x - c|^2 >= R^2 holds, which turns
into equality exactly at r = log(1 + sqrt(3)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .balls import ball_raster
from .geometry import Region, Verdict, Window, as_point, count_components
from .metrics import (FinitePointComplement, MetricKind, PuncturedSpace,
                      distance_to_boundary, j_distance, j_distance_many,
                      qh_distance_punctured_many)

LOG2 = math.log(2.0)
J_CONVEXITY_RADIUS = LOG2
J_STARLIKE_RADIUS = math.log(1.0 + math.sqrt(2.0))
J_CTC_RADIUS = math.log(1.0 + math.sqrt(3.0))
J_DISCONNECTION_UPPER = math.log(3.0)
QH_CONVEXITY_RADIUS = 1.0
# Literature values quoted without a defining equation here: the punctured
# starlikeness radius, the general-domain starlikeness bound (not sharp)
# and the numeric upper bound for quasihyperbolic close-to-convexity.
QH_STARLIKE_RADIUS_PUNCTURED = 2.83
QH_STARLIKE_GENERAL_BOUND = math.pi / 2.0
QH_CTC_NUMERIC_UPPER = 3.1116
QH_SIMPLY_CONNECTED_LIMIT = math.pi

_REL_SLACK = 1e-12


def qh_ctc_equation(z: float) -> float:
    """cos w + w sin w at w = sqrt(z^2 - 1); defined for z >= 1.

    Strictly decreasing on (2, pi) (its derivative is z cos w, negative
    there), positive at 2 and negative at pi, so it brackets exactly one
    root: the close-to-convexity radius of quasihyperbolic disks in the
    punctured plane.
    """
    if z < 1.0:
        raise ValueError("argument below 1 makes sqrt(z^2 - 1) imaginary")
    w = math.sqrt(z * z - 1.0)
    return math.cos(w) + w * math.sin(w)


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("root is not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def solve_qh_ctc_radius(tol: float = 1e-12) -> float:
    """Bisect the tangent criterion on [2, pi] to bracket width <= tol."""
    if tol < 1e-14:
        raise ValueError("tolerance below 1e-14 is not resolvable in float64")
    return _bisect(qh_ctc_equation, 2.0, math.pi, tol)


QH_CTC_RADIUS = solve_qh_ctc_radius(1e-13)


def tangent_components(r: float, s: float) -> tuple[float, float]:
    """Tangent components (a, b) of the disk boundary at parameter s, |s| < r."""
    if not abs(s) < r:
        raise ValueError("tangent components need |s| < r")
    phi = math.sqrt(r * r - s * s)
    a = phi * math.cos(phi) + s * math.sin(phi)
    b = phi * math.sin(phi) - s * math.cos(phi)
    return a, b


def tangency_residual(r: float) -> float:
    """Signed residual of the right-triangle tangency for punctured j-balls.

    Positive while s^2 + |x - c|^2 > R^2 in the normalized frame
    (|x| = 1), zero exactly at r = log(1 + sqrt(3)); needs r > log 2 so
    the excluded disk exists.
    """
    if r <= LOG2:
        raise ValueError("tangency residual needs r > log 2")
    er = math.exp(r)
    s = (er - 1.0) / (er * (er - 2.0))
    c = 1.0 / (er * (2.0 - er))  # negative for r > log 2
    return s * s + (1.0 - c) ** 2 - (er - 1.0) ** 2


def solve_j_ctc_radius(tol: float = 1e-12) -> float:
    """Root of the tangency residual on (log 2, log 3); equals log(1 + sqrt(3))."""
    if tol < 1e-14:
        raise ValueError("tolerance below 1e-14 is not resolvable in float64")
    return _bisect(tangency_residual, LOG2 + 0.05, math.log(3.0), tol)


class CtcRegime(Enum):
    STARLIKE = "starlike"
    TANGENT_CRITERION = "tangent_criterion"
    PYTHAGORAS_CRITERION = "pythagoras_criterion"
    NOT_SIMPLY_CONNECTED = "not_simply_connected"
    INNER_DISK_ENGULFED = "inner_disk_engulfed"


@dataclass
class CtcVerdict:
    """Close-to-convexity verdict with the deciding regime and evidence."""

    holds: bool
    regime: CtcRegime
    witness: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime in (CtcRegime.NOT_SIMPLY_CONNECTED, CtcRegime.INNER_DISK_ENGULFED) \
                and self.holds:
            raise ValueError(f"regime {self.regime} implies a failing verdict")

    def __bool__(self) -> bool:
        return self.holds


def qh_ctc_verdict(r: float) -> CtcVerdict:
    """Close-to-convexity of the quasihyperbolic disk of radius r in the
    punctured plane.

    Starlike (hence close-to-convex) up to 2; decided by the sign of the
    tangent criterion on (2, pi], with the boundary radius counting as
    holding; never close-to-convex beyond pi, where the disk is not simply
    connected.
    """
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError("radius must be positive and finite")
    if r <= 2.0 * (1.0 + _REL_SLACK):
        return CtcVerdict(True, CtcRegime.STARLIKE, {"starlike_up_to": 2.0})
    if r <= math.pi * (1.0 + _REL_SLACK):
        b = qh_ctc_equation(r)
        return CtcVerdict(b >= -_REL_SLACK, CtcRegime.TANGENT_CRITERION,
                          {"vertical_tangent_component": b})
    return CtcVerdict(False, CtcRegime.NOT_SIMPLY_CONNECTED,
                      {"simply_connected_limit": math.pi, "radius": r})


def annular_ctc_check(region: Region, x) -> CtcVerdict:
    """Close-to-convexity of an outer disk centered at x minus closed disks.

    Sufficient conditions, per excluded disk at offset x_i = center - x
    with radius r_i, against the outer radius R:

        |x_i| >= R / sqrt(2),   r_i < |x_i|,
        r_i^2 + |x_i|^2 >= R^2  whenever |x_i| < R.

    All hold: close-to-convex.  In the single-hole planar case the third
    condition is also necessary, and a hole strictly engulfed by the outer
    disk can never be covered by half-lines.  Otherwise the check is
    conservative and reports failure with the violated condition.
    """
    x = as_point(x, dim=2)
    if region.intersected:
        raise ValueError("unsupported region shape: intersected constraints present")
    R = region.outer.radius
    if float(np.linalg.norm(region.outer.center - x)) > 1e-9 * R:
        raise ValueError("unsupported region shape: outer disk not centered at x")
    holes = []
    failed = []
    for k, hole in enumerate(region.subtracted):
        xi = float(np.linalg.norm(hole.center - x))
        ri = hole.radius
        checks = {
            "offset_at_least_R_over_sqrt2": xi >= R / math.sqrt(2.0) * (1.0 - _REL_SLACK),
            "radius_below_offset": ri < xi * (1.0 + _REL_SLACK),
            "tangency": (xi >= R * (1.0 - _REL_SLACK)
                         or ri * ri + xi * xi >= R * R * (1.0 - _REL_SLACK)),
        }
        holes.append({"hole": k, "offset": xi, "radius": ri,
                      "tangency_lhs": ri * ri + xi * xi, "outer_radius_sq": R * R,
                      "checks": checks})
        if not all(checks.values()):
            failed.append(holes[-1])
    if not failed:
        return CtcVerdict(True, CtcRegime.PYTHAGORAS_CRITERION, {"holes": holes})
    if len(region.subtracted) == 1:
        hole = region.subtracted[0]
        xi = float(np.linalg.norm(hole.center - x))
        engulfed = xi + hole.radius < R and hole.radius ** 2 + xi ** 2 < R * R
        if engulfed:
            return CtcVerdict(False, CtcRegime.INNER_DISK_ENGULFED,
                              {"holes": holes, "engulfed": True})
    return CtcVerdict(False, CtcRegime.PYTHAGORAS_CRITERION,
                      {"holes": holes, "failed": failed})


def separation_profile(h: float) -> float:
    """Squared distance ratio from sqrt(3)*i to the point h - i in the plane
    with the two points -1 and 1 removed: (4 + 2 sqrt(3) + h^2) / (h^2 - 2h + 2).

    The denominator (h - 1)^2 + 1 never vanishes.  Used to certify that the
    whole line Im z = -1 stays outside small j-balls around sqrt(3)*i.
    """
    return (4.0 + 2.0 * math.sqrt(3.0) + h * h) / (h * h - 2.0 * h + 2.0)


def verify_disconnection_example(r: float, resolution: int,
                                 window=None, grid_points: int = 2001) -> dict:
    """Certify the disconnected j-ball around sqrt(3)*i in the twice-punctured
    plane for r between log(1 + sqrt(3)) and log(29/10).

    Checks membership of the mirror point -sqrt(3)*i, clearance of the
    separating line Im z = -1 (grid minimum on [0, 1 + sqrt(3)] plus the
    increasing tail beyond), and counts raster components (expected: 2).
    """
    lo, hi = J_CTC_RADIUS, math.log(29.0 / 10.0)
    if not (lo < r < hi):
        raise ValueError(f"radius must lie in ({lo:.6f}, {hi:.6f})")
    if resolution < 300:
        raise ValueError("resolution must be at least 300")
    domain = FinitePointComplement([(-1.0, 0.0), (1.0, 0.0)])
    x = np.array([0.0, math.sqrt(3.0)])

    far = j_distance(domain, x, -x)

    hmax = 1.0 + math.sqrt(3.0)
    hs = np.linspace(0.0, hmax, grid_points)
    line_pts = np.stack([hs, np.full_like(hs, -1.0)], axis=1)
    line_vals = j_distance_many(domain, x, line_pts)
    i_min = int(np.argmin(line_vals))
    line_min = float(line_vals[i_min])

    tail_hs = np.linspace(hmax, hmax + 6.0, 400)
    tail_pts = np.stack([tail_hs, np.full_like(tail_hs, -1.0)], axis=1)
    tail_vals = j_distance_many(domain, x, tail_pts)
    tail_increasing = bool(np.all(np.diff(tail_vals) >= -1e-12))

    win = Window(-4.0, -4.0, 4.0, 4.0) if window is None else Window.from_any(window)
    raster = ball_raster(MetricKind.DISTANCE_RATIO, domain, x, r, win, resolution, resolution)
    components = count_components(raster)

    separating_threshold = math.log(29.0 / 10.0)
    return {
        "radius": r,
        "resolution": resolution,
        "window": [win.xmin, win.ymin, win.xmax, win.ymax],
        "far_point_distance": far,
        "far_point_inside": far < r,
        "separating_line_min": line_min,
        "separating_line_min_at": float(hs[i_min]),
        "separating_line_threshold": separating_threshold,
        "separating_line_clear": line_min >= separating_threshold - 1e-12 and line_min > r,
        "separating_tail_increasing": tail_increasing,
        "component_count": components,
        "disconnected": components == 2,
    }


def ball_starlike_verdict(metric: MetricKind, domain, x, r: float,
                          rays: int = 720, steps: int = 1500,
                          slack: float = 1e-9) -> Verdict:
    """Starlikeness of the metric ball with respect to its center, by radial
    membership scans.

    A ball is starlike w.r.t. x iff membership is an interval along every
    ray from x.  Rays are sampled uniformly in angle; a violation needs a
    robust exit (value > r + slack) followed by a robust re-entry
    (value < r - slack), so grazing tangencies at a sharp radius do not
    produce false negatives.
    """
    x = as_point(x, dim=2)
    if metric is MetricKind.QUASIHYPERBOLIC:
        if not isinstance(domain, PuncturedSpace):
            raise ValueError("quasihyperbolic starlikeness scan needs a punctured domain")
        nx = float(np.linalg.norm(x - domain.puncture))
        tmax = 1.02 * nx * (math.exp(r) + 1.0)
        values = lambda pts: qh_distance_punctured_many(x, pts, puncture=domain.puncture)
    elif metric is MetricKind.DISTANCE_RATIO:
        tmax = 1.02 * distance_to_boundary(domain, x) * math.expm1(r)
        values = lambda pts: j_distance_many(domain, x, pts)
    else:
        raise ValueError(f"unsupported metric {metric!r}")

    angles = np.linspace(0.0, 2.0 * math.pi, rays, endpoint=False)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    ts = tmax * (np.arange(1, steps + 1) / steps)
    pts = x[None, None, :] + ts[None, :, None] * dirs[:, None, :]
    vals = values(pts.reshape(-1, 2)).reshape(rays, steps)
    outside = vals > r + slack
    inside = vals < r - slack
    reentry = inside & (np.cumsum(outside, axis=1) > 0)
    bad = np.any(reentry, axis=1)
    if not bad.any():
        return Verdict(holds=True)
    i = int(np.argmax(bad))
    k = int(np.argmax(reentry[i]))
    return Verdict(holds=False, witness={
        "ray_angle": float(angles[i]),
        "reentry_point": (x + ts[k] * dirs[i]).tolist(),
        "metric_value": float(vals[i, k]),
        "radius": r,
    })


def sweep_critical_radius(checker: Callable[[float], bool], lo: float, hi: float,
                          tol: float) -> float:
    """Bisect a monotone property flip: checker(lo) must hold, checker(hi)
    must fail; returns the midpoint of the final bracket of width <= tol."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    if not checker(lo):
        raise ValueError("checker must hold at the lower end of the bracket")
    if checker(hi):
        raise ValueError("checker must fail at the upper end of the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if checker(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SharpConstants:
    """The radii of Tables 1-2, solved where this artifact can solve them."""

    j_convexity: float = J_CONVEXITY_RADIUS
    j_starlike: float = J_STARLIKE_RADIUS
    j_ctc: float = J_CTC_RADIUS
    j_disconnection_upper: float = J_DISCONNECTION_UPPER
    qh_convexity: float = QH_CONVEXITY_RADIUS
    qh_starlike_punctured: float = QH_STARLIKE_RADIUS_PUNCTURED
    qh_ctc: float = QH_CTC_RADIUS
    qh_starlike_general: float = QH_STARLIKE_GENERAL_BOUND
    qh_ctc_numeric_upper: float = QH_CTC_NUMERIC_UPPER
    qh_simply_connected_limit: float = QH_SIMPLY_CONNECTED_LIMIT

    def __post_init__(self):
        if not (self.j_convexity < self.j_starlike < self.j_ctc < self.j_disconnection_upper):
            raise ValueError("j radii must be ordered: convex < starlike < ctc < log 3")
        if not (self.qh_convexity < self.qh_starlike_punctured < self.qh_ctc
                < self.qh_ctc_numeric_upper <= self.qh_simply_connected_limit):
            raise ValueError("qh radii must be ordered: 1 < starlike < ctc < 3.1116 <= pi")


def sharp_constants() -> SharpConstants:
    return SharpConstants()


def _cell(value: Optional[float], display: str, sharp: Optional[bool],
          source: str) -> dict:
    return {"value": value, "display": display, "sharp": sharp, "source": source}


def _inf_cell() -> dict:
    return _cell(None, "infinite", None, "literature")


def _unknown_cell() -> dict:
    return _cell(None, "unknown", None, "open")


def radii_table() -> dict:
    """Both radii tables (quasihyperbolic and distance ratio) as structured
    rows; each cell records value, display form, sharpness and source."""
    lam = QH_CTC_RADIUS
    qh_rows = [
        {"domain": "punctured plane (n = 2)",
         "convex": _cell(1.0, "1", True, "literature"),
         "starlike": _cell(QH_STARLIKE_RADIUS_PUNCTURED, "kappa ~ 2.83", True,
                           "literature (external numeric)"),
         "close_to_convex": _cell(lam, f"lambda ~ {lam:.5f}", True, "solved")},
        {"domain": "punctured space (n >= 2)",
         "convex": _cell(1.0, "1", True, "literature"),
         "starlike": _cell(QH_STARLIKE_RADIUS_PUNCTURED, "kappa ~ 2.83", True,
                           "literature (external numeric)"),
         "close_to_convex": _cell(lam, f"lambda ~ {lam:.5f}", False, "solved")},
        {"domain": "convex",
         "convex": _inf_cell(), "starlike": _inf_cell(), "close_to_convex": _inf_cell()},
        {"domain": "starlike w.r.t. x",
         "convex": _unknown_cell(), "starlike": _inf_cell(), "close_to_convex": _inf_cell()},
        {"domain": "general (n = 2)",
         "convex": _cell(1.0, "1", True, "literature"),
         "starlike": _cell(QH_STARLIKE_GENERAL_BOUND, "pi/2", False, "literature"),
         "close_to_convex": _cell(QH_STARLIKE_GENERAL_BOUND, "pi/2", False, "literature")},
        {"domain": "general (n >= 2)",
         "convex": _unknown_cell(),
         "starlike": _cell(QH_STARLIKE_GENERAL_BOUND, "pi/2", False, "literature"),
         "close_to_convex": _cell(QH_STARLIKE_GENERAL_BOUND, "pi/2", False, "literature")},
    ]
    j_rows = [
        {"domain": "convex",
         "convex": _inf_cell(), "starlike": _inf_cell(), "close_to_convex": _inf_cell()},
        {"domain": "starlike w.r.t. x",
         "convex": _cell(J_CONVEXITY_RADIUS, "log 2", True, "literature"),
         "starlike": _inf_cell(), "close_to_convex": _inf_cell()},
        {"domain": "general (n = 2)",
         "convex": _cell(J_CONVEXITY_RADIUS, "log 2", True, "literature"),
         "starlike": _cell(J_STARLIKE_RADIUS, "log(1 + sqrt 2)", True, "literature"),
         "close_to_convex": _cell(J_CTC_RADIUS, "log(1 + sqrt 3)", True, "solved")},
        {"domain": "general (n >= 2)",
         "convex": _cell(J_CONVEXITY_RADIUS, "log 2", True, "literature"),
         "starlike": _cell(J_STARLIKE_RADIUS, "log(1 + sqrt 2)", True, "literature"),
         "close_to_convex": _cell(J_CTC_RADIUS, "log(1 + sqrt 3)", False, "solved")},
    ]
    return {"quasihyperbolic": qh_rows, "distance_ratio": j_rows,
            "note": "sharp = False marks radii known not to be (or not proven) sharp"}
