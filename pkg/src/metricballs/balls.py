"""Exact metric-ball constructors and the brute-force raster counterpart.

A j-metric ball around x in a punctured space is an explicit disk algebra:
with t = e^r - 1 the ball is the open disk B(x, t*|x|) combined with one
companion constraint whose nature switches at r = log 2,

    r < log 2:  intersect with the disk   B(x / (1 - t^2), t |x| / (1 - t^2)),
    r = log 2:  cut with the half-plane   {y : <y, x/|x|> > |x| / 2},
    r > log 2:  subtract the closed disk  B(x / (1 - t^2), t |x| / (t^2 - 1)),

everything expressed in the frame where the puncture sits at the origin.
In a general domain the ball is the intersection of the single-puncture
balls over boundary points, which keeps the same algebra with one
companion constraint per boundary sample.

Quasihyperbolic disks in the punctured plane are built from the boundary
parameterization y(s) = e^s (cos phi(s), sin phi(s)), phi(s) =
sqrt(r^2 - s^2), s in [-r, r], valid for r <= pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Disk, GridRaster, HalfPlane, Polyline, Region, Window, as_point, rasterize
from .metrics import (FinitePointComplement, MetricKind, PuncturedSpace, boundary_samples,
                      distance_to_boundary, j_distance_many, qh_distance_punctured_many)

LOG2 = math.log(2.0)
_LOG2_TOL = 1e-12


class JBallShape(Enum):
    INTERSECT = "intersect"
    HALF_PLANE_CUT = "half_plane_cut"
    SUBTRACT = "subtract"


@dataclass(eq=False)
class JBallDecomposition:
    """Outer disk plus the single companion constraint of a punctured-space
    j-ball; the shape tag is `intersect` below r = log 2, `half_plane_cut`
    at it, `subtract` above it."""

    outer: Disk
    shape: JBallShape
    companion: object  # Disk or HalfPlane

    def to_region(self) -> Region:
        if self.shape is JBallShape.SUBTRACT:
            return Region(outer=self.outer, subtracted=[self.companion])
        return Region(outer=self.outer, intersected=[self.companion])


def j_ball_decomposition(x, r: float, puncture=None) -> JBallDecomposition:
    """Disk-algebra decomposition of the j-ball around x in punctured space."""
    x = as_point(x)
    p = np.zeros(x.size) if puncture is None else as_point(puncture, dim=x.size)
    xrel = x - p
    nx = float(np.linalg.norm(xrel))
    if nx == 0.0:
        raise ValueError("ball center coincides with the puncture")
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError("ball radius must be positive and finite")
    t = math.expm1(r)
    outer = Disk(center=x, radius=t * nx)
    if abs(r - LOG2) <= _LOG2_TOL:
        n = xrel / nx
        companion = HalfPlane(normal=n, offset=float(np.dot(p, n)) + 0.5 * nx)
        return JBallDecomposition(outer, JBallShape.HALF_PLANE_CUT, companion)
    denom = 1.0 - t * t  # equals e^r (2 - e^r); sign flips at r = log 2
    center = p + xrel / denom
    radius = t * nx / abs(denom)
    shape = JBallShape.INTERSECT if r < LOG2 else JBallShape.SUBTRACT
    return JBallDecomposition(outer, shape, Disk(center=center, radius=radius))


def j_ball_punctured(x, r: float, puncture=None) -> Region:
    """Exact j-metric ball in the punctured plane as a Region."""
    x = as_point(x, dim=2)
    return j_ball_decomposition(x, r, puncture=puncture).to_region()


def _prune(outer: Disk, constraint, shape: JBallShape) -> bool:
    """True when the constraint actually restricts the outer disk."""
    if shape is JBallShape.SUBTRACT:
        gap = float(np.linalg.norm(constraint.center - outer.center))
        return gap < outer.radius + constraint.radius
    if shape is JBallShape.INTERSECT:
        gap = float(np.linalg.norm(constraint.center - outer.center))
        return gap + outer.radius > constraint.radius
    proj = float(np.dot(outer.center, constraint.normal))
    return proj - outer.radius < constraint.offset


def j_ball_general(domain, x, r: float, m: int = 64, window=None) -> Region:
    """j-metric ball in a general domain.

    The outer disk is B(x, d(x) (e^r - 1)); each boundary sample z adds the
    companion constraint of the ball in the space punctured at z.
    Constraints that cannot affect the outer disk are pruned.
    """
    x = as_point(x, dim=2)
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError("ball radius must be positive and finite")
    d = distance_to_boundary(domain, x)
    r0 = d * math.expm1(r)
    outer = Disk(center=x, radius=r0)
    if window is None:
        window = Window.square(x, 2.0 * r0)
    subtracted, intersected = [], []
    for z in boundary_samples(domain, m, window=window):
        dec = j_ball_decomposition(x, r, puncture=z)
        if not _prune(outer, dec.companion, dec.shape):
            continue
        if dec.shape is JBallShape.SUBTRACT:
            subtracted.append(dec.companion)
        else:
            intersected.append(dec.companion)
    return Region(outer=outer, subtracted=subtracted, intersected=intersected)


@dataclass(eq=False)
class QhDiskBoundary:
    """Sampled boundary of a quasihyperbolic disk in the punctured plane."""

    center: np.ndarray
    r: float
    s_grid: np.ndarray
    polyline: Polyline


def qh_disk_boundary(x, r: float, samples: int = 256, puncture=None) -> QhDiskBoundary:
    """Closed boundary polyline of the quasihyperbolic disk around x.

    The upper half is sampled on a uniform s-grid over [-r, r] in the
    normalized frame (puncture at the origin, center on the positive first
    axis at unit distance), mirrored across the symmetry axis, then mapped
    back by the similarity taking that frame to x.  Refuses r > pi, where
    the disk stops being simply connected and the parameterization folds.
    """
    x = as_point(x, dim=2)
    p = np.zeros(2) if puncture is None else as_point(puncture, dim=2)
    xrel = x - p
    nx = float(np.linalg.norm(xrel))
    if nx == 0.0:
        raise ValueError("disk center coincides with the puncture")
    if not (0.0 < r <= math.pi):
        raise ValueError("boundary parameterization needs 0 < r <= pi "
                         "(beyond pi the disk is not simply connected)")
    if samples < 8:
        raise ValueError("need at least 8 samples")
    s = np.linspace(-r, r, samples)
    phi = np.sqrt(np.maximum(r * r - s * s, 0.0))
    upper = np.stack([np.exp(s) * np.cos(phi), np.exp(s) * np.sin(phi)], axis=1)
    lower = upper[-2:0:-1].copy()
    lower[:, 1] = -lower[:, 1]
    base = np.vstack([upper, lower])
    u = xrel / nx
    rot = np.array([[u[0], -u[1]], [u[1], u[0]]])
    verts = (nx * base) @ rot.T + p
    return QhDiskBoundary(center=x, r=float(r), s_grid=s,
                          polyline=Polyline(verts, closed=True))


def ball_raster(metric: MetricKind, domain, x, r: float, window, nx: int, ny: int) -> GridRaster:
    """Brute-force raster of {y : m(x, y) < r} from the metric itself.

    Independent of the exact Region constructors; the quasihyperbolic
    variant requires a punctured domain (the only closed form).
    """
    x = as_point(x, dim=2)
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError("ball radius must be positive and finite")
    if metric is MetricKind.QUASIHYPERBOLIC:
        if not isinstance(domain, PuncturedSpace):
            raise ValueError("quasihyperbolic rasters need a punctured domain")
        pred = lambda pts: qh_distance_punctured_many(x, pts, puncture=domain.puncture) < r
    elif metric is MetricKind.DISTANCE_RATIO:
        pred = lambda pts: j_distance_many(domain, x, pts) < r
    else:
        raise ValueError(f"unsupported metric {metric!r}")
    return rasterize(pred, window, nx, ny)
