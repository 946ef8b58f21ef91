"""Planar primitives, disk-algebra regions, boolean rasters and property checks.

Regions are exact set-algebra descriptions (an open outer disk, minus a
finite union of closed disks, intersected with disks or half-planes).
Rasters are the brute-force counterpart: boolean membership sampled at
cell centers.  Property checkers (convexity, starlikeness, connectivity,
bounded complement components) operate on polygons or rasters and return
machine-checkable verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import ndimage

# Relative tolerance under which a cross product of consecutive polygon
# edges counts as collinear rather than a sign change.
COLLINEAR_TOL = 1e-12

_CONN8 = np.ones((3, 3), dtype=bool)
_CONN4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def as_point(p, dim: Optional[int] = None) -> np.ndarray:
    """Coerce ``p`` to a finite float vector of length >= 2 (optionally == dim)."""
    a = np.atleast_1d(np.asarray(p, dtype=float))
    if a.ndim != 1 or a.size < 2:
        raise ValueError(f"point must have >= 2 coordinates, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("point has non-finite coordinates")
    if dim is not None and a.size != dim:
        raise ValueError(f"expected a {dim}-dimensional point, got {a.size} coordinates")
    return a


@dataclass(eq=False)
class Disk:
    """Euclidean ball of positive radius; open or closed per the using context."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = as_point(self.center)
        self.radius = float(self.radius)
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError("disk radius must be positive and finite")

    def contains_open(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.linalg.norm(pts - self.center, axis=-1) < self.radius


@dataclass(eq=False)
class HalfLine:
    """Ray ``{origin + t*direction : t > 0}``, with t >= 0 if includes_origin."""

    origin: np.ndarray
    direction: np.ndarray
    includes_origin: bool = True

    def __post_init__(self):
        self.origin = as_point(self.origin)
        self.direction = as_point(self.direction, dim=self.origin.size)
        n = float(np.linalg.norm(self.direction))
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"half-line direction must be a unit vector, |v| = {n!r}")


@dataclass(eq=False)
class HalfPlane:
    """Open half-plane ``{y : <y, normal> > offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = as_point(self.normal, dim=2)
        n = float(np.linalg.norm(self.normal))
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"half-plane normal must be a unit vector, |n| = {n!r}")
        self.offset = float(self.offset)

    def contains_open(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return pts @ self.normal > self.offset


@dataclass(eq=False)
class Polyline:
    """Ordered vertices of a discretized curve; closed joins last to first."""

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 2:
            raise ValueError("polyline needs an (n >= 2, dim >= 2) vertex array")
        if not np.all(np.isfinite(v)):
            raise ValueError("polyline has non-finite vertices")
        gaps = np.linalg.norm(np.diff(v, axis=0), axis=1)
        if np.any(gaps == 0.0):
            raise ValueError("consecutive polyline vertices must be distinct")
        if self.closed and np.linalg.norm(v[0] - v[-1]) == 0.0:
            raise ValueError("closed polyline must not repeat the first vertex")
        self.vertices = v

    def __len__(self) -> int:
        return self.vertices.shape[0]


Constraint = Union[Disk, HalfPlane]


@dataclass(eq=False)
class Region:
    """Open outer disk, minus closed disks, intersected with disks/half-planes."""

    outer: Disk
    subtracted: list = field(default_factory=list)
    intersected: list = field(default_factory=list)

    def __post_init__(self):
        if self.outer.center.size != 2:
            raise ValueError("regions are planar; outer disk center must be 2-d")
        for d in self.subtracted:
            if not isinstance(d, Disk):
                raise ValueError("subtracted constraints must be disks")
        for c in self.intersected:
            if not isinstance(c, (Disk, HalfPlane)):
                raise ValueError("intersected constraints must be disks or half-planes")

    def contains_points(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized strict membership for an (n, 2) array of points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        ok = self.outer.contains_open(pts)
        for hole in self.subtracted:
            # holes are closed: their boundary is excluded from the region
            ok &= np.linalg.norm(pts - hole.center, axis=-1) > hole.radius
        for c in self.intersected:
            ok &= c.contains_open(pts)
        return ok


def region_contains(region: Region, p) -> bool:
    """Strict membership: inside the open outer disk, outside every closed
    subtracted disk, inside every intersected constraint."""
    p = as_point(p, dim=2)
    return bool(region.contains_points(p[None])[0])


@dataclass(eq=False)
class Window:
    """Axis-aligned rectangle given by min/max corners."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        self.xmin, self.ymin = float(self.xmin), float(self.ymin)
        self.xmax, self.ymax = float(self.xmax), float(self.ymax)
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("window must have positive area")

    @classmethod
    def square(cls, center, half_side: float) -> "Window":
        c = as_point(center, dim=2)
        if half_side <= 0:
            raise ValueError("half_side must be positive")
        return cls(c[0] - half_side, c[1] - half_side, c[0] + half_side, c[1] + half_side)

    @classmethod
    def from_any(cls, w) -> "Window":
        if isinstance(w, Window):
            return w
        a = np.asarray(w, dtype=float).ravel()
        if a.size != 4:
            raise ValueError("window must be a Window or (xmin, ymin, xmax, ymax)")
        return cls(*a)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)])

    def inflated(self, factor: float) -> "Window":
        cx, cy = self.center
        return Window(cx - 0.5 * factor * self.width, cy - 0.5 * factor * self.height,
                      cx + 0.5 * factor * self.width, cy + 0.5 * factor * self.height)

    def contains_disk(self, disk: Disk, margin: float = 0.0) -> bool:
        r = disk.radius * (1.0 + margin)
        return (disk.center[0] - r >= self.xmin and disk.center[0] + r <= self.xmax
                and disk.center[1] - r >= self.ymin and disk.center[1] + r <= self.ymax)


@dataclass(eq=False)
class GridRaster:
    """Boolean membership sampled at cell centers of an nx-by-ny grid."""

    window: Window
    nx: int
    ny: int
    cells: np.ndarray  # shape (ny, nx), cells[iy, ix]

    def __post_init__(self):
        self.window = Window.from_any(self.window)
        if self.nx < 2 or self.ny < 2:
            raise ValueError("raster needs nx, ny >= 2")
        cells = np.asarray(self.cells, dtype=bool)
        if cells.shape != (self.ny, self.nx):
            raise ValueError(f"cells must have shape (ny, nx) = {(self.ny, self.nx)}")
        self.cells = cells

    @property
    def dx(self) -> float:
        return self.window.width / self.nx

    @property
    def dy(self) -> float:
        return self.window.height / self.ny

    def x_centers(self) -> np.ndarray:
        return self.window.xmin + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return self.window.ymin + (np.arange(self.ny) + 0.5) * self.dy

    def cell_centers(self) -> np.ndarray:
        """All cell centers as an (nx*ny, 2) array in row-major (iy, ix) order."""
        X, Y = np.meshgrid(self.x_centers(), self.y_centers())
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def filled_fraction(self) -> float:
        return float(np.count_nonzero(self.cells)) / self.cells.size

    def border_touched(self) -> bool:
        c = self.cells
        return bool(c[0, :].any() or c[-1, :].any() or c[:, 0].any() or c[:, -1].any())


@dataclass
class Verdict:
    """Outcome of a geometric property check; failures carry a witness."""

    holds: bool
    witness: Optional[dict] = None

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict must carry a witness")

    def __bool__(self) -> bool:
        return self.holds


def rasterize(predicate: Callable, window, nx: int, ny: int) -> GridRaster:
    """Sample ``predicate`` at cell centers.

    The predicate is preferably vectorized, mapping an (n, 2) array to an
    (n,) boolean array; plain point-wise predicates are detected by their
    output shape (or by raising) and evaluated in a fallback loop.
    """
    window = Window.from_any(window)
    if nx < 2 or ny < 2:
        raise ValueError("rasterize needs nx, ny >= 2")
    raster = GridRaster(window, nx, ny, np.zeros((ny, nx), dtype=bool))
    pts = raster.cell_centers()
    values = None
    try:
        out = predicate(pts)
        out = np.asarray(out)
        if out.shape == (pts.shape[0],):
            values = out.astype(bool)
    except Exception:
        values = None
    if values is None:
        values = np.fromiter((bool(predicate(p)) for p in pts), dtype=bool, count=pts.shape[0])
    raster.cells = values.reshape(ny, nx)
    return raster


def count_components(raster: GridRaster) -> int:
    """Number of 8-connected components of true cells."""
    _, num = ndimage.label(raster.cells, structure=_CONN8)
    return int(num)


def complement_has_bounded_component(raster: GridRaster) -> Verdict:
    """Whether some 4-connected false-component avoids the window border.

    A close-to-convex set cannot enclose such a component, so the expected
    verdict for one is ``holds = False``.  The window must contain the true
    set with a margin; true cells on the border are rejected.
    """
    if raster.border_touched():
        raise ValueError("window too small: true cells touch the raster border")
    labels, num = ndimage.label(~raster.cells, structure=_CONN4)
    border = np.unique(np.concatenate([
        labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]))
    border = set(int(b) for b in border if b != 0)
    bounded = [l for l in range(1, num + 1) if l not in border]
    witness = {"complement_components": int(num),
               "bounded_complement_components": len(bounded)}
    if bounded:
        iy, ix = np.argwhere(labels == bounded[0])[0]
        witness["example_cell"] = (int(ix), int(iy))
    return Verdict(holds=bool(bounded), witness=witness)


def _closed_vertices(poly: Polyline) -> np.ndarray:
    if not poly.closed:
        raise ValueError("polygon checks need a closed polyline")
    v = poly.vertices
    if v.shape[0] < 3:
        raise ValueError("polygon checks need at least 3 vertices")
    if v.shape[1] != 2:
        raise ValueError("polygon checks are planar")
    return v


def polygon_is_convex(poly: Polyline) -> Verdict:
    """All nonzero cross products of consecutive edges share one sign.

    Cross products below COLLINEAR_TOL relative to the incident edge
    lengths count as collinear and are tolerated.  The polyline is assumed
    simple (generated from a smooth parameterization).
    """
    v = _closed_vertices(poly)
    e = np.roll(v, -1, axis=0) - v
    e2 = np.roll(e, -1, axis=0)
    cross = e[:, 0] * e2[:, 1] - e[:, 1] * e2[:, 0]
    scale = np.linalg.norm(e, axis=1) * np.linalg.norm(e2, axis=1)
    rel = cross / scale
    pos = rel > COLLINEAR_TOL
    neg = rel < -COLLINEAR_TOL
    if not (pos.any() and neg.any()):
        return Verdict(holds=True)
    minority = neg if np.count_nonzero(pos) >= np.count_nonzero(neg) else pos
    i = int(np.argmax(minority))
    return Verdict(holds=False, witness={
        "vertex_index": i,
        "vertex": v[(i + 1) % len(v)].tolist(),
        "normalized_cross": float(rel[i]),
        "sign_counts": {"positive": int(np.count_nonzero(pos)),
                        "negative": int(np.count_nonzero(neg))},
    })


def point_in_polygon(p, vertices: np.ndarray, boundary_tol: float = 0.0) -> bool:
    """Strict point-in-polygon by crossing number.

    With ``boundary_tol`` > 0, points within that distance of an edge raise
    ValueError (the caller treats "on the boundary" as a precondition error).
    """
    p = as_point(p, dim=2)
    v = np.asarray(vertices, dtype=float)
    a = v
    b = np.roll(v, -1, axis=0)
    if boundary_tol > 0.0:
        ab = b - a
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
        dmin = np.min(np.linalg.norm(p - (a + t[:, None] * ab), axis=1))
        if dmin <= boundary_tol:
            raise ValueError("point lies on the polygon boundary")
    # half-open rule on y spans makes vertex hits unambiguous
    cond = (a[:, 1] > p[1]) != (b[:, 1] > p[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = a[:, 0] + (p[1] - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
    crossings = np.count_nonzero(cond & (xs > p[0]))
    return crossings % 2 == 1


def polygon_is_starlike(poly: Polyline, x, chunk: int = 128) -> Verdict:
    """Every vertex is visible from ``x``: no segment [x, v] properly
    crosses a non-incident edge.  ``x`` must lie strictly inside."""
    v = _closed_vertices(poly)
    x = as_point(x, dim=2)
    diag = float(np.linalg.norm(v.max(axis=0) - v.min(axis=0)))
    inside = point_in_polygon(x, v, boundary_tol=1e-12 * diag)
    if not inside:
        raise ValueError("starlikeness center must lie strictly inside the polygon")

    n = v.shape[0]
    p = v
    q = np.roll(v, -1, axis=0)
    qp = q - p
    tol = COLLINEAR_TOL
    for start in range(0, n, chunk):
        idx = np.arange(start, min(start + chunk, n))
        vv = v[idx]                                    # (c, 2) ray targets
        w = vv - x                                     # ray direction
        # side of p and q relative to the ray line through x
        rp = p[None, :, :] - x                         # (1, n, 2) broadcast
        rq = q[None, :, :] - x
        c1 = w[:, None, 0] * rp[:, :, 1] - w[:, None, 1] * rp[:, :, 0]
        c2 = w[:, None, 0] * rq[:, :, 1] - w[:, None, 1] * rq[:, :, 0]
        s1 = c1 / (np.linalg.norm(w, axis=1)[:, None] * np.maximum(np.linalg.norm(rp, axis=2), 1e-300))
        s2 = c2 / (np.linalg.norm(w, axis=1)[:, None] * np.maximum(np.linalg.norm(rq, axis=2), 1e-300))
        # side of x and v relative to each edge line
        rx = x[None, :] - p                            # (n, 2)
        c3 = qp[:, 0] * rx[:, 1] - qp[:, 1] * rx[:, 0]
        rv = vv[:, None, :] - p[None, :, :]
        c4 = qp[None, :, 0] * rv[:, :, 1] - qp[None, :, 1] * rv[:, :, 0]
        elen = np.linalg.norm(qp, axis=1)
        s3 = (c3 / (elen * np.maximum(np.linalg.norm(rx, axis=1), 1e-300)))[None, :]
        s4 = c4 / (elen[None, :] * np.maximum(np.linalg.norm(rv, axis=2), 1e-300))
        crossing = (((s1 > tol) & (s2 < -tol)) | ((s1 < -tol) & (s2 > tol))) \
            & (((s3 > tol) & (s4 < -tol)) | ((s3 < -tol) & (s4 > tol)))
        # edges incident to the target vertex cannot occlude it
        for row, vi in enumerate(idx):
            crossing[row, vi % n] = False
            crossing[row, (vi - 1) % n] = False
        if crossing.any():
            row, col = np.argwhere(crossing)[0]
            vi = int(idx[row])
            return Verdict(holds=False, witness={
                "vertex_index": vi,
                "vertex": v[vi].tolist(),
                "blocking_edge": int(col),
                "edge": [p[col].tolist(), q[col].tolist()],
            })
    return Verdict(holds=True)
