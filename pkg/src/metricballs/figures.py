"""Deterministic SVG figures of metric-ball families.

Quasihyperbolic disk boundaries are drawn from their exact closed-form
polylines; j-ball boundaries are traced from a fine membership raster by
marching squares (sub-cell contours).  Output is a pure function of the
figure spec: fixed float formatting, no timestamps, stable element order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from skimage import measure

from .balls import ball_raster, qh_disk_boundary
from .geometry import Window, as_point
from .metrics import MetricKind, PuncturedSpace, SlitPlane, distance_to_boundary

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
CANVAS = 640.0


@dataclass(eq=False)
class FigureStyle:
    stroke_width: float = 1.5
    palette: tuple = PALETTE
    marker_radius: float = 3.0
    background: str = "#ffffff"


@dataclass(eq=False)
class FigureSpec:
    """One family of metric balls around a common center, drawn per radius."""

    metric: MetricKind
    domain: object
    center: np.ndarray
    radii: list
    window: Window
    resolution: int = 800
    style: FigureStyle = field(default_factory=FigureStyle)
    note: str = ""

    def __post_init__(self):
        self.center = as_point(self.center, dim=2)
        self.window = Window.from_any(self.window)
        radii = [float(r) for r in self.radii]
        if any(r <= 0 for r in radii):
            raise ValueError("figure radii must be positive")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("figure radii must be strictly increasing")
        self.radii = radii
        self._validate_window()

    def _validate_window(self):
        rmax = self.radii[-1]
        if self.metric is MetricKind.QUASIHYPERBOLIC:
            if not isinstance(self.domain, PuncturedSpace):
                raise ValueError("quasihyperbolic figures need a punctured domain")
            reach = float(np.linalg.norm(self.center - self.domain.puncture)) * math.exp(rmax)
            hull_center = self.domain.puncture
        else:
            reach = distance_to_boundary(self.domain, self.center) * math.expm1(rmax)
            hull_center = self.center
        win = self.window
        margins = (hull_center[0] - reach * 1.05 - win.xmin,
                   win.xmax - (hull_center[0] + reach * 1.05),
                   hull_center[1] - reach * 1.05 - win.ymin,
                   win.ymax - (hull_center[1] + reach * 1.05))
        if min(margins) < 0:
            raise ValueError("figure window must contain all ball extents "
                             "with at least 5% margin")


def figure_window(metric: MetricKind, domain, center, rmax: float) -> Window:
    """Square window holding the largest ball with comfortable margin."""
    center = as_point(center, dim=2)
    if metric is MetricKind.QUASIHYPERBOLIC:
        reach = float(np.linalg.norm(center - domain.puncture)) * math.exp(rmax)
        return Window.square(domain.puncture, 1.15 * reach)
    reach = distance_to_boundary(domain, center) * math.expm1(rmax)
    return Window.square(center, 1.15 * reach)


def _world_to_view(window: Window):
    k = CANVAS / window.width
    height = window.height * k

    def to_view(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.empty_like(pts)
        out[:, 0] = (pts[:, 0] - window.xmin) * k
        out[:, 1] = (window.ymax - pts[:, 1]) * k
        return out

    return to_view, height, k


def _path_d(view_pts: np.ndarray) -> str:
    coords = [f"{p[0]:.3f},{p[1]:.3f}" for p in view_pts]
    return "M " + " L ".join(coords) + " Z"


def _curves_for_radius(spec: FigureSpec, r: float) -> list:
    """World-coordinate closed curves of one ball boundary."""
    if spec.metric is MetricKind.QUASIHYPERBOLIC:
        boundary = qh_disk_boundary(spec.center, r, samples=max(spec.resolution, 64),
                                    puncture=spec.domain.puncture)
        return [boundary.polyline.vertices]
    n = spec.resolution
    raster = ball_raster(MetricKind.DISTANCE_RATIO, spec.domain, spec.center, r,
                         spec.window, n, n)
    dx, dy = raster.dx, raster.dy
    curves = []
    for contour in measure.find_contours(raster.cells.astype(float), 0.5):
        world = np.empty_like(contour)
        world[:, 0] = spec.window.xmin + (contour[:, 1] + 0.5) * dx
        world[:, 1] = spec.window.ymin + (contour[:, 0] + 0.5) * dy
        curves.append(world)
    curves.sort(key=lambda c: (-len(c), round(float(c[0, 0]), 9), round(float(c[0, 1]), 9)))
    return curves


def _boundary_marks(spec: FigureSpec) -> np.ndarray:
    if isinstance(spec.domain, SlitPlane):
        ts = np.linspace(0.0, max(spec.window.width, spec.window.height), 64)
        return spec.domain.origin[None, :] + ts[:, None] * spec.domain.direction[None, :]
    return spec.domain.boundary_points()


def emit_svg(spec: FigureSpec) -> str:
    """Render the figure spec to an SVG document string (deterministic)."""
    to_view, height, k = _world_to_view(spec.window)
    style = spec.style
    lines = []
    lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    lines.append(f"<!-- world-to-viewport: x' = (x - {spec.window.xmin:.6f}) * {k:.6f}; "
                 f"y' = ({spec.window.ymax:.6f} - y) * {k:.6f} (mathematical y-up) -->")
    if spec.note:
        lines.append(f"<!-- {spec.note} -->")
    lines.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS:.0f}" '
                 f'height="{height:.0f}" viewBox="0 0 {CANVAS:.0f} {height:.0f}">')
    lines.append(f'<rect x="0" y="0" width="{CANVAS:.0f}" height="{height:.0f}" '
                 f'fill="{style.background}"/>')
    for i, r in enumerate(spec.radii):
        color = style.palette[i % len(style.palette)]
        parts = [_path_d(to_view(c)) for c in _curves_for_radius(spec, r)]
        lines.append(f'<path d="{" ".join(parts)}" fill="none" stroke="{color}" '
                     f'stroke-width="{style.stroke_width:.2f}" fill-rule="evenodd">'
                     f'<title>radius {r:.6f}</title></path>')
    marks = _boundary_marks(spec)
    if marks is not None:
        for p in np.atleast_2d(marks):
            q = to_view(np.asarray(p))[0]
            lines.append(f'<circle cx="{q[0]:.3f}" cy="{q[1]:.3f}" '
                         f'r="{style.marker_radius:.2f}" fill="#000000"/>')
    c = to_view(spec.center)[0]
    m = style.marker_radius + 1.0
    lines.append(f'<path d="M {c[0] - m:.3f},{c[1]:.3f} L {c[0] + m:.3f},{c[1]:.3f} '
                 f'M {c[0]:.3f},{c[1] - m:.3f} L {c[0]:.3f},{c[1] + m:.3f}" '
                 f'stroke="#000000" stroke-width="1.20"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def figure_preset(name: str, r0: float = 0.1, resolution: int = 0) -> FigureSpec:
    """Built-in figure specs.

    fig2: quasihyperbolic disks in the punctured plane around e1 at the
    sharp close-to-convexity radius and +/- r0 around it (r0 must keep the
    largest radius at or below pi).
    fig1-punctured / fig1-slit: j-metric disks at the sharp radius
    log(1 + sqrt 3) and +/- r0 around it, in the punctured plane and in the
    plane slit along the non-positive real axis.
    """
    from .analysis import J_CTC_RADIUS, QH_CTC_RADIUS

    if r0 <= 0:
        raise ValueError("r0 must be positive")
    x = np.array([1.0, 0.0])
    if name == "fig2":
        if QH_CTC_RADIUS + r0 > math.pi:
            raise ValueError(f"r0 too large: largest radius exceeds pi "
                             f"(keep r0 <= {math.pi - QH_CTC_RADIUS:.4f})")
        radii = [QH_CTC_RADIUS - r0, QH_CTC_RADIUS, QH_CTC_RADIUS + r0]
        domain = PuncturedSpace((0.0, 0.0))
        window = figure_window(MetricKind.QUASIHYPERBOLIC, domain, x, radii[-1])
        return FigureSpec(MetricKind.QUASIHYPERBOLIC, domain, x, radii, window,
                          resolution=resolution or 720,
                          note="quasihyperbolic disks at the sharp close-to-convexity "
                               "radius and +/- r0")
    if name in ("fig1-punctured", "fig1-slit"):
        if r0 >= J_CTC_RADIUS:
            raise ValueError("r0 must stay below the sharp radius")
        radii = [J_CTC_RADIUS - r0, J_CTC_RADIUS, J_CTC_RADIUS + r0]
        if name == "fig1-punctured":
            domain = PuncturedSpace((0.0, 0.0))
            note = "j-metric disks at the sharp close-to-convexity radius and +/- r0"
        else:
            domain = SlitPlane(origin=(0.0, 0.0), direction=(-1.0, 0.0))
            note = ("j-metric disks in the slit plane; slit choice: the non-positive "
                    "real axis with center x = (1, 0)")
        window = figure_window(MetricKind.DISTANCE_RATIO, domain, x, radii[-1])
        return FigureSpec(MetricKind.DISTANCE_RATIO, domain, x, radii, window,
                          resolution=resolution or 800, note=note)
    raise ValueError(f"unknown figure preset {name!r}")
