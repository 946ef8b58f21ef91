"""Quasihyperbolic and distance-ratio metric balls.

Construction of metric balls in punctured spaces, finite point complements
and slit planes; convexity, starlikeness and close-to-convexity checks;
sharp-radius solvers; brute-force raster oracles; a JSON/SVG command line.
"""

from .analysis import (CtcRegime, CtcVerdict, J_CONVEXITY_RADIUS, J_CTC_RADIUS,
                       J_DISCONNECTION_UPPER, J_STARLIKE_RADIUS, QH_CONVEXITY_RADIUS,
                       QH_CTC_RADIUS, QH_STARLIKE_RADIUS_PUNCTURED, SharpConstants,
                       annular_ctc_check, ball_starlike_verdict, qh_ctc_equation,
                       qh_ctc_verdict, radii_table, separation_profile, sharp_constants,
                       solve_j_ctc_radius, solve_qh_ctc_radius, sweep_critical_radius,
                       tangency_residual, tangent_components, verify_disconnection_example)
from .balls import (JBallDecomposition, JBallShape, QhDiskBoundary, ball_raster,
                    j_ball_decomposition, j_ball_general, j_ball_punctured,
                    qh_disk_boundary)
from .figures import FigureSpec, FigureStyle, emit_svg, figure_preset, figure_window
from .geometry import (Disk, GridRaster, HalfLine, HalfPlane, Polyline, Region, Verdict,
                       Window, complement_has_bounded_component, count_components,
                       point_in_polygon, polygon_is_convex, polygon_is_starlike,
                       rasterize, region_contains)
from .metrics import (FinitePointComplement, MetricKind, PuncturedSpace, SlitPlane,
                      boundary_samples, distance_to_boundary, j_distance,
                      j_distance_many, qh_distance_grid_oracle, qh_distance_punctured,
                      qh_distance_punctured_many, qh_polyline_length)

__version__ = "0.1.0"
