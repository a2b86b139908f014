"""Dirichlet spectra and fundamental gaps of the Ornstein-Uhlenbeck operator on convex domains."""

from .domain2d import (ConvexPolygon, Ellipse, GapReport, Rectangle, Spectrum2D, check_gap_bound,
                       diameter, fd_solve, separable_rectangle, thin_rectangle_experiment)
from .model1d import (Gauge, NormalizedGap, Spectrum1D, crossing_point, log_concavity_profile,
                      normalized_gap, ratio_function, solve_model, solve_scaled)
from .verify import VerificationOutcome, run_suites

__version__ = "0.1.0"

__all__ = [
    "ConvexPolygon", "Ellipse", "GapReport", "Gauge", "NormalizedGap", "Rectangle",
    "Spectrum1D", "Spectrum2D", "VerificationOutcome", "check_gap_bound", "crossing_point",
    "diameter", "fd_solve", "log_concavity_profile", "normalized_gap", "ratio_function",
    "run_suites", "separable_rectangle", "solve_model", "solve_scaled",
    "thin_rectangle_experiment",
]
