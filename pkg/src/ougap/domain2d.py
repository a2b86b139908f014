"""Convex planar domains and the Schrodinger-gauge operator -Lap + |x|^2/4 on them.

Curved and polygonal domains are discretized by a 5-point stencil on the grid
points strictly inside the domain (neighbors outside count as zero).
Rectangles additionally have an exact separable path through the 1-D model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse

from . import eigen, model1d
from .errors import DomainError, ExperimentSetupError, LemmaViolation, ResolutionError
from .spectral import DiscreteOperator

MIN_INTERIOR_POINTS = 200
GAUGE_SHIFT_2D = 1.0  # n/2 with n = 2


@dataclass(frozen=True)
class Rectangle:
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise DomainError(f"rectangle sides must be positive, got {self.w!r}, {self.h!r}")

    kind = "rectangle"
    strictly_convex = False

    def bounds(self):
        return (-self.w / 2, self.w / 2), (-self.h / 2, self.h / 2)

    def inside(self, x, y):
        return (np.abs(x) < self.w / 2) & (np.abs(y) < self.h / 2)


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"ellipse semi-axes must be positive, got {self.a!r}, {self.b!r}")

    kind = "ellipse"
    strictly_convex = True

    def bounds(self):
        return (-self.a, self.a), (-self.b, self.b)

    def inside(self, x, y):
        return (x / self.a) ** 2 + (y / self.b) ** 2 < 1.0 - 1e-12


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon; clockwise input is reversed to counterclockwise."""

    vertices: np.ndarray = field(repr=False)

    kind = "polygon"
    strictly_convex = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise DomainError("polygon needs at least three (x, y) vertices")
        cross = _edge_crosses(v)
        if np.all(cross < 0):
            v = v[::-1].copy()
            cross = _edge_crosses(v)
        if not np.all(cross > 0):
            raise DomainError("polygon vertices are not strictly convex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def bounds(self):
        lo, hi = self.vertices.min(axis=0), self.vertices.max(axis=0)
        return (lo[0], hi[0]), (lo[1], hi[1])

    def inside(self, x, y):
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        scale = np.abs(v).max()
        ok = np.ones(np.broadcast(x, y).shape, dtype=bool)
        for (px, py), (ex, ey) in zip(v, e):
            ok &= ex * (y - py) - ey * (x - px) > 1e-12 * scale * np.hypot(ex, ey)
        return ok


def _edge_crosses(v):
    e = np.roll(v, -1, axis=0) - v
    en = np.roll(e, -1, axis=0)
    return e[:, 0] * en[:, 1] - e[:, 1] * en[:, 0]


def regular_polygon(n: int, circumradius: float = 1.0) -> ConvexPolygon:
    t = 2 * np.pi * np.arange(n) / n + np.pi / 2
    return ConvexPolygon(circumradius * np.column_stack([np.cos(t), np.sin(t)]))


def disk(r: float = 1.0) -> Ellipse:
    return Ellipse(r, r)


def polygon_diameter(vertices) -> float:
    """Diameter of a convex polygon (counterclockwise vertices) by rotating calipers."""
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    if n < 3:
        return float(np.ptp(v, axis=0).max()) if n == 2 else 0.0

    def area2(i, j, k):
        a, b, c = v[i % n], v[j % n], v[k % n]
        return abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    best = 0.0
    j = 1
    for i in range(n):
        # advance the antipodal pointer while it moves away from edge (i, i+1)
        while area2(i, i + 1, j + 1) > area2(i, i + 1, j):
            j += 1
        for a, b in ((i, j), (i + 1, j)):
            best = max(best, float(np.hypot(*(v[a % n] - v[b % n]))))
    return best


def diameter(domain) -> float:
    if isinstance(domain, Rectangle):
        return float(np.hypot(domain.w, domain.h))
    if isinstance(domain, Ellipse):
        return 2.0 * max(domain.a, domain.b)
    if isinstance(domain, ConvexPolygon):
        return polygon_diameter(domain.vertices)
    raise TypeError(f"unsupported domain {domain!r}")


@dataclass(frozen=True, eq=False)
class MaskedGrid:
    """Grid points strictly inside a domain; ``index`` maps (i, j) to matrix rows (-1 outside)."""

    h: float
    origin: tuple
    points: np.ndarray = field(repr=False)
    ij: np.ndarray = field(repr=False)
    index: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.points)


def masked_grid(domain, h: float) -> MaskedGrid:
    if not h > 0:
        raise DomainError(f"grid step must be positive, got {h!r}")
    (x0, x1), (y0, y1) = domain.bounds()
    nx = int(np.floor((x1 - x0) / h + 1e-9)) + 1
    ny = int(np.floor((y1 - y0) / h + 1e-9)) + 1
    # centre the lattice in the bounding box so symmetric domains get symmetric grids
    ox = 0.5 * (x0 + x1) - 0.5 * (nx - 1) * h
    oy = 0.5 * (y0 + y1) - 0.5 * (ny - 1) * h
    X, Y = np.meshgrid(ox + h * np.arange(nx), oy + h * np.arange(ny), indexing="ij")
    mask = domain.inside(X, Y)
    index = np.full(mask.shape, -1, dtype=np.int64)
    ij = np.argwhere(mask)
    index[ij[:, 0], ij[:, 1]] = np.arange(len(ij))
    pts = np.column_stack([X[mask], Y[mask]])
    return MaskedGrid(float(h), (ox, oy), pts, ij, index)


def fd_operator(domain, h: float, potential: bool = True):
    """Sparse symmetric 5-point discretization of -Lap (+ |x|^2/4) with Dirichlet data."""
    grid = masked_grid(domain, h)
    n = len(grid)
    if n < MIN_INTERIOR_POINTS:
        raise ResolutionError(f"only {n} interior points at h={h}; need >= {MIN_INTERIOR_POINTS}")
    diag = np.full(n, 4.0 / h**2)
    if potential:
        diag += 0.25 * (grid.points**2).sum(axis=1)
    rows, cols = [np.arange(n)], [np.arange(n)]
    vals = [diag]
    idx = grid.index
    padded = np.pad(idx, 1, constant_values=-1)
    i, j = grid.ij[:, 0] + 1, grid.ij[:, 1] + 1
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = padded[i + di, j + dj]
        keep = nb >= 0
        rows.append(np.arange(n)[keep])
        cols.append(nb[keep])
        vals.append(np.full(keep.sum(), -1.0 / h**2))
    A = scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return DiscreteOperator(A, grid.points, symmetric=True), grid


@dataclass(frozen=True, eq=False)
class Spectrum2D:
    """Schrodinger-gauge eigenvalues on a 2-D domain (OU ones are these minus 1)."""

    domain: object
    method: str
    eigenvalues: tuple
    resolution: object  # h for fd_masked, N for separable

    def __post_init__(self):
        if not self.eigenvalues[0] < self.eigenvalues[1]:
            raise LemmaViolation(f"lambda1 < lambda2 violated: {self.eigenvalues[:2]}")

    @property
    def lambda1(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda2(self) -> float:
        return self.eigenvalues[1]

    @property
    def gap(self) -> float:
        return self.lambda2 - self.lambda1

    @property
    def ou_eigenvalues(self) -> tuple:
        return tuple(v - GAUGE_SHIFT_2D for v in self.eigenvalues)


def fd_solve(domain, h: float, k: int = 2, potential: bool = True) -> Spectrum2D:
    if k not in (2, 3):
        raise ValueError("fd_solve needs k in {2, 3} to report a gap")
    op, _ = fd_operator(domain, h, potential)
    pairs = eigen.smallest_sparse(op, k)
    return Spectrum2D(domain, "fd_masked", tuple(float(v) for v in pairs.values), float(h))


def separable_rectangle(w: float, h_len: float, N: Optional[int] = None) -> Spectrum2D:
    """Exact-up-to-1-D-accuracy spectrum of (-w/2, w/2) x (-h_len/2, h_len/2)."""
    sx = model1d.solve_model(w, "schrodinger", N)
    sy = model1d.solve_model(h_len, "schrodinger", N)
    lam1 = sx.lambda1 + sy.lambda1
    lam2 = min(sx.lambda2 + sy.lambda1, sx.lambda1 + sy.lambda2)
    lam3 = sorted([sx.lambda2 + sy.lambda1, sx.lambda1 + sy.lambda2])[1]
    return Spectrum2D(Rectangle(w, h_len), "separable", (lam1, lam2, lam3), N)


def thin_rectangle_experiment(D: float, eps_list: Sequence[float], N: Optional[int] = None,
                              tol: float = 1e-5):
    """Gap on (-D/2, D/2) x (-eps, eps) for each eps, checked against the model bracket.

    Returns a list of (eps, gap) and raises :class:`LemmaViolation` when a gap
    leaves [gap_model - tol, gap_model + eps^2 + tol].
    """
    eps = [float(e) for e in eps_list]
    if not eps or any(e <= 0 for e in eps):
        raise ExperimentSetupError("eps_list must hold positive values")
    if any(b > a for a, b in zip(eps, eps[1:])):
        raise ExperimentSetupError("eps_list must be descending")
    gap_model = model1d.model_gap(D, N)
    out = []
    for e in eps:
        sy = model1d.solve_model(2 * e, "schrodinger", N)
        if not sy.gap > gap_model:
            raise ExperimentSetupError(
                f"eps={e}: transverse gap {sy.gap:.6g} does not exceed the model gap "
                f"{gap_model:.6g}, so the second mode is not the longitudinal one")
        gap = separable_rectangle(D, 2 * e, N).gap
        if not gap_model - tol <= gap <= gap_model + e * e + tol:
            raise LemmaViolation(f"eps={e}: gap {gap!r} outside [{gap_model}, {gap_model + e * e}]")
        out.append((e, gap))
    return out


@dataclass(frozen=True, eq=False)
class GapReport:
    domain: object
    D: float
    gap_2d: float
    gap_model: float
    discretization_error_estimate: float
    method: str
    eigenvalues: tuple
    resolution: object

    @property
    def margin(self) -> float:
        return self.gap_2d - self.gap_model

    @property
    def verdict(self) -> str:
        return "pass" if self.margin >= -self.discretization_error_estimate else "fail"

    @property
    def convexity(self) -> str:
        return "strict" if self.domain.strictly_convex else "non-strict"

    def to_dict(self) -> dict:
        return {
            "domain": describe(self.domain),
            "convexity": self.convexity,
            "diameter": self.D,
            "method": self.method,
            "resolution": self.resolution,
            "eigenvalues_schrodinger": list(self.eigenvalues),
            "eigenvalues_ou": [v - GAUGE_SHIFT_2D for v in self.eigenvalues],
            "gap": self.gap_2d,
            "model_gap": self.gap_model,
            "margin": self.margin,
            "error_estimate": self.discretization_error_estimate,
            "verdict": self.verdict,
        }


def describe(domain) -> dict:
    if isinstance(domain, Rectangle):
        return {"type": "rectangle", "w": domain.w, "h": domain.h}
    if isinstance(domain, Ellipse):
        return {"type": "ellipse", "a": domain.a, "b": domain.b}
    return {"type": "polygon", "vertices": domain.vertices.tolist()}


def richardson_estimate(coarse: float, fine: float, safety: float = 2.0) -> float:
    """safety * 4/3 * |coarse - fine| for a (nominally) second-order method."""
    return safety * 4.0 / 3.0 * abs(coarse - fine)


# floor for the separable path: the 1-D eigenvalues are converged to ~1e-10 relative
_SEPARABLE_ERROR_FLOOR = 1e-8


def check_gap_bound(domain, h: float = 1 / 128, N: Optional[int] = None,
                    method: str = "auto") -> GapReport:
    """Compare the domain's gap with the model gap at its diameter.

    ``method`` is "separable" (rectangles only), "fd" or "auto" (separable for
    rectangles, fd otherwise). The fd path solves at h and h/2, reports the
    h/2 gap and a Richardson error estimate.
    """
    D = diameter(domain)
    gap_model = model1d.model_gap(D, N)
    if method == "auto":
        method = "separable" if isinstance(domain, Rectangle) else "fd"
    if method == "separable":
        if not isinstance(domain, Rectangle):
            raise ValueError("the separable path needs a rectangle")
        n0 = N or model1d.DEFAULT_ORDER
        spec = separable_rectangle(domain.w, domain.h, n0)
        ref = separable_rectangle(domain.w, domain.h, 2 * n0)
        est = max(richardson_estimate(spec.gap, ref.gap), _SEPARABLE_ERROR_FLOOR)
        return GapReport(domain, D, ref.gap, gap_model, est, "separable",
                         ref.eigenvalues[:2], ref.resolution)
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    coarse = fd_solve(domain, h)
    fine = fd_solve(domain, h / 2)
    est = richardson_estimate(coarse.gap, fine.gap)
    return GapReport(domain, D, fine.gap, gap_model, est, "fd_masked",
                     fine.eigenvalues, h / 2)
