"""The one-dimensional model problem on (-D/2, D/2) with Dirichlet conditions.

Two gauges describe the same spectrum:

* Ornstein-Uhlenbeck:  -u'' + s u' = lam u
* Schrodinger:         -v'' + s^2/4 v = (lam + 1/2) v,   v = u exp(-s^2/4)

Everything is solved in the Schrodinger gauge by Chebyshev collocation; OU
eigenvalues are the Schrodinger ones minus 1/2. The scaled problem
-psi'' + D^4 s^2/4 psi = lam_tilde psi on (-1/2, 1/2) has lam_tilde = D^2 lam.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import eigen
from .errors import (ContractViolation, ConvergenceError, DomainError, LemmaViolation,
                     PositivityError)
from .spectral import (ChebGrid, DiscreteOperator, Interval, barycentric_eval, cheb_diff_matrix,
                       cheb_dirichlet_second_derivative, cheb_grid, clenshaw_curtis_weights)

DEFAULT_ORDER = 64
MAX_ORDER = 512
DOUBLING_RTOL = 1e-10
GAUGE_SHIFT = 0.5  # n/2 with n = 1
THREE_PI_SQ = 3.0 * np.pi**2

# exp(D^2/16) * eps above this and OU eigenfunction samples are mostly roundoff
_OU_AMPLIFICATION_LIMIT = 1e-6 / np.finfo(float).eps


class Gauge(str, enum.Enum):
    ORNSTEIN_UHLENBECK = "ornstein_uhlenbeck"
    SCHRODINGER = "schrodinger"

    @classmethod
    def parse(cls, value) -> "Gauge":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"ou": cls.ORNSTEIN_UHLENBECK, "g": cls.SCHRODINGER}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown gauge {value!r}; use 'ou' or 'schrodinger'") from None


@dataclass(frozen=True, eq=False)
class Spectrum1D:
    """First two Dirichlet eigenpairs of the model problem in a given gauge.

    ``phi1``/``phi2`` are samples on ``grid.full_nodes`` with zero endpoint
    values, unit L2(ds) norm, phi1 > 0 inside and phi2 > 0 near s = D/2.
    ``schrodinger_phi`` keeps the Schrodinger-gauge samples whatever the gauge.
    """

    D: float
    gauge: Gauge
    lambda1: float
    lambda2: float
    grid: ChebGrid
    phi1: np.ndarray
    phi2: np.ndarray
    schrodinger_phi: np.ndarray
    potential: Optional[np.ndarray] = None

    @property
    def gap(self) -> float:
        return self.lambda2 - self.lambda1

    @property
    def order(self) -> int:
        return self.grid.order

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.full_nodes


@dataclass(frozen=True)
class NormalizedGap:
    D: float
    gap: float
    normalized: float


@dataclass(frozen=True, eq=False)
class RatioFunction:
    """w(s) = c * phi2/(2 phi1) on the full nodes, scaled so that w'(0) = 1."""

    nodes: np.ndarray
    w: np.ndarray
    dw: np.ndarray
    d2w: np.ndarray
    scale: float


@dataclass(frozen=True, eq=False)
class LogConcavityProfile:
    """(log phi1)' and (log phi1)'' on the nodes with |s| <= D/2 - D/100.

    ``phi1_second`` holds the OU-gauge phi1'' on every interior node, the
    quantity whose negativity is asserted.
    """

    gauge: Gauge
    nodes: np.ndarray
    dlog: np.ndarray
    d2log: np.ndarray
    interior_nodes: np.ndarray
    phi1_second: np.ndarray


def _normalize(grid, phi):
    w = clenshaw_curtis_weights(grid)
    return phi / np.sqrt(w @ (phi * phi))


def _orient(grid, phi1, phi2):
    Dm = cheb_diff_matrix(grid)
    if phi1[grid.center_index] < 0:
        phi1 = -phi1
    # phi2 > 0 just left of the right endpoint <=> phi2'(D/2) < 0
    if (Dm[0] @ phi2) > 0:
        phi2 = -phi2
    return phi1, phi2


def _check_convex(grid, V):
    x = grid.full_nodes[::-1]
    v = V[::-1]
    h = np.diff(x)
    slopes = np.diff(v) / h
    second = 2.0 * np.diff(slopes) / (x[2:] - x[:-2])
    # allow the roundoff of differencing at the clustered end nodes
    tol = 1e-9 + 64 * np.finfo(float).eps * np.abs(v).max() / h.min() ** 2
    if second.min() < -tol:
        i = int(np.argmin(second))
        raise ContractViolation(
            f"potential is not convex: second difference {second[i]:.3e} near s = {x[i + 1]:.6g}")


def _schrodinger_problem(half_width, N, extra=None):
    """Eigenpairs of -d2 + s^2/4 (+ extra) on (-half_width, half_width) at order N."""
    grid = cheb_grid(N, Interval(half_width))
    D2 = cheb_dirichlet_second_derivative(grid).matrix
    s = grid.interior_nodes
    diag = 0.25 * s * s
    if extra is not None:
        diag = diag + extra[1:-1]
    op = DiscreteOperator(-D2 + np.diag(diag), s, symmetric=False)
    return grid, eigen.smallest_general(op, 2)


def _scaled_problem(Dparam, N):
    grid = cheb_grid(N, Interval(0.5))
    D2 = cheb_dirichlet_second_derivative(grid).matrix
    s = grid.interior_nodes
    op = DiscreteOperator(-D2 + np.diag(0.25 * Dparam**4 * s * s), s, symmetric=False)
    return grid, eigen.smallest_general(op, 2)


def _with_doubling(solve, N):
    """Run ``solve(N)``; if N is None, double from DEFAULT_ORDER until eigenvalues settle."""
    if N is not None:
        if int(N) != N or N < 32:
            raise ContractViolation(f"order N must be an integer >= 32, got {N!r}")
        return solve(int(N))
    order = DEFAULT_ORDER
    prev = solve(order)
    while order < MAX_ORDER:
        order *= 2
        cur = solve(order)
        a, b = prev[1].values, cur[1].values
        if np.all(np.abs(a - b) <= DOUBLING_RTOL * np.abs(b)):
            return cur
        prev = cur
    raise ConvergenceError("eigenvalues did not settle under order doubling",
                           {"max_order": MAX_ORDER, "last": prev[1].values.tolist()})


def solve_scaled(Dparam: float, N: Optional[int] = None):
    """Two smallest eigenvalues of -psi'' + Dparam^4 s^2/4 psi on (-1/2, 1/2)."""
    if not Dparam >= 0:
        raise DomainError(f"Dparam must be >= 0, got {Dparam!r}")
    _, pairs = _with_doubling(lambda n: _scaled_problem(Dparam, n), N)
    return float(pairs.values[0]), float(pairs.values[1])


def scaled_modes(Dparam: float, N: int = DEFAULT_ORDER):
    """Grid, eigenvalues and L2-normalized full-node samples of psi_1, psi_2 (scaled problem)."""
    grid, pairs = _scaled_problem(Dparam, N)
    psi = np.zeros((2, N + 1))
    psi[:, 1:-1] = pairs.vectors.T
    p1, p2 = _orient(grid, _normalize(grid, psi[0]), _normalize(grid, psi[1]))
    return grid, pairs.values.copy(), np.vstack([p1, p2])


def eigenvalue_sensitivity(Dparam: float, N: int = DEFAULT_ORDER) -> np.ndarray:
    """d lam_tilde_i / d Dparam from first-order perturbation: 2 D^3 int_0^{1/2} s^2 psi_i^2."""
    grid, _, psi = scaled_modes(Dparam, N)
    s = grid.full_nodes
    wts = clenshaw_curtis_weights(grid)
    half = np.where(s > 0, 1.0, np.where(s == 0, 0.5, 0.0))
    return 2.0 * Dparam**3 * (psi * psi * s * s * half) @ wts


def gauge_transform(grid: ChebGrid, phi: np.ndarray, to: Gauge) -> np.ndarray:
    """Map normalized samples between gauges (u = v exp(s^2/4)) and renormalize."""
    s = grid.full_nodes
    factor = np.exp(s * s / 4.0) if Gauge.parse(to) is Gauge.ORNSTEIN_UHLENBECK else np.exp(-s * s / 4.0)
    return _normalize(grid, phi * factor)


def solve_model(D: float, gauge="schrodinger", N: Optional[int] = None,
                V: Optional[Callable] = None) -> Spectrum1D:
    """First two Dirichlet eigenpairs of the model problem on (-D/2, D/2).

    ``V`` is an optional convex potential added to the operator (a callable of
    s, vectorized over numpy arrays). With ``N=None`` the order is doubled
    from 64 until both eigenvalues agree to 1e-10 relative.
    """
    if not (np.isfinite(D) and D > 0):
        raise DomainError(f"diameter must be positive, got {D!r}")
    gauge = Gauge.parse(gauge)
    half = 0.5 * float(D)

    def solve(n):
        extra = None
        if V is not None:
            grid = cheb_grid(n, Interval(half))
            extra = np.broadcast_to(np.asarray(V(grid.full_nodes), dtype=float), (n + 1,)).copy()
            _check_convex(grid, extra)
        grid, pairs = _schrodinger_problem(half, n, extra)
        return grid, pairs, extra

    grid, pairs, extra = _with_doubling(solve, N)
    n = grid.order
    phi = np.zeros((2, n + 1))
    phi[:, 1:-1] = pairs.vectors.T
    p1, p2 = _orient(grid, _normalize(grid, phi[0]), _normalize(grid, phi[1]))
    schr = np.vstack([p1, p2])
    lam1, lam2 = (float(v) for v in pairs.values)
    if gauge is Gauge.ORNSTEIN_UHLENBECK:
        if np.exp(min(half * half / 4.0, 700.0)) > _OU_AMPLIFICATION_LIMIT:
            warnings.warn(f"OU eigenfunction samples at D={D} are dominated by roundoff "
                          "(gauge factor exp(D^2/16)); eigenvalues are unaffected",
                          RuntimeWarning, stacklevel=2)
        p1 = gauge_transform(grid, p1, gauge)
        p2 = gauge_transform(grid, p2, gauge)
        lam1 -= GAUGE_SHIFT
        lam2 -= GAUGE_SHIFT
    if extra is not None:
        extra.setflags(write=False)
    return Spectrum1D(float(D), gauge, lam1, lam2, grid, p1, p2, schr, extra)


def model_gap(D: float, N: Optional[int] = None) -> float:
    """lam_2(D) - lam_1(D) of the model problem; gauge independent."""
    l1, l2 = solve_scaled(D, N)
    return (l2 - l1) / (D * D)


def normalized_gap(D: float, N: Optional[int] = None) -> NormalizedGap:
    if not (np.isfinite(D) and D > 0):
        raise DomainError(f"diameter must be positive, got {D!r}")
    l1, l2 = solve_scaled(D, N)
    return NormalizedGap(float(D), (l2 - l1) / (D * D), (l2 - l1) / THREE_PI_SQ)


def _schrodinger_pair(spec: Spectrum1D):
    return spec.schrodinger_phi[0], spec.schrodinger_phi[1]


def ratio_function(spec: Spectrum1D) -> RatioFunction:
    """The ratio w = phi2 / (2 phi1) of Schrodinger-gauge eigenfunctions.

    Endpoint values use the derivative ratio (both eigenfunctions vanish there).
    w' and w'' come from spectral differentiation of the w samples.
    """
    grid = spec.grid
    phi1, phi2 = _schrodinger_pair(spec)
    inner = phi1[1:-1]
    if np.any(inner <= 0):
        i = int(np.argmin(inner)) + 1
        raise PositivityError(f"phi1 is not positive at interior node s = {grid.full_nodes[i]:.6g}")
    Dm = cheb_diff_matrix(grid)
    d1, d2 = Dm @ phi1, Dm @ phi2
    w = np.empty_like(phi1)
    w[1:-1] = 0.5 * phi2[1:-1] / inner
    w[0] = 0.5 * d2[0] / d1[0]
    w[-1] = 0.5 * d2[-1] / d1[-1]
    dw = Dm @ w
    scale = float(dw[grid.center_index])
    w, dw = w / scale, dw / scale
    return RatioFunction(grid.full_nodes, w, dw, Dm @ dw, scale)


def ratio_ode_residual(spec: Spectrum1D, rf: Optional[RatioFunction] = None) -> np.ndarray:
    """w'' + gap w + 2 w' phi1'/phi1 on the interior nodes (zero for the exact ratio)."""
    rf = rf or ratio_function(spec)
    phi1, _ = _schrodinger_pair(spec)
    d1 = cheb_diff_matrix(spec.grid) @ phi1
    i = slice(1, -1)
    return rf.d2w[i] + spec.gap * rf.w[i] + 2.0 * rf.dw[i] * d1[i] / phi1[i]


def crossing_function(grid: ChebGrid, phi1, phi2, s):
    """phi1(s)^2 - phi2(s)^2 through the interpolants."""
    return barycentric_eval(grid, phi1, s) ** 2 - barycentric_eval(grid, phi2, s) ** 2


def crossing_sign_changes(grid: ChebGrid, phi1, phi2):
    """Nodes in [0, D/2) by increasing s, the sign of g there, and sign-change positions."""
    x = grid.full_nodes
    idx = np.flatnonzero((x >= 0) & (x < grid.half_width))[::-1]
    g = phi1[idx] ** 2 - phi2[idx] ** 2
    sign = np.sign(g)
    changes = np.flatnonzero(sign[1:] != sign[:-1])
    return idx, sign, changes


def find_crossing(grid: ChebGrid, phi1, phi2) -> float:
    """The unique zero of phi1^2 - phi2^2 in (0, D/2), located by bisection."""
    idx, sign, changes = crossing_sign_changes(grid, phi1, phi2)
    ok = (len(changes) == 1 and sign[0] > 0 and sign[-1] < 0 and not np.any(sign == 0))
    if not ok:
        raise LemmaViolation(
            f"phi1^2 - phi2^2 changes sign {len(changes)} times on (0, D/2); expected exactly once "
            "from positive to negative")
    x = grid.full_nodes
    lo, hi = x[idx[changes[0]]], x[idx[changes[0] + 1]]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if crossing_function(grid, phi1, phi2, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def crossing_point(spec: Spectrum1D) -> float:
    phi1, phi2 = _schrodinger_pair(spec)
    return find_crossing(spec.grid, phi1, phi2)


def second_derivative_max(grid: ChebGrid, phi) -> float:
    """max of phi'' over the interior nodes (spectral second derivative)."""
    Dm = cheb_diff_matrix(grid)
    return float((Dm @ (Dm @ phi))[1:-1].max())


def log_derivative(spec: Spectrum1D, s, gauge=None):
    """(log phi1)'(s) = phi1'/phi1 at arbitrary points strictly inside the interval."""
    gauge = spec.gauge if gauge is None else Gauge.parse(gauge)
    phi = spec.schrodinger_phi[0]
    if gauge is Gauge.ORNSTEIN_UHLENBECK:
        phi = gauge_transform(spec.grid, phi, gauge)
    dphi = cheb_diff_matrix(spec.grid) @ phi
    return barycentric_eval(spec.grid, dphi, s) / barycentric_eval(spec.grid, phi, s)


def log_concavity_profile(spec: Spectrum1D, check: bool = True) -> LogConcavityProfile:
    """Spectral samples of (log phi1)' and (log phi1)'' in the spectrum's gauge.

    Concavity (phi1'' < 0 inside) is a property of the OU-gauge eigenfunction;
    it is checked there regardless of the gauge of ``spec``.
    """
    grid = spec.grid
    Dm = cheb_diff_matrix(grid)
    phi = spec.schrodinger_phi[0]
    if spec.gauge is Gauge.ORNSTEIN_UHLENBECK:
        phi = spec.phi1
    d1 = Dm @ phi
    d2 = Dm @ d1
    x = grid.full_nodes
    keep = np.abs(x) <= grid.half_width - spec.D / 100.0
    dlog = d1[keep] / phi[keep]
    d2log = d2[keep] / phi[keep] - dlog**2

    ou = spec.phi1 if spec.gauge is Gauge.ORNSTEIN_UHLENBECK else gauge_transform(
        grid, spec.schrodinger_phi[0], Gauge.ORNSTEIN_UHLENBECK)
    ou_second = (Dm @ (Dm @ ou))[1:-1]
    if check and ou_second.max() >= 0:
        i = int(np.argmax(ou_second)) + 1
        raise LemmaViolation(f"phi1'' = {ou_second.max():.3e} >= 0 at s = {x[i]:.6g}")
    return LogConcavityProfile(spec.gauge, x[keep], dlog, d2log, grid.interior_nodes, ou_second)
