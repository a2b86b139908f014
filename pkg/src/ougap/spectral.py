"""Chebyshev collocation primitives and a sine-Galerkin oracle on symmetric intervals."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse

from .errors import AccuracyError, DomainError, InvalidOrderError

MIN_ORDER = 8


@dataclass(frozen=True)
class Interval:
    """The interval (-half_width, half_width)."""

    half_width: float

    def __post_init__(self):
        if not np.isfinite(self.half_width) or self.half_width <= 0:
            raise DomainError(f"half_width must be positive, got {self.half_width!r}")

    @classmethod
    def from_diameter(cls, D: float) -> "Interval":
        return cls(0.5 * float(D))

    @property
    def center(self) -> float:
        return 0.0

    @property
    def diameter(self) -> float:
        return 2.0 * self.half_width


@dataclass(frozen=True, eq=False)
class ChebGrid:
    """Chebyshev-Gauss-Lobatto points of order N on a symmetric interval.

    ``full_nodes`` run from +half_width down to -half_width, so index 0 is the
    right endpoint. ``interior_nodes`` drop both endpoints.
    """

    order: int
    interval: Interval
    full_nodes: np.ndarray = field(repr=False)

    @property
    def interior_nodes(self) -> np.ndarray:
        return self.full_nodes[1:-1]

    @property
    def half_width(self) -> float:
        return self.interval.half_width

    @property
    def has_zero_node(self) -> bool:
        return self.order % 2 == 0

    @property
    def center_index(self) -> int:
        """Index of the full node closest to 0 (exactly 0 for even order)."""
        return self.order // 2


def cheb_grid(N: int, interval: Interval) -> ChebGrid:
    if int(N) != N or N < MIN_ORDER:
        raise InvalidOrderError(f"Chebyshev order must be an integer >= {MIN_ORDER}, got {N!r}")
    N = int(N)
    j = np.arange(N + 1)
    # sine form of cos(j*pi/N): exactly antisymmetric, exact 0 at the middle for even N
    x = np.sin(np.pi * (N - 2 * j) / (2 * N))
    nodes = interval.half_width * x
    nodes[0], nodes[-1] = interval.half_width, -interval.half_width
    nodes.setflags(write=False)
    return ChebGrid(N, interval, nodes)


def cheb_diff_matrix(grid: ChebGrid) -> np.ndarray:
    """Full (N+1)x(N+1) first-derivative matrix on ``grid.full_nodes``."""
    N = grid.order
    x = grid.full_nodes / grid.half_width
    j = np.arange(N + 1)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    dx = x[:, None] - x[None, :]
    Dm = np.outer(c, 1.0 / c) / (dx + np.eye(N + 1))
    # negative-sum trick for the diagonal
    Dm -= np.diag(Dm.sum(axis=1))
    return Dm / grid.half_width


def clenshaw_curtis_weights(grid: ChebGrid) -> np.ndarray:
    """Quadrature weights on the full nodes, exact for polynomials of degree <= N."""
    N = grid.order
    theta = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    inner = np.arange(1, N)
    v = np.ones(N - 1)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N * N - 1)
        for k in range(1, N // 2):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(N * theta[inner]) / (N * N - 1)
    else:
        w[0] = w[N] = 1.0 / (N * N)
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2.0 * v / N
    return w * grid.half_width


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """A square matrix discretizing a Dirichlet operator, with its node coordinates.

    ``nodes`` is an (n,) array for 1-D operators and (n, 2) for 2-D ones, or
    None for modal (Galerkin) representations.
    """

    matrix: object
    nodes: Optional[np.ndarray] = None
    symmetric: bool = False

    def __post_init__(self):
        shape = self.matrix.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {shape}")
        if self.nodes is not None and len(self.nodes) != shape[0]:
            raise ValueError(f"{len(self.nodes)} nodes for a {shape[0]}x{shape[0]} matrix")
        if self.symmetric:
            asym = abs(self.matrix - self.matrix.T)
            scale = abs(self.matrix).max()
            if asym.max() > 1e-12 * scale:
                raise ValueError("matrix flagged symmetric but max|A - A^T| exceeds 1e-12*max|A|")

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def is_sparse(self) -> bool:
        return scipy.sparse.issparse(self.matrix)

    def max_abs(self) -> float:
        return float(abs(self.matrix).max())


def cheb_dirichlet_second_derivative(grid: ChebGrid) -> DiscreteOperator:
    """d^2/ds^2 on interior nodes with homogeneous Dirichlet data (boundary rows/cols deleted)."""
    Dm = cheb_diff_matrix(grid)
    D2 = (Dm @ Dm)[1:-1, 1:-1]
    return DiscreteOperator(D2, grid.interior_nodes, symmetric=False)


def _sine_moment(m: np.ndarray) -> np.ndarray:
    # int_0^1 (x - 1/2)^2 cos(m pi x) dx
    m = np.asarray(m)
    safe = np.maximum(m, 1)
    out = np.where(m % 2 == 0, 2.0 / (safe * safe * np.pi**2), 0.0)
    return np.where(m == 0, 1.0 / 12.0, out)


def sine_quadratic_moments(M: int) -> np.ndarray:
    """P_jk = int s^2 * 2 sin(j pi (s+1/2)) sin(k pi (s+1/2)) ds over (-1/2, 1/2), closed form."""
    k = np.arange(1, M + 1)
    J, K = np.meshgrid(k, k, indexing="ij")
    return _sine_moment(np.abs(J - K)) - _sine_moment(J + K)


def sine_quadratic_moments_quadrature(M: int, points: Optional[int] = None) -> np.ndarray:
    """Same moments by Gauss-Legendre quadrature (4M points by default)."""
    n = points or 4 * M
    t, wt = np.polynomial.legendre.leggauss(n)
    s = 0.5 * t
    wt = 0.5 * wt
    k = np.arange(1, M + 1)
    S = np.sqrt(2.0) * np.sin(np.pi * np.outer(k, s + 0.5))
    return (S * (wt * s * s)) @ S.T


def sine_galerkin_operator(M: int, c: float, interval: Optional[Interval] = None,
                           method: str = "closed") -> DiscreteOperator:
    """-d^2/ds^2 + c s^2 on (-1/2, 1/2) in the basis sqrt(2) sin(k pi (s + 1/2)), k = 1..M."""
    if interval is not None and not np.isclose(interval.half_width, 0.5, rtol=0, atol=1e-15):
        raise DomainError("the sine-Galerkin oracle is defined on (-1/2, 1/2) only")
    if int(M) != M or M < MIN_ORDER:
        raise InvalidOrderError(f"Galerkin size must be an integer >= {MIN_ORDER}, got {M!r}")
    if c < 0:
        raise DomainError(f"potential coefficient must be >= 0, got {c!r}")
    M = int(M)
    if method == "closed":
        P = sine_quadratic_moments(M)
    elif method == "quadrature":
        P = sine_quadratic_moments_quadrature(M)
        check = sine_quadratic_moments_quadrature(M, 8 * M)
        if np.abs(P - check).max() > 1e-13:
            raise AccuracyError("Gauss-Legendre moments not converged to 1e-13")
        P = 0.5 * (P + P.T)
    else:
        raise ValueError(f"unknown method {method!r}")
    k = np.arange(1, M + 1)
    A = np.diag((k * np.pi) ** 2) + c * P
    return DiscreteOperator(A, None, symmetric=True)


def barycentric_eval(grid: ChebGrid, values, s):
    """Evaluate the Chebyshev interpolant through ``values`` (on full nodes) at ``s``.

    ``s`` may be a scalar or an array; points coinciding with a node return the
    stored value exactly.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != grid.order + 1:
        raise ValueError(f"expected {grid.order + 1} nodal values, got {values.shape[0]}")
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    a = grid.half_width
    if np.any(np.abs(s_arr) > a) or not np.all(np.isfinite(s_arr)):
        raise DomainError(f"evaluation point outside [-{a}, {a}]")
    x = grid.full_nodes
    w = (-1.0) ** np.arange(grid.order + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    diff = s_arr[:, None] - x[None, :]
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = w / diff
        num = t @ values
        den = t.sum(axis=1)
        out = num / den
    hit_rows, hit_cols = np.nonzero(exact)
    out[hit_rows] = values[hit_cols]
    if np.ndim(s) == 0:
        return float(out[0])
    return out.reshape(np.shape(s))
