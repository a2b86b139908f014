"""Smallest-eigenpair solvers with a common return type.

All three backends return :class:`EigenPairs` with unit-norm eigenvectors in
the columns of ``vectors`` and the residual ``||A v - lam v|| / ||v||`` of each
pair. Dense problems go through LAPACK; sparse ones through ARPACK in
shift-invert mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import (ContractViolation, ConvergenceError, DegenerateSpectrumError,
                     SpectralExtractionError)
from .spectral import DiscreteOperator

IMAG_TOL = 1e-8
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    tol: float

    def __len__(self):
        return len(self.values)


def _residuals(A, values, vectors):
    R = A @ vectors - vectors * values
    return np.linalg.norm(R, axis=0) / np.linalg.norm(vectors, axis=0)


def _check_k(op, k):
    n = op.shape[0]
    if int(k) != k or not 1 <= k <= n:
        raise ContractViolation(f"k must satisfy 1 <= k <= {n}, got {k!r}")
    return int(k)


def _check_simple_ground(values):
    if len(values) > 1:
        scale = max(1.0, abs(values[0]))
        if values[1] - values[0] <= DEGENERACY_RTOL * scale:
            raise DegenerateSpectrumError(
                f"lowest eigenvalue is numerically degenerate: {values[0]!r}, {values[1]!r}")


def _center_order(op, n):
    """Row indices ordered by distance of their node from the domain center."""
    if op.nodes is None:
        return np.argsort(np.abs(np.arange(n) - (n - 1) / 2.0), kind="stable")
    nodes = np.asarray(op.nodes, dtype=float)
    dist = np.abs(nodes) if nodes.ndim == 1 else np.linalg.norm(nodes, axis=1)
    return np.argsort(dist, kind="stable")


def _fix_signs(op, vectors):
    # first entry (by distance to center) that is not roundoff decides the sign;
    # for odd modes the exact center value is zero, so it is skipped
    order = _center_order(op, vectors.shape[0])
    out = vectors.copy()
    for j in range(out.shape[1]):
        v = out[:, j]
        floor = 1e-8 * np.abs(v).max()
        pivot = next(i for i in order if abs(v[i]) > floor)
        if v[pivot] < 0:
            out[:, j] = -v
    return out


def smallest_symmetric(op: DiscreteOperator, k: int, check_simple: bool = True) -> EigenPairs:
    """k algebraically smallest eigenpairs of a dense symmetric operator."""
    if not op.symmetric:
        raise ContractViolation("smallest_symmetric requires an operator flagged symmetric")
    k = _check_k(op, k)
    A = op.matrix.toarray() if op.is_sparse else np.asarray(op.matrix, dtype=float)
    values, vectors = scipy.linalg.eigh(A, subset_by_index=[0, k - 1])
    if check_simple:
        _check_simple_ground(values)
    vectors = _fix_signs(op, vectors / np.linalg.norm(vectors, axis=0))
    n = A.shape[0]
    tol = 1e-10 * max(op.max_abs(), 1.0) * n
    return EigenPairs(values, vectors, _residuals(A, values, vectors), tol)


def smallest_general(op: DiscreteOperator, k: int, check_simple: bool = True) -> EigenPairs:
    """k smallest real eigenpairs of a dense, possibly non-symmetric operator.

    Eigenvalues whose imaginary part exceeds 1e-8 times their real part are
    discarded as discretization artefacts before sorting by real part.
    """
    k = _check_k(op, k)
    A = op.matrix.toarray() if op.is_sparse else np.asarray(op.matrix, dtype=float)
    w, V = scipy.linalg.eig(A)
    real = np.abs(w.imag) <= IMAG_TOL * np.maximum(np.abs(w.real), 1e-300)
    idx = np.flatnonzero(real)
    if len(idx) < k:
        raise SpectralExtractionError(
            f"only {len(idx)} acceptable real eigenvalues, {k} requested")
    idx = idx[np.argsort(w.real[idx], kind="stable")[:k]]
    values = w.real[idx]
    if check_simple:
        _check_simple_ground(values)
    vectors = V[:, idx]
    # rotate each complex-scaled vector onto the real axis before dropping imag
    phase = np.exp(-1j * np.angle(vectors[np.argmax(np.abs(vectors), axis=0), np.arange(k)]))
    vectors = (vectors * phase).real
    vectors /= np.linalg.norm(vectors, axis=0)
    vectors = _fix_signs(op, vectors)
    n = A.shape[0]
    tol = 1e-10 * max(op.max_abs(), 1.0) * n
    return EigenPairs(values, vectors, _residuals(A, values, vectors), tol)


def _gershgorin_lower(A) -> float:
    A = scipy.sparse.csr_matrix(A)
    diag = A.diagonal()
    off = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(diag)
    return float((diag - off).min())


def smallest_sparse(op: DiscreteOperator, k: int, tol: float = 1e-9,
                    maxiter: int = 5000) -> EigenPairs:
    """k smallest eigenpairs of a sparse symmetric operator by shift-invert Lanczos.

    The shift sits just below the Gershgorin lower bound so every eigenvalue lies
    above it and the nearest ones are the smallest. ``tol`` bounds each residual
    relative to ``max|A|``.
    """
    if not op.symmetric:
        raise ContractViolation("smallest_sparse requires an operator flagged symmetric")
    if k not in (1, 2, 3):
        raise ContractViolation(f"smallest_sparse supports k in {{1, 2, 3}}, got {k!r}")
    _check_k(op, k)
    A = scipy.sparse.csc_matrix(op.matrix, dtype=float)
    n = A.shape[0]
    scale = max(op.max_abs(), 1.0)
    if n <= 64:
        # ARPACK needs k < ncv <= n; tiny problems are cheaper dense anyway
        values, vectors = scipy.linalg.eigh(A.toarray(), subset_by_index=[0, k - 1])
        return _finish_sparse(op, A, values, vectors, tol * scale, n, None)
    lower = _gershgorin_lower(A)
    sigma = lower - 1e-3 * max(1.0, abs(lower))
    # seeded random start: a symmetric start vector would miss odd modes entirely
    v0 = np.random.default_rng(12345).standard_normal(n)
    ncv = min(n, max(2 * k + 1, 20))
    try:
        values, vectors = scipy.sparse.linalg.eigsh(
            A, k=k, sigma=sigma, which="LM", v0=v0, ncv=ncv, tol=0.0, maxiter=maxiter)
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise ConvergenceError(
            "shift-invert Lanczos did not converge",
            {"maxiter": maxiter, "converged": len(exc.eigenvalues), "k": k, "n": n, "sigma": sigma},
        ) from exc
    return _finish_sparse(op, A, values, vectors, tol * scale, n, sigma)


def _finish_sparse(op, A, values, vectors, bound, n, sigma):
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    vectors /= np.linalg.norm(vectors, axis=0)
    vectors = _fix_signs(op, vectors)
    residuals = _residuals(A, values, vectors)
    if np.any(residuals > bound):
        raise ConvergenceError(
            "eigenpair residual above tolerance",
            {"residuals": residuals.tolist(), "bound": bound, "n": n, "sigma": sigma},
        )
    return EigenPairs(values, vectors, residuals, bound)
