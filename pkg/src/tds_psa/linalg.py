"""Dense complex linear algebra used by the rest of the package.

Everything else calls only :func:`svd`, :func:`eigenvalues`, :func:`solve`
and :func:`lstsq`. The backend is LAPACK via numpy/scipy; failures are turned
into the exceptions in :mod:`tds_psa.errors`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError, RankDeficientError, SingularMatrixError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SvdResult:
    U: np.ndarray
    s: np.ndarray  # nonincreasing
    Vh: np.ndarray

    @property
    def smin(self) -> float:
        return float(self.s[-1]) if self.s.size else 0.0

    @property
    def smax(self) -> float:
        return float(self.s[0]) if self.s.size else 0.0


@dataclass(frozen=True)
class EigenvalueSet:
    values: np.ndarray
    vectors: Optional[np.ndarray] = None

    def __len__(self):
        return self.values.size


def _check_finite(A, name="matrix"):
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def svd(A) -> SvdResult:
    """Full SVD ``A = U diag(s) Vh``."""
    A = _check_finite(np.atleast_2d(np.asarray(A, dtype=complex)))
    try:
        U, s, Vh = sla.svd(A, full_matrices=True, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        try:
            U, s, Vh = sla.svd(A, full_matrices=True, lapack_driver="gesvd")
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    return SvdResult(U, s, Vh)


def singular_values(A) -> np.ndarray:
    """Singular values only; stacks of matrices (``ndim > 2``) are batched."""
    A = _check_finite(np.atleast_2d(np.asarray(A, dtype=complex)))
    try:
        if A.ndim > 2:
            return np.linalg.svd(A, compute_uv=False)
        return sla.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge: {exc}") from exc


def eigenvalues(A, vectors: bool = False) -> EigenvalueSet:
    """Eigenvalues of a general square matrix (Hessenberg QR, LAPACK geev)."""
    A = _check_finite(np.atleast_2d(np.asarray(A)))
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"eigenvalues needs a square matrix, got {A.shape}")
    try:
        if vectors:
            w, V = sla.eig(A, check_finite=False)
            return EigenvalueSet(w.astype(complex), V)
        return EigenvalueSet(sla.eigvals(A, check_finite=False).astype(complex))
    except np.linalg.LinAlgError as exc:
        # geev reports the index of the first eigenvalue that failed to converge
        raise ConvergenceError(f"QR iteration failed: {exc}") from exc


def solve(A, b) -> np.ndarray:
    """Solve ``A x = b`` by LU with partial pivoting."""
    A = _check_finite(np.atleast_2d(np.asarray(A, dtype=complex)))
    b = _check_finite(np.asarray(b, dtype=complex), "right-hand side")
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"solve needs a square matrix, got {A.shape}")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    pmin = float(pivots.min()) if pivots.size else 0.0
    if pmin <= A.shape[0] * EPS * max(float(np.linalg.norm(A)), np.finfo(float).tiny):
        raise SingularMatrixError(f"matrix is singular to working precision "
                                  f"(smallest pivot {pmin:.3e})", pmin)
    return sla.lu_solve((lu, piv), b, check_finite=False)


def lstsq(A, b) -> np.ndarray:
    """Least-squares solution of an overdetermined system via pivoted QR."""
    A = _check_finite(np.atleast_2d(np.asarray(A)))
    b = _check_finite(np.asarray(b), "right-hand side")
    p, q = A.shape
    if p < q:
        raise ValueError(f"lstsq needs rows >= columns, got {A.shape}")
    Q, R, perm = sla.qr(A, mode="economic", pivoting=True, check_finite=False)
    d = np.abs(np.diag(R))
    tol = max(p, q) * EPS * (d[0] if d.size else 0.0)
    rank = int(np.count_nonzero(d > tol))
    if rank < q:
        raise RankDeficientError(f"matrix has estimated rank {rank} < {q}", rank)
    y = sla.solve_triangular(R, Q.conj().T @ b, check_finite=False)
    x = np.empty_like(y)
    x[perm] = y
    return x
