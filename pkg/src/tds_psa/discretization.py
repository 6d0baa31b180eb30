"""Chebyshev collocation of the level-set operator and of the DDE generator.

The level-set operator acts on C^{2n}-valued functions on [-tau_max, tau_max].
Collocating it on the 2N+1 Chebyshev extremal points gives a square matrix of
size 2n(2N+1) whose block rows are derivative rows ``d_{i,k} I`` except the
middle one, which carries the boundary condition

    phi'(0) = M_0 phi(0) + sum_i (M_i phi(-tau_i) + M_{-i} phi(tau_i)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import SystemValidationError
from .system import PerturbationSpec, ShiftedSystem, TimeDelaySystem, eval_w_line, shift


def barycentric_weights(x: np.ndarray) -> np.ndarray:
    """Weights ``1 / prod_{k != j}(x_j - x_k)``, rescaled to max modulus 1."""
    x = np.asarray(x, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # scale by the capacity-like factor to avoid overflow for large N
    c = 4.0 / (x.max() - x.min()) if x.size > 1 else 1.0
    w = 1.0 / np.prod(c * diff, axis=1)
    return w / np.max(np.abs(w))


def barycentric_matrix(x: np.ndarray, w: np.ndarray, t) -> np.ndarray:
    """Rows of Lagrange basis values ``l_k(t_j)`` (second barycentric form).

    Returns an array of shape ``(len(t), len(x))``; exact cardinal rows are
    used when a target coincides with a node.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty((t.size, x.size))
    for j, tj in enumerate(t):
        d = tj - x
        hit = np.flatnonzero(d == 0.0)
        if hit.size:
            out[j] = 0.0
            out[j, hit[0]] = 1.0
            continue
        q = w / d
        out[j] = q / q.sum()
    return out


def differentiation_matrix_from(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``D[i, k] = l_k'(x_i)``; diagonal by the negative-sum trick."""
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True, eq=False)
class ChebyshevMesh:
    """Symmetric mesh ``theta_i = tau_max * sin(i*pi/(2N))``, ``i = -N..N``.

    Node ``i`` is stored at array position ``i + N``.
    """

    N: int
    tau_max: float
    points: np.ndarray
    weights: np.ndarray
    D: np.ndarray = field(repr=False)

    @property
    def center(self) -> int:
        return self.N

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    def lagrange(self, t) -> np.ndarray:
        return barycentric_matrix(self.points, self.weights, t)

    def interpolate(self, values, t):
        """Evaluate the interpolant of nodal ``values`` (axis 0) at ``t``."""
        return self.lagrange(t) @ np.asarray(values)


def build_mesh(N: int, tau_max: float) -> ChebyshevMesh:
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if not tau_max > 0:
        raise ValueError(f"tau_max must be positive, got {tau_max!r}")
    N = int(N)
    half = tau_max * np.sin(np.arange(N + 1) * np.pi / (2 * N))
    half[0] = 0.0
    half[N] = tau_max
    points = np.concatenate([-half[:0:-1], half])
    w = barycentric_weights(points)
    D = differentiation_matrix_from(points, w)
    for a in (points, w, D):
        a.setflags(write=False)
    return ChebyshevMesh(N, float(tau_max), points, w, D)


def differentiation_matrix(mesh: ChebyshevMesh) -> np.ndarray:
    return mesh.D.copy()


# ---------------------------------------------------------------------------
# Hamiltonian blocks


def level(sys: TimeDelaySystem, spec: PerturbationSpec, sigma: float) -> float:
    """Singular-value level ``eps * w(sigma)`` tested on the line Re = sigma."""
    return spec.epsilon * eval_w_line(spec, sys, sigma)


def hamiltonian_blocks(shifted: ShiftedSystem, s: float):
    """Return ``M_0`` and the list of pairs ``(M_i, M_{-i})``, i = 1..m.

    ``M_0 = [[A_0s, -s^2 I], [I, -A_0s^*]]``. The lower-left block is +I so that
    imaginary eigenvalues appear exactly when ``s`` is a singular value of
    ``F_sigma(j omega)``.
    """
    a0 = shifted.matrices[0]
    n = a0.shape[0]
    eye = np.eye(n)
    M0 = np.block([[a0, -(s * s) * eye], [eye, -a0.conj().T]])
    pairs = []
    zero = np.zeros((n, n), dtype=complex)
    for a in shifted.matrices[1:]:
        Mp = np.block([[a, zero], [zero, zero]])
        Mm = np.block([[zero, zero], [zero, -a.conj().T]])
        pairs.append((Mp, Mm))
    return M0, pairs


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    matrix: np.ndarray
    sigma: float
    N: int
    n: int
    level: float
    real_data: bool = True

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def middle_row(self) -> np.ndarray:
        b = 2 * self.n
        return self.matrix[self.N * b:(self.N + 1) * b]


class OperatorBuilder:
    """Rebuilds the collocated level-set operator for varying sigma.

    Derivative rows and the Lagrange values ``l_k(+-tau_i)`` are computed once;
    :meth:`build` only refreshes the middle block row.
    """

    def __init__(self, sys: TimeDelaySystem, spec: PerturbationSpec, mesh: ChebyshevMesh):
        spec.check(sys)
        if sys.m >= 1 and not math.isclose(mesh.tau_max, sys.tau_max, rel_tol=1e-14):
            raise SystemValidationError(
                f"mesh tau_max {mesh.tau_max!r} differs from max delay {sys.tau_max!r}")
        self.sys, self.spec, self.mesh = sys, spec, mesh
        self.b = 2 * sys.n
        self._base = np.kron(mesh.D, np.eye(self.b)).astype(complex)
        taus = np.asarray(sys.delays[1:])
        self._l_minus = mesh.lagrange(-taus) if taus.size else np.zeros((0, mesh.size))
        self._l_plus = mesh.lagrange(taus) if taus.size else np.zeros((0, mesh.size))

    def middle_row(self, sigma: float) -> np.ndarray:
        """Block row ``(a_{-N}, ..., a_N)`` as a ``2n x 2n(2N+1)`` array."""
        sh = shift(self.sys, sigma)
        M0, pairs = hamiltonian_blocks(sh, level(self.sys, self.spec, sigma))
        b, K = self.b, self.mesh.size
        row = np.zeros((b, b * K), dtype=complex)
        c = self.mesh.center
        row[:, c * b:(c + 1) * b] += M0
        for i, (Mp, Mm) in enumerate(pairs):
            for k in range(K):
                lm, lp = self._l_minus[i, k], self._l_plus[i, k]
                if lm != 0.0 or lp != 0.0:
                    row[:, k * b:(k + 1) * b] += lm * Mp + lp * Mm
        return row

    def build(self, sigma: float) -> DiscretizedOperator:
        L = self._base.copy()
        c, b = self.mesh.center, self.b
        L[c * b:(c + 1) * b] = self.middle_row(sigma)
        return DiscretizedOperator(L, float(sigma), self.mesh.N, self.sys.n,
                                   level(self.sys, self.spec, sigma), self.sys.is_real)


def build_L_sigma_N(sys: TimeDelaySystem, spec: PerturbationSpec, mesh: ChebyshevMesh,
                    sigma: float) -> DiscretizedOperator:
    return OperatorBuilder(sys, spec, mesh).build(sigma)


# ---------------------------------------------------------------------------
# Exponential surrogate p_N


def pN_nodal(mesh: ChebyshevMesh, lam: complex) -> np.ndarray:
    """Nodal values of the degree-2N polynomial with ``p(0) = 1`` and
    ``p'(theta_i) = lam * p(theta_i)`` at every nonzero node.

    Raises :class:`~tds_psa.errors.SingularMatrixError` for exceptional ``lam``.
    """
    K, c = mesh.size, mesh.center
    A = mesh.D.astype(complex) - complex(lam) * np.eye(K)
    A[c] = 0.0
    A[c, c] = 1.0
    rhs = np.zeros(K, dtype=complex)
    rhs[c] = 1.0
    return linalg.solve(A, rhs)


def eval_pN(mesh: ChebyshevMesh, lam: complex, t) -> complex:
    vals = pN_nodal(mesh, lam)
    out = mesh.interpolate(vals, t)
    return complex(out[0]) if np.ndim(t) == 0 else out


# ---------------------------------------------------------------------------
# Generator of the DDE (characteristic roots)


def default_Na(N: int) -> int:
    return max(16, 2 * N)


def build_generator_N(sys: TimeDelaySystem, Na: int) -> np.ndarray:
    """Collocation of the solution-operator generator on ``[-tau_max, 0]``.

    Uses the ``Na + 1`` Chebyshev extremal points with node 0 at ``theta = 0``;
    the first block row is ``sum_i A_i l_k(-tau_i)``, the rest are derivative
    rows. For a delay-free system the result is ``A_0`` itself.
    """
    if sys.m == 0:
        return sys.matrices[0].copy()
    if int(Na) != Na or Na < 1:
        raise ValueError(f"Na must be a positive integer, got {Na!r}")
    Na = int(Na)
    n = sys.n
    x = 0.5 * sys.tau_max * (np.cos(np.arange(Na + 1) * np.pi / Na) - 1.0)
    x[0], x[-1] = 0.0, -sys.tau_max
    w = barycentric_weights(x)
    D = differentiation_matrix_from(x, w)
    G = np.kron(D, np.eye(n)).astype(complex)
    first = np.zeros((n, n * (Na + 1)), dtype=complex)
    ell = barycentric_matrix(x, w, [-t for t in sys.delays])
    for a, row in zip(sys.matrices, ell):
        for k in np.flatnonzero(row):
            first[:, k * n:(k + 1) * n] += row[k] * a
    G[:n] = first
    return G
