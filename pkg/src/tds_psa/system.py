"""Time-delay systems, weighted perturbation classes and the level-set function.

A retarded system with pointwise delays has the characteristic matrix

    F(lam) = lam*I - sum_i A_i exp(-lam*tau_i),   tau_0 = 0.

Perturbations dA_i with ||dA_i||_2 <= eps / w_i move the roots inside the
super-level set ``f(lam) > 1/eps`` of

    f(lam) = w(Re lam) / sigma_min(F(lam)),   w(s) = sum_i exp(-s*tau_i) / w_i.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import SystemValidationError

#: Returned by :func:`eval_f` at characteristic roots.
INF = math.inf


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeDelaySystem:
    """Matrices ``A_0..A_m`` and delays ``tau_0 = 0 < tau_1 < ... < tau_m``."""

    matrices: tuple
    delays: tuple

    def __init__(self, matrices: Sequence, delays: Sequence[float]):
        mats = [np.atleast_2d(np.asarray(a, dtype=complex)) for a in matrices]
        taus = [float(t) for t in delays]
        if not mats:
            raise SystemValidationError("at least one matrix (A_0) is required")
        if len(mats) != len(taus):
            raise SystemValidationError(
                f"{len(mats)} matrices but {len(taus)} delays")
        n = mats[0].shape[0]
        for i, a in enumerate(mats):
            if a.ndim != 2 or a.shape != (n, n):
                raise SystemValidationError(
                    f"matrix A_{i} has shape {a.shape}, expected ({n}, {n})")
            if not np.all(np.isfinite(a)):
                raise SystemValidationError(f"matrix A_{i} has non-finite entries")
        if taus[0] != 0.0:
            raise SystemValidationError(f"tau_0 must be exactly 0, got {taus[0]!r}")
        for i in range(1, len(taus)):
            if not math.isfinite(taus[i]) or taus[i] <= 0.0:
                raise SystemValidationError(f"tau_{i} must be positive, got {taus[i]!r}")
            if taus[i] == taus[i - 1]:
                raise SystemValidationError(f"duplicate delay {taus[i]!r} at index {i}")
            if taus[i] < taus[i - 1]:
                raise SystemValidationError("delays must be strictly increasing")
        object.__setattr__(self, "matrices", tuple(_freeze(a.copy()) for a in mats))
        object.__setattr__(self, "delays", tuple(taus))

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.matrices) - 1

    @property
    def tau_max(self) -> float:
        return self.delays[-1]

    @property
    def is_real(self) -> bool:
        """True when every A_i has zero imaginary part."""
        return all(not np.any(a.imag) for a in self.matrices)

    @property
    def scale(self) -> float:
        """``1 + max_i ||A_i||_F``, the reference magnitude for residual tests."""
        return 1.0 + max(float(np.linalg.norm(a)) for a in self.matrices)

    def fingerprint(self) -> str:
        """SHA-256 of the delays and matrix bytes; stable across runs."""
        h = hashlib.sha256()
        h.update(np.asarray(self.delays, dtype=float).tobytes())
        for a in self.matrices:
            h.update(np.ascontiguousarray(a, dtype=complex).tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    """Weights ``w_0..w_m`` and radius ``epsilon`` of the perturbation class."""

    weights: tuple
    epsilon: float

    def __init__(self, weights: Sequence[float], epsilon: float):
        ws = tuple(float(w) for w in weights)
        eps = float(epsilon)
        if not ws:
            raise SystemValidationError("weights must be non-empty")
        if any(not math.isfinite(w) or w <= 0.0 for w in ws):
            raise SystemValidationError(f"weights must be positive, got {ws}")
        if not math.isfinite(eps) or eps <= 0.0:
            raise SystemValidationError(f"epsilon must be positive, got {epsilon!r}")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def uniform(cls, sys: TimeDelaySystem, epsilon: float) -> "PerturbationSpec":
        return cls([1.0] * (sys.m + 1), epsilon)

    def check(self, sys: TimeDelaySystem) -> None:
        if len(self.weights) != sys.m + 1:
            raise SystemValidationError(
                f"{len(self.weights)} weights for a system with {sys.m + 1} matrices")


@dataclass(frozen=True, eq=False)
class ShiftedSystem:
    """Matrices of the system moved so that the line Re lam = sigma is the axis."""

    sigma: float
    matrices: tuple


def eval_F(sys: TimeDelaySystem, lam: complex) -> np.ndarray:
    """Characteristic matrix ``lam*I - sum_i A_i exp(-lam*tau_i)``."""
    lam = complex(lam)
    out = lam * np.eye(sys.n, dtype=complex)
    for a, tau in zip(sys.matrices, sys.delays):
        out -= a * np.exp(-lam * tau)
    return out


def eval_dF(sys: TimeDelaySystem, lam: complex) -> np.ndarray:
    """Derivative of :func:`eval_F` with respect to ``lam``."""
    lam = complex(lam)
    out = np.eye(sys.n, dtype=complex)
    for a, tau in zip(sys.matrices[1:], sys.delays[1:]):
        out += tau * a * np.exp(-lam * tau)
    return out


def eval_w_line(spec: PerturbationSpec, sys: TimeDelaySystem, sigma: float) -> float:
    """Weight function on the vertical line Re lam = sigma."""
    spec.check(sys)
    return math.fsum(math.exp(-sigma * tau) / w for tau, w in zip(sys.delays, spec.weights))


def eval_dw_line(spec: PerturbationSpec, sys: TimeDelaySystem, sigma: float) -> float:
    """d/dsigma of :func:`eval_w_line`."""
    return -math.fsum(tau * math.exp(-sigma * tau) / w
                      for tau, w in zip(sys.delays, spec.weights))


def eval_f(sys: TimeDelaySystem, spec: PerturbationSpec, lam: complex) -> float:
    """Level-set function ``w(Re lam) / sigma_min(F(lam))``.

    Returns :data:`INF` when ``sigma_min`` is exactly zero. No inverse is formed.
    """
    lam = complex(lam)
    smin = float(linalg.singular_values(eval_F(sys, lam))[-1])
    w = eval_w_line(spec, sys, lam.real)
    if smin == 0.0:
        return INF
    return w / smin


def eval_f_batch(sys: TimeDelaySystem, spec: PerturbationSpec, lams) -> np.ndarray:
    """Vectorized :func:`eval_f` over an array of points (same shape out)."""
    lams = np.asarray(lams, dtype=complex)
    flat = lams.ravel()
    n = sys.n
    F = flat[:, None, None] * np.eye(n, dtype=complex)[None]
    for a, tau in zip(sys.matrices, sys.delays):
        F = F - np.exp(-flat * tau)[:, None, None] * a[None]
    smin = linalg.singular_values(F)[:, -1]
    w = np.zeros(flat.shape)
    for tau, wi in zip(sys.delays, spec.weights):
        w += np.exp(-flat.real * tau) / wi
    with np.errstate(divide="ignore"):
        out = np.where(smin == 0.0, INF, w / np.where(smin == 0.0, 1.0, smin))
    return out.reshape(lams.shape)


def shift(sys: TimeDelaySystem, sigma: float) -> ShiftedSystem:
    """``A_{s,0} = A_0 - sigma*I`` and ``A_{s,i} = A_i exp(-tau_i*sigma)``."""
    sigma = float(sigma)
    mats = [sys.matrices[0] - sigma * np.eye(sys.n)]
    for a, tau in zip(sys.matrices[1:], sys.delays[1:]):
        mats.append(a * math.exp(-tau * sigma))
    return ShiftedSystem(sigma, tuple(_freeze(np.asarray(a, dtype=complex)) for a in mats))


def eval_F_shifted(shifted: ShiftedSystem, delays: Sequence[float], omega: float) -> np.ndarray:
    """``F_sigma(j*omega) = j*omega*I - sum_i A_{s,i} exp(-j*omega*tau_i)``."""
    n = shifted.matrices[0].shape[0]
    out = 1j * omega * np.eye(n, dtype=complex)
    for a, tau in zip(shifted.matrices, delays):
        out -= a * np.exp(-1j * omega * tau)
    return out
