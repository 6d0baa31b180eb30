"""Bisection predictor for the pseudospectral abscissa.

Each step asks whether the collocated level-set operator at sigma has
eigenvalues on the imaginary axis; if so, the 1/eps level is still reached on
the line Re lam = sigma and the lower end of the bracket moves up.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .discretization import ChebyshevMesh, DiscretizedOperator, OperatorBuilder, pN_nodal
from .errors import LinAlgFailure, PredictorError
from .system import PerturbationSpec, TimeDelaySystem, eval_w_line, shift

log = logging.getLogger(__name__)

MAX_ITER = 200


@dataclass
class PredictorResult:
    sigma_tilde: float
    frequencies: List[float]
    bracket: Tuple[float, float]
    iterations: int
    trace: List[Tuple[float, bool]] = field(default_factory=list)
    tol: float = 0.0
    tol_im: Optional[float] = None


def default_tol_im(L: DiscretizedOperator) -> float:
    return 1e-7 * (1.0 + float(np.linalg.norm(L.matrix)))


def _dedupe(values, atol):
    out = []
    for x in sorted(values):
        if not out or x - out[-1] > atol:
            out.append(x)
    return out


def has_imaginary_eigs(L: DiscretizedOperator, tol_im: Optional[float] = None):
    """Return ``(found, frequencies)`` for the eigenvalues of ``L`` on the axis.

    An eigenvalue ``mu`` counts when ``|Re mu| <= tol_im * (1 + |mu|)``. For
    real system data the spectrum is conjugate-symmetric and only ``|Im mu|``
    is reported; for complex data the signed frequencies are kept.
    """
    if tol_im is None:
        tol_im = default_tol_im(L)
    if not tol_im > 0:
        raise ValueError(f"tol_im must be positive, got {tol_im!r}")
    mu = linalg.eigenvalues(L.matrix).values
    hit = mu[np.abs(mu.real) <= tol_im * (1.0 + np.abs(mu))]
    if hit.size == 0:
        return False, []
    freqs = np.abs(hit.imag) if L.real_data else hit.imag
    return True, _dedupe(freqs.tolist(), 10.0 * tol_im)


def predict(sys: TimeDelaySystem, spec: PerturbationSpec, mesh: ChebyshevMesh,
            alpha0: float, tol: float, tol_im: Optional[float] = None,
            max_iter: int = MAX_ITER) -> PredictorResult:
    """Bisection with doubling steps while the right end is still unbounded."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    builder = OperatorBuilder(sys, spec, mesh)
    sigma_L, sigma_R, dsigma = float(alpha0), math.inf, float(tol)
    trace: List[Tuple[float, bool]] = []
    freqs: Optional[List[float]] = None
    used_tol_im = tol_im
    it = 0

    def test(L):
        nonlocal used_tol_im
        t = default_tol_im(L) if tol_im is None else tol_im
        used_tol_im = t
        return has_imaginary_eigs(L, t)

    while sigma_R - sigma_L > 2.0 * tol:
        if it >= max_iter:
            raise PredictorError(f"bisection exceeded {max_iter} iterations", trace)
        it += 1
        dsigma *= 2.0
        sigma_M = sigma_L + dsigma if math.isinf(sigma_R) else 0.5 * (sigma_L + sigma_R)
        found, fr = test(builder.build(sigma_M))
        trace.append((sigma_M, found))
        log.debug("sigma_M=%.12g imaginary=%s freqs=%s", sigma_M, found, fr)
        if found:
            sigma_L, freqs = sigma_M, fr
        else:
            sigma_R = sigma_M
    if freqs is None:
        # no successful test inside the loop: harvest at the lower end itself
        _, freqs = test(builder.build(sigma_L))
    return PredictorResult(sigma_L, list(freqs), (sigma_L, sigma_R), it, trace,
                           float(tol), used_tol_im)


def FN_matrix(sys: TimeDelaySystem, mesh: ChebyshevMesh, sigma: float, omega: float) -> np.ndarray:
    """``j w I - A_{s,0} - sum_i A_{s,i} p_N(-tau_i; j w)``."""
    sh = shift(sys, sigma)
    out = 1j * omega * np.eye(sys.n, dtype=complex) - sh.matrices[0]
    if sys.m:
        vals = pN_nodal(mesh, 1j * omega)
        p = mesh.interpolate(vals, [-t for t in sys.delays[1:]])
        for a, pi in zip(sh.matrices[1:], p):
            out -= a * pi
    return out


def alpha_f_N(sys: TimeDelaySystem, spec: PerturbationSpec, mesh: ChebyshevMesh,
              sigma: float, omega_grid: Sequence[float],
              skipped: Optional[list] = None) -> float:
    """Grid supremum of the discretized level-set function on Re lam = sigma.

    Grid points where ``p_N`` cannot be evaluated are skipped and appended to
    ``skipped`` when a list is given.
    """
    w = eval_w_line(spec, sys, sigma)
    best = 0.0
    for om in omega_grid:
        try:
            FN = FN_matrix(sys, mesh, sigma, float(om))
        except LinAlgFailure:
            if skipped is not None:
                skipped.append(float(om))
            continue
        smin = float(linalg.singular_values(FN)[-1])
        val = math.inf if smin == 0.0 else w / smin
        best = max(best, val)
    return best
