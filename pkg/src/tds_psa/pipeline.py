"""End-to-end predictor-corrector computation of the pseudospectral abscissa."""

from __future__ import annotations

import logging
from typing import Optional

from .corrector import PsaResult, correct_all
from .discretization import build_mesh, default_Na
from .errors import CorrectorError
from .predictor import predict
from .roots import rightmost_roots
from .system import PerturbationSpec, TimeDelaySystem

log = logging.getLogger(__name__)

ALPHA0_MARGIN = 1e-8
#: extra predictor rounds with tol / 8 when the first bracket gives no usable seed
RETRIES = 6


def pseudospectral_abscissa(sys: TimeDelaySystem, spec: PerturbationSpec, N: int = 6,
                            tol: float = 0.05, tol_im: Optional[float] = None,
                            Na: Optional[int] = None, alpha0: Optional[float] = None,
                            threads: Optional[int] = None) -> PsaResult:
    """Spectral abscissa, bisection predictor, then Gauss-Newton corrector.

    The lower bracket end starts ``1e-8`` below the computed spectral abscissa.
    If no bisection test succeeds (the whole bracket is narrower than ``tol``)
    or no candidate converges, the predictor is rerun with ``tol / 8``.
    """
    spec.check(sys)
    if alpha0 is None:
        alpha0 = rightmost_roots(sys, Na or default_Na(N)).alpha0
    mesh = build_mesh(N, sys.tau_max if sys.m else 1.0)
    seed = alpha0 - ALPHA0_MARGIN
    t = tol
    last_exc: Optional[CorrectorError] = None
    attempts = []
    for attempt in range(RETRIES + 1):
        pred = predict(sys, spec, mesh, seed, t, tol_im)
        attempts.append((t, pred.sigma_tilde, any(ok for _, ok in pred.trace)))
        if any(ok for _, ok in pred.trace):
            try:
                res = correct_all(sys, spec, pred, threads)
            except CorrectorError as exc:
                last_exc = exc
                log.info("corrector failed at tol=%g: %s", t, exc)
            else:
                res.alpha0 = alpha0
                res.diagnostics["predictor_rounds"] = attempts
                return res
        t /= 8.0
    if last_exc is not None:
        raise last_exc
    raise CorrectorError("predictor never produced a usable seed")
