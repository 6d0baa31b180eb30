"""Gauss-Newton correction of predicted (sigma, omega) pairs.

At the pseudospectral abscissa the nonlinear eigenproblem

    H_s(lam) = lam I - M_0 - sum_i (M_i e^{-lam tau_i} + M_{-i} e^{lam tau_i})

has a non-semisimple eigenvalue ``j*omega``. With ``x = [u; v]`` the unknowns
``(Re u, Im u, Re v, Im v, omega, sigma)`` are fitted to the 4n+3 real
equations

    H_sigma(j omega) x = 0,    cref^* x - 1 = 0,    Im{v^* G u} = 0,

where ``G = I + sum_i tau_i A_{s,i} e^{-j omega tau_i}``; the last row is the
stationarity of the singular value in omega.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import linalg
from ._threads import thread_count
from .discretization import hamiltonian_blocks, level
from .errors import CorrectorError, LinAlgFailure, RankDeficientError
from .predictor import PredictorResult
from .system import (PerturbationSpec, TimeDelaySystem, eval_dw_line, eval_f, eval_w_line,
                     shift)

log = logging.getLogger(__name__)

MAX_ITER = 50
MAX_HALVINGS = 8
RES_TOL = 1e-10
STEP_TOL = 1e-14
#: extra Newton steps taken after the tolerance is met, while the residual drops
POLISH_STEPS = 2


def assemble_H(sys: TimeDelaySystem, spec: PerturbationSpec, sigma: float,
               lam: complex) -> np.ndarray:
    lam = complex(lam)
    sh = shift(sys, sigma)
    M0, pairs = hamiltonian_blocks(sh, level(sys, spec, sigma))
    H = lam * np.eye(2 * sys.n, dtype=complex) - M0
    for tau, (Mp, Mm) in zip(sys.delays[1:], pairs):
        H -= Mp * np.exp(-lam * tau) + Mm * np.exp(lam * tau)
    return H


def assemble_dH(sys: TimeDelaySystem, spec: PerturbationSpec, sigma: float,
                lam: complex) -> np.ndarray:
    """Derivative of :func:`assemble_H` with respect to ``lam``."""
    lam = complex(lam)
    sh = shift(sys, sigma)
    _, pairs = hamiltonian_blocks(sh, 0.0)
    dH = np.eye(2 * sys.n, dtype=complex)
    for tau, (Mp, Mm) in zip(sys.delays[1:], pairs):
        dH += tau * (Mp * np.exp(-lam * tau) - Mm * np.exp(lam * tau))
    return dH


def assemble_dH_dsigma(sys: TimeDelaySystem, spec: PerturbationSpec, sigma: float,
                       lam: complex) -> np.ndarray:
    lam = complex(lam)
    n = sys.n
    sh = shift(sys, sigma)
    _, pairs = hamiltonian_blocks(sh, 0.0)
    eps = spec.epsilon
    w = eval_w_line(spec, sys, sigma)
    ds2 = 2.0 * eps * eps * w * eval_dw_line(spec, sys, sigma)
    eye = np.eye(n)
    dM0 = np.block([[-eye, -ds2 * eye], [np.zeros((n, n)), eye]]).astype(complex)
    out = -dM0
    for tau, (Mp, Mm) in zip(sys.delays[1:], pairs):
        out += tau * (Mp * np.exp(-lam * tau) + Mm * np.exp(lam * tau))
    return out


def null_vector(H: np.ndarray):
    """Unit right singular vector of the smallest singular value, and that value."""
    res = linalg.svd(H)
    return res.Vh[-1].conj(), res.smin


# ---------------------------------------------------------------------------
# residual and Jacobian in real coordinates


def pack(u, v, omega, sigma) -> np.ndarray:
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    return np.concatenate([u.real, u.imag, v.real, v.imag, [omega, sigma]])


def unpack(z: np.ndarray, n: int):
    z = np.asarray(z, dtype=float)
    u = z[:n] + 1j * z[n:2 * n]
    v = z[2 * n:3 * n] + 1j * z[3 * n:4 * n]
    return u, v, float(z[4 * n]), float(z[4 * n + 1])


def _G(sh, delays, omega):
    n = sh.matrices[0].shape[0]
    G = np.eye(n, dtype=complex)
    dG_dw = np.zeros((n, n), dtype=complex)
    dG_ds = np.zeros((n, n), dtype=complex)
    for a, tau in zip(sh.matrices[1:], delays[1:]):
        e = np.exp(-1j * omega * tau)
        G += tau * a * e
        dG_dw += -1j * tau * tau * a * e
        dG_ds += -tau * tau * a * e
    return G, dG_dw, dG_ds


def stationarity(sys: TimeDelaySystem, sigma: float, omega: float, u, v) -> complex:
    """``v^* G u``; its imaginary part vanishes where the singular value is flat in omega."""
    G, _, _ = _G(shift(sys, sigma), sys.delays, omega)
    return complex(np.vdot(v, G @ u))


def residual(sys: TimeDelaySystem, spec: PerturbationSpec, z: np.ndarray,
             cref: np.ndarray) -> np.ndarray:
    n = sys.n
    u, v, omega, sigma = unpack(z, n)
    x = np.concatenate([u, v])
    Hx = assemble_H(sys, spec, sigma, 1j * omega) @ x
    nv = np.vdot(cref, x) - 1.0
    g = stationarity(sys, sigma, omega, u, v).imag
    return np.concatenate([Hx.real, Hx.imag, [nv.real, nv.imag, g]])


def jacobian(sys: TimeDelaySystem, spec: PerturbationSpec, z: np.ndarray,
             cref: np.ndarray) -> np.ndarray:
    """Analytic ``(4n+3) x (4n+2)`` Jacobian of :func:`residual`."""
    n = sys.n
    u, v, omega, sigma = unpack(z, n)
    x = np.concatenate([u, v])
    lam = 1j * omega
    H = assemble_H(sys, spec, sigma, lam)
    # complex derivative columns of H x
    cols = np.empty((2 * n, 4 * n + 2), dtype=complex)
    cols[:, :n] = H[:, :n]
    cols[:, n:2 * n] = 1j * H[:, :n]
    cols[:, 2 * n:3 * n] = H[:, n:]
    cols[:, 3 * n:4 * n] = 1j * H[:, n:]
    cols[:, 4 * n] = 1j * (assemble_dH(sys, spec, sigma, lam) @ x)
    cols[:, 4 * n + 1] = assemble_dH_dsigma(sys, spec, sigma, lam) @ x

    c = cref.conj()
    nrow = np.zeros(4 * n + 2, dtype=complex)
    nrow[:n], nrow[n:2 * n] = c[:n], 1j * c[:n]
    nrow[2 * n:3 * n], nrow[3 * n:4 * n] = c[n:], 1j * c[n:]

    G, dG_dw, dG_ds = _G(shift(sys, sigma), sys.delays, omega)
    vG = v.conj() @ G
    Gu = G @ u
    grow = np.concatenate([vG.imag, vG.real, Gu.imag, -Gu.real,
                           [np.vdot(v, dG_dw @ u).imag, np.vdot(v, dG_ds @ u).imag]])

    J = np.empty((4 * n + 3, 4 * n + 2))
    J[:2 * n] = cols.real
    J[2 * n:4 * n] = cols.imag
    J[4 * n] = nrow.real
    J[4 * n + 1] = nrow.imag
    J[4 * n + 2] = grow
    return J


# ---------------------------------------------------------------------------


@dataclass
class CorrectionCandidate:
    u: np.ndarray
    v: np.ndarray
    omega: float
    sigma: float
    residual_norm: float
    converged: bool
    iterations: int
    seed_omega: float = 0.0
    reason: str = ""


@dataclass
class PsaResult:
    alpha_epsilon: float
    omega_epsilon: float
    u: np.ndarray
    v: np.ndarray
    candidates: List[CorrectionCandidate]
    predictor: Optional[PredictorResult] = None
    alpha0: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)


def gauss_newton_correct(sys: TimeDelaySystem, spec: PerturbationSpec, sigma: float,
                         omega: float, x0: np.ndarray, cref: Optional[np.ndarray] = None,
                         max_iter: int = MAX_ITER) -> CorrectionCandidate:
    """Damped Gauss-Newton from ``(x0, omega, sigma)``; ``cref`` defaults to ``x0``."""
    n = sys.n
    x0 = np.asarray(x0, dtype=complex)
    cref = x0.copy() if cref is None else np.asarray(cref, dtype=complex)
    tol = RES_TOL * sys.scale
    z = pack(x0[:n], x0[n:], omega, sigma)
    r = residual(sys, spec, z, cref)
    rn = float(np.linalg.norm(r))
    it, reason = 0, ""
    polish = 0
    while rn > tol or polish < POLISH_STEPS:
        if rn <= tol:
            polish += 1
        if it >= max_iter:
            if rn > tol:
                reason = f"iteration cap {max_iter} reached"
            break
        try:
            step = linalg.lstsq(jacobian(sys, spec, z, cref), r)
        except RankDeficientError as exc:
            reason = f"rank-deficient Jacobian (rank {exc.rank})"
            break
        except LinAlgFailure as exc:
            reason = str(exc)
            break
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            z_new = z - t * step
            r_new = residual(sys, spec, z_new, cref)
            rn_new = float(np.linalg.norm(r_new))
            if rn_new < rn:
                break
            t *= 0.5
        else:
            reason = "no decrease after step halving"
            break
        it += 1
        z, r, rn = z_new, r_new, rn_new
        if t * np.linalg.norm(step) <= STEP_TOL * max(1.0, np.linalg.norm(z)):
            break
    u, v, om, sg = unpack(z, n)
    converged = bool(np.isfinite(rn) and rn <= tol)
    if not converged and not reason:
        reason = f"stalled at residual {rn:.3e}"
    return CorrectionCandidate(u, v, om, sg, rn, converged, it, float(omega),
                               "" if converged else reason)


def _reflect(c: CorrectionCandidate) -> CorrectionCandidate:
    # H(-j w) = conj(H(j w)) for real data
    c.omega, c.u, c.v = -c.omega, c.u.conj(), c.v.conj()
    return c


def interior_seeds(sys: TimeDelaySystem, spec: PerturbationSpec, sigma: float,
                   frequencies) -> List[float]:
    """Midpoints of consecutive level crossings that lie inside the pseudospectrum.

    The crossings at ``sigma`` bound intervals of the super-level set; the
    maximum sought lies inside one of them. Real data contribute the mirrored
    crossings too, so a peak at ``omega = 0`` is seeded directly.
    """
    pts = sorted(set(float(w) for w in frequencies))
    if sys.is_real:
        pts = sorted(set([-w for w in pts] + pts))
    out = []
    target = 1.0 / spec.epsilon
    for a, b in zip(pts, pts[1:]):
        mid = 0.5 * (a + b)
        if sys.is_real and mid < 0.0:
            continue
        if b - a > 0.0 and eval_f(sys, spec, complex(sigma, mid)) > target:
            out.append(0.0 if sys.is_real and abs(mid) < 1e-300 else mid)
    return out


def correct_all(sys: TimeDelaySystem, spec: PerturbationSpec, pred: PredictorResult,
                threads: Optional[int] = None) -> PsaResult:
    """Correct every predicted frequency and keep the largest converged sigma."""
    if not pred.frequencies:
        raise CorrectorError("predictor produced no candidate frequencies")
    sigma0 = pred.sigma_tilde
    seeds = list(pred.frequencies) + interior_seeds(sys, spec, sigma0, pred.frequencies)

    def run(om):
        x0, _ = null_vector(assemble_H(sys, spec, sigma0, 1j * om))
        return gauss_newton_correct(sys, spec, sigma0, om, x0)

    workers = thread_count(threads)
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            cands = list(ex.map(run, seeds))
    else:
        cands = [run(om) for om in seeds]

    floor = sigma0 - 10.0 * pred.tol
    for c in cands:
        if not c.converged:
            continue
        if sys.is_real and c.omega < 0.0:
            _reflect(c)
        if c.sigma < floor:
            c.converged, c.reason = False, f"converged below sigma_tilde - 10 tol ({c.sigma:.6g})"
    good = [c for c in cands if c.converged]
    for c in cands:
        if not c.converged:
            log.info("candidate from omega=%.6g rejected: %s", c.seed_omega, c.reason)
    if not good:
        raise CorrectorError("no Gauss-Newton candidate converged", cands)
    best = max(good, key=lambda c: c.sigma)
    return PsaResult(best.sigma, best.omega, best.u, best.v, cands, pred,
                     diagnostics={"rejected": len(cands) - len(good)})
