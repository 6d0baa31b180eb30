"""Rightmost characteristic roots and the spectral abscissa.

Roots are seeded by the eigenvalues of the collocated generator and polished
with Newton's method on the bordered system ``F(lam) v = 0, c^* v = 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import linalg
from .discretization import build_generator_N
from .errors import LinAlgFailure, RootFindingError
from .system import TimeDelaySystem, eval_dF, eval_F

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
NEWTON_MAXIT = 25
MERGE_TOL = 1e-8


@dataclass
class RootSet:
    roots: np.ndarray
    residuals: np.ndarray
    alpha0: float
    Na: int
    dropped: int = 0
    vectors: List[np.ndarray] = field(default_factory=list, repr=False)


def refine_root(sys: TimeDelaySystem, lam0: complex, maxit: int = NEWTON_MAXIT):
    """Newton on the bordered system; returns ``(lam, v, residual)`` or ``None``.

    ``residual`` is ``||F(lam) v|| / ||v||``.
    """
    n = sys.n
    scale = sys.scale
    lam = complex(lam0)
    try:
        res = linalg.svd(eval_F(sys, lam))
    except LinAlgFailure:
        return None
    c = res.Vh[-1].conj()
    v = c.copy()
    best = None
    for _ in range(maxit + 1):
        Fv = eval_F(sys, lam) @ v
        r = float(np.linalg.norm(Fv) / np.linalg.norm(v))
        if not np.isfinite(r):
            return None
        if best is None or r < best[2]:
            best = (lam, v.copy(), r)
        if r <= NEWTON_TOL * (scale + abs(lam)):
            return lam, v, r
        J = np.zeros((n + 1, n + 1), dtype=complex)
        J[:n, :n] = eval_F(sys, lam)
        J[:n, n] = eval_dF(sys, lam) @ v
        J[n, :n] = c.conj()
        rhs = np.concatenate([Fv, [c.conj() @ v - 1.0]])
        try:
            step = linalg.solve(J, rhs)
        except LinAlgFailure:
            break
        v = v - step[:n]
        lam = lam - step[n]
    # accept a stalled iterate only if it already sits at rounding level
    if best is not None and best[2] <= 1e-10 * (scale + abs(best[0])):
        return best
    return None


def characteristic_roots(sys: TimeDelaySystem, Na: int = 16,
                         cutoff: Optional[float] = None) -> RootSet:
    """Roots with ``Re lam >= cutoff``; default cutoff is rightmost estimate - 1."""
    G = build_generator_N(sys, Na)
    seeds = linalg.eigenvalues(G).values
    if cutoff is None:
        cutoff = float(seeds.real.max()) - 1.0
    seeds = seeds[seeds.real >= cutoff]
    seeds = seeds[np.argsort(-seeds.real, kind="stable")]

    found, resid, vecs = [], [], []
    dropped = 0
    for s in seeds:
        if sys.m == 0:
            lam, v, r = complex(s), None, 0.0
        else:
            out = refine_root(sys, s)
            if out is None:
                dropped += 1
                continue
            lam, v, r = out
        if lam.real < cutoff:
            continue
        if any(abs(lam - z) <= MERGE_TOL * (1.0 + abs(z)) for z in found):
            continue
        found.append(lam)
        resid.append(r)
        vecs.append(v)
    if sys.m == 0:
        # geev residuals of the plain eigenproblem
        resid = [float(linalg.singular_values(eval_F(sys, z))[-1]) for z in found]
    if dropped:
        log.warning("Newton refinement dropped %d of %d root candidates", dropped, len(seeds))
    if not found:
        raise RootFindingError(f"no characteristic roots found with Re >= {cutoff}")
    order = np.lexsort((np.array([z.imag for z in found]), -np.array([z.real for z in found])))
    roots = np.array(found, dtype=complex)[order]
    residuals = np.array(resid, dtype=float)[order]
    return RootSet(roots, residuals, float(roots.real.max()), int(Na), dropped,
                   [vecs[i] for i in order])


def rightmost_roots(sys: TimeDelaySystem, Na: int = 16, Na_max: int = 128,
                    tol: float = 1e-9) -> RootSet:
    """Roots at doubling ``Na`` until the rightmost root moves less than ``tol``."""
    prev = characteristic_roots(sys, Na)
    if sys.m == 0:
        return prev
    while Na < Na_max:
        Na = min(2 * Na, Na_max)
        cur = characteristic_roots(sys, Na)
        z0 = prev.roots[np.argmax(prev.roots.real)]
        z1 = cur.roots[np.argmax(cur.roots.real)]
        if abs(cur.alpha0 - prev.alpha0) < tol and abs(abs(z1.imag) - abs(z0.imag)) < 1e-6:
            return cur
        prev = cur
    raise RootFindingError(
        f"rightmost root did not settle up to Na={Na_max}; pass a larger Na explicitly")


def spectral_abscissa(sys: TimeDelaySystem, Na: int = 16, Na_max: int = 128) -> float:
    return rightmost_roots(sys, Na, Na_max).alpha0
