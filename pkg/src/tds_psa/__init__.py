"""Pseudospectral abscissa of retarded time-delay systems.

Typical use::

    from tds_psa import TimeDelaySystem, PerturbationSpec, pseudospectral_abscissa

    sys = TimeDelaySystem([[[0.0]], [[-1.0]]], [0.0, 1.0])
    res = pseudospectral_abscissa(sys, PerturbationSpec([1, 1], 0.1))
    res.alpha_epsilon, res.omega_epsilon
"""

from .corrector import CorrectionCandidate, PsaResult, correct_all, gauss_newton_correct
from .discretization import ChebyshevMesh, build_L_sigma_N, build_mesh
from .errors import (CorrectorError, DocumentError, PredictorError, PsaError,
                     SystemValidationError)
from .grid import GridSample, sample_grid
from .pipeline import pseudospectral_abscissa
from .predictor import PredictorResult, has_imaginary_eigs, predict
from .roots import RootSet, characteristic_roots, spectral_abscissa
from .system import PerturbationSpec, TimeDelaySystem, eval_F, eval_f, shift

__version__ = "0.1.0"

__all__ = [
    "ChebyshevMesh", "CorrectionCandidate", "CorrectorError", "DocumentError", "GridSample",
    "PerturbationSpec", "PredictorError", "PredictorResult", "PsaError", "PsaResult",
    "RootSet", "SystemValidationError", "TimeDelaySystem", "build_L_sigma_N", "build_mesh",
    "characteristic_roots", "correct_all", "eval_F", "eval_f", "gauss_newton_correct",
    "has_imaginary_eigs", "predict", "pseudospectral_abscissa", "sample_grid", "shift",
    "spectral_abscissa",
]
