"""Exception hierarchy shared by all modules."""


class PsaError(Exception):
    """Base class for every error raised by :mod:`tds_psa`."""


class SystemValidationError(PsaError, ValueError):
    """Raised when system or perturbation data violate their invariants."""


class LinAlgFailure(PsaError):
    """Base class for failures of the dense linear-algebra layer."""


class ConvergenceError(LinAlgFailure):
    """An iterative factorization did not converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class SingularMatrixError(LinAlgFailure):
    """A linear solve met a pivot that is zero to working precision."""

    def __init__(self, message, pivot):
        super().__init__(message)
        self.pivot = pivot


class RankDeficientError(LinAlgFailure):
    """A least-squares matrix does not have full column rank."""

    def __init__(self, message, rank):
        super().__init__(message)
        self.rank = rank


class PredictorError(PsaError):
    """The bisection predictor could not produce an estimate."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class CorrectorError(PsaError):
    """No Gauss-Newton candidate converged."""

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = list(candidates or [])


class RootFindingError(PsaError):
    """Characteristic-root computation failed to settle."""


class DocumentError(PsaError, ValueError):
    """A JSON input document is malformed; ``path`` locates the offending node."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
