"""Exception hierarchy shared by every module of the package."""


class RankOneError(Exception):
    """Base class for all errors raised by :mod:`rankone`."""


class NumericalFailure(RankOneError, ArithmeticError):
    """An iterative or rank-revealing computation did not succeed.

    ``best`` and ``residuals`` carry whatever partial result was available
    when the computation gave up, so callers can inspect it.
    """

    def __init__(self, message, best=None, residuals=None):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


class SingularMatrixError(NumericalFailure):
    """LU factorization met a pivot that is zero to working precision."""


class EigenvalueCollisionError(SingularMatrixError):
    """A shift point coincides numerically with an eigenvalue of ``A``."""


class AnalysisUnavailable(RankOneError):
    """The requested expansion does not exist for this cluster."""


class ConsistencyError(RankOneError):
    """Two independent computational paths disagree."""


class ProblemFileError(RankOneError, ValueError):
    """A problem file could not be parsed or failed validation."""
