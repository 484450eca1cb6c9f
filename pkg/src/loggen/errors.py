"""Exception hierarchy.

Everything a numerical routine can raise derives from :class:`NumericalError`
so the command line can map it to a single exit code.
"""


class LoggenError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(LoggenError, ValueError):
    """Malformed input: wrong shape, non-finite entries, bad parameters."""


class DimensionError(ValidationError):
    pass


class NumericalError(LoggenError):
    """A computation could not be carried out to the required accuracy."""


class NearSingularError(NumericalError):
    """A linear solve was attempted with a condition estimate above threshold."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class SingularFactorError(NearSingularError):
    """The factor ``I - kappa exp(-a)`` is numerically singular."""


class SpectrumError(NumericalError):
    """The eigensolver failed to converge."""


class ContourError(NumericalError):
    """Some eigenvalue is not strictly inside the quadrature circle."""


class BranchCutError(NumericalError):
    """The contour disk meets the principal-log branch cut (-inf, 0]."""


class CertificateError(NumericalError):
    """A kappa certificate does not hold for the operator it is applied to."""


class RoundTripError(NumericalError):
    """``exp(log(U + kappa I))`` misses ``U + kappa I`` by more than allowed."""


class ExpOverflowError(NumericalError, OverflowError):
    pass


class HorizonError(ValidationError):
    """Times outside ``[0, T_max]`` or in the wrong order."""


class OrderingError(ValidationError):
    pass


class DomainError(ValidationError):
    """A differencing stencil leaves the admissible time window."""


class GridError(ValidationError):
    pass
