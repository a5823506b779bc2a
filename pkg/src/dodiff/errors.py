"""Exception hierarchy shared by the numerical modules."""

from __future__ import annotations


class DodiffError(Exception):
    """Base class for all package errors."""


# diffusion-parameter validation


class InvalidDiffusionParameter(DodiffError, ValueError):
    pass


class NegativeWeight(InvalidDiffusionParameter):
    pass


class EmptySupport(InvalidDiffusionParameter):
    pass


class SupportOutOfRange(InvalidDiffusionParameter):
    pass


class NormalizationViolation(InvalidDiffusionParameter):
    pass


# numerical failures


class NumericalError(DodiffError, ArithmeticError):
    pass


class DegenerateSupport(NumericalError):
    """The spectral density does not exist (all mass at order one)."""


class QuadratureNonconvergence(NumericalError):
    def __init__(self, message: str, achieved_error: float | None = None) -> None:
        super().__init__(message)
        self.achieved_error = achieved_error


class ConvergenceFailure(NumericalError):
    def __init__(self, message: str, achieved_bound: float | None = None) -> None:
        super().__init__(message)
        self.achieved_bound = achieved_bound


class ContourFailure(NumericalError):
    pass


class GridTooCoarse(NumericalError):
    def __init__(self, message: str, estimate: float | None = None) -> None:
        super().__init__(message)
        self.estimate = estimate


class DeltaUnsupported(DodiffError, ValueError):
    """The requested bound needs a square-integrable density."""


class DomainError(DodiffError, ValueError):
    pass


# problem assembly


class ProblemError(DodiffError, ValueError):
    pass


class EndpointMismatch(ProblemError):
    pass


class AliasWarning(UserWarning):
    """Initial data is not negligible at the edge of the truncated line."""
