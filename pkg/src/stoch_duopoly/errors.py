"""Exception hierarchy.

Everything numerical derives from :class:`NumericalFailure` so that callers
(the CLI in particular) can separate bad input from a computation that could
not be carried out.
"""


class StochDuopolyError(Exception):
    """Base class for all package errors."""


class ConfigError(StochDuopolyError, ValueError):
    """Invalid parameters or run configuration."""


class DegenerateInput(StochDuopolyError, ValueError):
    """State on the demand singularity x1 + x2 = 0."""


class IndexOutOfRange(StochDuopolyError, IndexError):
    pass


class NumericalFailure(StochDuopolyError, ArithmeticError):
    """A computation that cannot proceed for the given inputs."""


class DiffusionDegenerate(NumericalFailure):
    """The angular diffusion q4 vanishes somewhere on the grid."""

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class NormalizationFailure(NumericalFailure):
    pass


class BetaZero(NumericalFailure):
    pass


class SingularRecurrence(NumericalFailure):
    pass


class GridTooCoarse(NumericalFailure):
    pass


class NotRotationScaling(NumericalFailure):
    pass


class StepTooLarge(NumericalFailure):
    pass


class NonPositiveDensityWarning(UserWarning):
    """The backward-difference density dipped below zero before clamping."""
