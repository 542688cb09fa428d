"""Exception hierarchy shared by every module.

Two families: invalid input (``ValueError`` subclasses, CLI exit code 2) and
numerical failure (``RuntimeError`` subclasses, exit code 1). ``SignLoss``
stands alone and maps to exit code 3.
"""

from __future__ import annotations


class GMCFError(Exception):
    """Base class for all package errors."""


# -- invalid input -----------------------------------------------------------


class DomainError(GMCFError, ValueError):
    """A value lies outside the domain where an operation is defined."""


class RegimeError(GMCFError, ValueError):
    """Parameters select a regime that is not admissible for the request."""


class CompatibilityError(GMCFError, ValueError):
    """Initial data violate the boundary compatibility conditions."""


class GridMismatch(GMCFError, ValueError):
    """Two sampled fields do not share a grid."""


class NotApplicable(GMCFError, ValueError):
    """The quantity is not defined in the current regime."""


# -- numerical failure -------------------------------------------------------


class NumericalError(GMCFError, RuntimeError):
    """Base class for numerical failures."""


class BlowupUndetected(NumericalError):
    """A blow-up regime integrated past its proved radius bound without hitting the cutoff."""


class StepFailure(NumericalError):
    """The adaptive integrator could not take a step above its floor."""


class CrossCheckFailure(NumericalError):
    """The singular and regularized profile integrators disagree."""


class BracketFailure(NumericalError):
    """A root bracket could not be established."""


class NonMonotone(NumericalError):
    """A residual that must be monotone in the speed was not."""


class NonConvergence(NumericalError):
    """An iteration exhausted its budget."""


class OrderingViolation(NumericalError):
    """Profiles at two speeds are not ordered as required.

    Parameters
    ----------
    message : str
        Human-readable description.
    radius : float
        Radius of the first violating sample.
    """

    def __init__(self, message: str, radius: float) -> None:
        super().__init__(message)
        self.radius = radius


class NonFinite(NumericalError):
    """A field became NaN or infinite."""


class CFLViolation(NumericalError):
    """The requested time step exceeds the explicit stability bound."""


class SignLoss(GMCFError, RuntimeError):
    """The mean curvature lost its strict sign (degenerate parabolicity)."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit-code contract.

    Parameters
    ----------
    exc : BaseException
        The exception raised by a command.

    Returns
    -------
    int
        ``3`` for :class:`SignLoss`, ``1`` for :class:`NumericalError`,
        ``2`` for invalid input.
    """
    if isinstance(exc, SignLoss):
        return 3
    if isinstance(exc, NumericalError):
        return 1
    return 2
