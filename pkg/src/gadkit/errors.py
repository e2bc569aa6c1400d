"""Exception types shared across the package."""


class GadkitError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(GadkitError, ValueError):
    """An argument violates an operation's preconditions."""


class BudgetExceededError(GadkitError, ValueError):
    """A column range extends past the basis column budget."""


class FormatError(GadkitError, ValueError):
    """A binary dataset file does not match its documented layout."""


class DecompositionMismatchError(GadkitError, ArithmeticError):
    """An internal consistency identity failed beyond tolerance.

    Signals a numerical-rank inconsistency between the fitted coefficients
    and the operator route used to cross-check them.
    """


class NotConvergedError(GadkitError, RuntimeError):
    """The iterative reference fit did not reach its residual target."""

    def __init__(self, message: str, achieved_residual: float):
        super().__init__(message)
        self.achieved_residual = achieved_residual


class ConfigError(GadkitError, ValueError):
    """A run configuration file is malformed or inconsistent."""
