"""Exception hierarchy shared by every module."""


class GameError(Exception):
    """Base class for all package errors."""


class ConfigError(GameError, ValueError):
    """A region, scenario or configuration violates its invariants."""


class HypothesisViolated(ConfigError):
    """The sufficiency condition fails on both coordinates.

    A run may still proceed in exploratory mode, but no capture guarantee
    is asserted.
    """


class NumericError(GameError, ArithmeticError):
    """An iterative solve failed to converge within its iteration cap."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class AdmissibilityError(GameError):
    """An energy ledger was overdrawn beyond the round-off allowance."""
