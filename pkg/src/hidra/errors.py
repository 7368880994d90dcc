"""Exception types shared across the package."""


class HidraError(Exception):
    """Base class for all package-specific errors."""


class ContractViolationError(HidraError, ValueError):
    """An argument violated a documented precondition (wrong dimension, bad range)."""


class BudgetExhaustedError(HidraError, RuntimeError):
    """An evaluation was requested after the budget was used up."""


class ProtocolError(HidraError, RuntimeError):
    """ask/tell were called out of order."""


class UpdateSkippedError(HidraError, RuntimeError):
    """A generation carried no usable fitness information (all values non-finite)."""


class ConfigError(HidraError, ValueError):
    """A run-configuration file could not be parsed; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
