"""Exception types shared across the package."""


class MosskitError(Exception):
    """Base class for all package errors."""


class GraphParseError(MosskitError):
    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyGraphError(MosskitError):
    pass


class WeightOverflowError(MosskitError):
    def __init__(self, quantity: str):
        super().__init__(f"64-bit overflow while accumulating {quantity}")
        self.quantity = quantity


class NoEligibleStructureError(MosskitError):
    """The requested global weight is zero: the motif family has frequency 0."""


class EmptySupportError(MosskitError):
    """A conditional sampling distribution has no positive-weight outcome."""


class InapplicableMethodError(MosskitError):
    """The sampling method cannot run on this graph (zero global weight)."""


class ScaleCapError(MosskitError):
    def __init__(self, message: str, projection: int | None = None):
        super().__init__(message)
        self.projection = projection


class ConfigError(MosskitError):
    pass
