"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Invalid input data (meshes, configs, index sets)."""


class ParseError(ValueError):
    """Malformed coefficient expression.

    ``position`` is the 1-based character column where parsing failed.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvaluationError(ArithmeticError):
    """Expression evaluated outside its domain (log of a nonpositive value, ...)."""


class NumericalError(RuntimeError):
    """A numerical procedure could not be carried out (non-definite B, empty system, ...)."""
