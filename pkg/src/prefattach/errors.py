class ParameterError(ValueError):
    """Invalid parameters or a violated precondition."""


class CapacityError(RuntimeError):
    """An exact oracle was asked for a state space beyond its guard."""


class NumericalError(ArithmeticError):
    """A numerically degenerate input (e.g. a zero denominator)."""
