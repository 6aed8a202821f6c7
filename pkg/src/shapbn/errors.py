"""Exception types shared across the package."""


class ShapbnError(Exception):
    """Base class for all package errors."""


class InputError(ShapbnError, ValueError):
    """Invalid user input: unknown variables, malformed models, bad arguments."""


class CapacityError(ShapbnError, RuntimeError):
    """An operation would exceed its documented enumeration cap."""


class NumericalError(ShapbnError, ArithmeticError):
    """Ill-conditioned linear algebra or conditioning on a zero-probability event."""
