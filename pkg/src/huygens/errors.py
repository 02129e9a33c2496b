"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ToleranceNotReached(ArithmeticError):
    """The series term budget ran out before the tail bound met the tolerance."""


class NoSignChange(RuntimeError):
    """The zero scan passed its horizon without bracketing a root."""


class CancellationError(ArithmeticError):
    """A difference of exponentials lost too many significant digits."""
