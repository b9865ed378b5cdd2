class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a bound or state family."""


class SingularityError(ArithmeticError):
    """Raised when a closed-form expression hits a (near) zero denominator."""
