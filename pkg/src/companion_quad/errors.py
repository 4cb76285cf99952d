"""Exception hierarchy shared by every module of the package."""


class CompanionQuadError(Exception):
    """Base class for all errors raised by :mod:`companion_quad`."""


class InvalidParameterError(CompanionQuadError, ValueError):
    """A numeric argument is outside its admissible range."""


class ParseError(CompanionQuadError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset into the UTF-8 encoded input at which the
    problem was detected.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


class DomainError(CompanionQuadError, ArithmeticError):
    """Evaluation left the domain of a node (``ln`` of a non-positive value, ...)."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class NonDifferentiableError(CompanionQuadError):
    """The expression contains a construct that cannot be differentiated
    symbolically; supply the derivative and kink points by hand."""


class DerivativeUnavailableError(CompanionQuadError):
    pass


class NormError(CompanionQuadError):
    """A derivative norm could not be computed (non-finite values)."""


class DensityError(CompanionQuadError, ValueError):
    """The function is not a valid probability density on the interval."""
