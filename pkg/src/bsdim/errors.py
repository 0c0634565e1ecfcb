"""Exception hierarchy.

Validation errors map to CLI exit code 2, numerical failures to exit code 3.
"""


class BSDimError(Exception):
    """Base class for all library errors."""


class ValidationError(BSDimError, ValueError):
    """Malformed input: bad matrices, inadmissible words, bad parameters."""


class NumericalError(BSDimError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class DeadSymbol(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InadmissibleWord(ValidationError):
    pass


class InadmissibleGenerator(InadmissibleWord):
    pass


class InsufficientPrefix(ValidationError):
    pass


class DepthOverflow(ValidationError):
    pass


class BadDepthWindow(ValidationError):
    pass


class EmptySet(ValidationError):
    pass


class ZeroMassCylinder(ValidationError):
    pass


class ThresholdUnmet(ValidationError):
    pass


class NotIrreducible(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass
