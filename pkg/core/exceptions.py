"""
Exception hierarchy shared by the engine, the corpus runner and the CLI
"""
from typing import Optional


class BinetLabError(Exception):
    """
    Base class for all errors raised by the library

    Attributes:
        exit_code: Process exit code the CLI maps this error to
    """

    exit_code: int = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class IdentityParseError(BinetLabError):
    """Syntax error in an identity or subscript, with the offending position"""

    exit_code = 2

    def __init__(self, message: str, position: Optional[int] = None, text: str = ""):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class CorpusError(BinetLabError):
    """Malformed corpus file or entry"""

    exit_code = 2


class PreconditionError(BinetLabError):
    """
    An operation was called outside its domain

    The hint tells the user which command handles the input instead.
    """

    exit_code = 3

    def __init__(self, message: str, hint: Optional[str] = "use verify"):
        super().__init__(message)
        self.hint = hint


class FieldContextError(PreconditionError):
    """Quadratic-field elements from different contexts were mixed"""

    def __init__(self, message: str):
        super().__init__(message, hint=None)


class DegenerateFieldError(PreconditionError):
    """The discriminant is not positive or is the square of a rational"""


class DifferentiationError(PreconditionError):
    """Differentiation is not defined for the requested index or expression"""

    def __init__(self, message: str):
        super().__init__(message, hint=None)


class TransformError(PreconditionError):
    """A component transform received a form it cannot handle"""

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(message, hint=hint)


class NonCanonicalError(PreconditionError):
    """Expression has no canonical Laurent form (sums, arctan, non-affine subscripts)"""


class EmptyGridError(PreconditionError):
    """No admissible grid point remains after applying constraints"""

    def __init__(self, message: str):
        super().__init__(message, hint="widen the grid with --grid")


class UnboundSymbolError(BinetLabError):
    """A seed symbol has no binding during substitution"""

    exit_code = 3


class NoNewIdentityError(BinetLabError):
    """A derivation collapsed to a trivial identity"""

    exit_code = 1


class NoEntriesError(BinetLabError):
    """A corpus filter matched no entries"""

    exit_code = 4
