"""
Exact arithmetic in the quadratic field Q(sqrt(D))

Elements are a + b*sqrt(D) with rational a, b. The discriminant D lives in a
QuadContext that is fixed per computation; rational elements (b == 0) may be
created without a context and combine with any context.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import mpmath

from core.exceptions import DegenerateFieldError, FieldContextError

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction]


def is_rational_square(value: Fraction) -> bool:
    """Return True when value is the square of a rational number"""
    if value < 0:
        return False
    num, den = value.numerator, value.denominator
    return math.isqrt(num) ** 2 == num and math.isqrt(den) ** 2 == den


@dataclass(frozen=True)
class QuadContext:
    """
    The discriminant D shared by every element of one computation

    Args:
        discriminant: D, must be positive and not a rational square
    """

    discriminant: Fraction

    def __post_init__(self):
        disc = Fraction(self.discriminant)
        object.__setattr__(self, "discriminant", disc)
        if disc <= 0:
            raise DegenerateFieldError(f"discriminant {disc} is not positive")
        if is_rational_square(disc):
            raise DegenerateFieldError(
                f"discriminant {disc} is a rational square; the characteristic roots are rational"
            )

    @classmethod
    def for_parameters(cls, p: RationalLike, q: RationalLike) -> "QuadContext":
        """Context of the recurrence W_j = p*W_{j-1} - q*W_{j-2}, D = p^2 - 4q"""
        return cls(Fraction(p) ** 2 - 4 * Fraction(q))

    def element(self, a: RationalLike = 0, b: RationalLike = 0) -> "QuadExt":
        return QuadExt(a, b, self)

    def sqrt(self) -> "QuadExt":
        return QuadExt(0, 1, self)

    def roots(self, p: RationalLike) -> Tuple["QuadExt", "QuadExt"]:
        """Return (tau, sigma) = ((p + sqrt D)/2, (p - sqrt D)/2)"""
        half = Fraction(1, 2)
        tau = QuadExt(Fraction(p) * half, half, self)
        return tau, tau.conj()

    def __str__(self) -> str:
        return f"Q(sqrt({self.discriminant}))"


def _join_context(x: Optional[QuadContext], y: Optional[QuadContext]) -> Optional[QuadContext]:
    if x is None:
        return y
    if y is None or x == y:
        return x
    raise FieldContextError(f"cannot combine elements of {x} and {y}")


@dataclass(frozen=True, eq=False)
class QuadExt:
    """
    Element a + b*sqrt(D) of a quadratic field

    Args:
        a: Rational part
        b: Coefficient of sqrt(D)
        context: Field context; optional when b == 0
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    context: Optional[QuadContext] = None

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.b != 0 and self.context is None:
            raise FieldContextError("an element with a radical part needs a field context")

    @staticmethod
    def coerce(value: Union["QuadExt", RationalLike]) -> "QuadExt":
        if isinstance(value, QuadExt):
            return value
        if isinstance(value, (int, Fraction)):
            return QuadExt(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to QuadExt")

    def _other(self, other):
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other)
        return None

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_pure_radical(self) -> bool:
        return self.a == 0 and self.b != 0

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __eq__(self, other) -> bool:
        other = self._other(other)
        if other is None:
            return NotImplemented
        if self.b == 0 and other.b == 0:
            return self.a == other.a
        if self.context != other.context:
            return False
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.context))

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        ctx = _join_context(self.context, other.context)
        return QuadExt(self.a + other.a, self.b + other.b, ctx)

    __radd__ = __add__

    def __neg__(self) -> "QuadExt":
        return QuadExt(-self.a, -self.b, self.context)

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        ctx = _join_context(self.context, other.context)
        if self.b == 0 or other.b == 0:
            return QuadExt(self.a * other.a, self.a * other.b + self.b * other.a, ctx)
        disc = ctx.discriminant
        return QuadExt(
            self.a * other.a + self.b * other.b * disc,
            self.a * other.b + self.b * other.a,
            ctx,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm a^2 - b^2*D"""
        if self.b == 0:
            return self.a * self.a
        return self.a * self.a - self.b * self.b * self.context.discriminant

    def inverse(self) -> "QuadExt":
        if not self:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        if self.b == 0:
            return QuadExt(1 / self.a, 0, self.context)
        n = self.norm()
        return QuadExt(self.a / n, -self.b / n, self.context)

    def __truediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> "QuadExt":
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = QuadExt(1, 0, self.context)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "QuadExt":
        """The automorphism sqrt(D) -> -sqrt(D)"""
        return QuadExt(self.a, -self.b, self.context)

    def rational_value(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is not rational")
        return self.a

    def to_mpmath(self):
        """Floating value at the current mpmath working precision"""
        value = mpmath.mpf(self.a.numerator) / self.a.denominator
        if self.b:
            radical = mpmath.sqrt(
                mpmath.mpf(self.context.discriminant.numerator) / self.context.discriminant.denominator
            )
            value += mpmath.mpf(self.b.numerator) / self.b.denominator * radical
        return value

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadExt({self.a})"
        return f"QuadExt({self.a}, {self.b}, D={self.context.discriminant})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        radical = "sqrtD" if self.b == 1 else f"{self.b}*sqrtD"
        if self.a == 0:
            return radical if self.b != -1 else "-sqrtD"
        sign = "-" if self.b < 0 else "+"
        magnitude = "sqrtD" if abs(self.b) == 1 else f"{abs(self.b)}*sqrtD"
        return f"{self.a} {sign} {magnitude}"


def quad_mul(x: QuadExt, y: QuadExt) -> QuadExt:
    """Exact product; raises FieldContextError for mismatched contexts"""
    return x * y


def quad_inv(x: QuadExt) -> QuadExt:
    """Multiplicative inverse; raises ZeroDivisionError for zero"""
    return x.inverse()


def quad_conj(x: QuadExt) -> QuadExt:
    """Conjugate a + b*sqrt(D) -> a - b*sqrt(D), which exchanges tau and sigma"""
    return x.conj()
