"""
Laurent polynomials in index-power variables with seed-polynomial coefficients
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

from engine.quadext import QuadExt
from engine.seedpoly import SeedPoly

Exponents = Tuple[Tuple[str, int], ...]
Coefficient = Union[SeedPoly, QuadExt, int, Fraction]


def _merge(left: Exponents, right: Exponents) -> Exponents:
    powers: Dict[str, int] = dict(left)
    for var, exp in right:
        powers[var] = powers.get(var, 0) + exp
    return tuple(sorted((v, e) for v, e in powers.items() if e))


class LaurentPoly:
    """
    Map from exponent vectors (negative exponents allowed) to SeedPoly coefficients

    Variables are plain strings such as "x_k" (tau^k), "z_k" (q^k) or
    "k" (the index itself, polynomial only).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Exponents, Coefficient]] = None):
        merged: Dict[Exponents, SeedPoly] = {}
        for mono, coeff in (terms or {}).items():
            key = tuple(sorted((v, e) for v, e in mono if e))
            merged[key] = merged.get(key, SeedPoly.zero()) + SeedPoly.coerce(coeff)
        self._terms: Dict[Exponents, SeedPoly] = {
            mono: merged[mono] for mono in sorted(merged) if merged[mono]
        }

    @classmethod
    def constant(cls, value: Coefficient) -> "LaurentPoly":
        return cls({(): value})

    @classmethod
    def variable(cls, name: str, exp: int = 1) -> "LaurentPoly":
        return cls({((name, exp),): 1})

    @staticmethod
    def coerce(value: Union["LaurentPoly", Coefficient]) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        return LaurentPoly.constant(value)

    def items(self) -> Iterator[Tuple[Exponents, SeedPoly]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (SeedPoly, QuadExt, int, Fraction)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        other = LaurentPoly.coerce(other)
        terms: Dict[Exponents, SeedPoly] = dict(self._terms)
        for mono, coeff in other._terms.items():
            terms[mono] = terms.get(mono, SeedPoly.zero()) + coeff
        return LaurentPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({mono: -coeff for mono, coeff in self._terms.items()})

    def __sub__(self, other):
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other):
        return LaurentPoly.coerce(other) + (-self)

    def __mul__(self, other):
        other = LaurentPoly.coerce(other)
        terms: Dict[Exponents, SeedPoly] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _merge(m1, m2)
                terms[mono] = terms.get(mono, SeedPoly.zero()) + c1 * c2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have negative powers")
            (mono, coeff), = self._terms.items()
            inverse = LaurentPoly({tuple((v, -e) for v, e in mono): SeedPoly.one() / coeff})
            return inverse ** (-n)
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, coeff in self._terms.items():
            powers = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            shown = str(coeff)
            if len(coeff) > 1 or (coeff.is_constant and " " in shown):
                shown = f"({shown})"
            if not powers:
                parts.append(shown)
            elif coeff == 1:
                parts.append(powers)
            else:
                parts.append(f"{shown}*{powers}")
        return " + ".join(parts)
