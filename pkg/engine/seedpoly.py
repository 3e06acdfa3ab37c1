"""
Polynomials in symbolic seed values (G0, G1, W0, ...) with quadratic-field coefficients
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Set, Tuple, Union

from core.exceptions import UnboundSymbolError
from engine.quadext import QuadExt, RationalLike

logger = logging.getLogger(__name__)

Monomial = Tuple[Tuple[str, int], ...]
Scalar = Union[QuadExt, int, Fraction]

ONE: Monomial = ()


def _merge_monomials(left: Monomial, right: Monomial) -> Monomial:
    powers: Dict[str, int] = dict(left)
    for symbol, exp in right:
        powers[symbol] = powers.get(symbol, 0) + exp
    return tuple(sorted((s, e) for s, e in powers.items() if e))


def _monomial_key(mono: Monomial):
    return (sum(e for _, e in mono), mono)


def _monomial_str(mono: Monomial) -> str:
    return "*".join(s if e == 1 else f"{s}^{e}" for s, e in mono)


class SeedPoly:
    """
    Multivariate polynomial over QuadExt in string-keyed seed symbols

    Zero coefficients are never stored and monomials are kept in graded
    order, so equal polynomials compare and print identically.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        merged: Dict[Monomial, QuadExt] = {}
        for mono, coeff in (terms or {}).items():
            key = tuple(sorted((s, e) for s, e in mono if e))
            merged[key] = merged.get(key, QuadExt(0)) + QuadExt.coerce(coeff)
        self._terms: Dict[Monomial, QuadExt] = {
            mono: merged[mono] for mono in sorted(merged, key=_monomial_key) if merged[mono]
        }

    @classmethod
    def constant(cls, value: Scalar) -> "SeedPoly":
        return cls({ONE: value})

    @classmethod
    def symbol(cls, name: str) -> "SeedPoly":
        return cls({((name, 1),): 1})

    @classmethod
    def zero(cls) -> "SeedPoly":
        return cls()

    @classmethod
    def one(cls) -> "SeedPoly":
        return cls({ONE: 1})

    @staticmethod
    def coerce(value: Union["SeedPoly", Scalar]) -> "SeedPoly":
        if isinstance(value, SeedPoly):
            return value
        return SeedPoly.constant(value)

    def items(self) -> Iterator[Tuple[Monomial, QuadExt]]:
        return iter(self._terms.items())

    def coefficients(self) -> Iterable[QuadExt]:
        return self._terms.values()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_constant(self) -> bool:
        return all(mono == ONE for mono in self._terms)

    def constant_value(self) -> QuadExt:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        return self._terms.get(ONE, QuadExt(0))

    def symbols(self) -> Set[str]:
        return {s for mono in self._terms for s, _ in mono}

    def __eq__(self, other) -> bool:
        if isinstance(other, (QuadExt, int, Fraction)):
            other = SeedPoly.constant(other)
        if not isinstance(other, SeedPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        if not isinstance(other, (SeedPoly, QuadExt, int, Fraction)):
            return NotImplemented
        other = SeedPoly.coerce(other)
        terms: Dict[Monomial, QuadExt] = dict(self._terms)
        for mono, coeff in other._terms.items():
            terms[mono] = terms.get(mono, QuadExt(0)) + coeff
        return SeedPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "SeedPoly":
        return SeedPoly({mono: -coeff for mono, coeff in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (SeedPoly, QuadExt, int, Fraction)):
            return NotImplemented
        return self + (-SeedPoly.coerce(other))

    def __rsub__(self, other):
        return SeedPoly.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (QuadExt, int, Fraction)):
            scalar = QuadExt.coerce(other)
            return SeedPoly({mono: coeff * scalar for mono, coeff in self._terms.items()})
        if not isinstance(other, SeedPoly):
            return NotImplemented
        terms: Dict[Monomial, QuadExt] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = _merge_monomials(m1, m2)
                terms[mono] = terms.get(mono, QuadExt(0)) + c1 * c2
        return SeedPoly(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SeedPoly):
            other = other.constant_value()
        if not isinstance(other, (QuadExt, int, Fraction)):
            return NotImplemented
        return self * QuadExt.coerce(other).inverse()

    def __pow__(self, n: int) -> "SeedPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("seed polynomials only take non-negative integer powers")
        result = SeedPoly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> "SeedPoly":
        return SeedPoly({mono: coeff.conj() for mono, coeff in self._terms.items()})

    def rational_part(self) -> "SeedPoly":
        """The polynomial of rational parts a, where each coefficient is a + b*sqrt(D)"""
        return SeedPoly({mono: coeff.a for mono, coeff in self._terms.items()})

    def radical_part(self) -> "SeedPoly":
        """The polynomial of radical coefficients b, where each coefficient is a + b*sqrt(D)"""
        return SeedPoly({mono: coeff.b for mono, coeff in self._terms.items()})

    def rational_components(self) -> Iterator[Fraction]:
        for coeff in self._terms.values():
            if coeff.a:
                yield coeff.a
            if coeff.b:
                yield coeff.b

    def leading(self) -> Tuple[Monomial, QuadExt]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return next(iter(self._terms.items()))

    def quotient_by(self, divisor: "SeedPoly") -> Optional[QuadExt]:
        """Return the scalar lam with self == lam * divisor, or None"""
        if not divisor:
            return None
        mono, coeff = divisor.leading()
        if mono not in self._terms:
            return None
        lam = self._terms[mono] / coeff
        return lam if divisor * lam == self else None

    def substitute(self, bindings: Mapping[str, Union[RationalLike, QuadExt]]) -> QuadExt:
        missing = self.symbols() - set(bindings)
        if missing:
            raise UnboundSymbolError(f"unbound seed symbols: {', '.join(sorted(missing))}")
        total = QuadExt(0)
        for mono, coeff in self._terms.items():
            value = coeff
            for symbol, exp in mono:
                value = value * QuadExt.coerce(bindings[symbol]) ** exp
            total = total + value
        return total

    def partial_substitute(self, bindings: Mapping[str, Union[RationalLike, QuadExt]]) -> "SeedPoly":
        """Substitute the bound symbols and keep the rest symbolic"""
        result = SeedPoly.zero()
        for mono, coeff in self._terms.items():
            term = SeedPoly.constant(coeff)
            for symbol, exp in mono:
                if symbol in bindings:
                    term = term * (QuadExt.coerce(bindings[symbol]) ** exp)
                else:
                    term = term * SeedPoly.symbol(symbol) ** exp
            result = result + term
        return result

    def __repr__(self) -> str:
        return f"SeedPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, coeff in self._terms.items():
            if mono == ONE:
                parts.append(f"({coeff})" if coeff.a and coeff.b else str(coeff))
            elif coeff == 1:
                parts.append(_monomial_str(mono))
            else:
                shown = f"({coeff})" if coeff.a and coeff.b else str(coeff)
                parts.append(f"{shown}*{_monomial_str(mono)}")
        return " + ".join(parts)


def seedpoly_substitute(poly: SeedPoly, bindings: Mapping[str, RationalLike]) -> QuadExt:
    """Evaluate a seed polynomial; every symbol must be bound"""
    return poly.substitute(bindings)
