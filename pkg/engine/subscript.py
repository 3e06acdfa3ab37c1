"""
Integer-valued subscript expressions in normal form

A subscript is a polynomial with integer coefficients in index variables and
exponential atoms base^(subscript), e.g. 2k+m-1, k*2^(j) or 2k*n+k.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Set, Tuple, Union


@dataclass(frozen=True)
class ExpAtom:
    """base^(exponent) with an integer base >= 2"""

    base: int
    exponent: "Sub"

    def key(self) -> Tuple:
        return (1, f"{self.base:012d}", str(self.exponent))

    def __str__(self) -> str:
        return f"{self.base}^({self.exponent})"


Factor = Union[str, ExpAtom]
SubMono = Tuple[Tuple[Factor, int], ...]


def _factor_key(factor: Factor) -> Tuple:
    if isinstance(factor, str):
        return (0, factor, "")
    return factor.key()


def _mono_key(mono: SubMono) -> Tuple:
    return tuple((_factor_key(f), -e) for f, e in mono)


def _normalize_mono(factors: Iterable[Tuple[Factor, int]]) -> Tuple[int, SubMono]:
    """Merge repeated factors; fold exponentials with constant exponents"""
    multiplier = 1
    powers: Dict[str, int] = {}
    exps: Dict[int, "Sub"] = {}
    for factor, power in factors:
        if isinstance(factor, str):
            powers[factor] = powers.get(factor, 0) + power
        else:
            total = factor.exponent * power
            exps[factor.base] = exps[factor.base] + total if factor.base in exps else total
    mono = [(name, power) for name, power in powers.items() if power]
    for base, exponent in exps.items():
        if exponent.is_constant and exponent.constant >= 0:
            multiplier *= base ** exponent.constant
        elif exponent:
            mono.append((ExpAtom(base, exponent), 1))
    mono.sort(key=lambda item: _factor_key(item[0]))
    return multiplier, tuple(mono)


@dataclass(frozen=True)
class Sub:
    """Normal form of a subscript: sorted (monomial, nonzero coefficient) pairs"""

    terms: Tuple[Tuple[SubMono, int], ...] = ()

    @classmethod
    def from_terms(cls, items: Iterable[Tuple[Iterable[Tuple[Factor, int]], int]]) -> "Sub":
        merged: Dict[SubMono, int] = {}
        for factors, coeff in items:
            multiplier, mono = _normalize_mono(factors)
            merged[mono] = merged.get(mono, 0) + coeff * multiplier
        ordered = sorted(
            ((mono, c) for mono, c in merged.items() if c),
            key=lambda item: (item[0] == (), _mono_key(item[0])),
        )
        return cls(tuple(ordered))

    @classmethod
    def const(cls, value: int) -> "Sub":
        return cls.from_terms([((), value)])

    @classmethod
    def var(cls, name: str) -> "Sub":
        return cls.from_terms([(((name, 1),), 1)])

    @classmethod
    def exp(cls, base: int, exponent: "Sub") -> "Sub":
        if base < 2:
            raise ValueError(f"exponential subscripts need an integer base >= 2, got {base}")
        return cls.from_terms([(((ExpAtom(base, exponent), 1),), 1)])

    @staticmethod
    def coerce(value: Union["Sub", int]) -> "Sub":
        return value if isinstance(value, Sub) else Sub.const(value)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_constant(self) -> bool:
        return all(mono == () for mono, _ in self.terms)

    @property
    def constant(self) -> int:
        """The constant term (the whole value when is_constant)"""
        for mono, coeff in self.terms:
            if mono == ():
                return coeff
        return 0

    def variables(self) -> Set[str]:
        names: Set[str] = set()
        for mono, _ in self.terms:
            for factor, _ in mono:
                if isinstance(factor, str):
                    names.add(factor)
                else:
                    names |= factor.exponent.variables()
        return names

    def exponent_variables(self) -> Set[str]:
        """Variables that occur inside an exponential atom's exponent"""
        names: Set[str] = set()
        for mono, _ in self.terms:
            for factor, _ in mono:
                if isinstance(factor, ExpAtom):
                    names |= factor.exponent.variables()
        return names

    def ordered_variables(self) -> Tuple[str, ...]:
        seen = []
        for mono, _ in self.terms:
            for factor, _ in mono:
                names = [factor] if isinstance(factor, str) else factor.exponent.ordered_variables()
                for name in names:
                    if name not in seen:
                        seen.append(name)
        return tuple(seen)

    def affine(self) -> Optional[Tuple[int, Dict[str, int]]]:
        """(constant, {index: coefficient}) when the subscript is affine, else None"""
        coeffs: Dict[str, int] = {}
        constant = 0
        for mono, coeff in self.terms:
            if mono == ():
                constant = coeff
            elif len(mono) == 1 and isinstance(mono[0][0], str) and mono[0][1] == 1:
                coeffs[mono[0][0]] = coeff
            else:
                return None
        return constant, coeffs

    def __add__(self, other) -> "Sub":
        other = Sub.coerce(other)
        return Sub.from_terms([*self.terms, *other.terms])

    __radd__ = __add__

    def __neg__(self) -> "Sub":
        return Sub.from_terms([(mono, -c) for mono, c in self.terms])

    def __sub__(self, other) -> "Sub":
        return self + (-Sub.coerce(other))

    def __rsub__(self, other) -> "Sub":
        return Sub.coerce(other) + (-self)

    def __mul__(self, other) -> "Sub":
        if isinstance(other, int):
            return Sub.from_terms([(mono, c * other) for mono, c in self.terms])
        if not isinstance(other, Sub):
            return NotImplemented
        items = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                items.append(([*m1, *m2], c1 * c2))
        return Sub.from_terms(items)

    __rmul__ = __mul__

    def diff(self, name: str) -> "Sub":
        """Partial derivative with respect to an index variable"""
        if name in self.exponent_variables():
            raise ValueError(f"index {name} occurs in an exponent of subscript {self}")
        items = []
        for mono, coeff in self.terms:
            for i, (factor, power) in enumerate(mono):
                if factor == name:
                    rest = [*mono[:i], (factor, power - 1), *mono[i + 1:]]
                    items.append((rest, coeff * power))
        return Sub.from_terms(items)

    def substitute(self, name: str, replacement: "Sub") -> "Sub":
        if name not in self.variables():
            return self
        total = Sub()
        for mono, coeff in self.terms:
            value = Sub.const(coeff)
            for factor, power in mono:
                if factor == name:
                    piece = Sub.const(1)
                    for _ in range(power):
                        piece = piece * replacement
                elif isinstance(factor, str):
                    piece = Sub.from_terms([(((factor, power),), 1)])
                else:
                    piece = Sub.exp(factor.base, factor.exponent.substitute(name, replacement) * power)
                value = value * piece
            total = total + value
        return total

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = 0
        for mono, coeff in self.terms:
            value = coeff
            for factor, power in mono:
                if isinstance(factor, str):
                    if factor not in env:
                        raise KeyError(f"index {factor} has no value")
                    value *= env[factor] ** power
                else:
                    exponent = factor.exponent.evaluate(env)
                    if exponent < 0:
                        raise ValueError(f"{factor} is not an integer when the exponent is {exponent}")
                    value *= factor.base ** (exponent * power)
            total += value
        return total

    @property
    def is_simple(self) -> bool:
        """A lone variable or a non-negative constant; printed without parentheses"""
        if self.is_constant:
            return self.constant >= 0
        return len(self.terms) == 1 and self.terms[0][1] == 1 and len(self.terms[0][0]) == 1 \
            and isinstance(self.terms[0][0][0][0], str) and self.terms[0][0][0][1] == 1

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for mono, coeff in self.terms:
            piece = _format_term(mono, coeff)
            if not out:
                out = piece
            elif piece.startswith("-"):
                out += piece
            else:
                out += "+" + piece
        return out

    def __repr__(self) -> str:
        return f"Sub({self})"


def _format_term(mono: SubMono, coeff: int) -> str:
    if not mono:
        return str(coeff)
    factors = []
    for factor, power in mono:
        factors.extend([str(factor)] * power)
    body = "*".join(factors)
    if coeff == 1:
        return body
    if coeff == -1:
        return "-" + body
    if isinstance(mono[0][0], str):
        return f"{coeff}{body}"
    return f"{coeff}*{body}"
