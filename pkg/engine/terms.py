"""
Sum-of-monomials normal form for identity sides

A side expands into a TermSum: an insertion-ordered map from Monomial to a
seed-polynomial coefficient. A monomial records the (-1), sigma and tau
exponents as subscripts plus the remaining atoms (sequence terms,
binomials, sums, markers, formal constants) with integer powers. Rational
constants, sqrt(D), p, q and seeds fold into the coefficient.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from core.exceptions import TransformError
from engine.expressions import (
    FORMAL,
    ZERO,
    Add,
    Arctan,
    Binom,
    BoundedSum,
    Const,
    DerivMinusOne,
    DerivSeq,
    Div,
    ExpConst,
    Expr,
    ImagUnit,
    IndexPow,
    IndexValue,
    LnTau,
    MinusOnePow,
    Mul,
    Neg,
    Param,
    PiConst,
    Pow,
    Radical,
    Seed,
    SeqTerm,
    SigmaPow,
    Subtract,
    TauPow,
    power,
)
from engine.printer import format_expr
from engine.quadext import QuadContext, QuadExt
from engine.seedpoly import SeedPoly
from engine.subscript import Sub

logger = logging.getLogger(__name__)

Factors = Tuple[Tuple[Expr, int], ...]
Coefficient = Union[SeedPoly, QuadExt, int, Fraction]

IMAG = ImagUnit()


def atom_rank(atom: Expr) -> int:
    if isinstance(atom, MinusOnePow):
        return 0
    if isinstance(atom, Binom):
        return 1
    if isinstance(atom, (SigmaPow, TauPow)):
        return 2
    if isinstance(atom, (SeqTerm, DerivSeq)):
        return 3
    return 4


def atom_key(atom: Expr) -> Tuple[int, str]:
    return atom_rank(atom), format_expr(atom)


@dataclass(frozen=True)
class Monomial:
    """(-1)^sign * sigma^sigma * tau^tau * prod(atom^power)"""

    sign: Sub = Sub()
    sigma: Sub = Sub()
    tau: Sub = Sub()
    factors: Factors = ()

    @classmethod
    def build(cls, sign: Sub, sigma: Sub, tau: Sub, powers: Dict[Expr, int]) -> Tuple[int, "Monomial"]:
        """Normalize into (scalar sign, monomial): folds constant (-1)^c and i^2 = -1"""
        scalar = 1
        if sign.is_constant:
            if sign.constant % 2:
                scalar = -1
            sign = Sub()
        powers = dict(powers)
        if IMAG in powers:
            exp = powers.pop(IMAG)
            rest = exp % 2
            if ((exp - rest) // 2) % 2:
                scalar = -scalar
            if rest:
                powers[IMAG] = 1
        factors = tuple(sorted(((a, e) for a, e in powers.items() if e), key=lambda item: atom_key(item[0])))
        return scalar, cls(sign, sigma, tau, factors)

    @property
    def powers(self) -> Dict[Expr, int]:
        return dict(self.factors)

    def exponent(self, atom: Expr) -> int:
        return self.powers.get(atom, 0)

    def count(self, kind) -> int:
        """Total power of atoms of the given node type"""
        return sum(e for a, e in self.factors if isinstance(a, kind))

    def without(self, *atoms: Expr) -> "Monomial":
        return Monomial(self.sign, self.sigma, self.tau, tuple((a, e) for a, e in self.factors if a not in atoms))

    def with_sigma(self, sigma: Sub) -> "Monomial":
        return Monomial(self.sign, sigma, self.tau, self.factors)

    def formal_part(self) -> Factors:
        return tuple((a, e) for a, e in self.factors if isinstance(a, FORMAL))

    def multiply(self, other: "Monomial") -> Tuple[int, "Monomial"]:
        powers = self.powers
        for atom, exp in other.factors:
            powers[atom] = powers.get(atom, 0) + exp
        return Monomial.build(self.sign + other.sign, self.sigma + other.sigma, self.tau + other.tau, powers)

    def inverse(self) -> Tuple[int, "Monomial"]:
        # (-1)^(-h) = (-1)^h
        return Monomial.build(self.sign, -self.sigma, -self.tau, {a: -e for a, e in self.factors})

    def atoms(self) -> List[Tuple[Expr, int]]:
        """Every factor including the sign, sigma and tau powers, in print order"""
        items = list(self.factors)
        if self.sign:
            items.append((MinusOnePow(self.sign), 1))
        if self.sigma:
            items.append((SigmaPow(self.sigma), 1))
        if self.tau:
            items.append((TauPow(self.tau), 1))
        return sorted(items, key=lambda item: atom_key(item[0]))


UNIT = Monomial()


class TermSum:
    """
    Ordered sum of coefficient * monomial terms

    Terms keep the order in which their monomial first appeared; like
    monomials are merged and zero coefficients dropped.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Tuple[Monomial, Coefficient]] = ()):
        merged: Dict[Monomial, SeedPoly] = {}
        for mono, coeff in terms:
            coeff = SeedPoly.coerce(coeff)
            merged[mono] = merged[mono] + coeff if mono in merged else coeff
        self._terms: Dict[Monomial, SeedPoly] = {m: c for m, c in merged.items() if c}

    @classmethod
    def constant(cls, value: Coefficient) -> "TermSum":
        return cls([(UNIT, value)])

    @classmethod
    def atom(cls, atom: Expr, exp: int = 1) -> "TermSum":
        scalar, mono = Monomial.build(Sub(), Sub(), Sub(), {atom: exp})
        return cls([(mono, scalar)])

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Coefficient = 1) -> "TermSum":
        return cls([(mono, coeff)])

    def items(self) -> Iterator[Tuple[Monomial, SeedPoly]]:
        return iter(self._terms.items())

    def monomials(self) -> List[Monomial]:
        return list(self._terms)

    def coefficients(self) -> List[SeedPoly]:
        return list(self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TermSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "TermSum") -> "TermSum":
        return TermSum([*self._terms.items(), *other._terms.items()])

    def __neg__(self) -> "TermSum":
        return TermSum((m, -c) for m, c in self._terms.items())

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + (-other)

    def __mul__(self, other) -> "TermSum":
        if isinstance(other, (SeedPoly, QuadExt, int, Fraction)):
            return TermSum((m, c * other) for m, c in self._terms.items())
        if not isinstance(other, TermSum):
            return NotImplemented
        out = []
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                scalar, mono = m1.multiply(m2)
                out.append((mono, c1 * c2 * scalar))
        return TermSum(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TermSum":
        result = TermSum.constant(1)
        for _ in range(n):
            result = result * self
        return result

    def map_coefficients(self, fn: Callable[[SeedPoly], Coefficient]) -> "TermSum":
        return TermSum((m, fn(c)) for m, c in self._terms.items())

    def map_terms(self, fn: Callable[[Monomial, SeedPoly], "TermSum"]) -> "TermSum":
        """Replace every term by fn(monomial, coefficient) and re-collect"""
        total = TermSum()
        for mono, coeff in self._terms.items():
            total = total + fn(mono, coeff)
        return total

    def __repr__(self) -> str:
        return f"TermSum({format_expr(to_expr(self))})"


class _Expander:
    def __init__(self, params: Tuple[Fraction, Fraction], context: Optional[QuadContext]):
        self.p, self.q = (Fraction(v) for v in params)
        self.context = context

    def run(self, expr: Expr) -> TermSum:
        if isinstance(expr, Const):
            return TermSum.constant(expr.value)
        if isinstance(expr, Radical):
            if self.context is None:
                raise TransformError("sqrtD needs a non-degenerate field context")
            return TermSum.constant(self.context.sqrt())
        if isinstance(expr, Param):
            return TermSum.constant(self.p if expr.name == "p" else self.q)
        if isinstance(expr, Seed):
            return TermSum.constant(SeedPoly.symbol(expr.name))
        if isinstance(expr, SigmaPow):
            return TermSum.monomial(Monomial(sigma=expr.sub))
        if isinstance(expr, TauPow):
            return TermSum.monomial(Monomial(tau=expr.sub))
        if isinstance(expr, MinusOnePow):
            scalar, mono = Monomial.build(expr.sub, Sub(), Sub(), {})
            return TermSum.monomial(mono, scalar)
        if isinstance(expr, Add):
            return self.run(expr.left) + self.run(expr.right)
        if isinstance(expr, Subtract):
            return self.run(expr.left) - self.run(expr.right)
        if isinstance(expr, Mul):
            return self.run(expr.left) * self.run(expr.right)
        if isinstance(expr, Neg):
            return -self.run(expr.operand)
        if isinstance(expr, Pow):
            return self.run(expr.base) ** expr.exponent
        if isinstance(expr, Div):
            return divide(self.run(expr.left), self.run(expr.right))
        if isinstance(expr, BoundedSum):
            return self.bounded_sum(expr)
        if isinstance(expr, (SeqTerm, DerivSeq, DerivMinusOne, Binom, IndexValue, IndexPow, ExpConst, Arctan) + FORMAL):
            return TermSum.atom(expr)
        raise TypeError(f"cannot expand node {type(expr).__name__}")

    def bounded_sum(self, expr: BoundedSum) -> TermSum:
        # Formal constants (pi, i, lntau) leave the summation body
        body = self.run(expr.body)
        groups: Dict[Factors, List[Tuple[Monomial, SeedPoly]]] = {}
        for mono, coeff in body.items():
            formal = mono.formal_part()
            groups.setdefault(formal, []).append((mono.without(*(a for a, _ in formal)), coeff))
        total = TermSum()
        for formal, terms in groups.items():
            inner = BoundedSum(expr.var, expr.lower, expr.upper, to_expr(TermSum(terms)))
            piece = TermSum.atom(inner)
            for atom, exp in formal:
                piece = piece * TermSum.atom(atom, exp)
            total = total + piece
        return total


def divide(numerator: TermSum, denominator: TermSum) -> TermSum:
    """
    numerator / denominator; single terms with constant coefficients are
    inverted, anything else stays as an opaque denominator atom
    """
    if not denominator:
        raise ZeroDivisionError("division by zero")
    if len(denominator) == 1:
        (mono, coeff), = denominator.items()
        if coeff.is_constant:
            scalar, inverse = mono.inverse()
            return numerator * TermSum.monomial(inverse, coeff.constant_value().inverse() * scalar)
    return numerator * TermSum.atom(to_expr(denominator), -1)


def expand(
    expr: Expr,
    params: Tuple[Fraction, Fraction] = (Fraction(1), Fraction(-1)),
    context: Optional[QuadContext] = None,
) -> TermSum:
    """
    Expand an expression into its TermSum

    Args:
        expr: Expression to expand
        params: (p, q) used for the p and q constants
        context: Field context for sqrtD; required only when sqrtD occurs

    Returns:
        Collected TermSum
    """
    return _Expander(params, context).run(expr)


# Rendering back to expressions

def _chain(items: List[Expr]) -> Expr:
    acc = items[0]
    for item in items[1:]:
        acc = Mul(acc, item)
    return acc


def _negate_leading(expr: Expr) -> Expr:
    if isinstance(expr, (Mul, Div)):
        return type(expr)(_negate_leading(expr.left), expr.right)
    return Neg(expr)


def _product(magnitude: Fraction, numerator: List[Expr], denominator: List[Expr]) -> Expr:
    n, d = magnitude.numerator, magnitude.denominator
    if denominator:
        head = ([Const(n)] if n != 1 or not numerator else []) + numerator
        tail = ([Const(d)] if d != 1 else []) + denominator
        return Div(_chain(head), _chain(tail))
    lead: List[Expr] = []
    if d != 1:
        lead = [Div(Const(n), Const(d))]
    elif n != 1 or not numerator:
        lead = [Const(n)]
    return _chain(lead + numerator)


def _signed_sum(terms: List[Tuple[bool, Expr]]) -> Expr:
    acc: Optional[Expr] = None
    for negative, expr in terms:
        if acc is None:
            acc = _negate_leading(expr) if negative else expr
        else:
            acc = Subtract(acc, expr) if negative else Add(acc, expr)
    return acc if acc is not None else ZERO


def _scalar_parts(value: QuadExt) -> Tuple[bool, Fraction, List[Expr]]:
    """(negative, rational magnitude, extra factors) of a field element"""
    if value.b == 0:
        return value.a < 0, abs(value.a), []
    if value.a == 0:
        return value.b < 0, abs(value.b), [Radical()]
    radical = _product(abs(value.b), [Radical()], [])
    rational = _product(abs(value.a), [], [])
    if value.a < 0:
        rational = _negate_leading(rational)
    mixed = Add(rational, radical) if value.b > 0 else Subtract(rational, radical)
    return False, Fraction(1), [mixed]


def seedpoly_expr(poly: SeedPoly) -> Expr:
    """A seed polynomial as an expression over Seed, sqrtD and rational constants"""
    terms = []
    for mono, value in poly.items():
        negative, magnitude, extra = _scalar_parts(value)
        seeds = [power(Seed(name), exp) for name, exp in mono]
        terms.append((negative, _product(magnitude, extra + seeds, [])))
    return _signed_sum(terms)


def _coefficient_parts(coeff: SeedPoly) -> Tuple[bool, Fraction, List[Expr]]:
    if len(coeff) == 1:
        mono, value = coeff.leading()
        negative, magnitude, extra = _scalar_parts(value)
        return negative, magnitude, extra + [power(Seed(name), exp) for name, exp in mono]
    return False, Fraction(1), [seedpoly_expr(coeff)]


def term_expr(mono: Monomial, coeff: SeedPoly) -> Tuple[bool, Expr]:
    negative, magnitude, numerator = _coefficient_parts(coeff)
    denominator: List[Expr] = []
    for atom, exp in mono.atoms():
        if exp > 0:
            numerator.append(power(atom, exp))
        else:
            denominator.append(power(atom, -exp))
    return negative, _product(magnitude, numerator, denominator)


def to_expr(terms: TermSum) -> Expr:
    """Deterministic expression for a TermSum, terms in insertion order"""
    return _signed_sum([term_expr(mono, coeff) for mono, coeff in terms.items()])


# Normalization of an equation lhs = rhs

def leading_value(lhs: TermSum, rhs: TermSum) -> Optional[QuadExt]:
    coeffs = lhs.coefficients() + rhs.coefficients()
    if not coeffs:
        return None
    return coeffs[0].leading()[1]


def normalize_sides(lhs: TermSum, rhs: TermSum) -> Tuple[TermSum, TermSum]:
    """
    Scale both sides to a canonical multiple

    Applied in order: divide by a seed polynomial common to every
    coefficient; clear sqrtD when the leading coefficient is a pure
    radical; remove rational content; make the leading coefficient's first
    nonzero component positive. The leading coefficient is the first lhs
    coefficient, or the first rhs one when lhs is zero.
    """
    coeffs = lhs.coefficients() + rhs.coefficients()
    if not coeffs:
        return lhs, rhs
    first = coeffs[0]
    if first != 1:
        ratios = [c.quotient_by(first) for c in coeffs]
        if all(r is not None for r in ratios):
            lhs = lhs.map_coefficients(lambda c: c.quotient_by(first))
            rhs = rhs.map_coefficients(lambda c: c.quotient_by(first))

    lead = leading_value(lhs, rhs)
    if lead is not None and lead.is_pure_radical:
        radical = lead.context.sqrt()
        lhs, rhs = lhs * radical, rhs * radical

    components = [x for c in lhs.coefficients() + rhs.coefficients() for x in c.rational_components()]
    if components:
        denominators = math.lcm(*(x.denominator for x in components))
        numerators = math.gcd(*(abs(x.numerator) for x in components))
        scale = Fraction(denominators, numerators)
        if scale != 1:
            lhs, rhs = lhs * scale, rhs * scale

    lead = leading_value(lhs, rhs)
    if lead is not None and (lead.a < 0 or (lead.a == 0 and lead.b < 0)):
        lhs, rhs = -lhs, -rhs
    return lhs, rhs
