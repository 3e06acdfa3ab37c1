"""
Decide identities through canonical Laurent forms

Every family term W[c0 + sum(ci*ki)] expands by its Binet form into
A*tau^c0*prod(x_ki^ci) + B*sigma^c0*prod((q^ki / x_ki)^ci), where x_k
stands for tau^k. Powers of rationals such as q^k or 25^n become products
of prime-power variables (5^n, 2^k) and a parity sign for negative bases.
Parity signs are fixed per case, so an identity is proved when the
numerator of rhs - lhs vanishes in every admissible parity case.
"""
import itertools
import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from core.exceptions import DegenerateFieldError, NonCanonicalError
from core.models import ParityCase, ProofVerdict, Verdict
from engine.expressions import (
    FORMAL,
    MARKERS,
    Add,
    Arctan,
    Binom,
    BoundedSum,
    Condition,
    Const,
    Div,
    ExpConst,
    Expr,
    Identity,
    IndexPow,
    IndexValue,
    MinusOnePow,
    Mul,
    Neg,
    Param,
    Pow,
    Radical,
    Seed,
    SeqTerm,
    SigmaPow,
    Subtract,
    TauPow,
    substitute_in_expr,
    walk,
)
from engine.laurent import LaurentPoly
from engine.printer import format_expr, print_identity
from engine.quadext import QuadContext
from engine.seedpoly import SeedPoly
from engine.sequences import BinetPair, binet_coefficients
from engine.subscript import ExpAtom, Sub
from families.base import FamilyTable

logger = logging.getLogger(__name__)

Signs = Tuple[Tuple[str, int], ...]
Fraction2 = Tuple[LaurentPoly, LaurentPoly]


def prime_factors(n: int) -> Dict[int, int]:
    factors: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@dataclass(frozen=True)
class CanonicalForm:
    """
    Numerator of an expression per parity case, with the denominators cleared

    Attributes:
        cases: parity assignment -> Laurent polynomial
        denominators: printed denominators multiplied out, each assumed nonzero
    """

    cases: Dict[Signs, LaurentPoly]
    denominators: Tuple[str, ...] = ()

    @property
    def is_zero(self) -> bool:
        return all(poly.is_zero for poly in self.cases.values())


class _Canonicalizer:
    def __init__(
        self,
        families: FamilyTable,
        params: Tuple[Fraction, Fraction],
        context: Optional[QuadContext],
        degenerate: Optional[DegenerateFieldError],
        signs: Dict[str, int],
    ):
        self.families = families
        self.p, self.q = params
        self.context = context
        self.degenerate = degenerate
        self.signs = signs
        self.denominators: List[str] = []
        self._binet: Dict[str, BinetPair] = {}

    # helpers

    def field(self) -> QuadContext:
        if self.context is None:
            raise self.degenerate or DegenerateFieldError("no field context")
        return self.context

    def affine(self, sub: Sub) -> Tuple[int, Dict[str, int]]:
        affine = sub.affine()
        if affine is None:
            raise NonCanonicalError(f"subscript {sub} is not affine in the free indices")
        return affine

    def sign(self, var: str) -> LaurentPoly:
        if var in self.signs:
            return LaurentPoly.constant(self.signs[var])
        return LaurentPoly.variable(f"(-1)^{var}")

    def base_power(self, value: Fraction, var: str) -> LaurentPoly:
        """value^var for a nonzero rational value"""
        poly = LaurentPoly.constant(1)
        if value < 0:
            poly = poly * self.sign(var)
        magnitude = abs(value)
        for prime, exp in prime_factors(magnitude.numerator).items():
            poly = poly * LaurentPoly.variable(f"{prime}^{var}", exp)
        for prime, exp in prime_factors(magnitude.denominator).items():
            poly = poly * LaurentPoly.variable(f"{prime}^{var}", -exp)
        return poly

    def rational_power(self, value: Fraction, sub: Sub) -> LaurentPoly:
        constant, coeffs = self.affine(sub)
        result = LaurentPoly.constant(Fraction(value) ** constant)
        for var, coeff in coeffs.items():
            result = result * self.base_power(Fraction(value), var) ** coeff
        return result

    def root_power(self, sub: Sub, conjugate: bool) -> LaurentPoly:
        tau, sigma = self.field().roots(self.p)
        constant, coeffs = self.affine(sub)
        result = LaurentPoly.constant((sigma if conjugate else tau) ** constant)
        for var, coeff in coeffs.items():
            x = LaurentPoly.variable(f"x_{var}")
            factor = self.base_power(self.q, var) * x ** -1 if conjugate else x
            result = result * factor ** coeff
        return result

    def index_poly(self, sub: Sub) -> LaurentPoly:
        total = LaurentPoly()
        for mono, coeff in sub.terms:
            term = LaurentPoly.constant(coeff)
            for factor, power in mono:
                if isinstance(factor, ExpAtom):
                    term = term * self.rational_power(Fraction(factor.base), factor.exponent) ** power
                else:
                    term = term * LaurentPoly.variable(factor, power)
            total = total + term
        return total

    def binet(self, family: str) -> BinetPair:
        if family not in self._binet:
            self.field()
            self._binet[family] = binet_coefficients(self.families[family])
        return self._binet[family]

    # expansion

    def run(self, expr: Expr) -> Fraction2:
        one = LaurentPoly.constant(1)
        if isinstance(expr, Const):
            return LaurentPoly.constant(expr.value), one
        if isinstance(expr, Radical):
            return LaurentPoly.constant(self.field().sqrt()), one
        if isinstance(expr, Param):
            return LaurentPoly.constant(self.p if expr.name == "p" else self.q), one
        if isinstance(expr, Seed):
            return LaurentPoly.constant(SeedPoly.symbol(expr.name)), one
        if isinstance(expr, SeqTerm):
            pair = self.binet(expr.family)
            value = self.root_power(expr.sub, False) * pair.A + self.root_power(expr.sub, True) * pair.B
            return value, one
        if isinstance(expr, TauPow):
            return self.root_power(expr.sub, False), one
        if isinstance(expr, SigmaPow):
            return self.root_power(expr.sub, True), one
        if isinstance(expr, MinusOnePow):
            return self.rational_power(Fraction(-1), expr.sub), one
        if isinstance(expr, ExpConst):
            return self.rational_power(Fraction(expr.base), expr.sub), one
        if isinstance(expr, IndexValue):
            return self.index_poly(expr.sub), one
        if isinstance(expr, Binom):
            return self.binomial(expr), one
        if isinstance(expr, BoundedSum):
            return self.bounded_sum(expr)
        if isinstance(expr, (Add, Subtract)):
            n1, d1 = self.run(expr.left)
            n2, d2 = self.run(expr.right)
            if d1 == d2:
                return (n1 + n2 if isinstance(expr, Add) else n1 - n2), d1
            cross = n1 * d2 + n2 * d1 if isinstance(expr, Add) else n1 * d2 - n2 * d1
            return cross, d1 * d2
        if isinstance(expr, Mul):
            n1, d1 = self.run(expr.left)
            n2, d2 = self.run(expr.right)
            return n1 * n2, d1 * d2
        if isinstance(expr, Neg):
            n, d = self.run(expr.operand)
            return -n, d
        if isinstance(expr, Pow):
            n, d = self.run(expr.base)
            return n ** expr.exponent, d ** expr.exponent
        if isinstance(expr, Div):
            return self.divide(expr)
        if isinstance(expr, Arctan):
            raise NonCanonicalError("arctan has no canonical Laurent form")
        if isinstance(expr, IndexPow):
            raise NonCanonicalError(f"symbolic exponent {expr.sub} has no canonical Laurent form")
        if isinstance(expr, MARKERS + FORMAL):
            raise NonCanonicalError("formal derivative terms cannot be canonicalized", hint=None)
        raise NonCanonicalError(f"cannot canonicalize node {type(expr).__name__}")

    def divide(self, expr: Div) -> Fraction2:
        n1, d1 = self.run(expr.left)
        n2, d2 = self.run(expr.right)
        if n2.is_zero:
            raise NonCanonicalError(f"denominator {format_expr(expr.right)} vanishes identically")
        condition = f"{format_expr(expr.right)} != 0"
        if condition not in self.denominators:
            self.denominators.append(condition)
        if len(n2) == 1:
            (_, coeff), = n2.items()
            if coeff.is_constant:
                return n1 * d2 * n2 ** -1, d1
        return n1 * d2, d1 * n2

    def binomial(self, expr: Binom) -> LaurentPoly:
        if not expr.bottom.is_constant:
            raise NonCanonicalError(f"binomial with symbolic lower argument {expr.bottom}")
        bottom = expr.bottom.constant
        if bottom < 0:
            return LaurentPoly()
        top = self.index_poly(expr.top)
        result = LaurentPoly.constant(Fraction(1, math.factorial(bottom)))
        for i in range(bottom):
            result = result * (top - i)
        return result

    def bounded_sum(self, expr: BoundedSum) -> Fraction2:
        if not (expr.lower.is_constant and expr.upper.is_constant):
            raise NonCanonicalError(
                f"sum over {expr.var} has symbolic bounds {expr.lower}..{expr.upper}; it can only be verified"
            )
        total: Fraction2 = (LaurentPoly(), LaurentPoly.constant(1))
        for value in range(expr.lower.constant, expr.upper.constant + 1):
            n, d = self.run(substitute_in_expr(expr.body, expr.var, Sub.const(value)))
            tn, td = total
            total = (tn + n, td) if td == d else (tn * d + n * td, td * d)
        return total


def _field_of(identity: Identity) -> Tuple[Tuple[Fraction, Fraction], Optional[QuadContext], Optional[DegenerateFieldError]]:
    names = identity.family_names()
    params = identity.families.parameters_of(names)
    try:
        return params, identity.families.context(names), None
    except DegenerateFieldError as e:
        return params, None, e


def parity_indices(identity: Identity, q: Fraction) -> List[str]:
    """Indices whose parity matters: all of them when q < 0, else those in (-1) powers"""
    if q < 0:
        return list(identity.free_indices)
    names: List[str] = []
    for side in (identity.lhs, identity.rhs):
        for node in walk(side):
            if isinstance(node, MinusOnePow):
                names.extend(v for v in node.sub.ordered_variables() if v not in names)
    return [name for name in identity.free_indices if name in names]


def parity_cases(identity: Identity, indices: Sequence[str]) -> List[Dict[str, int]]:
    choices = []
    for name in indices:
        allowed = [1, -1]
        for constraint in identity.constraints:
            if constraint.index == name and constraint.condition == Condition.EVEN:
                allowed = [1]
            elif constraint.index == name and constraint.condition == Condition.ODD:
                allowed = [-1]
        choices.append(allowed)
    return [dict(zip(indices, combo)) for combo in itertools.product(*choices)]


def canonicalize(expr: Expr, identity: Identity) -> CanonicalForm:
    """
    Canonical form of an expression over the families and constraints of an identity

    Raises:
        NonCanonicalError: symbolic-bound sums, arctan or non-affine subscripts
        DegenerateFieldError: family terms over a degenerate field
    """
    params, context, degenerate = _field_of(identity)
    indices = parity_indices(identity, params[1])
    cases: Dict[Signs, LaurentPoly] = {}
    denominators: List[str] = []
    for signs in parity_cases(identity, indices):
        engine = _Canonicalizer(identity.families, params, context, degenerate, signs)
        numerator, _ = engine.run(expr)
        cases[tuple(signs.items())] = numerator
        denominators.extend(d for d in engine.denominators if d not in denominators)
    return CanonicalForm(cases, tuple(denominators))


def prove_identity(identity: Identity, identity_id: str = "") -> ProofVerdict:
    """
    Prove or refute an identity by its canonical form

    Returns:
        ProofVerdict with one ParityCase per admissible parity assignment and
        the cleared denominators as side conditions

    Raises:
        NonCanonicalError: the identity needs instantiation instead
    """
    start = time.perf_counter()
    form = canonicalize(Subtract(identity.rhs, identity.lhs), identity)
    params, _, _ = _field_of(identity)
    cases = [
        ParityCase(signs=dict(signs), zero=poly.is_zero, residue=str(poly))
        for signs, poly in form.cases.items()
    ]
    for case in cases:
        logger.debug(f"Parity case {case.signs}: residue {case.residue}")
    verdict = Verdict.PROVED if form.is_zero else Verdict.REFUTED
    result = ProofVerdict(
        identity_id=identity_id,
        identity=print_identity(identity),
        verdict=verdict,
        parameters={"p": str(params[0]), "q": str(params[1])},
        cases=cases,
        side_conditions=list(form.denominators),
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )
    logger.info(f"{identity_id or result.identity}: {verdict.value} in {len(cases)} parity case(s)")
    return result
