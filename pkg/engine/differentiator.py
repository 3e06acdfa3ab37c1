"""
Formal differentiation of an identity with respect to one free index
"""
import logging
from dataclasses import dataclass
from typing import List

from core.exceptions import DifferentiationError
from engine.expressions import (
    FORMAL,
    MARKERS,
    ONE,
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
    add,
    div,
    index_power,
    index_value,
    is_const,
    mul,
    node_subscripts,
    power,
    subtract,
    walk,
)
from engine.printer import format_equation
from engine.subscript import Sub

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DerivedForm:
    """
    Both sides of a differentiated identity

    The sides may hold DerivSeq / DerivMinusOne markers; they exist only
    until a component transform replaces them.
    """

    lhs: Expr
    rhs: Expr
    wrt: str
    source: Identity

    def markers(self) -> List[Expr]:
        return [node for side in (self.lhs, self.rhs) for node in walk(side) if isinstance(node, MARKERS)]

    def __str__(self) -> str:
        return format_equation(self.lhs, self.rhs)


def _chain_factor(sub: Sub, k: str) -> Expr:
    try:
        return index_value(sub.diff(k))
    except ValueError as e:
        raise DifferentiationError(str(e))


class _Differentiator:
    def __init__(self, k: str):
        self.k = k

    def depends(self, sub: Sub) -> bool:
        return self.k in sub.variables()

    def d(self, expr: Expr) -> Expr:
        k = self.k
        if isinstance(expr, (Const, Radical, Seed, Param)):
            return ZERO
        if isinstance(expr, SeqTerm):
            factor = _chain_factor(expr.sub, k)
            return mul(factor, DerivSeq(expr.family, expr.sub, k))
        if isinstance(expr, MinusOnePow):
            factor = _chain_factor(expr.sub, k)
            return mul(factor, DerivMinusOne(expr.sub, k))
        if isinstance(expr, IndexValue):
            return _chain_factor(expr.sub, k)
        if isinstance(expr, (TauPow, SigmaPow, ExpConst)):
            if self.depends(expr.sub):
                raise DifferentiationError(
                    f"cannot differentiate the power {type(expr).__name__} with respect to {k}; "
                    "recombine it into family terms first"
                )
            return ZERO
        if isinstance(expr, Binom):
            if self.depends(expr.top) or self.depends(expr.bottom):
                raise DifferentiationError(f"index {k} occurs in a binomial coefficient")
            return ZERO
        if isinstance(expr, Add):
            return add(self.d(expr.left), self.d(expr.right))
        if isinstance(expr, Subtract):
            return subtract(self.d(expr.left), self.d(expr.right))
        if isinstance(expr, Mul):
            u, v = expr.left, expr.right
            return add(mul(u, self.d(v)), mul(v, self.d(u)))
        if isinstance(expr, Div):
            u, v = expr.left, expr.right
            du, dv = self.d(u), self.d(v)
            if is_const(dv, 0):
                return div(du, v)
            return div(subtract(mul(du, v), mul(u, dv)), power(v, 2))
        if isinstance(expr, Neg):
            inner = self.d(expr.operand)
            return ZERO if is_const(inner, 0) else Neg(inner)
        if isinstance(expr, Pow):
            inner = self.d(expr.base)
            if is_const(inner, 0):
                return ZERO
            return mul(mul(Const(expr.exponent), power(expr.base, expr.exponent - 1)), inner)
        if isinstance(expr, IndexPow):
            if self.depends(expr.sub):
                raise DifferentiationError(f"index {k} occurs in the exponent {expr.sub}")
            inner = self.d(expr.base)
            if is_const(inner, 0):
                return ZERO
            return mul(mul(index_value(expr.sub), index_power(expr.base, expr.sub - 1)), inner)
        if isinstance(expr, BoundedSum):
            if self.depends(expr.lower) or self.depends(expr.upper):
                raise DifferentiationError(f"index {k} occurs in the bounds of a sum over {expr.var}")
            body = self.d(expr.body)
            return ZERO if is_const(body, 0) else BoundedSum(expr.var, expr.lower, expr.upper, body)
        if isinstance(expr, Arctan):
            inner = self.d(expr.arg)
            if is_const(inner, 0):
                return ZERO
            return div(inner, Add(ONE, power(expr.arg, 2)))
        if isinstance(expr, MARKERS + FORMAL):
            raise DifferentiationError("identity already contains formal derivative terms")
        raise DifferentiationError(f"cannot differentiate node {type(expr).__name__}")


def differentiate(identity: Identity, k: str) -> DerivedForm:
    """
    Differentiate both sides of an identity with respect to the free index k

    Sequence terms become DerivSeq markers and (-1)^h becomes a
    DerivMinusOne marker, each times the partial derivative of its
    subscript. Binomials and summation bounds must not involve k.

    Raises:
        DifferentiationError: k is not free, occurs in an exponent, a
            binomial, a summation bound, or a raw tau/sigma power
    """
    if k not in identity.free_indices:
        raise DifferentiationError(
            f"index {k} is not a free index of the identity (free: {', '.join(identity.free_indices) or 'none'})"
        )
    for side in (identity.lhs, identity.rhs):
        for node in walk(side):
            for sub in node_subscripts(node):
                if k in sub.exponent_variables():
                    raise DifferentiationError(f"index {k} occurs in an exponent of subscript {sub}")

    engine = _Differentiator(k)
    lhs = engine.d(identity.lhs)
    rhs = engine.d(identity.rhs)
    form = DerivedForm(lhs=lhs, rhs=rhs, wrt=k, source=identity)
    logger.debug(f"d/d{k}: {form}")
    return form
