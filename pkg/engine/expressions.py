"""
Expression tree for identity sides

Nodes are immutable dataclasses so structural equality is plain ``==`` and
trees can be shared freely between threads.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Tuple

from core.exceptions import PreconditionError
from engine.subscript import Sub
from families.base import FamilyTable, default_family_table

logger = logging.getLogger(__name__)


class Expr:
    """Base class of all expression nodes"""

    def children(self) -> Tuple["Expr", ...]:
        return ()


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Radical(Expr):
    """sqrt(D), the positive square root of the discriminant"""


@dataclass(frozen=True)
class PiConst(Expr):
    pass


@dataclass(frozen=True)
class LnTau(Expr):
    pass


@dataclass(frozen=True)
class ImagUnit(Expr):
    pass


@dataclass(frozen=True)
class Seed(Expr):
    """A symbolic initial value such as G0 or W1"""

    name: str


@dataclass(frozen=True)
class Param(Expr):
    """The recurrence parameter p or q"""

    name: str


@dataclass(frozen=True)
class IndexValue(Expr):
    """An integer-valued index expression used as a factor, e.g. j or (2n+1)"""

    sub: Sub


@dataclass(frozen=True)
class SeqTerm(Expr):
    family: str
    sub: Sub


@dataclass(frozen=True)
class TauPow(Expr):
    sub: Sub


@dataclass(frozen=True)
class SigmaPow(Expr):
    sub: Sub


@dataclass(frozen=True)
class MinusOnePow(Expr):
    sub: Sub


@dataclass(frozen=True)
class ExpConst(Expr):
    """base^(index expression), e.g. 25^n"""

    base: int
    sub: Sub


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Subtract(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class IndexPow(Expr):
    """base^h for an index expression h, e.g. L[k]^n"""

    base: Expr
    sub: Sub

    def children(self):
        return (self.base,)


@dataclass(frozen=True)
class Binom(Expr):
    top: Sub
    bottom: Sub


@dataclass(frozen=True)
class BoundedSum(Expr):
    var: str
    lower: Sub
    upper: Sub
    body: Expr

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Arctan(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class DerivSeq(Expr):
    """Formal derivative of family term X_h with respect to its subscript"""

    family: str
    sub: Sub
    wrt: str


@dataclass(frozen=True)
class DerivMinusOne(Expr):
    """Formal derivative of (-1)^h with respect to h, i.e. (-1)^h * i * pi"""

    sub: Sub
    wrt: str


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))

MARKERS = (DerivSeq, DerivMinusOne)
FORMAL = (PiConst, LnTau, ImagUnit)


def is_const(expr: Expr, value: Optional[int] = None) -> bool:
    return isinstance(expr, Const) and (value is None or expr.value == value)


def add(left: Expr, right: Expr) -> Expr:
    if is_const(left, 0):
        return right
    if is_const(right, 0):
        return left
    return Add(left, right)


def subtract(left: Expr, right: Expr) -> Expr:
    if is_const(right, 0):
        return left
    if is_const(left, 0):
        return Neg(right)
    return Subtract(left, right)


def mul(left: Expr, right: Expr) -> Expr:
    if is_const(left, 0) or is_const(right, 0):
        return ZERO
    if is_const(left, 1):
        return right
    if is_const(right, 1):
        return left
    return Mul(left, right)


def div(left: Expr, right: Expr) -> Expr:
    if is_const(left, 0):
        return ZERO
    if is_const(right, 1):
        return left
    return Div(left, right)


def power(base: Expr, exponent: int) -> Expr:
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    return Pow(base, exponent)


def index_power(base: Expr, sub: Sub) -> Expr:
    if sub.is_constant and sub.constant >= 0:
        return power(base, sub.constant)
    return IndexPow(base, sub)


def exp_const(base: int, sub: Sub) -> Expr:
    """base^sub, folded to a rational when the exponent is constant"""
    if sub.is_constant:
        return Const(Fraction(base) ** sub.constant)
    return ExpConst(base, sub)


def index_value(sub: Sub) -> Expr:
    if sub.is_constant:
        return Const(Fraction(sub.constant))
    return IndexValue(sub)


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal, descending into summation bodies"""
    yield expr
    for child in expr.children():
        yield from walk(child)


def node_subscripts(expr: Expr) -> Tuple[Sub, ...]:
    """Subscript expressions carried directly by one node"""
    if isinstance(expr, (SeqTerm, TauPow, SigmaPow, MinusOnePow, ExpConst, IndexValue, IndexPow, DerivSeq, DerivMinusOne)):
        return (expr.sub,)
    if isinstance(expr, Binom):
        return (expr.top, expr.bottom)
    if isinstance(expr, BoundedSum):
        return (expr.lower, expr.upper)
    return ()


def contains(expr: Expr, kinds) -> bool:
    return any(isinstance(node, kinds) for node in walk(expr))


def bound_variables(expr: Expr) -> List[str]:
    return [node.var for node in walk(expr) if isinstance(node, BoundedSum)]


def _collect_free(expr: Expr, bound: frozenset, out: List[str]) -> None:
    if isinstance(expr, BoundedSum):
        for sub in (expr.lower, expr.upper):
            for name in sub.ordered_variables():
                if name not in bound and name not in out:
                    out.append(name)
        _collect_free(expr.body, bound | {expr.var}, out)
        return
    for sub in node_subscripts(expr):
        for name in sub.ordered_variables():
            if name not in bound and name not in out:
                out.append(name)
    for child in expr.children():
        _collect_free(child, bound, out)


def expr_free_indices(expr: Expr) -> List[str]:
    out: List[str] = []
    _collect_free(expr, frozenset(), out)
    return out


def sum_bound_indices(expr: Expr) -> List[str]:
    """Free indices that appear in summation bounds, binomial tops or symbolic exponents"""
    names: List[str] = []
    for node in walk(expr):
        subs = ()
        if isinstance(node, BoundedSum):
            subs = (node.lower, node.upper)
        elif isinstance(node, Binom):
            subs = (node.top,)
        elif isinstance(node, IndexPow):
            subs = (node.sub,)
        for sub in subs:
            for name in sub.ordered_variables():
                if name not in names:
                    names.append(name)
    return names


def map_expr(expr: Expr, fn: Callable[[Expr], Optional[Expr]]) -> Expr:
    """
    Bottom-up rebuild; fn returns a replacement node or None to keep the node

    Children are rebuilt first, then fn sees the rebuilt node.
    """
    if isinstance(expr, (Add, Subtract, Mul, Div)):
        rebuilt = type(expr)(map_expr(expr.left, fn), map_expr(expr.right, fn))
    elif isinstance(expr, Neg):
        rebuilt = Neg(map_expr(expr.operand, fn))
    elif isinstance(expr, Pow):
        rebuilt = Pow(map_expr(expr.base, fn), expr.exponent)
    elif isinstance(expr, IndexPow):
        rebuilt = IndexPow(map_expr(expr.base, fn), expr.sub)
    elif isinstance(expr, BoundedSum):
        rebuilt = replace(expr, body=map_expr(expr.body, fn))
    elif isinstance(expr, Arctan):
        rebuilt = Arctan(map_expr(expr.arg, fn))
    else:
        rebuilt = expr
    result = fn(rebuilt)
    return rebuilt if result is None else result


def _is_minus_one(expr: Expr) -> bool:
    return isinstance(expr, Neg) and is_const(expr.operand, 1)


def _canonical_node(node: Expr) -> Optional[Expr]:
    if isinstance(node, Const):
        value = node.value
        magnitude = Const(Fraction(abs(value.numerator)))
        signed = Neg(magnitude) if value < 0 else magnitude
        if value.denominator != 1:
            return Div(signed, Const(Fraction(value.denominator)))
        return signed if value < 0 else None
    if isinstance(node, Pow) and _is_minus_one(node.base):
        return MinusOnePow(Sub.const(node.exponent))
    if isinstance(node, IndexPow):
        if _is_minus_one(node.base):
            return MinusOnePow(node.sub)
        if is_const(node.base, 1):
            return ONE
        if is_const(node.base) and node.base.value.denominator == 1 and node.base.value >= 2:
            return ExpConst(int(node.base.value), node.sub)
    if isinstance(node, ExpConst) and node.sub.is_constant:
        exponent = node.sub.constant
        if exponent >= 0:
            return Pow(Const(Fraction(node.base)), exponent)
        return Div(ONE, power(Const(Fraction(node.base)), -exponent))
    return None


def canonical(expr: Expr) -> Expr:
    """
    Rewrite nodes the parser never produces into the shape it produces
    for their printed text, so that parsing a printed tree gives it back

    Negative and fractional constants become Neg / Div of non-negative
    integers, powers of -1 become MinusOnePow, integer powers of integer
    bases become ExpConst, and ExpConst with a constant exponent becomes Pow.
    """
    return map_expr(expr, _canonical_node)


def substitute_in_expr(expr: Expr, var: str, replacement: Sub) -> Expr:
    """
    Capture-avoiding substitution of an index variable in every subscript

    Raises:
        PreconditionError: the replacement mentions a summation variable
            whose body uses var
    """
    if isinstance(expr, BoundedSum):
        lower = expr.lower.substitute(var, replacement)
        upper = expr.upper.substitute(var, replacement)
        if expr.var == var:
            return BoundedSum(expr.var, lower, upper, expr.body)
        if expr.var in replacement.variables() and var in expr_free_indices(expr.body):
            raise PreconditionError(
                f"substituting {replacement} for {var} would capture summation variable {expr.var}",
                hint=None,
            )
        return BoundedSum(expr.var, lower, upper, substitute_in_expr(expr.body, var, replacement))
    if isinstance(expr, (Add, Subtract, Mul, Div)):
        return type(expr)(
            substitute_in_expr(expr.left, var, replacement),
            substitute_in_expr(expr.right, var, replacement),
        )
    if isinstance(expr, Neg):
        return Neg(substitute_in_expr(expr.operand, var, replacement))
    if isinstance(expr, Pow):
        return Pow(substitute_in_expr(expr.base, var, replacement), expr.exponent)
    if isinstance(expr, IndexPow):
        return index_power(substitute_in_expr(expr.base, var, replacement), expr.sub.substitute(var, replacement))
    if isinstance(expr, Arctan):
        return Arctan(substitute_in_expr(expr.arg, var, replacement))
    if isinstance(expr, Binom):
        return Binom(expr.top.substitute(var, replacement), expr.bottom.substitute(var, replacement))
    if isinstance(expr, ExpConst):
        return exp_const(expr.base, expr.sub.substitute(var, replacement))
    if isinstance(expr, IndexValue):
        return index_value(expr.sub.substitute(var, replacement))
    if isinstance(expr, (SeqTerm, TauPow, SigmaPow, MinusOnePow, DerivSeq, DerivMinusOne)):
        return replace(expr, sub=expr.sub.substitute(var, replacement))
    return expr


class Condition(str, Enum):
    EVEN = "even"
    ODD = "odd"
    NONNEGATIVE = "nonnegative"
    POSITIVE = "positive"
    NONZERO = "nonzero"


_CONSTRAINT_PATTERNS = [
    (re.compile(r"^\s*([a-z]\w*)\s+(?:is\s+)?even\s*$"), Condition.EVEN),
    (re.compile(r"^\s*([a-z]\w*)\s+(?:is\s+)?odd\s*$"), Condition.ODD),
    (re.compile(r"^\s*([a-z]\w*)\s*>=\s*0\s*$"), Condition.NONNEGATIVE),
    (re.compile(r"^\s*([a-z]\w*)\s*>\s*0\s*$"), Condition.POSITIVE),
    (re.compile(r"^\s*([a-z]\w*)\s*>=\s*1\s*$"), Condition.POSITIVE),
    (re.compile(r"^\s*([a-z]\w*)\s*!=\s*0\s*$"), Condition.NONZERO),
]


@dataclass(frozen=True)
class Constraint:
    """
    Side condition on a free index

    Conditions that are not recognized are kept as text and only reported.
    """

    index: Optional[str]
    condition: Optional[Condition]
    text: str

    @classmethod
    def parse(cls, text: str) -> "Constraint":
        for pattern, condition in _CONSTRAINT_PATTERNS:
            match = pattern.match(text)
            if match:
                return cls(match.group(1), condition, text.strip())
        return cls(None, None, text.strip())

    def admits(self, value: int) -> bool:
        if self.condition == Condition.EVEN:
            return value % 2 == 0
        if self.condition == Condition.ODD:
            return value % 2 == 1
        if self.condition == Condition.NONNEGATIVE:
            return value >= 0
        if self.condition == Condition.POSITIVE:
            return value > 0
        if self.condition == Condition.NONZERO:
            return value != 0
        return True

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Identity:
    """
    lhs = rhs with its free indices, constraints and provenance

    The family table travels with the identity but takes no part in equality.
    """

    lhs: Expr
    rhs: Expr
    free_indices: Tuple[str, ...] = ()
    constraints: Tuple[Constraint, ...] = ()
    provenance: str = ""
    families: FamilyTable = field(default_factory=default_family_table, compare=False, repr=False)

    @classmethod
    def build(
        cls,
        lhs: Expr,
        rhs: Expr,
        constraints: Tuple[Constraint, ...] = (),
        provenance: str = "",
        families: Optional[FamilyTable] = None,
    ) -> "Identity":
        lhs, rhs = canonical(lhs), canonical(rhs)
        names = expr_free_indices(lhs)
        for name in expr_free_indices(rhs):
            if name not in names:
                names.append(name)
        for constraint in constraints:
            if constraint.index is not None and constraint.index not in names:
                raise PreconditionError(
                    f"constraint '{constraint}' refers to unknown index {constraint.index}", hint=None
                )
        return cls(
            lhs=lhs,
            rhs=rhs,
            free_indices=tuple(names),
            constraints=tuple(constraints),
            provenance=provenance,
            families=families if families is not None else default_family_table(),
        )

    def with_sides(self, lhs: Expr, rhs: Expr, provenance: Optional[str] = None,
                   families: Optional[FamilyTable] = None) -> "Identity":
        names = set(expr_free_indices(lhs)) | set(expr_free_indices(rhs))
        constraints = tuple(c for c in self.constraints if c.index is None or c.index in names)
        return Identity.build(
            lhs, rhs, constraints,
            provenance=self.provenance if provenance is None else provenance,
            families=families if families is not None else self.families,
        )

    def family_names(self) -> List[str]:
        names: List[str] = []
        for side in (self.lhs, self.rhs):
            for node in walk(side):
                if isinstance(node, (SeqTerm, DerivSeq)) and node.family not in names:
                    names.append(node.family)
                elif isinstance(node, Seed):
                    owner = self.families.seed_owner(node.name)
                    if owner is not None and owner not in names:
                        names.append(owner)
        return names

    def bound_variables(self) -> List[str]:
        return bound_variables(self.lhs) + bound_variables(self.rhs)


def free_indices(identity: Identity) -> Tuple[str, ...]:
    """Unbound index variables of both sides, in order of first appearance"""
    return identity.free_indices


def substitute_index(identity: Identity, var: str, replacement: Sub) -> Identity:
    """Rewrite every occurrence of var, refusing to capture summation variables"""
    lhs = substitute_in_expr(identity.lhs, var, replacement)
    rhs = substitute_in_expr(identity.rhs, var, replacement)
    names = set(expr_free_indices(lhs)) | set(expr_free_indices(rhs))
    constraints = []
    for constraint in identity.constraints:
        if constraint.index == var:
            constraints.append(_transport_constraint(constraint, replacement))
        elif constraint.index is None or constraint.index in names:
            constraints.append(constraint)
    return Identity.build(lhs, rhs, tuple(constraints), identity.provenance, identity.families)


def _transport_constraint(constraint: Constraint, replacement: Sub) -> Constraint:
    """Restate a constraint on var after var := replacement"""
    text = f"{constraint.index} := {replacement} with {constraint.text}"
    affine = replacement.affine()
    if affine is None or len(affine[1]) != 1:
        return Constraint(None, None, text)
    constant, coeffs = affine
    (name, coeff), = coeffs.items()
    if coeff == 1 and constant == 0:
        return Constraint(name, constraint.condition, constraint.text.replace(constraint.index, name, 1))
    if constraint.condition in (Condition.EVEN, Condition.ODD) and coeff % 2:
        wanted_even = constraint.condition == Condition.EVEN
        if constant % 2:
            wanted_even = not wanted_even
        condition = Condition.EVEN if wanted_even else Condition.ODD
        return Constraint(name, condition, f"{name} {condition.value}")
    return Constraint(None, None, text)
