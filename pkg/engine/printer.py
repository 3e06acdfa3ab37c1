"""
Deterministic printer for expressions and identities

Output follows the parser grammar, so parse(print(x)) == x for every
marker-free tree. Binary operators print with the minimum parentheses the
grammar needs; a sum used as a factor is always parenthesized.
"""
from fractions import Fraction
from typing import Tuple

from core.exceptions import PreconditionError
from engine.expressions import (
    MARKERS,
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
    contains,
)
from engine.subscript import Sub

PREC_ADD = 1
PREC_MUL = 2
PREC_NEG = 3
PREC_POW = 4
PREC_ATOM = 5


def _power(sub: Sub) -> str:
    return str(sub) if sub.is_simple else f"({sub})"


def _const(value: Fraction) -> Tuple[str, int]:
    if value.denominator == 1:
        return str(value.numerator), PREC_NEG if value < 0 else PREC_ATOM
    return f"{value.numerator}/{value.denominator}", PREC_MUL


def _format(expr: Expr) -> Tuple[str, int]:
    if isinstance(expr, (Add, Subtract)):
        left, _ = _format(expr.left)
        right, rprec = _format(expr.right)
        if rprec <= PREC_ADD:
            right = f"({right})"
        op = "+" if isinstance(expr, Add) else "-"
        return f"{left} {op} {right}", PREC_ADD
    if isinstance(expr, (Mul, Div)):
        left, lprec = _format(expr.left)
        right, rprec = _format(expr.right)
        if lprec < PREC_MUL:
            left = f"({left})"
        if rprec <= PREC_MUL:
            right = f"({right})"
        op = "*" if isinstance(expr, Mul) else "/"
        return f"{left}{op}{right}", PREC_MUL
    if isinstance(expr, Neg):
        inner, prec = _format(expr.operand)
        if prec < PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}", PREC_NEG
    if isinstance(expr, Pow):
        base, prec = _format(expr.base)
        if prec < PREC_ATOM:
            base = f"({base})"
        return f"{base}^{expr.exponent}", PREC_POW
    if isinstance(expr, IndexPow):
        base, prec = _format(expr.base)
        if prec < PREC_ATOM:
            base = f"({base})"
        return f"{base}^{_power(expr.sub)}", PREC_POW
    if isinstance(expr, Const):
        return _const(expr.value)
    if isinstance(expr, Radical):
        return "sqrtD", PREC_ATOM
    if isinstance(expr, (Seed, Param)):
        return expr.name, PREC_ATOM
    if isinstance(expr, IndexValue):
        return _power(expr.sub), PREC_ATOM
    if isinstance(expr, SeqTerm):
        return f"{expr.family}[{expr.sub}]", PREC_ATOM
    if isinstance(expr, TauPow):
        return f"tau^{_power(expr.sub)}", PREC_ATOM
    if isinstance(expr, SigmaPow):
        return f"sigma^{_power(expr.sub)}", PREC_ATOM
    if isinstance(expr, MinusOnePow):
        return f"(-1)^{_power(expr.sub)}", PREC_ATOM
    if isinstance(expr, ExpConst):
        return f"{expr.base}^{_power(expr.sub)}", PREC_ATOM
    if isinstance(expr, Binom):
        return f"binom({expr.top},{expr.bottom})", PREC_ATOM
    if isinstance(expr, BoundedSum):
        body, _ = _format(expr.body)
        return f"sum({expr.var},{expr.lower},{expr.upper},{body})", PREC_ATOM
    if isinstance(expr, Arctan):
        arg, _ = _format(expr.arg)
        return f"arctan({arg})", PREC_ATOM
    if isinstance(expr, PiConst):
        return "pi", PREC_ATOM
    if isinstance(expr, LnTau):
        return "lntau", PREC_ATOM
    if isinstance(expr, ImagUnit):
        return "i", PREC_ATOM
    if isinstance(expr, DerivSeq):
        return f"D{expr.family}[{expr.sub}]", PREC_ATOM
    if isinstance(expr, DerivMinusOne):
        return f"D(-1)^({expr.sub})", PREC_ATOM
    raise TypeError(f"cannot print node {type(expr).__name__}")


def format_expr(expr: Expr) -> str:
    """Print any expression, including derivative markers and formal constants"""
    return _format(expr)[0]


def format_equation(lhs: Expr, rhs: Expr) -> str:
    return f"{format_expr(lhs)} = {format_expr(rhs)}"


def print_identity(identity: Identity) -> str:
    """
    Print an identity in the parser grammar

    Raises:
        PreconditionError: a formal derivative marker is still present
    """
    if contains(identity.lhs, MARKERS) or contains(identity.rhs, MARKERS):
        raise PreconditionError("identity still contains formal derivative markers", hint=None)
    return format_equation(identity.lhs, identity.rhs)
