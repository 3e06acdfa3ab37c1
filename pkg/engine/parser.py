"""
Recursive-descent parser for identities

Grammar (whitespace is insignificant):

    identity  := expr "=" expr
    expr      := term (("+" | "-") term)*
    term      := factor (("*" | "/") factor)*
    factor    := "-" factor | atom ("^" power)?
    atom      := FAMILY "[" subscript "]" | ("alpha"|"tau"|"beta"|"sigma") "^" power
               | "(-1)^" power | "sqrtD" | "p" | "q" | SEED | INDEX
               | "binom(" subscript "," subscript ")"
               | "sum(" INDEX "," subscript "," subscript "," expr ")"
               | "arctan(" expr ")" | INT | INT "^" power | "(" expr ")"
    power     := INT | INDEX | "(" subscript ")"
    subscript := integer polynomial in indices with INT "^" power atoms

A number written directly before a name multiplies it ("2k", "5F[k]").
"""
import logging
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Union

from core.exceptions import IdentityParseError
from engine.expressions import (
    Add,
    Arctan,
    Binom,
    BoundedSum,
    Const,
    Constraint,
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
    bound_variables,
    expr_free_indices,
)
from engine.subscript import Sub
from families.base import FamilyTable, default_family_table

logger = logging.getLogger(__name__)

RESERVED = {"sum", "binom", "arctan", "alpha", "beta", "tau", "sigma", "sqrtD", "p", "q", "pi", "i", "lntau"}
TAU_NAMES = {"alpha", "tau"}
SIGMA_NAMES = {"beta", "sigma"}

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op" or "end"
    text: str
    pos: int
    end: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, name, op = match.groups()
        start = match.start(match.lastindex) if match.lastindex else match.end()
        if number is not None:
            tokens.append(Token("int", number, start, match.end()))
        elif name is not None:
            tokens.append(Token("name", name, start, match.end()))
        elif op is not None:
            if op not in "+-*/^()[],=":
                raise IdentityParseError(f"unexpected character '{op}'", start, text)
            tokens.append(Token("op", op, start, match.end()))
        pos = match.end()
    tokens.append(Token("end", "", len(text), len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, families: FamilyTable):
        self.text = text
        self.families = families
        self.tokens = tokenize(text)
        self.index = 0

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        self.index = min(self.index + 1, len(self.tokens) - 1)
        return token

    def at(self, text: str) -> bool:
        return self.current.kind == "op" and self.current.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.current.text or "end of input"
            raise self.error(f"expected '{text}' but found '{shown}'")
        return self.advance()

    def error(self, message: str, token: Optional[Token] = None) -> IdentityParseError:
        token = token or self.current
        return IdentityParseError(message, token.pos, self.text)

    def expect_end(self) -> None:
        if self.current.kind != "end":
            raise self.error(f"unexpected '{self.current.text}' after the end of the expression")

    # expressions

    def expr(self) -> Expr:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            right = self.term()
            node = Add(node, right) if op == "+" else Subtract(node, right)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            right = self.factor()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def factor(self) -> Expr:
        if self.at("-"):
            self.advance()
            return Neg(self.factor())
        node = self.atom()
        if self.at("^"):
            token = self.advance()
            exponent = self.power()
            if not exponent.is_constant:
                return IndexPow(node, exponent)
            if exponent.constant < 0:
                raise self.error("negative exponents are not supported", token)
            node = Pow(node, exponent.constant)
        return node

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "int":
            return self.number_atom()
        if token.kind == "name":
            return self.name_atom()
        if self.at("("):
            if self.peek().text == "-" and self.peek(2).text == "1" and self.peek(3).text == ")" \
                    and self.peek(4).text == "^":
                for _ in range(4):
                    self.advance()
                self.expect("^")
                return MinusOnePow(self.power())
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        shown = token.text or "end of input"
        raise self.error(f"unexpected '{shown}'")

    def number_atom(self) -> Expr:
        token = self.advance()
        value = int(token.text)
        if self.at("^"):
            self.advance()
            exponent = self.power()
            if exponent.is_constant:
                if exponent.constant < 0:
                    raise self.error("negative exponents are not supported", token)
                return Pow(Const(value), exponent.constant)
            if value < 2:
                raise self.error("exponential bases must be integers >= 2", token)
            return ExpConst(value, exponent)
        node: Expr = Const(value)
        nxt = self.current
        if nxt.kind == "name" and nxt.pos == token.end:
            node = Mul(node, self.name_atom())
        return node

    def name_atom(self) -> Expr:
        token = self.advance()
        name = token.text
        if self.at("["):
            if name not in self.families:
                raise self.error(f"unknown family '{name}'", token)
            self.advance()
            sub = self.subscript()
            self.expect("]")
            return SeqTerm(name, sub)
        if name in TAU_NAMES or name in SIGMA_NAMES:
            exponent = Sub.const(1)
            if self.at("^"):
                self.advance()
                exponent = self.power()
            return TauPow(exponent) if name in TAU_NAMES else SigmaPow(exponent)
        if name == "sqrtD":
            return Radical()
        if name in ("p", "q"):
            return Param(name)
        if name == "binom":
            self.expect("(")
            top = self.subscript()
            self.expect(",")
            bottom = self.subscript()
            self.expect(")")
            return Binom(top, bottom)
        if name == "sum":
            return self.bounded_sum()
        if name == "arctan":
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Arctan(arg)
        if self.families.is_seed(name):
            return Seed(name)
        if name in self.families:
            raise self.error(f"family '{name}' needs a subscript", token)
        if name[0].isupper() or name in RESERVED:
            raise self.error(f"unknown symbol '{name}'", token)
        return IndexValue(Sub.var(name))

    def bounded_sum(self) -> Expr:
        self.expect("(")
        token = self.current
        if token.kind != "name" or token.text in RESERVED or token.text[0].isupper():
            raise self.error("summation variable must be a lower-case index name", token)
        var = self.advance().text
        self.expect(",")
        lower = self.subscript()
        self.expect(",")
        upper = self.subscript()
        self.expect(",")
        body = self.expr()
        self.expect(")")
        for bound in (lower, upper):
            if var in bound.variables():
                raise self.error(f"summation variable {var} occurs in its own bounds", token)
        return BoundedSum(var, lower, upper, body)

    # subscripts

    def power(self) -> Sub:
        if self.current.kind == "int":
            return Sub.const(int(self.advance().text))
        if self.current.kind == "name":
            return self.index_name()
        if self.at("("):
            self.advance()
            sub = self.subscript()
            self.expect(")")
            return sub
        raise self.error("expected an exponent")

    def index_name(self) -> Sub:
        token = self.current
        if token.kind != "name" or token.text in RESERVED or token.text[0].isupper():
            raise self.error(f"'{token.text}' is not an index variable", token)
        self.advance()
        return Sub.var(token.text)

    def subscript(self) -> Sub:
        negate = False
        if self.at("-"):
            self.advance()
            negate = True
        value = self.sub_term()
        if negate:
            value = -value
        while self.at("+") or self.at("-"):
            op = self.advance().text
            right = self.sub_term()
            value = value + right if op == "+" else value - right
        return value

    def sub_term(self) -> Sub:
        value = self.sub_factor()
        while True:
            if self.at("*"):
                self.advance()
                value = value * self.sub_factor()
            elif self.current.kind == "name" or self.at("("):
                value = value * self.sub_factor()
            else:
                return value

    def sub_factor(self) -> Sub:
        token = self.current
        if self.at("-"):
            self.advance()
            return -self.sub_factor()
        if token.kind == "int":
            self.advance()
            if self.at("^"):
                self.advance()
                base = int(token.text)
                if base < 2:
                    raise self.error("exponential bases must be integers >= 2", token)
                return Sub.exp(base, self.power())
            return Sub.const(int(token.text))
        if token.kind == "name":
            return self.index_name()
        if self.at("("):
            self.advance()
            value = self.subscript()
            self.expect(")")
            return value
        shown = token.text or "end of input"
        raise self.error(f"unexpected '{shown}' in subscript")


def parse_expr(text: str, families: Optional[FamilyTable] = None) -> Expr:
    parser = _Parser(text, families if families is not None else default_family_table())
    node = parser.expr()
    parser.expect_end()
    return node


def parse_subscript(text: str) -> Sub:
    parser = _Parser(text, FamilyTable())
    value = parser.subscript()
    parser.expect_end()
    return value


def parse_identity(
    text: str,
    families: Optional[FamilyTable] = None,
    constraints: Iterable[Union[str, Constraint]] = (),
    provenance: str = "",
) -> Identity:
    """
    Parse "lhs = rhs" into an Identity

    Args:
        text: Identity in the grammar above
        families: Declared families; defaults to F, L, G, H, U, V, W
        constraints: Side conditions such as "m even"
        provenance: Source label carried with the identity

    Returns:
        Parsed Identity

    Raises:
        IdentityParseError: syntax errors, unknown families or symbols,
            summation variables that clash with free indices
    """
    table = families if families is not None else default_family_table()
    parser = _Parser(text, table)
    lhs = parser.expr()
    parser.expect("=")
    rhs = parser.expr()
    parser.expect_end()

    free = set(expr_free_indices(lhs)) | set(expr_free_indices(rhs))
    for side in (lhs, rhs):
        for var in bound_variables(side):
            if var in free:
                raise IdentityParseError(f"summation variable {var} is also used as a free index", None, text)

    parsed = [c if isinstance(c, Constraint) else Constraint.parse(c) for c in constraints]
    for constraint in parsed:
        if constraint.index is not None and constraint.index not in free:
            raise IdentityParseError(f"constraint '{constraint}' names unknown index {constraint.index}", None, text)
    logger.debug(f"Parsed identity '{text}' with free indices {sorted(free)}")
    return Identity.build(lhs, rhs, tuple(parsed), provenance, table)
