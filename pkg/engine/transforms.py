"""
Component transforms: real part, imaginary part, shift, conjugate swap and
Binet recombination of differentiated identities
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from core.exceptions import DegenerateFieldError, NoNewIdentityError, TransformError
from core.models import FamilyDecl, FamilyRole
from engine.differentiator import DerivedForm
from engine.expressions import (
    Add,
    Arctan,
    BoundedSum,
    Constraint,
    DerivMinusOne,
    DerivSeq,
    Div,
    Expr,
    Identity,
    ImagUnit,
    LnTau,
    MARKERS,
    MinusOnePow,
    Mul,
    PiConst,
    Radical,
    SeqTerm,
    SigmaPow,
    contains,
    map_expr,
    walk,
)
from engine.printer import print_identity
from engine.quadext import QuadContext
from engine.sequences import binet_coefficients
from engine.subscript import Sub
from engine.terms import Monomial, TermSum, expand, normalize_sides, seedpoly_expr, to_expr
from families.base import FamilyTable, build_family

logger = logging.getLogger(__name__)

SIGMA = "sigma"
TAU = "tau"

PI = PiConst()
LN_TAU = LnTau()
IMAG = ImagUnit()


@dataclass(frozen=True, eq=False)
class SigmaIdentity:
    """
    An identity whose terms each carry one power of a characteristic root

    base is "sigma" after the imaginary part and "tau" after a conjugate
    swap. Coefficients are seed polynomials over Q(sqrt(D)).
    """

    lhs: TermSum
    rhs: TermSum
    families: FamilyTable
    constraints: Tuple[Constraint, ...] = ()
    provenance: str = ""
    base: str = SIGMA

    @property
    def identity(self) -> Identity:
        lhs, rhs = to_expr(self.lhs), to_expr(self.rhs)
        bare = Identity.build(lhs, rhs, families=self.families)
        constraints = tuple(c for c in self.constraints if c.index is None or c.index in bare.free_indices)
        return Identity.build(lhs, rhs, constraints, self.provenance, self.families)

    def terms(self) -> Iterator[Tuple[Monomial, object]]:
        yield from self.lhs.items()
        yield from self.rhs.items()

    def exponent(self, mono: Monomial) -> Sub:
        return mono.sigma if self.base == SIGMA else mono.tau

    def __eq__(self, other) -> bool:
        if not isinstance(other, SigmaIdentity):
            return NotImplemented
        return (self.lhs, self.rhs, self.base) == (other.lhs, other.rhs, other.base)

    def __hash__(self) -> int:
        return hash((self.lhs, self.rhs, self.base))

    def __str__(self) -> str:
        return print_identity(self.identity)


def _with_exponent(mono: Monomial, base: str, exponent: Sub) -> Monomial:
    if base == SIGMA:
        return Monomial(mono.sign, exponent, mono.tau, mono.factors)
    return Monomial(mono.sign, mono.sigma, exponent, mono.factors)


def _field(identity: Identity) -> Tuple[Fraction, Fraction, QuadContext]:
    names = identity.family_names()
    p, q = identity.families.parameters_of(names)
    context = identity.families.context(names)
    return p, q, context


def _check_trivial(lhs: TermSum, rhs: TermSum, step: str) -> None:
    if lhs == rhs:
        raise NoNewIdentityError(f"{step} collapsed to a trivial identity; no new identity")


# Real part

def apply_real_part(form: DerivedForm) -> Identity:
    """
    Replace derivative markers by their real parts and cancel ln(tau)

    Every family must have q = -1. Sequence derivatives become
    companion-family terms times ln(tau); terms carrying i vanish.

    Raises:
        TransformError: q != -1, or a term without exactly one ln(tau)
        NoNewIdentityError: the result is trivial
    """
    source = form.source
    names = source.family_names()
    p, q = source.families.parameters_of(names)
    if q != -1:
        raise TransformError(
            f"the real-part rules need families with q = -1 (found p={p}, q={q})",
            hint="use --component imag",
        )
    context = source.families.context(names)
    table = source.families

    def rule(node: Expr) -> Optional[Expr]:
        nonlocal table
        if isinstance(node, DerivMinusOne):
            return Mul(Mul(MinusOnePow(node.sub), IMAG), PI)
        if not isinstance(node, DerivSeq):
            return None
        spec = table[node.family]
        h = node.sub
        if spec.role in (FamilyRole.FIBONACCI, FamilyRole.LUCAS_U):
            table, companion = table.companion(node.family)
            return Mul(Div(SeqTerm(companion.name, h), Radical()), LN_TAU)
        if spec.role in (FamilyRole.LUCAS, FamilyRole.LUCAS_V):
            table, companion = table.companion(node.family)
            return Mul(Mul(Radical(), SeqTerm(companion.name, h)), LN_TAU)
        lemma = Add(SeqTerm(node.family, h + 1), SeqTerm(node.family, h - 1))
        return Mul(Div(lemma, Radical()), LN_TAU)

    lhs_expr = map_expr(form.lhs, rule)
    rhs_expr = map_expr(form.rhs, rule)
    params = (p, q)
    sides = []
    for side in (expand(lhs_expr, params, context), expand(rhs_expr, params, context)):
        kept = []
        for mono, coeff in side.items():
            if mono.exponent(IMAG):
                continue
            if mono.exponent(LN_TAU) != 1 or mono.exponent(PI):
                raise TransformError(
                    f"term {to_expr(TermSum.monomial(mono, coeff))} does not carry exactly one ln(tau); "
                    "the derivation is malformed"
                )
            kept.append((mono.without(LN_TAU), coeff))
        sides.append(TermSum(kept))
    lhs, rhs = normalize_sides(*sides)
    _check_trivial(lhs, rhs, "the real part")
    result = source.with_sides(to_expr(lhs), to_expr(rhs), families=table)
    logger.info(f"Real part w.r.t. {form.wrt}: {print_identity(result)}")
    return result


# Imaginary part

def apply_imag_part(form: DerivedForm) -> SigmaIdentity:
    """
    Replace derivative markers by their imaginary parts and cancel pi

    DerivSeq(X, h) becomes B_X * pi * sigma^h and (-1)^h's derivative
    becomes (-1)^h * pi. Requires q < 0 and no arctan.

    Raises:
        TransformError: q >= 0, arctan present, markers inside a sum body,
            or a term without exactly one pi
        NoNewIdentityError: the result is trivial
    """
    source = form.source
    names = source.family_names()
    p, q = source.families.parameters_of(names)
    if q >= 0:
        raise TransformError(f"the imaginary-part rules need q < 0 (found q={q})")
    # arctan(u) is already du/(1 + u^2) in the derivative
    if contains(source.lhs, Arctan) or contains(source.rhs, Arctan):
        raise TransformError(
            "arctan forms have no imaginary-part rule; rewrite the identity without arctan first"
        )
    for side in (form.lhs, form.rhs):
        for node in walk(side):
            if isinstance(node, BoundedSum) and contains(node.body, MARKERS):
                raise TransformError(
                    "the imaginary part of a summation body is not defined here", hint="use --component real"
                )
    try:
        context = source.families.context(names)
    except DegenerateFieldError as e:
        raise TransformError(f"the imaginary part needs a non-degenerate field: {e.message}")
    table = source.families

    def rule(node: Expr) -> Optional[Expr]:
        if isinstance(node, DerivMinusOne):
            return Mul(MinusOnePow(node.sub), PI)
        if isinstance(node, DerivSeq):
            coefficient = seedpoly_expr(binet_coefficients(table[node.family]).B)
            return Mul(Mul(coefficient, PI), SigmaPow(node.sub))
        return None

    params = (p, q)
    sides = []
    for side in (map_expr(form.lhs, rule), map_expr(form.rhs, rule)):
        kept = []
        for mono, coeff in expand(side, params, context).items():
            if mono.exponent(PI) != 1 or mono.exponent(IMAG) or mono.exponent(LN_TAU):
                raise TransformError(
                    f"term {to_expr(TermSum.monomial(mono, coeff))} does not carry exactly one pi; "
                    "the derivation is malformed"
                )
            kept.append((mono.without(PI), coeff))
        sides.append(TermSum(kept))
    lhs, rhs = _divide_common_power(sides[0], sides[1], SIGMA)
    lhs, rhs = normalize_sides(lhs, rhs)
    _check_trivial(lhs, rhs, "the imaginary part")
    result = SigmaIdentity(lhs, rhs, table, source.constraints, source.provenance, SIGMA)
    logger.info(f"Imaginary part w.r.t. {form.wrt}: {result}")
    return result


def _divide_common_power(lhs: TermSum, rhs: TermSum, base: str) -> Tuple[TermSum, TermSum]:
    """Divide by base^e when every term of one side (two or more terms) has exponent e"""
    for side in (lhs, rhs):
        exponents = {(mono.sigma if base == SIGMA else mono.tau) for mono in side.monomials()}
        if len(side) >= 2 and len(exponents) == 1:
            (exponent,) = exponents
            if exponent:
                return _shift(lhs, base, -exponent), _shift(rhs, base, -exponent)
    return lhs, rhs


def _shift(terms: TermSum, base: str, delta: Sub) -> TermSum:
    out = []
    for mono, coeff in terms.items():
        current = mono.sigma if base == SIGMA else mono.tau
        out.append((_with_exponent(mono, base, current + delta), coeff))
    return TermSum(out)


# Shift, swap and recombination

def _pivot_key(exponent: Sub, order: List[str]) -> Tuple:
    affine = exponent.affine()
    if affine is None:
        return (1, str(exponent))
    constant, coeffs = affine
    return (0, tuple(coeffs.get(name, 0) for name in order), constant)


def default_pivot(sid: SigmaIdentity) -> Sub:
    """The smallest root exponent, comparing index coefficients first, then constants"""
    order = sorted({name for mono, _ in sid.terms() for name in sid.exponent(mono).variables()})
    exponents = [sid.exponent(mono) for mono, _ in sid.terms()]
    if not exponents:
        return Sub()
    return min(exponents, key=lambda e: _pivot_key(e, order))


def shift_normalize(sid: SigmaIdentity, fresh: str, pivot: Optional[Sub] = None) -> SigmaIdentity:
    """
    Multiply both sides by root^(fresh - pivot)

    Args:
        sid: Identity in root-power form
        fresh: New index name; must not be used by the identity
        pivot: Exponent that becomes fresh; defaults to default_pivot(sid)

    Raises:
        TransformError: fresh is already a free or bound index
    """
    identity = sid.identity
    if fresh in identity.free_indices or fresh in identity.bound_variables():
        raise TransformError(f"index name {fresh} is already used by the identity; pick another --shift")
    pivot = default_pivot(sid) if pivot is None else pivot
    delta = Sub.var(fresh) - pivot
    shifted = SigmaIdentity(
        _shift(sid.lhs, sid.base, delta),
        _shift(sid.rhs, sid.base, delta),
        sid.families,
        sid.constraints,
        sid.provenance,
        sid.base,
    )
    logger.info(f"Shift by {sid.base}^({delta}): {shifted}")
    return shifted


def conjugate_swap(sid: SigmaIdentity) -> SigmaIdentity:
    """Exchange tau and sigma and conjugate every coefficient (sqrtD -> -sqrtD)"""

    def swap(terms: TermSum) -> TermSum:
        return TermSum(
            (Monomial(mono.sign, mono.tau, mono.sigma, mono.factors), coeff.conj()) for mono, coeff in terms.items()
        )

    base = TAU if sid.base == SIGMA else SIGMA
    return SigmaIdentity(swap(sid.lhs), swap(sid.rhs), sid.families, sid.constraints, sid.provenance, base)


def _numbered(preferred: str) -> Iterator[str]:
    yield preferred
    index = 2
    while True:
        yield f"{preferred}{index}"
        index += 1


def fresh_index_name(identity: Identity, preferred: str) -> str:
    """preferred, or preferred2, preferred3, ... when the identity already uses it"""
    used = set(identity.free_indices) | set(identity.bound_variables())
    return next(name for name in _numbered(preferred) if name not in used)


def fresh_family_name(identity: Identity, preferred: str) -> str:
    """preferred, or the first numbered variant neither used by the identity nor clashing with a seed"""
    used = set(identity.family_names())

    def free(name: str) -> bool:
        if name in used or identity.families.is_seed(name):
            return False
        return all(identity.families.seed_owner(seed) in (None, name) for seed in (f"{name}0", f"{name}1"))

    return next(name for name in _numbered(preferred) if free(name))


def _combine_family(sid: SigmaIdentity, name: str) -> Tuple[FamilyTable, str]:
    identity = sid.identity
    if name in identity.family_names():
        raise TransformError(f"family {name} already occurs in the identity; --combine needs a fresh family")
    for seed in (f"{name}0", f"{name}1"):
        owner = sid.families.seed_owner(seed)
        if owner is not None and owner != name:
            raise TransformError(f"seed {seed} already belongs to family {owner}")
    p, q = sid.families.parameters_of(identity.family_names())
    if (p, q) == (1, -1):
        decl = FamilyDecl(name=name, role=FamilyRole.GIBONACCI)
    else:
        if p.denominator != 1 or q.denominator != 1:
            raise TransformError(f"cannot declare a Horadam family with p={p}, q={q}")
        decl = FamilyDecl(name=name, role=FamilyRole.HORADAM, p=int(p), q=int(q))
    spec = build_family(decl)
    return sid.families.with_family(spec), name


def binet_combine(sid: SigmaIdentity, family: str) -> Identity:
    """
    Recombine a root-power identity with its conjugate through a fresh family Z

    Each term c * sigma^h * R, with c = a + b*sqrt(D), becomes
    a * Z[h] * R - b * (Z[h+1] - q*Z[h-1]) * R. For tau powers the sign of
    the b part flips.

    Raises:
        TransformError: a term has no root power, or the family is not fresh
    """
    table, name = _combine_family(sid, family)
    _, q = table.parameters_of([name])
    sign = -1 if sid.base == SIGMA else 1

    def combine(terms: TermSum) -> TermSum:
        total = TermSum()
        for mono, coeff in terms.items():
            h = sid.exponent(mono)
            if not h:
                raise TransformError(
                    f"term {to_expr(TermSum.monomial(mono, coeff))} has no {sid.base} power",
                    hint="shift first with --shift",
                )
            rest = _with_exponent(mono, sid.base, Sub())
            lemma = TermSum.atom(SeqTerm(name, h + 1)) - TermSum.atom(SeqTerm(name, h - 1)) * q
            piece = TermSum.atom(SeqTerm(name, h)) * coeff.rational_part() + lemma * (coeff.radical_part() * sign)
            total = total + TermSum.monomial(rest) * piece
        return total

    lhs, rhs = normalize_sides(combine(sid.lhs), combine(sid.rhs))
    identity = Identity.build(to_expr(lhs), to_expr(rhs), (), sid.provenance, table)
    constraints = tuple(c for c in sid.constraints if c.index is None or c.index in identity.free_indices)
    identity = Identity.build(identity.lhs, identity.rhs, constraints, sid.provenance, table)
    logger.info(f"Combined into family {name}: {print_identity(identity)}")
    return identity
