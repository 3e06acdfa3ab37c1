"""
Rewrite rules for Fibonacci/Lucas expressions

Rules run in a fixed order until none applies:

    F[h+1] + F[h-1]        -> L[h]
    L[h+1] + L[h-1]        -> 5*F[h]
    L[a]*F[b] + L[b]*F[a]  -> 2*F[a+b]
    L[h]*F[h]              -> F[2h]

Each is a valid identity for q = -1, so rewriting preserves validity.
(-1)^(2k) and similar powers are never folded.
"""
import logging
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from core.exceptions import DegenerateFieldError
from core.models import FamilyRole
from engine.expressions import Identity, SeqTerm
from engine.printer import print_identity
from engine.seedpoly import SeedPoly
from engine.terms import Monomial, TermSum, expand, to_expr
from families.base import FamilyTable

logger = logging.getLogger(__name__)

Term = Tuple[Monomial, SeedPoly]
Rule = Callable[[List[Term], "_Names"], Optional[List[Term]]]


class _Names:
    def __init__(self, fib: str, luc: str):
        self.fib = fib
        self.luc = luc


def _adjust(mono: Monomial, atom, delta: int) -> Monomial:
    powers = mono.powers
    powers[atom] = powers.get(atom, 0) + delta
    _, result = Monomial.build(mono.sign, mono.sigma, mono.tau, powers)
    return result


def _seq_atoms(mono: Monomial, family: str) -> List[SeqTerm]:
    return [a for a, e in mono.factors if isinstance(a, SeqTerm) and a.family == family and e > 0]


def _replace_pair(terms: List[Term], i: int, j: int, new: Term) -> List[Term]:
    out = list(terms)
    out[i] = new
    del out[j]
    return out


def _neighbour_rule(family: str, target: str, factor: int) -> Rule:
    """X[h+1] + X[h-1] -> factor * T[h]"""

    def rule(terms: List[Term], names: _Names) -> Optional[List[Term]]:
        fam = names.fib if family == "F" else names.luc
        tgt = names.fib if target == "F" else names.luc
        for i, (m1, c1) in enumerate(terms):
            for j in range(i + 1, len(terms)):
                m2, c2 = terms[j]
                if c1 != c2:
                    continue
                for a in _seq_atoms(m1, fam):
                    for b in _seq_atoms(m2, fam):
                        gap = a.sub - b.sub
                        if not gap.is_constant or abs(gap.constant) != 2:
                            continue
                        rest = _adjust(m1, a, -1)
                        if rest != _adjust(m2, b, -1):
                            continue
                        centre = b.sub + 1 if gap.constant == 2 else a.sub + 1
                        mono = _adjust(rest, SeqTerm(tgt, centre), 1)
                        return _replace_pair(terms, i, j, (mono, c1 * factor))
        return None

    return rule


def _vajda_rule(terms: List[Term], names: _Names) -> Optional[List[Term]]:
    """L[a]*F[b] + L[b]*F[a] -> 2*F[a+b]"""
    for i, (m1, c1) in enumerate(terms):
        for j in range(i + 1, len(terms)):
            m2, c2 = terms[j]
            if c1 != c2:
                continue
            for la in _seq_atoms(m1, names.luc):
                for fb in _seq_atoms(m1, names.fib):
                    if la.sub == fb.sub:
                        continue
                    lb = SeqTerm(names.luc, fb.sub)
                    fa = SeqTerm(names.fib, la.sub)
                    if m2.exponent(lb) < 1 or m2.exponent(fa) < 1:
                        continue
                    rest = _adjust(_adjust(m1, la, -1), fb, -1)
                    if rest != _adjust(_adjust(m2, lb, -1), fa, -1):
                        continue
                    mono = _adjust(rest, SeqTerm(names.fib, la.sub + fb.sub), 1)
                    return _replace_pair(terms, i, j, (mono, c1 * 2))
    return None


def _double_angle_rule(terms: List[Term], names: _Names) -> Optional[List[Term]]:
    """L[h]*F[h] -> F[2h]"""
    for i, (mono, coeff) in enumerate(terms):
        for la in _seq_atoms(mono, names.luc):
            fa = SeqTerm(names.fib, la.sub)
            if mono.exponent(fa) < 1:
                continue
            rest = _adjust(_adjust(mono, la, -1), fa, -1)
            out = list(terms)
            out[i] = (_adjust(rest, SeqTerm(names.fib, la.sub * 2), 1), coeff)
            return out
    return None


RULES: List[Rule] = [
    _neighbour_rule("F", "L", 1),
    _neighbour_rule("L", "F", 5),
    _vajda_rule,
    _double_angle_rule,
]


def simplify_terms(terms: TermSum, names: "_Names") -> TermSum:
    current = list(terms.items())
    while True:
        for rule in RULES:
            rewritten = rule(current, names)
            if rewritten is not None:
                current = list(TermSum(rewritten).items())
                break
        else:
            return TermSum(current)


def _fibonacci_names(table: FamilyTable, used: List[str]) -> Optional[Tuple[FamilyTable, _Names]]:
    for name in used:
        spec = table[name]
        if spec.role == FamilyRole.FIBONACCI:
            table, companion = table.companion(name)
            return table, _Names(name, companion.name)
        if spec.role == FamilyRole.LUCAS:
            table, companion = table.companion(name)
            return table, _Names(companion.name, name)
    return None


def simplify(identity: Identity) -> Identity:
    """
    Rewrite both sides to a fixpoint of the Fibonacci/Lucas rules

    Identities without Fibonacci or Lucas terms are returned unchanged.
    """
    found = _fibonacci_names(identity.families, identity.family_names())
    if found is None:
        return identity
    table, names = found
    p, q = table.parameters_of(identity.family_names())
    try:
        context = table.context(identity.family_names())
    except DegenerateFieldError:
        context = None
    params = (Fraction(p), Fraction(q))
    lhs = simplify_terms(expand(identity.lhs, params, context), names)
    rhs = simplify_terms(expand(identity.rhs, params, context), names)
    result = identity.with_sides(to_expr(lhs), to_expr(rhs), families=table)
    logger.debug(f"Simplified {print_identity(identity)} to {print_identity(result)}")
    return result
