from fractions import Fraction

import pytest

from core.exceptions import IdentityParseError
from engine.corpus import family_table, load_corpus
from engine.expressions import (
    ZERO,
    Add,
    Arctan,
    BoundedSum,
    Const,
    ExpConst,
    Identity,
    IndexPow,
    MinusOnePow,
    Mul,
    Pow,
    SeqTerm,
    canonical,
    contains,
    free_indices,
    substitute_index,
)
from engine.parser import parse_expr, parse_identity, parse_subscript
from engine.printer import format_expr, print_identity
from engine.subscript import Sub


@pytest.mark.parametrize(
    "text",
    [
        "F[2k] = L[k]*F[k]",
        "F[0] = 0",
        "L[k+m] + (-1)^m*L[k-m] = L[m]*L[k]",
        "F[k+1]*G[s+1] + F[k]*G[s] = G[k+s+1]",
        "2*L[2k] = L[k]^2 + 5*F[k]^2",
        "V[r]*W[k+1] + V[r-1]*W[k] = W[k+r+1] + W[k+r-1]",
    ],
)
def test_print_round_trip(text):
    assert print_identity(parse_identity(text)) == text


def test_double_angle_tree(families):
    identity = parse_identity("F[2k] = L[k]*F[k]", families)
    assert identity.lhs == SeqTerm("F", parse_subscript("2k"))
    assert identity.rhs == Mul(SeqTerm("L", Sub.var("k")), SeqTerm("F", Sub.var("k")))
    assert free_indices(identity) == ("k",)


def test_bounded_sum_binds_its_variable():
    identity = parse_identity(
        "sum(j,0,4n+1, (-1)^(j-1)*binom(4n+1,j)*F[j+k]^4) = 25^n*(F[2n+k+1]^4 - F[2n+k]^4)"
    )
    assert set(identity.free_indices) == {"n", "k"}
    assert contains(identity.lhs, BoundedSum)
    assert contains(identity.lhs, MinusOnePow)
    assert contains(identity.rhs, ExpConst)


def test_symbolic_power_of_a_sequence_term():
    identity = parse_identity("L[k]^n = sum(j, 0, n, binom(n, j)*F[k]^j)", constraints=["n >= 0"])
    assert isinstance(identity.lhs, IndexPow)


def test_arctan():
    identity = parse_identity("arctan(1/F[2k+1]) = arctan(1/F[2k+2]) + arctan(1/F[2k+3])")
    assert contains(identity.lhs, Arctan)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("k*2^j", "2^j*k"),
        ("2(k+n)", "2k+2n"),
        ("-k+3", "-k+3"),
        ("2k+1-k", "k+1"),
    ],
)
def test_subscript_normal_form(text, expected):
    assert parse_subscript(text) == parse_subscript(expected)


def test_subscript_evaluation():
    assert parse_subscript("k*2^j").evaluate({"k": 3, "j": 2}) == 12
    assert parse_subscript("2k-r+1").evaluate({"k": 2, "r": 7}) == -2


@pytest.mark.parametrize(
    "text, position",
    [
        ("F[2k] = L[k]*F[k", 16),
        ("F[2k] = X[k]", 8),
        ("F[2k] = L[k] $ 1", 13),
        ("F[2k] L[k]", 6),
    ],
)
def test_parse_errors_carry_positions(text, position):
    with pytest.raises(IdentityParseError) as info:
        parse_identity(text)
    assert info.value.position == position
    assert info.value.exit_code == 2


def test_summation_variable_clash():
    with pytest.raises(IdentityParseError):
        parse_identity("sum(k, 0, n, F[k]) = F[k]")


def test_constraint_on_unknown_index():
    with pytest.raises(IdentityParseError):
        parse_identity("F[2k] = L[k]*F[k]", constraints=["m even"])


def test_seeds_resolve_through_the_family_table():
    identity = parse_identity("G[k] = G0*F[k-1] + G1*F[k]")
    assert identity.family_names() == ["G", "F"]


def test_unknown_upper_case_symbol():
    with pytest.raises(IdentityParseError, match="unknown symbol"):
        parse_expr("X0 + F[k]")


def test_substitute_index():
    identity = parse_identity("F[2k] = L[k]*F[k]")
    shifted = substitute_index(identity, "k", parse_subscript("k+1"))
    assert print_identity(shifted) == "F[2k+2] = L[k+1]*F[k+1]"


def test_corpus_identities_round_trip(corpus_dir):
    checked = 0
    for corpus in load_corpus(corpus_dir):
        table = family_table(corpus)
        for entry in corpus.entries:
            if not entry.identity:
                continue
            first = parse_identity(entry.identity, table, entry.constraints)
            again = parse_identity(print_identity(first), table, entry.constraints)
            assert again == first, entry.id
            checked += 1
    assert checked > 50


FK = SeqTerm("F", Sub.var("k"))


@pytest.mark.parametrize(
    "expr",
    [
        Mul(Pow(Const(Fraction(-1)), 2), FK),
        Mul(Const(Fraction(1, 5)), FK),
        Mul(Const(Fraction(-1, 5)), FK),
        Mul(Const(Fraction(-2)), FK),
        Add(FK, Const(Fraction(-3))),
        Mul(IndexPow(Const(Fraction(3)), Sub.var("k")), FK),
        Mul(IndexPow(Const(Fraction(-1)), Sub.var("k")), FK),
        Mul(ExpConst(5, Sub.const(2)), FK),
    ],
)
def test_built_expressions_parse_back_to_their_canonical_form(expr):
    assert canonical(expr) != expr
    assert canonical(canonical(expr)) == canonical(expr)
    assert format_expr(canonical(expr)) == format_expr(expr)
    assert parse_expr(format_expr(expr)) == canonical(expr)


def test_built_identity_survives_print_and_parse():
    built = Identity.build(Mul(Const(Fraction(-1, 5)), Mul(Pow(Const(Fraction(-1)), 3), FK)), ZERO)
    assert built.lhs == canonical(built.lhs)
    again = parse_identity(print_identity(built))
    assert again == built
    assert contains(again.lhs, MinusOnePow)
