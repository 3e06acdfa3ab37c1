import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import DegenerateFieldError
from core.models import FamilyDecl, FamilyRole
from engine.quadext import is_rational_square
from engine.seedpoly import SeedPoly
from engine.sequences import SequenceSpec, binet_coefficients, binet_value, lemma_combination
from families.base import build_family, default_family_table

FIBONACCI = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
LUCAS = [2, 1, 3, 4, 7, 11, 18, 29, 47, 76, 123]


def horadam(p: int, q: int) -> SequenceSpec:
    return SequenceSpec("W", p, q, SeedPoly.symbol("W0"), SeedPoly.symbol("W1"))


def test_fibonacci_and_lucas_values(families):
    fib, lucas = families["F"], families["L"]
    assert [fib.term_at(j) for j in range(11)] == FIBONACCI
    assert [lucas.term_at(j) for j in range(11)] == LUCAS


@pytest.mark.parametrize("n", range(0, 11))
def test_negative_indices(families, n):
    sign = (-1) ** (n + 1)
    assert families["F"].term_at(-n) == sign * FIBONACCI[n]
    assert families["L"].term_at(-n) == -sign * LUCAS[n]


def test_pell_numbers(pell_families):
    assert [pell_families["U"].term_at(j) for j in range(7)] == [0, 1, 2, 5, 12, 29, 70]
    assert [pell_families["V"].term_at(j) for j in range(5)] == [2, 2, 6, 14, 34]


def test_symbolic_gibonacci_terms(families):
    g = families["G"]
    g0, g1 = SeedPoly.symbol("G0"), SeedPoly.symbol("G1")
    assert g.term_at(2) == g0 + g1
    assert g.term_at(4) == g0 * 2 + g1 * 3
    assert g.term_at(-1) == g1 - g0
    assert g.is_symbolic


def test_declared_seeds_are_constant():
    spec = build_family(FamilyDecl(name="G", role=FamilyRole.GIBONACCI, seeds=(2, 5)))
    assert spec.term_at(3) == 12
    assert not spec.is_symbolic


def test_gibonacci_rejects_other_parameters():
    with pytest.raises(ValueError):
        build_family(FamilyDecl(name="G", role=FamilyRole.GIBONACCI, p=2))


def test_zero_parameters_are_rejected():
    with pytest.raises(ValueError):
        horadam(0, -1)
    with pytest.raises(ValueError):
        horadam(1, 0)


def test_fibonacci_binet_coefficients(families):
    pair = binet_coefficients(families["F"])
    sqrt5 = families["F"].context.sqrt()
    assert pair.A == SeedPoly.constant(sqrt5.inverse())
    assert pair.B == SeedPoly.constant(-sqrt5.inverse())


def test_degenerate_family_has_no_roots():
    spec = horadam(2, 1)
    assert spec.term_at(4) == SeedPoly.symbol("W1") * 4 - SeedPoly.symbol("W0") * 3
    with pytest.raises(DegenerateFieldError):
        spec.roots()


def _nondegenerate(p: int, q: int) -> bool:
    disc = p * p - 4 * q
    return p != 0 and q != 0 and disc > 0 and not is_rational_square(disc)


def test_binet_and_lemma_on_random_parameters():
    rng = random.Random(17)
    checked = 0
    while checked < 100:
        p, q = rng.randint(-6, 6), rng.randint(-6, 6)
        if not _nondegenerate(p, q):
            continue
        spec = horadam(p, q)
        j = rng.randint(-8, 8)
        assert binet_value(spec, j) == spec.term_at(j)
        lemma_combination(spec, j)
        checked += 1


class TestRecurrence:
    @settings(max_examples=60)
    @given(
        st.integers(min_value=-5, max_value=5).filter(lambda v: v != 0),
        st.integers(min_value=-5, max_value=5).filter(lambda v: v != 0),
        st.integers(min_value=-10, max_value=10),
    )
    def test_recurrence_holds_at_every_index(self, p, q, j):
        spec = horadam(p, q)
        assert spec.term_at(j) == spec.term_at(j - 1) * p - spec.term_at(j - 2) * q

    @settings(max_examples=40)
    @given(st.integers(min_value=-12, max_value=12))
    def test_lucas_is_sum_of_fibonacci_neighbours(self, j):
        table = default_family_table()
        assert table["L"].term_at(j) == table["F"].term_at(j + 1) + table["F"].term_at(j - 1)
