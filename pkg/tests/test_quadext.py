import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from core.exceptions import DegenerateFieldError, FieldContextError
from engine.quadext import QuadContext, QuadExt, is_rational_square, quad_conj, quad_inv, quad_mul

FIVE = QuadContext(5)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)
elements = st.builds(lambda a, b: QuadExt(a, b, FIVE), rationals, rationals)


class TestFieldAxioms:
    @given(elements, elements)
    def test_addition_commutes(self, x, y):
        assert x + y == y + x

    @given(elements, elements, elements)
    def test_multiplication_associates(self, x, y, z):
        assert (x * y) * z == x * (y * z)

    @given(elements, elements, elements)
    def test_distributive_law(self, x, y, z):
        assert x * (y + z) == x * y + x * z

    @given(elements)
    def test_additive_inverse(self, x):
        assert x + (-x) == 0

    @given(elements)
    def test_multiplicative_inverse(self, x):
        assume(x)
        assert x * x.inverse() == 1

    @given(elements, elements)
    def test_conjugation_is_multiplicative(self, x, y):
        assert (x * y).conj() == x.conj() * y.conj()

    @given(elements)
    def test_norm_is_product_with_conjugate(self, x):
        assert x * x.conj() == x.norm()

    @given(elements, st.integers(min_value=-6, max_value=6))
    def test_power_matches_repeated_product(self, x, n):
        assume(x or n >= 0)
        expected = QuadExt(1, 0, FIVE)
        for _ in range(abs(n)):
            expected = expected * x
        if n < 0:
            expected = expected.inverse()
        assert x ** n == expected


def test_conjugation_over_many_random_pairs():
    rng = random.Random(20240611)
    for _ in range(10_000):
        x = QuadExt(Fraction(rng.randint(-99, 99), rng.randint(1, 9)), Fraction(rng.randint(-99, 99), rng.randint(1, 9)), FIVE)
        y = QuadExt(Fraction(rng.randint(-99, 99), rng.randint(1, 9)), Fraction(rng.randint(-99, 99), rng.randint(1, 9)), FIVE)
        assert quad_conj(quad_mul(x, y)) == quad_mul(quad_conj(x), quad_conj(y))


def test_golden_ratio_roots():
    tau, sigma = FIVE.roots(1)
    assert tau + sigma == 1
    assert tau * sigma == -1
    assert tau - sigma == FIVE.sqrt()
    assert tau * tau == tau + 1


def test_sqrt_squares_to_discriminant():
    assert FIVE.sqrt() * FIVE.sqrt() == 5


def test_inverse_of_golden_ratio():
    tau, sigma = FIVE.roots(1)
    assert quad_inv(tau) == -sigma


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        quad_inv(QuadExt(0, 0, FIVE))


def test_rational_elements_need_no_context():
    x = QuadExt(Fraction(3, 4))
    assert x.is_rational
    assert x * FIVE.sqrt() == FIVE.element(0, Fraction(3, 4))


def test_radical_without_context_is_rejected():
    with pytest.raises(FieldContextError):
        QuadExt(1, 1)


def test_mixed_contexts_are_rejected():
    with pytest.raises(FieldContextError):
        FIVE.sqrt() + QuadContext(8).sqrt()


@pytest.mark.parametrize("p, q", [(2, 1), (1, 1), (4, 3), (3, 2)])
def test_degenerate_parameters(p, q):
    with pytest.raises(DegenerateFieldError):
        QuadContext.for_parameters(p, q)


def test_degenerate_field_is_a_precondition_error():
    from core.exceptions import PreconditionError

    with pytest.raises(PreconditionError):
        QuadContext(Fraction(9, 4))


def test_is_rational_square():
    assert is_rational_square(Fraction(9, 4))
    assert not is_rational_square(Fraction(5))
    assert not is_rational_square(Fraction(-4))


def test_to_mpmath():
    tau, _ = FIVE.roots(1)
    with mpmath.workdps(30):
        assert abs(tau.to_mpmath() - (1 + mpmath.sqrt(5)) / 2) < mpmath.mpf(10) ** -28


def test_str():
    assert str(FIVE.element(Fraction(1, 2), Fraction(1, 2))) == "1/2 + 1/2*sqrtD"
    assert str(FIVE.element(0, -1)) == "-sqrtD"
    assert str(QuadExt(7)) == "7"
