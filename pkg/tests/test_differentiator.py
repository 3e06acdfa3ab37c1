import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.exceptions import DifferentiationError, PreconditionError
from engine.differentiator import differentiate
from engine.expressions import DerivMinusOne, DerivSeq, contains
from engine.parser import parse_identity
from engine.terms import expand


def test_double_angle_derivative():
    form = differentiate(parse_identity("F[2k] = L[k]*F[k]"), "k")
    assert str(form) == "2*DF[2k] = L[k]*DF[k] + F[k]*DL[k]"


def test_chain_factor_of_affine_subscript():
    form = differentiate(parse_identity("F[3k-1] = F[3k-1]"), "k")
    assert str(form) == "3*DF[3k-1] = 3*DF[3k-1]"


def test_index_absent_from_a_term_gives_zero():
    form = differentiate(parse_identity("F[k+m] = F[k]*L[m]"), "m")
    assert str(form) == "DF[k+m] = F[k]*DL[m]"


def test_product_in_the_subscript():
    form = differentiate(parse_identity("F[k*n] = F[k*n]"), "k")
    assert str(form) == "n*DF[k*n] = n*DF[k*n]"


def test_minus_one_power():
    form = differentiate(parse_identity("(-1)^k*F[k] = F[-k]"), "k")
    assert contains(form.lhs, DerivMinusOne)
    assert any(isinstance(node, DerivSeq) for node in form.markers())


def test_symmetric_identity_gives_symmetric_derivative():
    form = differentiate(parse_identity("F[m] = F[m]"), "m")
    assert form.lhs == form.rhs


def test_index_power_derivative():
    form = differentiate(parse_identity("L[k]^n = L[k]^n", constraints=["n >= 0"]), "k")
    assert str(form) == "n*L[k]^(n-1)*DL[k] = n*L[k]^(n-1)*DL[k]"


@pytest.mark.parametrize(
    "text, wrt",
    [
        ("F[2k] = L[k]*F[k]", "m"),
        ("F[2^k] = F[2^k]", "k"),
        ("sum(j, 0, n, binom(n, j)*F[j]) = F[2n]", "n"),
        ("L[k]^n = L[k]^n", "n"),
        ("F[k] = binom(k, 2)", "k"),
    ],
)
def test_undefined_derivatives(text, wrt):
    with pytest.raises(DifferentiationError):
        differentiate(parse_identity(text), wrt)


def test_differentiation_errors_map_to_precondition_exit_code():
    with pytest.raises(PreconditionError) as info:
        differentiate(parse_identity("F[k] = F[k]"), "n")
    assert info.value.exit_code == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=-6, max_value=6), st.integers(min_value=-6, max_value=6))
def test_derivative_is_linear(a, b):
    parts = differentiate(parse_identity("F[k] = L[2k+1]"), "k")
    du, dv = expand(parts.lhs), expand(parts.rhs)
    form = differentiate(parse_identity(f"{a}*F[k] + {b}*L[2k+1] = F[k] - L[2k+1]"), "k")
    assert expand(form.lhs) == du * a + dv * b
    assert expand(form.rhs) == du - dv


@pytest.mark.parametrize("u, v", [("F[k]", "L[k+1]"), ("G[2k]", "F[k-3]"), ("L[k]^2", "F[3k]")])
def test_product_rule_is_symmetric(u, v):
    form = differentiate(parse_identity(f"{u}*{v} = {v}*{u}"), "k")
    assert form.lhs != form.rhs
    assert expand(form.lhs) == expand(form.rhs)
