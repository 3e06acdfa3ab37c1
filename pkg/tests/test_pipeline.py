import pytest

from core.exceptions import NoNewIdentityError, PreconditionError, TransformError
from core.models import CheckMode, Component
from engine.parser import parse_identity
from engine.pipeline import check_identity, derive_identity
from engine.printer import print_identity
from families.base import default_family_table


def test_first_component_of_double_angle():
    result, trace = derive_identity(parse_identity("F[2k] = L[k]*F[k]"), "k")
    assert trace.result == "2*L[2k] = L[k]^2 + 5*F[k]^2"
    assert [step.step for step in trace.steps] == ["differentiate", "real part"]
    assert trace.check.ok
    assert trace.check.verdict.proved
    assert trace.parameters == {"p": "1", "q": "-1"}


def test_second_component_with_recombination():
    _, trace = derive_identity(
        parse_identity("F[k+1]^2 + F[k]^2 = F[2k+1]"), "k", component=Component.IMAG, combine="G"
    )
    assert trace.result == "F[k+1]*G[s+1] + F[k]*G[s] = G[k+s+1]"
    assert trace.shift == "s"
    assert [step.step for step in trace.steps] == [
        "differentiate",
        "imaginary part",
        "shift",
        "conjugate swap",
        "combine",
    ]
    assert trace.check.verdict.proved


def test_second_component_without_shift_keeps_root_powers():
    result, trace = derive_identity(parse_identity("F[2k] = L[k]*F[k]"), "k", component=Component.IMAG)
    assert "sigma" in trace.result
    assert trace.check.ok


def test_horadam_first_component():
    result, trace = derive_identity(parse_identity("U[r]*W[k+1] + U[r-1]*W[k] = W[k+r]"), "r")
    assert print_identity(result) == "V[r]*W[k+1] + V[r-1]*W[k] = W[k+r+1] + W[k+r-1]"
    assert trace.check.ok


def test_simplify_step():
    _, trace = derive_identity(parse_identity("F[3k] = F[k]*(5*F[k]^2 + 3*(-1)^k)"), "k", simplify=True)
    assert trace.steps[-1].step == "simplify"
    assert trace.check.ok


def test_trivial_derivation():
    with pytest.raises(NoNewIdentityError, match="no new identity"):
        derive_identity(parse_identity("F[k] = F[k]"), "k")


def test_real_component_rejects_shift_options():
    with pytest.raises(PreconditionError):
        derive_identity(parse_identity("F[2k] = L[k]*F[k]"), "k", combine="G")


def test_real_component_needs_q_minus_one():
    families = default_family_table(3, -2)
    with pytest.raises(TransformError):
        derive_identity(parse_identity("U[2k] = U[k]*V[k]", families), "k")


def test_check_falls_back_to_verification():
    outcome = check_identity(parse_identity("sum(j, 0, n, F[j]) = F[n+2] - 1"), CheckMode.PROVE)
    assert outcome.ok
    assert outcome.mode == CheckMode.VERIFY
    assert outcome.note.startswith("proof not available")


def test_check_degenerate_field_falls_back():
    families = default_family_table(2, 1)
    outcome = check_identity(parse_identity("U[2k] = U[k]*V[k]", families), CheckMode.PROVE)
    assert outcome.ok
    assert outcome.verdict is None
    assert outcome.report.mode == "exact"


def test_check_arctan_numerically():
    identity = parse_identity("arctan(1/F[2k+1]) = arctan(1/F[2k]) - arctan(1/F[2k+2])", constraints=["k >= 1"])
    outcome = check_identity(identity, CheckMode.PROVE, grid={"k": (1, 8)})
    assert outcome.ok
    assert outcome.mode == CheckMode.NUMERIC


def test_refuted_identity():
    outcome = check_identity(parse_identity("F[2k] = L[k]*F[k] + 1"))
    assert not outcome.ok
    assert outcome.verdict is not None


def test_second_component_twice_in_a_row():
    first, trace = derive_identity(
        parse_identity("F[k+1]^2 + F[k]^2 = F[2k+1]"), "k", component=Component.IMAG, combine="G"
    )
    again, second = derive_identity(first, "k", component=Component.IMAG, combine="G")
    assert second.shift == "s2"
    assert second.combine == "G2"
    assert "G2[" in second.result
    assert {"G", "G2"} <= set(again.family_names())
    assert second.check.ok


def test_explicit_shift_must_be_fresh():
    first, _ = derive_identity(parse_identity("F[k+1]^2 + F[k]^2 = F[2k+1]"), "k", component=Component.IMAG, combine="G")
    with pytest.raises(TransformError):
        derive_identity(first, "k", component=Component.IMAG, shift="s", combine="H")


def test_second_component_of_arctan_is_refused():
    identity = parse_identity("arctan(1/F[2k+1]) = arctan(1/F[2k]) - arctan(1/F[2k+2])")
    with pytest.raises(TransformError, match="arctan"):
        derive_identity(identity, "k", component=Component.IMAG)
