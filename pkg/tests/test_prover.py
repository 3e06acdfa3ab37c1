import random

import pytest

from core.exceptions import DegenerateFieldError, NonCanonicalError, PreconditionError
from core.models import Verdict
from engine.expressions import Subtract
from engine.parser import parse_identity
from engine.prover import CanonicalForm, canonicalize, parity_cases, parity_indices, prime_factors, prove_identity
from families.base import default_family_table

PROVABLE = [
    "F[2k] = L[k]*F[k]",
    "5*F[k]^2 - L[k]^2 = (-1)^(k-1)*4",
    "F[n+1]*F[n-1] - F[n]^2 = (-1)^n",
    "L[k+m] + (-1)^m*L[k-m] = L[m]*L[k]",
    "F[k]*F[r+1] - F[k+1]*F[r] = (-1)^r*F[k-r]",
    "F[k+1]*G[s+1] + F[k]*G[s] = G[k+s+1]",
    "G[k] = G0*F[k-1] + G1*F[k]",
    "2*L[2k] = L[k]^2 + 5*F[k]^2",
    "sum(j, 0, 3, F[k+j]) = F[k+5] - F[k+1]",
    "F[3k] = F[k]*(5*F[k]^2 + 3*(-1)^k)",
]


@pytest.mark.parametrize("text", PROVABLE)
def test_proves_classical_identities(text):
    verdict = prove_identity(parse_identity(text))
    assert verdict.verdict == Verdict.PROVED
    assert all(case.zero for case in verdict.cases)


def test_parity_cases_of_double_angle():
    identity = parse_identity("F[2k] = L[k]*F[k]")
    form = canonicalize(Subtract(identity.rhs, identity.lhs), identity)
    assert len(form.cases) == 2
    verdict = prove_identity(identity)
    assert sorted(case.signs["k"] for case in verdict.cases) == [-1, 1]


def test_even_constraint_leaves_one_parity_case():
    identity = parse_identity("L[k]^2 = L[2k] + 2", constraints=["k even"])
    assert parity_cases(identity, parity_indices(identity, identity.families["L"].q)) == [{"k": 1}]
    assert prove_identity(identity).proved
    assert not prove_identity(parse_identity("L[k]^2 = L[2k] + 2")).proved


def test_every_parity_case_is_needed():
    identity = parse_identity("L[k]^2 = L[2k] + 2")
    form = canonicalize(Subtract(identity.rhs, identity.lhs), identity)
    assert {signs: poly.is_zero for signs, poly in form.cases.items()} == {(("k", 1),): True, (("k", -1),): False}
    even_only = CanonicalForm({(("k", 1),): form.cases[(("k", 1),)]}, form.denominators)
    assert even_only.is_zero
    assert not form.is_zero
    verdict = prove_identity(identity)
    assert not verdict.proved
    assert [case.signs for case in verdict.cases if not case.zero] == [{"k": -1}]


def test_perturbed_identity_is_refuted():
    verdict = prove_identity(parse_identity("F[2k] = L[k]*F[k] + 1"))
    assert verdict.verdict == Verdict.REFUTED
    assert any(not case.zero and case.residue != "0" for case in verdict.cases)


def test_perturbations_are_refuted():
    rng = random.Random(5)
    for _ in range(100):
        text = rng.choice(PROVABLE[:8])
        lhs, rhs = text.split(" = ")
        shift = rng.randint(-3, 3)
        scale = rng.randint(1, 9)
        perturbed = f"{lhs} = {rhs} + {scale}*F[k+{shift}]" if shift >= 0 else f"{lhs} = {rhs} + {scale}*F[k{shift}]"
        identity = parse_identity(perturbed)
        assert not prove_identity(identity).proved, perturbed


def test_division_records_side_condition():
    verdict = prove_identity(parse_identity("F[2k]/F[k] = L[k]"))
    assert verdict.proved
    assert verdict.side_conditions == ["F[k] != 0"]


def test_horadam_recurrence_with_symbolic_seeds():
    families = default_family_table(3, -2)
    assert prove_identity(parse_identity("W[k+1] = p*W[k] - q*W[k-1]", families)).proved
    assert prove_identity(parse_identity("U[2k] = U[k]*V[k]", families)).proved


def test_positive_q_uses_only_explicit_signs():
    families = default_family_table(3, 1)
    identity = parse_identity("V[k]^2 - 5*U[k]^2 = 4", families)
    assert parity_indices(identity, families["U"].q) == []
    assert prove_identity(identity).proved
    signed = parse_identity("(-1)^k*U[k+1] = (-1)^k*U[k+1]", families)
    assert parity_indices(signed, families["U"].q) == ["k"]


@pytest.mark.parametrize(
    "text",
    [
        "sum(j, 0, n, F[j]) = F[n+2] - 1",
        "arctan(1/F[2k+1]) = arctan(1/F[2k+2]) + arctan(1/F[2k+3])",
        "L[k]^n = L[k]^n",
        "F[k*n] = F[k*n]",
    ],
)
def test_non_canonical_forms(text):
    with pytest.raises(NonCanonicalError):
        prove_identity(parse_identity(text))


def test_degenerate_field_is_a_precondition():
    families = default_family_table(2, 1)
    with pytest.raises(DegenerateFieldError) as info:
        prove_identity(parse_identity("U[2k] = U[k]*V[k]", families))
    assert isinstance(info.value, PreconditionError)


def test_prime_factors():
    assert prime_factors(360) == {2: 3, 3: 2, 5: 1}
    assert prime_factors(1) == {}
