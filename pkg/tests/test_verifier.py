import random
from fractions import Fraction

import pytest

from core.exceptions import EmptyGridError, PreconditionError
from engine.corpus import family_table, load_corpus
from engine.parser import parse_identity
from engine.prover import prove_identity
from engine.verifier import build_grid, generalized_binomial, grid_points, verify_instances
from families.base import default_family_table


def test_bounded_sum_on_default_grid():
    report = verify_instances(parse_identity("sum(j, 0, n, F[j]) = F[n+2] - 1"))
    assert report.ok
    assert report.grid == {"n": (0, 4)}
    assert report.passed == 5


def test_hoggatt_bicknell_chain():
    identity = parse_identity(
        "sum(j,0,4n+1, (-1)^(j-1)*binom(4n+1,j)*F[j+k]^4) = 25^n*(F[2n+k+1]^4 - F[2n+k]^4)"
    )
    report = verify_instances(identity, grid={"n": (0, 2), "k": (-3, 3)})
    assert report.ok
    assert report.cases == 21


def test_first_counterexample_in_lexicographic_order():
    report = verify_instances(parse_identity("F[2k] = L[k]*F[k] + F[k]"), grid={"k": (-2, 2)})
    assert not report.ok
    assert report.counterexample.point == {"k": -2}
    assert report.failed == 4


def test_vanishing_denominators_are_skipped():
    report = verify_instances(parse_identity("F[2k]/F[k] = L[k]"), grid={"k": (-3, 3)})
    assert report.ok
    assert report.skipped == 1
    assert report.skipped_points[0].point == {"k": 0}


def test_constraints_filter_the_grid():
    identity = parse_identity("L[k]^2 = L[2k] + 2", constraints=["k even"])
    report = verify_instances(identity, grid={"k": (-4, 4)})
    assert report.ok
    assert report.cases == 5


def test_empty_grid():
    identity = parse_identity("L[k]^2 = L[2k] + 2", constraints=["k even"])
    with pytest.raises(EmptyGridError):
        verify_instances(identity, grid={"k": (1, 1)})


def test_symbolic_seeds_stay_symbolic():
    report = verify_instances(parse_identity("G[k+2] = G[k+1] + G[k]"))
    assert report.ok
    assert "G0" not in report.parameters


def test_seed_bindings_are_reported():
    report = verify_instances(parse_identity("G[k] = G0*F[k-1] + G1*F[k]"), seeds={"G0": 2, "G1": 5})
    assert report.ok
    assert report.parameters["G0"] == "2"


def test_degenerate_parameters_are_verified_by_recurrence():
    families = default_family_table(2, 1)
    report = verify_instances(parse_identity("U[2k] = U[k]*V[k]", families), grid={"k": (-4, 4)})
    assert report.ok
    assert report.parameters == {"p": "2", "q": "1"}


def test_symbolic_power():
    identity = parse_identity("L[k]^n = L[k]^n*F[1]", constraints=["n >= 0"])
    report = verify_instances(identity, grid={"k": (-2, 2), "n": (0, 3)})
    assert report.ok


def test_exponential_subscript():
    identity = parse_identity("F[k*2^(j+1)] = F[k*2^j]*L[k*2^j]", constraints=["j >= 0"])
    report = verify_instances(identity, grid={"k": (-2, 2), "j": (0, 2)})
    assert report.ok


def test_grid_defaults_and_points():
    identity = parse_identity("sum(j, 0, n, F[j+k]) = F[n+k+2] - F[k+1]")
    grid = build_grid(identity, {"k": (0, 1)})
    assert grid == {"n": (0, 4), "k": (0, 1)}
    points = grid_points(identity, grid)
    assert points[0] == {"n": 0, "k": 0}
    assert points[1] == {"n": 0, "k": 1}
    assert len(points) == 10


@pytest.mark.parametrize(
    "n, j, expected",
    [(5, 2, 10), (5, 6, 0), (3, -1, 0), (-1, 3, -1), (-2, 2, 3)],
)
def test_generalized_binomial(n, j, expected):
    assert generalized_binomial(n, j) == Fraction(expected)


def test_corrupted_hoggatt_bicknell_chain_is_refuted():
    identity = parse_identity(
        "sum(j,0,4n+1, (-1)^(j-1)*binom(4n+1,j)*F[j+k]^4) = 24^n*(F[2n+k+1]^4 - F[2n+k]^4)"
    )
    report = verify_instances(identity, grid={"n": (0, 2), "k": (-3, 3)})
    assert not report.ok
    assert report.counterexample.point == {"n": 1, "k": -3}
    # n = 0 and F[2n+k+1] = F[2n+k] = 1 still balance
    assert report.failed == 12


SUM_FREE = [
    "F[2k] = L[k]*F[k]",
    "F[n+1]*F[n-1] - F[n]^2 = (-1)^n",
    "L[k+m] + (-1)^m*L[k-m] = L[m]*L[k]",
    "2*L[2k] = L[k]^2 + 5*F[k]^2",
    "F[k+1]*G[s+1] + F[k]*G[s] = G[k+s+1]",
]


def test_random_perturbations_are_falsified():
    rng = random.Random(11)
    for _ in range(100):
        lhs, rhs = rng.choice(SUM_FREE).split(" = ")
        term = f"{rng.randint(1, 9)}*{rng.choice('FL')}[k+{rng.randint(0, 3)}]"
        perturbed = f"{lhs} = {rhs} + {term}" if rng.random() < 0.5 else f"{lhs} - {term} = {rhs}"
        report = verify_instances(parse_identity(perturbed))
        assert not report.ok, perturbed
        assert report.counterexample is not None


def test_prover_and_verifier_agree_on_the_corpus(corpus_dir):
    compared = 0
    for corpus in load_corpus(corpus_dir):
        table = family_table(corpus)
        for entry in corpus.entries:
            if not entry.identity or "sum(" in entry.identity:
                continue
            identity = parse_identity(entry.identity, table, entry.constraints)
            if len(identity.free_indices) > 3:
                continue
            try:
                verdict = prove_identity(identity, identity_id=entry.id)
                report = verify_instances(identity, grid={name: (-5, 5) for name in identity.free_indices})
            except PreconditionError:
                continue
            assert verdict.proved == report.ok, entry.id
            compared += 1
    assert compared > 20
