import pytest

from core.exceptions import CorpusError, NoEntriesError
from core.models import CheckMode, EntryKind, Verdict
from engine.corpus import family_table, load_corpus, load_corpus_file, run_corpus, run_entry, select_entries
from tests.conftest import write_corpus
from utils.reporting import to_json

SMALL = """
[families.Z]
role = "horadam"

[[entry]]
id = "z-recurrence"
identity = "Z[k+1] = p*Z[k] - q*Z[k-1]"
tags = ["prove", "horadam"]
samples = [{ p = 2, q = -1 }, { p = 1, q = -2 }]

[[entry]]
id = "cassini"
identity = "F[n+1]*F[n-1] - F[n]^2 = (-1)^n"
tags = ["prove", "fibonacci"]

[[entry]]
id = "partial-sums"
identity = "sum(j, 0, n, F[j]) = F[n+2] - 1"
tags = ["verify", "fibonacci", "sum"]

[[entry]]
id = "wrong"
identity = "F[2k] = L[k]*F[k] + 1"
tags = ["prove", "broken"]

[[entry]]
id = "double-angle-derived"
kind = "derivation"
derivation = { source = "double-angle", wrt = "k", component = "real", target = "double-angle-real" }
tags = ["derivation"]

[[entry]]
id = "double-angle"
identity = "F[2k] = L[k]*F[k]"
tags = ["prove"]

[[entry]]
id = "double-angle-real"
identity = "2*L[2k] = L[k]^2 + 5*F[k]^2"
tags = ["prove"]

[[entry]]
id = "lucas-rules"
kind = "derivative-rules"
family = "L"
grid = { j = [-3, 3] }
tags = ["derivative-rules"]
"""


@pytest.fixture
def small_corpus(tmp_path):
    write_corpus(tmp_path, "small.toml", SMALL)
    return tmp_path


def test_load_shipped_corpus(corpus_dir):
    files = load_corpus(corpus_dir)
    assert len(files) == 5
    ids = [entry.id for corpus in files for entry in corpus.entries]
    assert len(ids) == len(set(ids))
    assert len(ids) > 100


def test_shipped_derivations_reference_known_entries(corpus_dir):
    files = load_corpus(corpus_dir)
    ids = {entry.id for corpus in files for entry in corpus.entries}
    for corpus in files:
        for entry in corpus.entries:
            if entry.kind == EntryKind.DERIVATION:
                assert entry.derivation.source in ids, entry.id
                assert entry.derivation.target is None or entry.derivation.target in ids, entry.id


def test_declared_families(small_corpus):
    (corpus,) = load_corpus(small_corpus)
    assert corpus.families["Z"].name == "Z"
    table = family_table(corpus, corpus.entries[0].samples[1])
    assert table["Z"].parameters == (1, -2)
    assert table["U"].parameters == (1, -2)


def test_duplicate_ids(tmp_path):
    write_corpus(tmp_path, "a.toml", '[[entry]]\nid = "x"\nidentity = "F[0] = 0"\n')
    write_corpus(tmp_path, "b.toml", '[[entry]]\nid = "x"\nidentity = "F[1] = 1"\n')
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(tmp_path)


def test_invalid_toml(tmp_path):
    path = write_corpus(tmp_path, "bad.toml", "[[entry]\nid = 1")
    with pytest.raises(CorpusError):
        load_corpus_file(path)


def test_identity_entry_without_identity(tmp_path):
    path = write_corpus(tmp_path, "bad.toml", '[[entry]]\nid = "x"\n')
    with pytest.raises(CorpusError):
        load_corpus_file(path)


def test_missing_directory(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "missing")


def test_tag_filter(small_corpus):
    files = load_corpus(small_corpus)
    assert [entry.id for _, entry in select_entries(files, ["fibonacci"])] == ["cassini", "partial-sums"]
    assert [entry.id for _, entry in select_entries(files, ["fibonacci", "sum"])] == ["partial-sums"]


def test_no_matching_entries(small_corpus):
    with pytest.raises(NoEntriesError) as info:
        run_corpus(small_corpus, tags=["nothing-here"])
    assert info.value.exit_code == 4


def test_run_small_corpus(small_corpus):
    summary = run_corpus(small_corpus)
    results = {result.id: result for result in summary.entries}
    assert [result.id for result in summary.entries] == sorted(results)
    assert results["cassini"].status == Verdict.PROVED
    assert results["partial-sums"].status == Verdict.PASSED
    assert results["wrong"].status == Verdict.REFUTED
    assert results["double-angle-derived"].derived == "2*L[2k] = L[k]^2 + 5*F[k]^2"
    assert results["double-angle-derived"].ok
    assert results["lucas-rules"].mode == CheckMode.NUMERIC
    assert results["lucas-rules"].ok
    assert summary.failed == 1
    assert not summary.ok


def test_degenerate_sample_is_verified_instead(small_corpus):
    files = load_corpus(small_corpus)
    corpus, entry = select_entries(files, ["horadam"])[0]
    result = run_entry(corpus, entry)
    assert result.status == Verdict.PASSED
    assert len(result.verdicts) == 1
    assert len(result.reports) == 1
    assert any("p=1, q=-2" in note for note in result.notes)


def test_runs_are_deterministic(corpus_dir):
    first = run_corpus(corpus_dir, tags=["jennings"], max_workers=1)
    second = run_corpus(corpus_dir, tags=["jennings"], max_workers=4)
    assert to_json(first, include_timing=False) == to_json(second, include_timing=False)


def test_shipped_corpus_passes(corpus_dir):
    summary = run_corpus(corpus_dir)
    failures = [(result.id, result.status.value, result.error) for result in summary.entries if not result.ok]
    assert failures == []
    assert summary.ok


def test_sampled_tag_uses_configured_parameters(tmp_path):
    write_corpus(
        tmp_path,
        "sampled.toml",
        '[[entry]]\nid = "u-addition"\nidentity = "U[r]*W[k+1] - q*U[r-1]*W[k] = W[k+r]"\ntags = ["prove", "sampled"]\n',
    )
    (corpus,) = load_corpus(tmp_path)
    result = run_entry(corpus, corpus.entries[0])
    assert result.ok
    assert len(result.verdicts) + len(result.reports) >= 6


def test_two_gibonacci_product_sum(corpus_dir):
    files = load_corpus(corpus_dir)
    index = {entry.id: (corpus, entry) for corpus in files for entry in corpus.entries}
    corpus, entry = index["two-gibonacci-product-sum"]
    result = run_entry(corpus, entry)
    assert result.status == Verdict.PASSED
    assert result.reports[0].failed == 0


def test_broken_entry_is_recorded_as_error(small_corpus, monkeypatch):
    import engine.corpus as runner

    real_check = runner.check_identity

    def check(identity, *args, **kwargs):
        if kwargs.get("identity_id") == "cassini":
            raise RuntimeError("Binet difference check failed for F at j=3")
        return real_check(identity, *args, **kwargs)

    monkeypatch.setattr(runner, "check_identity", check)
    summary = run_corpus(small_corpus, max_workers=1)
    results = {result.id: result for result in summary.entries}
    assert results["cassini"].status == Verdict.ERROR
    assert results["cassini"].error.startswith("RuntimeError")
    assert results["partial-sums"].status == Verdict.PASSED


def test_invalid_family_declaration_is_recorded_as_error(tmp_path):
    write_corpus(
        tmp_path,
        "bad_family.toml",
        '[families.Y]\nrole = "gibonacci"\np = 2\n\n[[entry]]\nid = "y"\nidentity = "Y[k+1] = Y[k] + Y[k-1]"\ntags = ["prove"]\n',
    )
    (corpus,) = load_corpus(tmp_path)
    result = run_entry(corpus, corpus.entries[0])
    assert result.status == Verdict.ERROR
    assert "gibonacci" in result.error
