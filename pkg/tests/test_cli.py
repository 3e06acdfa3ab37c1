import json

import pytest

from main import main, parse_grid, parse_seeds
from tests.conftest import write_corpus

CORPUS = """
[[entry]]
id = "cassini"
identity = "F[n+1]*F[n-1] - F[n]^2 = (-1)^n"
tags = ["prove", "fibonacci"]

[[entry]]
id = "lucas-squares"
identity = "L[k]^2 = L[2k] + 2*(-1)^k"
tags = ["verify", "lucas"]
"""


def test_parse(capsys):
    assert main(["parse", "F[2k]=L[k]*F[k]"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "F[2k] = L[k]*F[k]"
    assert "free indices: k" in out


def test_derive_first_component(capsys):
    assert main(["derive", "--wrt", "k", "--component", "real", "F[2k]=L[k]*F[k]"]) == 0
    out = capsys.readouterr().out
    assert "result: 2*L[2k] = L[k]^2 + 5*F[k]^2" in out
    assert "PROVED" in out


def test_derive_second_component_as_json(capsys):
    code = main(
        ["derive", "--wrt", "k", "--component", "imag", "--combine", "G", "--format", "json", "F[k+1]^2+F[k]^2=F[2k+1]"]
    )
    assert code == 0
    trace = json.loads(capsys.readouterr().out)
    assert trace["result"] == "F[k+1]*G[s+1] + F[k]*G[s] = G[k+s+1]"
    assert trace["check"]["verdict"]["verdict"] == "proved"
    assert trace["component"] == "imag"


def test_derive_trivial_identity(capsys):
    assert main(["derive", "--wrt", "k", "F[k]=F[k]"]) == 1
    assert "no new identity" in capsys.readouterr().err


def test_prove(capsys):
    assert main(["prove", "F[n+1]*F[n-1] - F[n]^2 = (-1)^n"]) == 0
    assert main(["prove", "F[2k] = L[k]*F[k] + 1"]) == 1
    assert "REFUTED" in capsys.readouterr().out


def test_parse_error(capsys):
    assert main(["prove", "F[2k = L[k]"]) == 2
    assert "position" in capsys.readouterr().err


def test_precondition_error_with_hint(capsys):
    assert main(["prove", "sum(j, 0, n, F[j]) = F[n+2] - 1"]) == 3
    err = capsys.readouterr().err
    assert "hint: use verify" in err


def test_verify(capsys):
    assert main(["verify", "--grid", "n=0..6", "sum(j, 0, n, F[j]) = F[n+2] - 1"]) == 0
    report = json.loads(_run_json(capsys, ["verify", "--grid", "k=-3..3", "F[2k] = L[k]*F[k] + F[k]"], 1))
    assert report["counterexample"]["point"] == {"k": -3}


def test_verify_with_seed(capsys):
    assert main(["verify", "--seed", "G0=2", "--seed", "G1=5", "G[k] = G0*F[k-1] + G1*F[k]"]) == 0


def test_horadam_parameters(capsys):
    assert main(["prove", "--p", "3", "--q", "-2", "U[2k] = U[k]*V[k]"]) == 0
    assert "p=3, q=-2" in capsys.readouterr().out


def test_input_file_with_constraints(tmp_path, capsys):
    path = tmp_path / "identity.txt"
    path.write_text("# squares of Lucas numbers\nL[k]^2 = L[2k] + 2\nk even\n", encoding="utf-8")
    assert main(["prove", "--input", str(path)]) == 0


def test_missing_input_file():
    assert main(["prove", "--input", "/nonexistent/identity.txt"]) == 3


def test_corpus_run(tmp_path, capsys):
    write_corpus(tmp_path, "small.toml", CORPUS)
    assert main(["corpus", "--corpus-dir", str(tmp_path)]) == 0
    assert "2/2 entries passed" in capsys.readouterr().out


def test_corpus_dir_from_environment(tmp_path, monkeypatch, capsys):
    write_corpus(tmp_path, "small.toml", CORPUS)
    monkeypatch.setenv("BINETLAB_CORPUS_DIR", str(tmp_path))
    assert main(["corpus", "--tag", "lucas"]) == 0
    assert "1/1 entries passed" in capsys.readouterr().out


def test_corpus_without_matches(tmp_path):
    write_corpus(tmp_path, "small.toml", CORPUS)
    assert main(["corpus", "--corpus-dir", str(tmp_path), "--tag", "horadam"]) == 4


def test_malformed_corpus(tmp_path):
    write_corpus(tmp_path, "bad.toml", "[[entry]\n")
    assert main(["corpus", "--corpus-dir", str(tmp_path)]) == 2


def test_invalid_arguments():
    with pytest.raises(SystemExit) as info:
        main(["derive", "--wrt", "k", "--component", "imag", "--q", "1", "U[2k] = U[k]*V[k]"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["verify", "--grid", "k=1-3", "F[k] = F[k]"])


def test_grid_and_seed_arguments():
    assert parse_grid(["k=-3..3,n=0..4", "m=1..2"]) == {"k": (-3, 3), "n": (0, 4), "m": (1, 2)}
    assert parse_seeds(["G0=2", "W1=-7"]) == {"G0": 2, "W1": -7}


def _run_json(capsys, argv, expected_code):
    capsys.readouterr()
    assert main([*argv, "--format", "json"]) == expected_code
    return capsys.readouterr().out
