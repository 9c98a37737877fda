import json

import pytest

from coset_forge.cli import main, reproduce_worked_example
from coset_forge.errors import FixtureMismatch
from coset_forge.oracle import BallSpec, brute_coset_ball
from coset_forge.words import format_word, shortlex_key

from conftest import WORKED, W


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_malnormal_true(capsys):
    assert run(capsys, "malnormal", "--gens", "a", "--f", "b")[:2] == (0, "true\n")


def test_stabilizer_worked(capsys):
    code, out, _ = run(capsys, "stabilizer", "--gens", WORKED, "--f", "a")
    assert code == 0
    from coset_forge import fold, parse_words
    got = fold(parse_words(out.strip()), 2)
    assert got == fold(parse_words("b^-2a^3b^2,a^3,b^6"), 2)


def test_enumerate_coset_matches_oracle(capsys):
    code, out, _ = run(capsys, "enumerate", "--automaton", "coset", "--gens", "a", "--f", "b", "--max-len", "3")
    assert code == 0
    want = sorted(brute_coset_ball([W("a")], W("b"), BallSpec(3, 3)), key=shortlex_key)
    assert out.split() == [format_word(w) for w in want]


def test_domain_error_exit_one(capsys):
    code, _, err = run(capsys, "malnormal", "--gens", "a", "--f", "aa")
    assert code == 1 and "representative_in_subgroup" in err


def test_json_error_code(capsys):
    code, out, _ = run(capsys, "malnormal", "--gens", "a", "--f", "a", "--format", "json")
    assert code == 1
    data = json.loads(out)
    assert set(data) == {"error", "code"}


def test_parse_error_exit_two(capsys):
    assert run(capsys, "member", "--gens", "a,q!", "--word", "a")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nosuch"])
    assert exc.value.code == 2


def test_nielsen_text(capsys):
    code, out, _ = run(capsys, "nielsen", "--gens", WORKED)
    assert code == 0
    assert out.splitlines()[:5] == ["h1 = a∘a∘a", "h2 = b∘b∘b", "h3 = ab∘b∘A", "h4 = ba∘a∘aB", "h5 = bab∘b∘AB"]
    assert "k = 104968" in out


def test_json_outputs(capsys):
    code, out, _ = run(capsys, "fold", "--gens", "a^3", "--format", "json")
    assert code == 0 and len(json.loads(out)["edges"]) == 3
    code, out, _ = run(capsys, "solve", "--gens", "a", "--f", "b", "--g", "aba", "--format", "json")
    assert json.loads(out) == {"kind": "singleton", "pairs": [["A", "a"]]}
    code, out, _ = run(capsys, "normal-form", "--gens", "a", "--f", "b", "--g", "aabA", "--format", "json")
    assert json.loads(out) == {"c": "aa", "t": "A"}


def test_dot_output(capsys):
    code, out, _ = run(capsys, "automaton", "cone", "--w1", "a", "--w2", "b", "--format", "dot")
    assert code == 0 and out.startswith("digraph")


def test_minrep_and_essential(capsys):
    assert run(capsys, "minrep", "--gens", "a", "--f", "aaab")[1] == "b\n"
    code, out, _ = run(capsys, "essential", "--gens", "a^2")
    assert out.split("\t")[0] == "a"


def test_verify_k_seed_header_and_determinism(capsys, monkeypatch):
    args = ("verify-k", "--gens", WORKED, "--f", "b", "--samples", "40")
    first = run(capsys, *args)[1]
    assert first.startswith("seed: 0\n")
    assert run(capsys, *args)[1] == first
    monkeypatch.setenv("COSET_FORGE_SEED", "7")
    assert run(capsys, *args)[1].startswith("seed: 7\n")


def test_reproduce_default(tmp_path):
    report = reproduce_worked_example(out_dir=tmp_path)
    assert report["coset_ball_10"] == 1993
    assert sorted(p.name for p in tmp_path.iterdir()) == ["CaC.dot", "gamma_C.dot", "gamma_Ca.dot"]


def test_reproduce_perturbed():
    with pytest.raises(FixtureMismatch, match="basis"):
        reproduce_worked_example("a^4,b^3,ab^2A,ba^3B,bab^2AB")


def test_reproduce_cli_exit_codes(capsys):
    assert run(capsys, "reproduce", "--gens", "a^4,b^3,ab^2A,ba^3B,bab^2AB")[0] == 1
