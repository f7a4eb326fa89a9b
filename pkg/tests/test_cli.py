import subprocess
import sys

import pytest

from leftctx.cli import run_cli
from leftctx.fixtures import fixture_text
from leftctx.grammar import parse_grammar_text, validate_even_odd_nf

SAMPLE = "S -> A B\nA -> a & < _\nB -> b & < A\n"


@pytest.fixture
def sample(tmp_path):
    p = tmp_path / "sample.gr"
    p.write_text(SAMPLE)
    return str(p)


@pytest.fixture
def four(tmp_path):
    p = tmp_path / "four.gr"
    p.write_text(fixture_text("four"))
    return str(p)


def test_check(sample, capsys):
    assert run_cli(["check", sample, "ab"]) == 0
    assert capsys.readouterr().out == "accept\n"
    assert run_cli(["check", sample, "ba"]) == 1
    assert capsys.readouterr().out == "reject\n"
    assert run_cli(["check", sample, "_"]) == 1


def test_hardest_reparses(capsys):
    assert run_cli(["hardest"]) == 0
    g = parse_grammar_text(capsys.readouterr().out)
    assert len(g.rules) == 35 and len(g.nonterminals) == 14


def test_hardest_literal(capsys):
    assert run_cli(["hardest", "--literal"]) == 0
    assert "F0 -> a c Hl b" in capsys.readouterr().out


def test_normalize_revalidates(four, tmp_path, capsys):
    assert run_cli(["normalize", four]) == 0
    out = tmp_path / "nf.gr"
    out.write_text(capsys.readouterr().out)
    assert validate_even_odd_nf(parse_grammar_text(out.read_text())).ok
    assert run_cli(["validate", str(out), "--form", "even-odd"]) == 0
    assert run_cli(["validate", four, "--form", "even-odd"]) == 1
    assert run_cli(["validate", four, "--form", "binary"]) == 0


def test_encode_alphabet(sample, capsys):
    assert run_cli(["encode", sample, "ab"]) == 0
    code = capsys.readouterr().out.strip()
    assert set(code) <= set("abcde#") and code.count("#") == 2
    assert run_cli(["encode", sample, "_"]) == 0
    assert capsys.readouterr().out == "\n"


def test_verify(sample, capsys):
    assert run_cli(["verify", sample, "--max-len", "2"]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("PASS")
    assert "strings tested  6" in out


def test_enumerate(sample, capsys):
    assert run_cli(["enumerate", sample, "--max-len", "3"]) == 0
    assert capsys.readouterr().out == "ab\n"


def test_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO(SAMPLE))
    assert run_cli(["check", "-", "ab"]) == 0


def test_errors(tmp_path, sample, four, capsys):
    bad = tmp_path / "bad.gr"
    bad.write_text("S -> A\n")
    assert run_cli(["check", str(bad), "a"]) == 2
    assert capsys.readouterr().err.startswith("error:")
    assert run_cli(["check", sample, "abc"]) == 2
    assert run_cli(["check", str(tmp_path / "missing.gr"), "a"]) == 2
    capsys.readouterr()
    assert run_cli(["--max-nonterminals", "3", "normalize", four]) == 2
    assert "more than 3" in capsys.readouterr().err
    assert run_cli(["frobnicate"]) == 2


def test_time_limit(tmp_path, capsys):
    p = tmp_path / "anbn.gr"
    p.write_text(fixture_text("anbn"))
    assert run_cli(["--time-limit", "0.05", "verify", str(p), "--max-len", "2"]) == 2
    assert "time limit" in capsys.readouterr().err


def test_module_entry_point(sample):
    proc = subprocess.run([sys.executable, "-m", "leftctx", "check", sample, "ab"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "accept\n"
