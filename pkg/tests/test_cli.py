from __future__ import annotations

import json

import pytest

from helpers import MIN2, NOT2, PROJ2
from maltsev_lab import format_algebra
from maltsev_lab.cli import run_cli


@pytest.fixture
def files(tmp_path):
    paths = {}
    for alg in (MIN2, PROJ2, NOT2):
        p = tmp_path / f"{alg.name}.alg"
        p.write_text(format_algebra(alg))
        paths[alg.name] = str(p)
    dg = tmp_path / "g.dg"
    dg.write_text("digraph 4\n0 1\n1 2\n2 0\n0 3\n3 0\n")
    paths["digraph"] = str(dg)
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra m\nsize 2\nop f 2\n0 0 0 2\n")
    paths["bad"] = str(bad)
    return paths


def test_check_qwnu_yes(files, capsys):
    assert run_cli(["check", "qwnu", "--k", "3", files["min2"], "--witness"]) == 0
    out = capsys.readouterr().out
    assert "answer: yes" in out and "witness" in out


def test_check_qwnu_no(files, capsys):
    assert run_cli(["check", "qwnu", "--k", "2", files["proj2"]]) == 1
    out = capsys.readouterr().out
    assert "refuted at: r=0 s=1" in out


def test_check_qwnu_k_one_usage_error(files):
    assert run_cli(["check", "qwnu", "--k", "1", files["min2"]]) == 2


def test_check_wnu_idemp_precondition(files):
    assert run_cli(["check", "wnu-idemp", "--k", "2", files["not2"]]) == 2


def test_parse_error_exit(files):
    assert run_cli(["check", "qwnu", "--k", "2", files["bad"]]) == 2


def test_missing_file_exit():
    assert run_cli(["check", "qwnu", "--k", "2", "/nonexistent.alg"]) == 2


def test_budget_exit(files):
    assert run_cli(["check", "qwnu", "--k", "2", files["min2"], "--budget", "1"]) == 3


def test_budget_env_override(files, monkeypatch):
    monkeypatch.setenv("MALTSEV_LAB_BUDGET", "1")
    assert run_cli(["check", "qwnu", "--k", "2", files["min2"]]) == 3


def test_usage_error():
    assert run_cli(["check", "qwnu"]) == 2
    assert run_cli(["frobnicate"]) == 2


def test_json_and_text_decisions_agree(files, capsys):
    cases = [
        (["check", "qwnu", "--k", "3", files["min2"]], 0),
        (["check", "qwnu", "--k", "2", files["proj2"]], 1),
        (["check", "qtaylor", files["not2"]], 1),
        (["check", "nlocal", "--n", "2", "--k", "2", files["min2"]], 0),
    ]
    for argv, expected in cases:
        assert run_cli(argv) == expected
        text = capsys.readouterr().out
        assert run_cli(argv + ["--json"]) == expected
        data = json.loads(capsys.readouterr().out)
        assert (data["answer"] == "yes") == (expected == 0)
        assert ("answer: yes" in text) == (expected == 0)


def test_oracle_commands(files, capsys):
    assert run_cli(["oracle", "qwnu", "--k", "3", files["min2"], "--witness"]) == 0
    assert "found" in capsys.readouterr().out
    assert run_cli(["oracle", "qwnu", "--k", "2", files["proj2"]]) == 1
    assert run_cli(["oracle", "qsiggers", files["not2"]]) == 1
    capsys.readouterr()
    assert run_cli(["oracle", "qsiggers", files["min2"], "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["found"] is not None


def test_image_command(files, capsys):
    assert run_cli(["image", files["not2"], "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["alpha"] == [0, 1] and data["image"] == [0, 1]


def test_gen_roundtrip(capsys):
    assert run_cli(["gen", "--seed", "5", "--size", "3", "--arity", "2,1"]) == 0
    first = capsys.readouterr().out
    assert run_cli(["gen", "--seed", "5", "--size", "3", "--arity", "2,1"]) == 0
    assert capsys.readouterr().out == first
    from maltsev_lab import parse_algebra

    alg = parse_algebra(first)
    assert alg.size == 3 and [op.arity for op in alg.ops] == [2, 1]


def test_gen_idempotent(capsys):
    assert run_cli(["gen", "--seed", "5", "--size", "3", "--arity", "2", "--idempotent"]) == 0
    from maltsev_lab import is_idempotent, parse_algebra

    assert is_idempotent(parse_algebra(capsys.readouterr().out))


def test_digraph_commands(files, capsys):
    assert run_cli(["digraph", "smooth", files["digraph"]]) == 0
    assert run_cli(["digraph", "loop", files["digraph"]]) == 1
    assert run_cli(["digraph", "length-one", files["digraph"], "--witness"]) == 0
    out = capsys.readouterr().out
    assert "walk from" in out
