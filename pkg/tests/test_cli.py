import json
import shutil
import subprocess
import sys

import pytest

from conftest import CORPUS, NS, doc
from onto_tdd.cli import main

ONTO = doc("SubClassOf(:A :B)\nSubClassOf(:B :C)\nDeclaration(Class(:D))\nClassAssertion(:A :a)")


@pytest.fixture
def files(tmp_path):
    o = tmp_path / "o.ofn"
    o.write_text(ONTO, encoding="utf-8")
    good = tmp_path / "good.suite"
    good.write_text("SubClassOf(:A :C)\nSubClassOf(:C :A) @expect fail\n", encoding="utf-8")
    bad = tmp_path / "bad.suite"
    bad.write_text("SubClassOf(:A :D)\n", encoding="utf-8")
    return o, good, bad


def run(*argv):
    return main([str(a) for a in argv])


def test_exit_codes_of_test(files, tmp_path, capsys):
    o, good, bad = files
    assert run("test", o, good) == 0
    assert "4/4 expectations met" in capsys.readouterr().out
    assert run("test", o, bad, "--strategy", "tbox") == 1
    broken = tmp_path / "broken.suite"
    broken.write_text("SubClassOf(:A\n", encoding="utf-8")
    assert run("test", o, broken) == 2
    assert run("test", tmp_path / "nope.ofn", good) == 2
    err = capsys.readouterr().err
    assert "broken.suite:1:" in err


def test_json_report(files, tmp_path):
    o, good, _ = files
    out = tmp_path / "r.json"
    assert run("test", o, good, "--strategy", "abox", "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["passed"] and [r["test_id"] for r in data["results"]] == ["T'_cs", "T'_cs"]


def test_unsupported_suite_entry_is_bad_input(files, tmp_path):
    o, _, _ = files
    s = tmp_path / "s.suite"
    s.write_text("SubClassOf(ObjectSomeValuesFrom(:r :A) :B)\n", encoding="utf-8")
    assert run("test", o, s) == 2


def test_cycle(files, tmp_path, capsys):
    o, good, _ = files
    assert run("cycle", o, "SubClassOf(:A :C)") == 1  # already entailed
    assert run("cycle", o, "SubClassOf(:C :Z)") == 1  # missing vocabulary
    assert run("cycle", o, "SubClassOf(:D :C)", "--suite", good, "--write") == 0
    assert "SubClassOf(:D :C)" in o.read_text()
    assert run("cycle", o, "SubClassOf(:C :Z)", "--policy", "create") == 0
    assert run("cycle", o, "SubClassOf(:A") == 2
    assert "8. status         success" in capsys.readouterr().out


def test_regress(files, tmp_path):
    o, good, _ = files
    assert run("regress", o, good) == 0
    o.write_text(ONTO.replace("SubClassOf(:B :C)", "Declaration(Class(:C))"), encoding="utf-8")
    assert run("regress", o, good) == 1


def test_query_and_classify(files, tmp_path, capsys):
    o, _, _ = files
    assert run("query", o, "SubClassOf(?x :C)") == 0
    assert capsys.readouterr().out.split() == ["A", "B"]
    assert run("query", o, "SubClassOf(:A") == 2
    assert run("classify", o) == 0
    assert "A ⊑ B" in capsys.readouterr().out
    bad = tmp_path / "x.ofn"
    bad.write_text(doc("ClassAssertion(owl:Nothing :a)"), encoding="utf-8")
    assert run("classify", bad) == 1
    assert run("query", bad, "SubClassOf(?x owl:Thing)") == 1


def test_parse_and_catalogue(files, tmp_path, capsys):
    o, _, _ = files
    assert run("parse", o) == 0
    assert "SubClassOf(:A :B)" in capsys.readouterr().out
    out = tmp_path / "cat.md"
    assert run("catalogue", "--out", out) == 0
    assert out.read_text().count("\n| `T") == 37


def test_bench_cli(tmp_path, capsys):
    d = tmp_path / "c"
    assert run("bench", d, "--synthesize", "60,120", "--repetitions", "1", "--buckets", "100",
               "--tests", "4", "--out", tmp_path / "out") == 0
    assert (tmp_path / "out" / "bench.csv").exists()
    assert run("bench", tmp_path / "empty") == 2
    assert run("bench", d, "--buckets", "10,5") == 2


def test_argument_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["test"])
    assert e.value.code == 2


def test_console_script(tmp_path):
    exe = shutil.which("onto-tdd")
    cmd = [exe] if exe else [sys.executable, "-m", "onto_tdd.cli"]
    p = subprocess.run(cmd + ["test", str(CORPUS / "family.ofn"), str(CORPUS / "family.suite")],
                       capture_output=True, text=True)
    assert p.returncode == 0, p.stderr
    assert "expectations met" in p.stdout
