import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from onto_tdd.fss import effective_prefixes, load, load_suite  # noqa: E402

CORPUS = HERE / "corpus"
NS = "http://example.org/t#"


def corpus_paths() -> list[Path]:
    return sorted(CORPUS.glob("*.ofn"))


def corpus_cases():
    """(ontology path, suite entry) for every frozen corpus expectation."""
    out = []
    for p in corpus_paths():
        o = load(p)
        for e in load_suite(p.with_suffix(".suite"), effective_prefixes(o)):
            out.append((p, e))
    return out


def doc(body: str) -> str:
    return f"Prefix(:=<{NS}>)\nOntology(<http://example.org/t>\n{body}\n)\n"


@pytest.fixture
def parse():
    from onto_tdd.fss import parse_document
    return lambda body: parse_document(doc(body))


@pytest.fixture
def ax():
    from onto_tdd.fss import parse_axiom
    return lambda text: parse_axiom(text, {"": NS})


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
