"""Test-driven development for OWL ontologies.

A small OWL 2 functional-syntax toolkit (model, parser, tableau reasoner and
a schema query layer) plus the test procedures, TDD cycle and benchmark
harness built on top of it.
"""

from .errors import EngineError, InconsistentOntologyError, MockLeakError
from .fss import ParseError, load, load_suite, parse_axiom, parse_document, save, serialize
from .model import Iri, Ontology
from .query import evaluate, parse_query
from .reasoner import Reasoner
from .tdd import (
    FAMILIES, REGISTRY, CycleReport, CycleStatus, Outcome, Strategy, TddSession, TddTest, TestVerdict,
    generate_random_tests, run_cycle, run_regression, run_test, select_test,
)

__version__ = "0.1.0"

__all__ = [
    "EngineError", "InconsistentOntologyError", "MockLeakError",
    "ParseError", "load", "load_suite", "parse_axiom", "parse_document", "save", "serialize",
    "Iri", "Ontology", "evaluate", "parse_query", "Reasoner",
    "FAMILIES", "REGISTRY", "CycleReport", "CycleStatus", "Outcome", "Strategy", "TddSession", "TddTest",
    "TestVerdict", "generate_random_tests", "run_cycle", "run_regression", "run_test", "select_test",
]
