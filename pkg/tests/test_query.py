import pytest

from conftest import NS, corpus_paths
from oracles import bounded_entails
from onto_tdd.errors import InconsistentOntologyError
from onto_tdd.fss import load, parse_document
from onto_tdd.model import Iri
from onto_tdd.query import FORMS, QueryError, atom, evaluate, parse_query
from onto_tdd.reasoner import Reasoner

BODY = """
SubClassOf(:Dog :Mammal)
SubClassOf(:Cat :Mammal)
SubClassOf(:Mammal :Animal)
EquivalentClasses(:Hound :Dog)
DisjointClasses(:Dog :Cat)
SubClassOf(:Plant ObjectComplementOf(:Animal))
SubClassOf(:Dog ObjectSomeValuesFrom(:eats :Food))
ObjectPropertyDomain(:eats :Animal)
ObjectPropertyRange(:eats :Food)
SubObjectPropertyOf(:devours :eats)
EquivalentObjectProperties(:consumes :eats)
InverseObjectProperties(:eats :eatenBy)
SubObjectPropertyOf(ObjectPropertyChain(:eats :partOf) :eats)
ClassAssertion(:Dog :rex)
ObjectPropertyAssertion(:devours :rex :bone)
ObjectPropertyAssertion(:partOf :bone :carcass)
Declaration(Class(:Food))
"""


@pytest.fixture(scope="module")
def onto():
    return parse_document(f"Prefix(:=<{NS}>)\nOntology(\n{BODY}\n)")


def names(*xs):
    return {Iri(NS + x) for x in xs}


@pytest.mark.parametrize("text, expected", [
    ("SubClassOf(?x :Mammal)", {"Dog", "Cat", "Hound"}),
    ("SubClassOf(:Dog ?x)", {"Mammal", "Animal", "Hound"}),
    ("EquivalentClasses(?x :Dog)", {"Hound"}),
    ("DisjointClasses(?x :Cat)", {"Dog", "Hound", "Plant"}),
    ("ObjectComplementOf(:Animal ?x)", {"Plant"}),
    ("ObjectPropertyDomain(:devours ?x)", {"Animal"}),
    ("ObjectPropertyRange(:eats ?x)", {"Food"}),
    ("SubObjectPropertyOf(?x :eats)", {"devours", "consumes"}),
    ("SubObjectPropertyOf(ObjectPropertyChain(:devours :partOf) ?x)", {"eats", "consumes"}),
    ("EquivalentObjectProperties(?x :eats)", {"consumes"}),
    ("InverseObjectProperties(?x :eatenBy)", {"eats", "consumes"}),
    ("Type(?x :Mammal)", {"rex"}),
    ("PropertyValue(:rex :eats ?x)", {"bone", "carcass"}),
])
def test_each_form(onto, text, expected):
    assert evaluate(onto, text) == names(*expected)


def test_every_form_is_exercised():
    assert len(FORMS) == 12


def test_answers_are_certain_answers(onto):
    """Every answer (and no other name) is entailed, per a bounded model search."""
    axioms = [a for a in onto if type(a).__name__ != "Declaration"]
    q = parse_query("SubClassOf(?x :Animal)", onto.prefixes)[0]
    got = evaluate(onto, q)
    for n in sorted(onto.vc):
        if n.local_name == "Animal":
            continue
        assert (n in got) == bounded_entails(axioms, q.instantiate(n), 4), n


def test_conjunction(onto):
    assert evaluate(onto, "SubClassOf(?x :Mammal), DisjointClasses(?x :Cat)") == names("Dog", "Hound")
    assert evaluate(onto, "Type(?x :Dog), PropertyValue(?x :eats :carcass)") == names("rex")


@pytest.mark.parametrize("text", [
    "SubClassOf(:A :B)",
    "SubClassOf(?x ?x)",
    "SubClassOf(?x ObjectSomeValuesFrom(:r ?x))",
    "ObjectPropertyDomain(?x :r), SubClassOf(?x :A)",
    "HasKey(?x :r)",
])
def test_bad_queries(text):
    with pytest.raises(QueryError):
        parse_query(text, {"": NS})


def test_inconsistent_ontologies_are_refused():
    o = parse_document(f"Prefix(:=<{NS}>)\nOntology(\nDisjointClasses(:A :B)\n"
                       "ClassAssertion(:A :a)\nClassAssertion(:B :a)\n)")
    with pytest.raises(InconsistentOntologyError):
        evaluate(o, "SubClassOf(?x :A)")


def test_atom_builder_matches_the_parser(onto):
    from onto_tdd.model import NamedClass
    q = atom("SubClassOf", None, NamedClass(Iri(NS + "Mammal")))
    assert q == parse_query("SubClassOf(?x :Mammal)", onto.prefixes)[0]


@pytest.mark.parametrize("path", corpus_paths()[:8], ids=lambda p: p.stem)
def test_pruned_subclass_answers_match_naive_entailment(path):
    o = load(path)
    r = Reasoner(o)
    for d in sorted(o.vc)[:6]:
        q = parse_query(f"SubClassOf(?x <{d.value}>)", o.prefixes)[0]
        naive = {n for n in o.vc if n != d and r.entails(q.instantiate(n))}
        assert evaluate(o, q, r) == naive
        q = parse_query(f"DisjointClasses(?x <{d.value}>)", o.prefixes)[0]
        naive = {n for n in o.vc if r.entails(q.instantiate(n))}
        assert evaluate(o, q, r) == naive
