import pytest
from hypothesis import given, settings, strategies as st

from conftest import NS, corpus_paths, doc
from generators import fuzz_document
from onto_tdd.fss import (
    ParseError, UnsupportedConstruct, load, parse_axiom, parse_class_expression, parse_document,
    parse_suite, render_axiom, serialize, short_name,
)
from onto_tdd.model import (
    Characteristic, CharacteristicKind, DisjointClasses, EquivalentObjectProperties, InverseObjectProperties,
    InverseOf, Iri, NamedClass, NamedProperty, SubClassOf, SubPropertyChainOf,
)


def test_prefixed_and_full_iris_denote_the_same_name():
    o = parse_document(doc(f"SubClassOf(:A <{NS}B>)"))
    assert list(o) == [SubClassOf(NamedClass(Iri(NS + "A")), NamedClass(Iri(NS + "B")))]


def test_standard_prefixes_need_no_declaration():
    o = parse_document(doc("SubClassOf(:A owl:Thing)"))
    assert render_axiom(next(iter(o)), o.prefixes) == "SubClassOf(:A owl:Thing)"


def test_nary_disjointness_expands_pairwise():
    o = parse_document(doc("DisjointClasses(:A :B :C)"))
    pairs = {(a.first.iri.local_name, a.second.iri.local_name) for a in o}
    assert all(isinstance(a, DisjointClasses) for a in o)
    assert pairs == {("A", "B"), ("A", "C"), ("B", "C")}


def test_parse_axiom_rejects_nary_input():
    with pytest.raises(ParseError, match="n-ary"):
        parse_axiom("DisjointClasses(:A :B :C)", {"": NS})


@pytest.mark.parametrize("text, expected", [
    ("InverseObjectProperties(ObjectInverseOf(:r) ObjectInverseOf(:s))", InverseObjectProperties),
    ("InverseObjectProperties(ObjectInverseOf(:r) :s)", EquivalentObjectProperties),
    ("InverseObjectProperties(:r ObjectInverseOf(:s))", EquivalentObjectProperties),
])
def test_inverse_declarations_are_normalized(text, expected):
    a = parse_axiom(text, {"": NS})
    assert isinstance(a, expected)
    assert not any(isinstance(x, InverseOf) for x in (a.first, a.second))


def test_chain_and_characteristics():
    a = parse_axiom("SubObjectPropertyOf(ObjectPropertyChain(:r ObjectInverseOf(:s)) :t)", {"": NS})
    assert isinstance(a, SubPropertyChainOf) and len(a.chain) == 2
    assert a.chain[1] == InverseOf(NamedProperty(Iri(NS + "s")))
    c = parse_axiom("AsymmetricObjectProperty(:r)", {"": NS})
    assert c == Characteristic(CharacteristicKind.ASYMMETRIC, NamedProperty(Iri(NS + "r")))


def test_error_positions_point_at_the_offending_token():
    with pytest.raises(ParseError) as ei:
        parse_document(doc("SubClassOf(:A\n  ObjectSomeValuesFrom(:r))"))
    e = ei.value
    assert (e.line, e.column) == (4, 26)
    assert "expected" in str(e)


def test_unsupported_constructs_are_named():
    with pytest.raises(UnsupportedConstruct, match="ObjectMinCardinality"):
        parse_document(doc("SubClassOf(:A ObjectMinCardinality(2 :r))"))


@pytest.mark.parametrize("body", [
    "SubClassOf(:A",
    "SubClassOf(:A :B) )",
    "SubClassOf(undeclared:A :B)",
    "SubObjectPropertyOf(ObjectPropertyChain(:r) :s)",
    "SubClassOf(<http://x y> :B)",
    "Frobnicate(:A)",
])
def test_malformed_documents_raise(body):
    with pytest.raises(ParseError):
        parse_document(doc(body))


def test_comments_and_layout_are_ignored():
    a = parse_document(doc("# leading\nSubClassOf(  :A\t:B ) # trailing"))
    b = parse_document(doc("SubClassOf(:A :B)"))
    assert list(a) == list(b)


def test_short_names_drop_the_default_prefix():
    assert short_name(Iri(NS + "Cat"), {"": NS}) == "Cat"
    assert short_name(Iri("urn:z:1 x"), {"": NS}) == "<urn:z:1 x>"


def test_class_expression_parser():
    ce = parse_class_expression("ObjectIntersectionOf(:A ObjectHasSelf(:r))", {"": NS})
    assert render_axiom(SubClassOf(NamedClass(Iri(NS + "Z")), ce), {"": NS}) == \
        "SubClassOf(:Z ObjectIntersectionOf(:A ObjectHasSelf(:r)))"


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_corpus_round_trip_is_a_fixpoint(path):
    o = load(path)
    s1 = serialize(o)
    o2 = parse_document(s1)
    assert list(o2) == list(o)
    assert serialize(o2) == s1


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_fuzzed_documents_round_trip(seed):
    text, source = fuzz_document(seed)
    o = parse_document(text)
    assert list(o) == list(source)
    s1 = serialize(o)
    assert serialize(parse_document(s1)) == s1


def test_suite_directives():
    es = parse_suite("SubClassOf(:A :B) @expect fail @strategy abox  # why\n\n"
                     "TransitiveObjectProperty(:r) @test T_p_t\n", {"": NS})
    assert [(e.line, e.expect, e.strategy, e.test_id) for e in es] == \
        [(1, "fail", "abox", None), (3, "pass", None, "T_p_t")]


@pytest.mark.parametrize("text, col", [
    ("SubClassOf(:A :B) @expect maybe", 27),
    ("SubClassOf(:A :B) @expect pass @expect fail", 32),
    ("SubClassOf(:A :B) @strategy", 19),
    ("@expect pass", 1),
])
def test_suite_errors_carry_columns(text, col):
    with pytest.raises(ParseError) as ei:
        parse_suite(text, {"": NS})
    assert ei.value.line == 1 and ei.value.column == col
