import random

import pytest

from generators import random_alc, random_extended
from oracles import bounded_consistent, bounded_entails, bounded_satisfiable, role_closure
from onto_tdd.errors import InconsistentOntologyError, NodeLimitExceeded, NonRegularChainError, ReasonerTimeout
from onto_tdd.model import (
    C, Characteristic, CharacteristicKind, ClassAssertion, ComplementOf, DifferentIndividuals, I,
    ObjectPropertyAssertion, Ontology, P, SomeValuesFrom, SubClassOf, SubObjectPropertyOf,
    SubPropertyChainOf,
)
from onto_tdd.reasoner import Reasoner, check_consistency, classify, entails, instances_of

NS = "http://example.org/r#"


def test_consistency_verdict_carries_a_witness(parse):
    o = parse("SubClassOf(:A :B)\nDisjointClasses(:A :B)\nClassAssertion(:A :x)")
    v = check_consistency(o)
    assert not v and v.clash_witness


def test_unsatisfiable_class_does_not_make_the_ontology_inconsistent(parse):
    o = parse("SubClassOf(:A :B)\nDisjointClasses(:A :B)")
    r = Reasoner(o)
    assert r.is_consistent()
    assert {a.local_name for a in r.unsatisfiable_classes()} == {"A"}


def test_classification_reports_direct_parents_and_equivalents(parse):
    o = parse("SubClassOf(:Dog :Mammal)\nSubClassOf(:Mammal :Animal)\n"
              "EquivalentClasses(:Beast :Animal)\nSubClassOf(:Cat :Mammal)")
    h = {a.local_name: n for a, n in classify(o).items()}
    assert {b.local_name for b in h["Dog"].direct_supers} == {"Mammal"}
    assert {b.local_name for b in h["Animal"].equivalents} == {"Beast"}
    assert {b.local_name for b in h["Mammal"].direct_supers} <= {"Animal", "Beast"}


@pytest.mark.parametrize("body, target, want", [
    ("SubClassOf(:A ObjectSomeValuesFrom(:r :B))\nSubClassOf(:B :D)", "SubClassOf(:A ObjectSomeValuesFrom(:r :D))", True),
    ("ObjectPropertyDomain(:r :D)\nSubClassOf(:A ObjectSomeValuesFrom(:r :B))", "SubClassOf(:A :D)", True),
    ("ObjectPropertyRange(:r :D)", "SubClassOf(:A ObjectAllValuesFrom(:r :D))", True),
    ("TransitiveObjectProperty(:p)\nSubClassOf(:A ObjectSomeValuesFrom(:p :B))\n"
     "SubClassOf(:B ObjectSomeValuesFrom(:p :D))", "SubClassOf(:A ObjectSomeValuesFrom(:p :D))", True),
    ("InverseObjectProperties(:r :s)\nSubClassOf(:A ObjectSomeValuesFrom(:r :B))\n"
     "SubClassOf(:B ObjectAllValuesFrom(:s :D))", "SubClassOf(:A :D)", True),
    ("FunctionalObjectProperty(:r)\nSubClassOf(:A ObjectSomeValuesFrom(:r :B))\n"
     "SubClassOf(:A ObjectSomeValuesFrom(:r :D))", "SubClassOf(:A ObjectSomeValuesFrom(:r ObjectIntersectionOf(:B :D)))", True),
    ("SubObjectPropertyOf(ObjectPropertyChain(:r :s) :t)\nSubClassOf(:A ObjectSomeValuesFrom(:r :B))\n"
     "SubClassOf(:B ObjectSomeValuesFrom(:s :D))", "SubClassOf(:A ObjectSomeValuesFrom(:t :D))", True),
    ("SubClassOf(:A ObjectHasSelf(:r))\nSubObjectPropertyOf(:r :s)", "SubClassOf(:A ObjectSomeValuesFrom(:s :A))", True),
    ("ReflexiveObjectProperty(:r)", "SubClassOf(:A ObjectHasSelf(:r))", True),
    ("SymmetricObjectProperty(:r)", "AsymmetricObjectProperty(:r)", False),
    ("SubObjectPropertyOf(:r :s)", "EquivalentObjectProperties(:r :s)", False),
    ("SubClassOf(:A ObjectSomeValuesFrom(:r :B))", "SubClassOf(:A ObjectSomeValuesFrom(:r ObjectComplementOf(:B)))", False),
])
def test_entailment_matches_the_bounded_model_finder(parse, ax, body, target, want):
    o = parse(body)
    t = ax(target)
    assert entails(o, t) is want
    assert bounded_entails(list(o), t, 4) is want


@pytest.mark.parametrize("gen", [random_alc, random_extended])
def test_consistency_agrees_with_the_oracle(gen):
    for seed in range(1000, 1150):
        o = gen(seed)
        assert Reasoner(o).is_consistent() == bounded_consistent(list(o), 3), seed


@pytest.mark.parametrize("gen", [random_alc, random_extended])
def test_class_satisfiability_agrees_with_the_oracle(gen):
    checked = 0
    for seed in range(2000, 2080):
        o = gen(seed)
        r = Reasoner(o)
        if not r.is_consistent():
            continue
        axioms = list(o)
        for a in sorted(o.vc):
            assert r.is_satisfiable(C(a)) == bounded_satisfiable(axioms, C(a), 3), (seed, a)
            checked += 1
    assert checked > 50


def _role_world(seed):
    rng = random.Random(seed)
    names = ["p", "q", "u"]
    inds = ["a", "b", "c", "d"]
    facts = {(rng.choice(names), rng.choice(inds), rng.choice(inds)) for _ in range(rng.randint(1, 6))}
    sub = [tuple(rng.sample(names, 2)) for _ in range(rng.randint(0, 2))]
    chains = [((rng.choice(names), rng.choice(names)), rng.choice(names))] if rng.random() < 0.5 else []
    transitive = {n for n in names if rng.random() < 0.3}
    symmetric = {n for n in names if rng.random() < 0.3}
    return facts, sub, chains, transitive, symmetric


def test_property_assertions_match_brute_force_role_closure():
    compared = 0
    for seed in range(200):
        facts, sub, chains, transitive, symmetric = _role_world(seed)
        p = lambda n: P(NS + n)  # noqa: E731
        i = lambda n: I(NS + n)  # noqa: E731
        axioms = [ObjectPropertyAssertion(p(r), i(a), i(b)) for r, a, b in facts]
        axioms += [SubObjectPropertyOf(p(x), p(y)) for x, y in sub]
        axioms += [SubPropertyChainOf((p(x), p(y)), p(z)) for (x, y), z in chains]
        axioms += [Characteristic(CharacteristicKind.TRANSITIVE, p(n)) for n in transitive]
        axioms += [Characteristic(CharacteristicKind.SYMMETRIC, p(n)) for n in symmetric]
        try:
            r = Reasoner(Ontology(axioms))
            r.kb()
        except NonRegularChainError:
            continue
        want = role_closure(facts, sub, chains, transitive, symmetric)
        for name in ("p", "q", "u"):
            for a in "abcd":
                if i(a) not in r.o.vi:
                    continue
                got = {(x.local_name, y.local_name) for x, y in r.entailed_property_assertions(p(name), i(a))}
                assert got == {(x, y) for n, x, y in want if n == name and x == a}, (seed, name, a)
                compared += 1
    assert compared > 300


def test_functional_properties_merge_successors(parse):
    o = parse("FunctionalObjectProperty(:r)\nObjectPropertyAssertion(:r :a :b)\n"
              "ObjectPropertyAssertion(:r :a :c)\nClassAssertion(:A :b)\nClassAssertion(ObjectComplementOf(:A) :c)")
    assert not Reasoner(o).is_consistent()
    o2 = parse("FunctionalObjectProperty(:r)\nObjectPropertyAssertion(:r :a :b)\n"
               "ObjectPropertyAssertion(:r :a :c)\nClassAssertion(:A :b)")
    assert {x.local_name for x in instances_of(o2, C(NS.replace("r#", "t#") + "A"))} == {"b", "c"}


def test_different_individuals_block_merging(parse):
    o = parse("FunctionalObjectProperty(:r)\nObjectPropertyAssertion(:r :a :b)\n"
              "ObjectPropertyAssertion(:r :a :c)\nDifferentIndividuals(:b :c)")
    assert not Reasoner(o).is_consistent()


def test_asymmetry_irreflexivity_and_self(parse):
    assert not Reasoner(parse("AsymmetricObjectProperty(:r)\nObjectPropertyAssertion(:r :a :b)\n"
                              "ObjectPropertyAssertion(:r :b :a)")).is_consistent()
    assert not Reasoner(parse("IrreflexiveObjectProperty(:r)\nClassAssertion(ObjectHasSelf(:r) :a)")).is_consistent()
    assert Reasoner(parse("IrreflexiveObjectProperty(:r)\nObjectPropertyAssertion(:r :a :b)")).is_consistent()


def test_cyclic_definitions_terminate(parse):
    o = parse("SubClassOf(:A ObjectSomeValuesFrom(:r :A))\nSubClassOf(:A ObjectSomeValuesFrom(ObjectInverseOf(:r) :A))\n"
              "FunctionalObjectProperty(:r)\nClassAssertion(:A :x)")
    assert Reasoner(o).is_consistent()


def test_non_regular_chains_are_rejected(parse):
    o = parse("SubObjectPropertyOf(ObjectPropertyChain(:r :s) :s)\nSubObjectPropertyOf(ObjectPropertyChain(:s :r) :r)")
    with pytest.raises(NonRegularChainError):
        Reasoner(o).is_consistent()


def test_queries_on_inconsistent_ontologies_are_refused(parse):
    o = parse("ClassAssertion(owl:Nothing :a)")
    r = Reasoner(o)
    with pytest.raises(InconsistentOntologyError):
        r.unsatisfiable_classes()
    with pytest.raises(InconsistentOntologyError):
        r.instances_of(C(NS + "A"))


def _deep(n):
    axioms = [SubClassOf(C(f"{NS}A{k}"), SomeValuesFrom(P(NS + "r"), C(f"{NS}A{k + 1}"))) for k in range(n)]
    axioms.append(ClassAssertion(C(NS + "A0"), I(NS + "x")))
    return Ontology(axioms)


def test_node_limit_is_enforced():
    with pytest.raises(NodeLimitExceeded):
        Reasoner(_deep(60), max_nodes=20).is_consistent()


def test_budget_turns_into_a_timeout():
    r = Reasoner(_deep(3000))
    with pytest.raises(ReasonerTimeout):
        with r.budget(1e-4):
            r.is_consistent()


def test_results_are_memoised_on_the_state_counters(parse, ax):
    o = parse("SubClassOf(:A :B)")
    r = Reasoner(o)
    t0 = r.taxonomy()
    assert r.taxonomy() is t0
    o.add_axiom(ax("ClassAssertion(:A :x)"))
    assert r.taxonomy() is t0
    o.add_axiom(ax("SubClassOf(:B :D)"))
    assert r.entails(ax("SubClassOf(:A :D)"))
    o.remove_axiom(ax("SubClassOf(:B :D)"))
    assert not r.entails(ax("SubClassOf(:A :D)"))


def test_clock_splits_classification_from_queries(parse, ax):
    o = parse("SubClassOf(:A :B)\nClassAssertion(:A :x)")
    r = Reasoner(o)
    r.is_consistent()
    cls, q = r.clock.read()
    assert cls > 0 and q == 0
    r.is_instance(C(NS.replace("r#", "t#") + "B"), I(NS.replace("r#", "t#") + "x"))
    assert r.clock.read()[1] > 0


def test_disjunction_needs_case_analysis(parse, ax):
    o = parse("SubClassOf(:A ObjectUnionOf(:B :D))\nSubClassOf(:B :E)\nSubClassOf(:D :E)")
    assert entails(o, ax("SubClassOf(:A :E)"))
    assert not entails(o, ax("SubClassOf(:A :B)"))
    assert entails(o, SubClassOf(C(NS.replace("r#", "t#") + "A"), ComplementOf(ComplementOf(C(NS.replace("r#", "t#") + "E")))))


def test_entailment_of_assertions(parse, ax):
    o = parse("SubObjectPropertyOf(:r :s)\nObjectPropertyAssertion(:r :a :b)\nSymmetricObjectProperty(:s)\n"
              "DifferentIndividuals(:a :b)")
    assert entails(o, ax("ObjectPropertyAssertion(:s :b :a)"))
    assert not entails(o, ax("ObjectPropertyAssertion(:r :b :a)"))
    assert entails(o, ax("DifferentIndividuals(:b :a)"))


@pytest.mark.parametrize("body", [
    "TransitiveObjectProperty(:p)\nIrreflexiveObjectProperty(:p)",
    "SubObjectPropertyOf(ObjectPropertyChain(:p :p) :q)\nFunctionalObjectProperty(:q)",
    "TransitiveObjectProperty(:p)\nSubObjectPropertyOf(:p :q)\nAsymmetricObjectProperty(:q)",
    "TransitiveObjectProperty(:p)\nSubClassOf(:A ObjectHasSelf(:p))",
])
def test_restricted_constructs_need_simple_properties(parse, body):
    from onto_tdd.errors import FragmentViolation
    with pytest.raises(FragmentViolation):
        Reasoner(parse(body)).is_consistent()


def test_negated_self_on_non_simple_property_is_refused(parse):
    from onto_tdd.errors import FragmentViolation
    o = parse("TransitiveObjectProperty(:p)\nClassAssertion(ObjectComplementOf(ObjectHasSelf(:p)) :a)")
    with pytest.raises(FragmentViolation):
        Reasoner(o).is_consistent()


def test_chains_see_edges_implied_by_transitivity(parse, ax):
    o = parse("ObjectPropertyAssertion(:p :c :d)\nObjectPropertyAssertion(:p :d :c)\n"
              "TransitiveObjectProperty(:p)\nSubObjectPropertyOf(ObjectPropertyChain(:p :p) :u)")
    target = ax("ObjectPropertyAssertion(:u :c :d)")
    assert Reasoner(o).entails(target)
    assert bounded_entails(list(o), target, 3)
