"""Test-driven ontology authoring: test procedures, mocks, cycles, regression.

Every target axiom belongs to a *family*; each family has a query-based
(TBox) procedure, a mock-individual (ABox) procedure, or both. A procedure
answers True exactly when the ontology entails the target. Mock entities are
minted under ``urn:tdd:mock:`` and removed by restoring a snapshot.
"""

from __future__ import annotations

import logging
import random
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .errors import EngineError, InconsistentOntologyError, MockLeakError
from .model import (
    AllValuesFrom, Axiom, Box, Characteristic, CharacteristicKind, ClassAssertion, ComplementOf,
    Declaration, DifferentIndividuals, DisjointClasses, EntityKind, EquivalentClasses,
    EquivalentObjectProperties, HasSelf, InverseObjectProperties, Iri, NamedClass,
    NamedProperty, ObjectPropertyAssertion, ObjectPropertyDomain, ObjectPropertyRange, Ontology,
    SomeValuesFrom, SubClassOf, SubObjectPropertyOf, SubPropertyChainOf, THING, THING_IRI, signature,
)
from .fss import effective_prefixes, render_axiom, render_class
from .query import atom, evaluate
from .reasoner import KB, ConsistencyVerdict, Reasoner

log = logging.getLogger("onto_tdd.tdd")

MOCK_NS = "urn:tdd:mock:"


class Strategy(Enum):
    TBOX = "tbox"
    ABOX = "abox"


class Outcome(Enum):
    TRUE = "true"
    FALSE = "false"
    MISSING_VOCABULARY = "missing-vocabulary"
    INCONSISTENT = "inconsistent-ontology"
    ERROR = "engine-error"


class UnsupportedTarget(EngineError):
    pass


@dataclass(frozen=True)
class TddTest:
    test_id: str
    target: Axiom
    label: str | None = None
    # optional user classes for the chain and transitivity procedures
    classes: tuple = ()

    def __post_init__(self):
        proc = REGISTRY.get(self.test_id)
        if proc is None:
            raise ValueError(f"unknown test id {self.test_id}")
        if family_of(self.target) != proc.family:
            raise UnsupportedTarget(
                f"{self.test_id} tests {proc.pattern}, not {type(self.target).__name__}")

    @property
    def strategy(self) -> Strategy:
        return REGISTRY[self.test_id].strategy

    @property
    def family(self) -> str:
        return REGISTRY[self.test_id].family


@dataclass
class TestVerdict:
    outcome: Outcome
    missing: frozenset = frozenset()
    message: str = ""
    warnings: list = field(default_factory=list)
    elapsed: float = 0.0
    classification_time: float = 0.0
    test_time: float = 0.0

    __test__ = False  # not a pytest class

    @property
    def value(self):
        if self.outcome is Outcome.TRUE:
            return True
        if self.outcome is Outcome.FALSE:
            return False
        return self.outcome

    @property
    def passed(self) -> bool:
        return self.outcome is Outcome.TRUE

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "missing": sorted(i.value for i in self.missing),
            "message": self.message,
            "warnings": list(self.warnings),
            "elapsed": self.elapsed,
            "classification_time": self.classification_time,
            "test_time": self.test_time,
        }


# -- mocks ---------------------------------------------------------------------

class MockLedger:
    """Mints mock entities for one test and rolls the ontology back afterwards."""

    def __init__(self, o: Ontology):
        self.o = o
        self.tag = uuid.uuid4().hex
        self.base_snapshot = o.snapshot()
        self.mock_individuals: set = set()
        self.mock_classes: set = set()
        self.mock_axioms: set = set()

    def _mint(self, label: str) -> Iri:
        iri = Iri(f"{MOCK_NS}{self.tag}:{label}")
        self.o.mark_mock(iri)
        return iri

    def individual(self, label: str) -> Iri:
        iri = self._mint(label)
        self.mock_individuals.add(iri)
        self.add(Declaration(EntityKind.INDIVIDUAL, iri))
        return iri

    def cls(self, label: str) -> NamedClass:
        iri = self._mint(label)
        self.mock_classes.add(iri)
        self.add(Declaration(EntityKind.CLASS, iri))
        return NamedClass(iri)

    def add(self, ax: Axiom) -> None:
        if ax in self.o and ax not in self.o.mock_axioms:
            return  # already a real axiom; must survive teardown
        self.o.add_axiom(ax, mock=True)
        self.mock_axioms.add(ax)

    def reset(self) -> None:
        self.o.restore(self.base_snapshot)

    def teardown(self) -> None:
        self.reset()
        leaked = [ax for ax in self.o if ax in self.mock_axioms]
        names = self.mock_individuals | self.mock_classes
        leaked += [n for n in names if n in self.o.vi or n in self.o.vc]
        if leaked:
            raise MockLeakError(f"mock entities left behind: {leaked[:3]}")


# -- procedure context -----------------------------------------------------------

class _Ctx:
    def __init__(self, o: Ontology, r: Reasoner, test: TddTest):
        self.o = o
        self.r = r
        self.test = test
        self.ledger = MockLedger(o)
        self.warnings: list = []

    # ABox helpers
    def ind(self, label: str) -> Iri:
        return self.ledger.individual(label)

    def type(self, ce, a: Iri) -> None:
        self.ledger.add(ClassAssertion(ce, a))

    def edge(self, p, a: Iri, b: Iri) -> None:
        self.ledger.add(ObjectPropertyAssertion(p, a, b))

    def differ(self, a: Iri, b: Iri) -> None:
        self.ledger.add(DifferentIndividuals(a, b))

    def inconsistent(self) -> bool:
        return not self.r.is_consistent()

    def _premise_ok(self) -> None:
        # a premise that cannot be instantiated is reported, not read as a pass
        if not self.r.is_consistent():
            raise InconsistentOntologyError("the mock premise makes the ontology inconsistent")

    def instance(self, ce, a: Iri) -> bool:
        self._premise_ok()
        return self.r.is_instance(ce, a)

    def related(self, p, a: Iri, b: Iri) -> bool:
        self._premise_ok()
        return self.r.has_property_assertion(p, a, b)

    def member(self, name: Iri, form: str, *args) -> bool:
        """Is ``name`` among the answers of the atom (None marks the variable)?"""
        return name in evaluate(self.o, atom(form, *args), self.r, exclude_bound=False)


# -- class axiom procedures ------------------------------------------------------

def _t_cs(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.sub.iri, "SubClassOf", None, ax.sup)


def _a_cs(c: _Ctx) -> bool:
    ax = c.test.target
    a = c.ind("a")
    c.type(ax.sub, a)
    return c.instance(ax.sup, a)


def _disjoint_pair(ax) -> tuple:
    if isinstance(ax, DisjointClasses):
        return ax.first, ax.second
    return ax.sub, ax.sup.operand


def _sibling_check(c: _Ctx, x, y) -> None:
    if not (isinstance(x, NamedClass) and isinstance(y, NamedClass)):
        return
    tax = c.r.taxonomy()
    px, py = tax.get(x.iri), tax.get(y.iri)
    if px is None or py is None or px.subsumers is None or py.subsumers is None:
        return
    if not _direct(tax, x.iri) & _direct(tax, y.iri):
        c.warnings.append(f"{x.iri.local_name} and {y.iri.local_name} are not siblings")


def _direct(tax: dict, a: Iri) -> set:
    s = tax[a].subsumers
    strict = {b for b in s if tax.get(b) is None or tax[b].subsumers is None or a not in tax[b].subsumers}
    out = {b for b in strict
           if not any(b != d and tax.get(d) and tax[d].subsumers and b in tax[d].subsumers
                      for d in strict)}
    return out or {THING_IRI}


def _t_cd_c(c: _Ctx) -> bool:
    x, y = _disjoint_pair(c.test.target)
    _sibling_check(c, x, y)
    return c.member(y.iri, "ComplementOf", x, None)


def _t_cd_d(c: _Ctx) -> bool:
    x, y = _disjoint_pair(c.test.target)
    _sibling_check(c, x, y)
    return c.member(x.iri, "DisjointClasses", None, y)


def _a_cd(c: _Ctx) -> bool:
    x, y = _disjoint_pair(c.test.target)
    _sibling_check(c, x, y)
    a = c.ind("a")
    c.type(x, a)
    c.type(y, a)
    return c.inconsistent()


def _t_ce(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.first.iri, "EquivalentClasses", None, ax.second)


def _a_ce(c: _Ctx) -> bool:
    ax = c.test.target
    a = c.ind("a")
    c.type(ax.first, a)
    if not c.instance(ax.second, a):
        return False
    c.ledger.reset()
    b = c.ind("b")
    c.type(ax.second, b)
    return c.instance(ax.first, b)


def _t_restriction(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.sub.iri, "SubClassOf", None, ax.sup)


def _a_restriction(c: _Ctx) -> bool:
    # C(a) for a fresh a; a falls under the restriction iff C does
    ax = c.test.target
    a = c.ind("a")
    c.type(ax.sub, a)
    return c.instance(ax.sup, a)


def _a_eq_nr(c: _Ctx) -> bool:
    ax = c.test.target
    some = ax.sup.operand
    a, b = c.ind("a"), c.ind("b")
    c.type(ax.sub, a)
    c.type(some.filler, b)
    c.edge(some.prop, a, b)
    return c.inconsistent()


# -- object property procedures ----------------------------------------------------

def _t_da(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.cls.iri, "ObjectPropertyDomain", ax.prop, None)


def _a_da(c: _Ctx) -> bool:
    ax = c.test.target
    a, top = c.ind("a"), c.ind("topObj")
    c.edge(ax.prop, a, top)
    return c.instance(ax.cls, a)


def _t_ra(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.cls.iri, "ObjectPropertyRange", ax.prop, None)


def _a_ra(c: _Ctx) -> bool:
    ax = c.test.target
    a, top = c.ind("a"), c.ind("topObj")
    c.edge(ax.prop, top, a)
    return c.instance(ax.cls, a)


def _t_ps(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.sub.iri, "SubObjectPropertyOf", None, ax.sup)


def _a_ps(c: _Ctx) -> bool:
    ax = c.test.target
    a, b = c.ind("a"), c.ind("b")
    c.edge(ax.sub, a, b)
    return c.related(ax.sup, a, b)


def _t_pe(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.first.iri, "EquivalentObjectProperties", None, ax.second)


def _a_pe(c: _Ctx) -> bool:
    # four individuals tell equivalence apart from mere inclusion
    ax = c.test.target
    a, b, x, y = c.ind("a"), c.ind("b"), c.ind("c"), c.ind("d")
    c.edge(ax.first, a, b)
    c.edge(ax.second, x, y)
    return (c.related(ax.second, a, b)
            and c.related(ax.first, x, y))


def _t_pi(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.first.iri, "InverseObjectProperties", None, ax.second)


def _a_pi(c: _Ctx) -> bool:
    ax = c.test.target
    a, b, x, y = c.ind("a"), c.ind("b"), c.ind("c"), c.ind("d")
    c.edge(ax.first, a, b)
    c.edge(ax.second, x, y)
    return (c.related(ax.second, b, a)
            and c.related(ax.first, y, x))


def _t_pc(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.sup.iri, "SubPropertyChainOf", ax.chain, None)


def _chain_support(c: _Ctx, chain: tuple, sup) -> bool:
    """Walk C0 -R1-> C1 ... -Rn-> Cn through support axioms and ask whether
    C0 ⊑ ∃sup.Cn follows; with fresh classes this holds iff the chain does."""
    names = list(c.test.classes)
    k = len(chain)
    if names and len(names) != k + 1:
        raise UnsupportedTarget(f"need {k + 1} classes for a chain of length {k}")
    cls = [NamedClass(n) for n in names] if names else [c.ledger.cls(f"C{i}") for i in range(k + 1)]
    goal = SomeValuesFrom(sup, cls[-1])
    head = cls[0]
    if names and c.r.entails(SubClassOf(head, goal)):
        # would pass without the chain: test a fresh stand-in instead
        head = c.ledger.cls("C0prime")
        c.warnings.append(f"{names[0].local_name} already entails the goal; used a mock class")
    c.ledger.add(SubClassOf(head, SomeValuesFrom(chain[0], cls[1])))
    for i in range(1, k):
        c.ledger.add(SubClassOf(cls[i], SomeValuesFrom(chain[i], cls[i + 1])))
    return c.member(head.iri, "SubClassOf", None, goal)


def _a_pc(c: _Ctx) -> bool:
    ax = c.test.target
    c.r.kb().check_regularity()
    return _chain_support(c, ax.chain, ax.sup)


# -- characteristics ---------------------------------------------------------------

def _a_p_f(c: _Ctx) -> bool:
    R = c.test.target.prop
    a, b, d = c.ind("a"), c.ind("b"), c.ind("c")
    c.edge(R, a, b)
    c.edge(R, a, d)
    c.differ(b, d)
    return c.inconsistent()


def _a_p_if(c: _Ctx) -> bool:
    R = c.test.target.prop
    a, b, d = c.ind("a"), c.ind("b"), c.ind("c")
    c.edge(R, b, a)
    c.edge(R, d, a)
    c.differ(b, d)
    return c.inconsistent()


def _t_p_t(c: _Ctx) -> bool:
    R = c.test.target.prop
    return _chain_support(c, (R, R), R)


def _a_p_t(c: _Ctx) -> bool:
    R = c.test.target.prop
    a, b, d = c.ind("a"), c.ind("b"), c.ind("c")
    c.edge(R, a, b)
    c.edge(R, b, d)
    return c.related(R, a, d)


def _a_p_s(c: _Ctx) -> bool:
    R = c.test.target.prop
    a, b = c.ind("a"), c.ind("b")
    c.edge(R, a, b)
    return c.member(b, "PropertyAssertion", R, None, a)


def _a_p_a(c: _Ctx) -> bool:
    R = c.test.target.prop
    a, b = c.ind("a"), c.ind("b")
    c.edge(R, a, b)
    c.edge(R, b, a)
    return c.inconsistent()


def _a_p_rg(c: _Ctx) -> bool:
    R = c.test.target.prop
    a = c.ind("a")
    return c.related(R, a, a)


def _t_p_rl(c: _Ctx) -> bool:
    ax = c.test.target
    return c.member(ax.sub.iri, "SubClassOf", None, ax.sup)


def _a_p_rl(c: _Ctx) -> bool:
    ax = c.test.target
    a = c.ind("a")
    c.type(ax.sub, a)
    q = [atom("Type", ax.sub, None), atom("PropertyAssertion", ax.sup.prop, a, None)]
    return a in evaluate(c.o, q, c.r, exclude_bound=False)


def _a_p_ir(c: _Ctx) -> bool:
    R = c.test.target.prop
    a = c.ind("a")
    c.edge(R, a, a)
    return c.inconsistent()


# -- registry ------------------------------------------------------------------------

@dataclass(frozen=True)
class Procedure:
    test_id: str
    family: str
    strategy: Strategy
    group: str
    pattern: str
    body: Callable


_T, _A = Strategy.TBOX, Strategy.ABOX
_CLS, _OP = "class axioms", "object properties"

_ROWS = [
    ("T_cs", "class-subsumption", _T, _CLS, "SubClassOf(C D)", _t_cs),
    ("T'_cs", "class-subsumption", _A, _CLS, "SubClassOf(C D)", _a_cs),
    ("T_cd_c", "class-disjointness", _T, _CLS, "SubClassOf(C ObjectComplementOf(D))", _t_cd_c),
    ("T_cd_d", "class-disjointness", _T, _CLS, "DisjointClasses(C D)", _t_cd_d),
    ("T'_cd", "class-disjointness", _A, _CLS, "DisjointClasses(C D) or SubClassOf(C ObjectComplementOf(D))", _a_cd),
    ("T_ce", "class-equivalence", _T, _CLS, "EquivalentClasses(C D)", _t_ce),
    ("T'_ce", "class-equivalence", _A, _CLS, "EquivalentClasses(C D)", _a_ce),
    ("T_eq", "existential", _T, _CLS, "SubClassOf(C ObjectSomeValuesFrom(R D))", _t_restriction),
    ("T_eq_nd", "existential-negated-filler", _T, _CLS,
     "SubClassOf(C ObjectSomeValuesFrom(R ObjectComplementOf(D)))", _t_restriction),
    ("T_eq_nr", "negated-existential", _T, _CLS,
     "SubClassOf(C ObjectComplementOf(ObjectSomeValuesFrom(R D)))", _t_restriction),
    ("T'_eq", "existential", _A, _CLS, "SubClassOf(C ObjectSomeValuesFrom(R D))", _a_restriction),
    ("T'_eq_nd", "existential-negated-filler", _A, _CLS,
     "SubClassOf(C ObjectSomeValuesFrom(R ObjectComplementOf(D)))", _a_restriction),
    ("T'_eq_nr", "negated-existential", _A, _CLS,
     "SubClassOf(C ObjectComplementOf(ObjectSomeValuesFrom(R D)))", _a_eq_nr),
    ("T_uq", "universal", _T, _CLS, "SubClassOf(C ObjectAllValuesFrom(R D))", _t_restriction),
    ("T'_uq", "universal", _A, _CLS, "SubClassOf(C ObjectAllValuesFrom(R D))", _a_restriction),
    ("T_da", "domain", _T, _OP, "ObjectPropertyDomain(R C)", _t_da),
    ("T'_da", "domain", _A, _OP, "ObjectPropertyDomain(R C)", _a_da),
    ("T_ra", "range", _T, _OP, "ObjectPropertyRange(R D)", _t_ra),
    ("T'_ra", "range", _A, _OP, "ObjectPropertyRange(R D)", _a_ra),
    ("T_ps", "property-subsumption", _T, _OP, "SubObjectPropertyOf(R S)", _t_ps),
    ("T'_ps", "property-subsumption", _A, _OP, "SubObjectPropertyOf(R S)", _a_ps),
    ("T_pe", "property-equivalence", _T, _OP, "EquivalentObjectProperties(R S)", _t_pe),
    ("T'_pe", "property-equivalence", _A, _OP, "EquivalentObjectProperties(R S)", _a_pe),
    ("T_pi", "inverse", _T, _OP, "InverseObjectProperties(R S)", _t_pi),
    ("T'_pi", "inverse", _A, _OP, "InverseObjectProperties(R S)", _a_pi),
    ("T_pc", "chain", _T, _OP, "SubObjectPropertyOf(ObjectPropertyChain(R S) S)", _t_pc),
    ("T'_pc", "chain", _A, _OP, "SubObjectPropertyOf(ObjectPropertyChain(R S) S)", _a_pc),
    ("T'_p_f", "functional", _A, _OP, "FunctionalObjectProperty(R)", _a_p_f),
    ("T'_p_if", "inverse-functional", _A, _OP, "InverseFunctionalObjectProperty(R)", _a_p_if),
    ("T_p_t", "transitive", _T, _OP, "TransitiveObjectProperty(R)", _t_p_t),
    ("T'_p_t", "transitive", _A, _OP, "TransitiveObjectProperty(R)", _a_p_t),
    ("T'_p_s", "symmetric", _A, _OP, "SymmetricObjectProperty(R)", _a_p_s),
    ("T'_p_a", "asymmetric", _A, _OP, "AsymmetricObjectProperty(R)", _a_p_a),
    ("T'_p_rg", "reflexive", _A, _OP, "ReflexiveObjectProperty(R)", _a_p_rg),
    ("T_p_rl", "local-reflexivity", _T, _OP, "SubClassOf(C ObjectHasSelf(R))", _t_p_rl),
    ("T'_p_rl", "local-reflexivity", _A, _OP, "SubClassOf(C ObjectHasSelf(R))", _a_p_rl),
    ("T'_p_ir", "irreflexive", _A, _OP, "IrreflexiveObjectProperty(R)", _a_p_ir),
]

REGISTRY: dict[str, Procedure] = {row[0]: Procedure(*row) for row in _ROWS}

FAMILIES: dict[str, dict] = {}
for _p in REGISTRY.values():
    FAMILIES.setdefault(_p.family, {}).setdefault(_p.strategy, []).append(_p.test_id)

_CHARACTERISTIC_FAMILY = {
    CharacteristicKind.FUNCTIONAL: "functional",
    CharacteristicKind.INVERSE_FUNCTIONAL: "inverse-functional",
    CharacteristicKind.TRANSITIVE: "transitive",
    CharacteristicKind.SYMMETRIC: "symmetric",
    CharacteristicKind.ASYMMETRIC: "asymmetric",
    CharacteristicKind.REFLEXIVE: "reflexive",
    CharacteristicKind.IRREFLEXIVE: "irreflexive",
}


def family_of(ax: Axiom) -> str:
    """The test family whose procedures decide ``ax``."""
    if isinstance(ax, SubClassOf):
        if not isinstance(ax.sub, NamedClass):
            raise UnsupportedTarget("the subclass of a test target must be a named class")
        sup = ax.sup
        if isinstance(sup, ComplementOf):
            if isinstance(sup.operand, NamedClass):
                return "class-disjointness"
            if isinstance(sup.operand, SomeValuesFrom):
                return "negated-existential"
        if isinstance(sup, SomeValuesFrom):
            if isinstance(sup.filler, ComplementOf):
                return "existential-negated-filler"
            return "existential"
        if isinstance(sup, AllValuesFrom):
            return "universal"
        if isinstance(sup, HasSelf):
            return "local-reflexivity"
        return "class-subsumption"
    if isinstance(ax, EquivalentClasses):
        if not isinstance(ax.first, NamedClass):
            raise UnsupportedTarget("the first class of an equivalence target must be named")
        return "class-equivalence"
    if isinstance(ax, DisjointClasses):
        if not (isinstance(ax.first, NamedClass) and isinstance(ax.second, NamedClass)):
            raise UnsupportedTarget("disjointness targets relate two named classes")
        return "class-disjointness"
    if isinstance(ax, ObjectPropertyDomain):
        if not isinstance(ax.cls, NamedClass):
            raise UnsupportedTarget("domain targets need a named class")
        return "domain"
    if isinstance(ax, ObjectPropertyRange):
        if not isinstance(ax.cls, NamedClass):
            raise UnsupportedTarget("range targets need a named class")
        return "range"
    if isinstance(ax, SubObjectPropertyOf):
        _need_named(ax.sub, ax.sup)
        return "property-subsumption"
    if isinstance(ax, EquivalentObjectProperties):
        _need_named(ax.first, ax.second)
        return "property-equivalence"
    if isinstance(ax, InverseObjectProperties):
        _need_named(ax.first, ax.second)
        return "inverse"
    if isinstance(ax, SubPropertyChainOf):
        _need_named(ax.sup)
        return "chain"
    if isinstance(ax, Characteristic):
        _need_named(ax.prop)
        return _CHARACTERISTIC_FAMILY[ax.kind]
    raise UnsupportedTarget(f"no test procedure for {type(ax).__name__} axioms")


def _need_named(*props) -> None:
    for p in props:
        if not isinstance(p, NamedProperty):
            raise UnsupportedTarget("property targets need named properties")


def strategies_for(ax: Axiom) -> list[Strategy]:
    return [s for s in (_T, _A) if s in FAMILIES[family_of(ax)]]


def select_test(ax: Axiom, strategy: Strategy | str = Strategy.TBOX, label=None,
                classes: tuple = ()) -> TddTest:
    """Pick the procedure for a target axiom under a strategy."""
    strategy = Strategy(strategy) if isinstance(strategy, str) else strategy
    fam = family_of(ax)
    ids = FAMILIES[fam].get(strategy)
    if not ids:
        raise UnsupportedTarget(f"{fam} targets have no {strategy.value} procedure")
    if fam == "class-disjointness" and strategy is _T:
        tid = "T_cd_d" if isinstance(ax, DisjointClasses) else "T_cd_c"
    else:
        tid = ids[0]
    return TddTest(tid, ax, label, tuple(classes))


# -- running -------------------------------------------------------------------------

def missing_vocabulary(o: Ontology, ax: Axiom) -> frozenset:
    classes, props, inds = signature(ax)
    miss = [c for c in classes if c not in o.vc]
    miss += [p for p in props if p not in o.vop]
    miss += [i for i in inds if i not in o.vi]
    return frozenset(miss)


_NEEDS_SIMPLE = (CharacteristicKind.FUNCTIONAL, CharacteristicKind.INVERSE_FUNCTIONAL,
                 CharacteristicKind.ASYMMETRIC, CharacteristicKind.IRREFLEXIVE)
_SIMPLE_FAMILIES = frozenset(("functional", "inverse-functional", "asymmetric", "irreflexive",
                              "local-reflexivity"))


def _simple_roles_of(ax: Axiom) -> list:
    """Properties the target uses in positions where only simple roles are allowed."""
    if isinstance(ax, Characteristic) and ax.kind in _NEEDS_SIMPLE:
        return [ax.prop]
    if isinstance(ax, SubClassOf) and isinstance(ax.sup, HasSelf):
        return [ax.sup.prop]
    return []


def non_simple_properties(o: Ontology, kb: KB | None = None) -> frozenset:
    """Named properties that a transitive property or a chain implies."""
    kb = kb if kb is not None else KB([ax for ax in o if ax.box is not Box.ABOX])
    return frozenset(kb.roles.names[r >> 1] for r in kb.non_simple())


_SUBJECT_FAMILIES = frozenset(("class-subsumption", "existential", "existential-negated-filler",
                               "universal", "local-reflexivity"))


def _path(props) -> object:
    ce = THING
    for p in reversed(props):
        ce = SomeValuesFrom(p, ce)
    return ce


def premises(test: TddTest) -> list:
    """Class expressions that must be satisfiable for the test to say anything.

    The mock-individual procedures instantiate these and end up with an
    inconsistent ontology when they are empty; query procedures check them
    explicitly so both strategies report the same thing.
    """
    ax, fam = test.target, test.family
    if fam in _SUBJECT_FAMILIES:
        return [ax.sub]
    if fam == "class-equivalence":
        return [ax.first, ax.second]
    if fam in ("domain", "range"):
        return [_path([ax.prop])]
    if fam == "property-subsumption":
        return [_path([ax.sub])]
    if fam in ("property-equivalence", "inverse"):
        return [_path([ax.first]), _path([ax.second])]
    if fam == "symmetric":
        return [_path([ax.prop])]
    if fam == "transitive":
        return [_path([ax.prop, ax.prop])]
    if fam == "chain":
        return [_path(ax.chain)]
    return []


def _check_premises(test: TddTest, r: Reasoner, prefixes=None) -> None:
    for ce in premises(test):
        if not r.is_satisfiable(ce):
            raise InconsistentOntologyError(f"the test premise {render_class(ce, prefixes)} cannot be instantiated")


def _check_simple(test: TddTest, kb: KB) -> None:
    bad = non_simple_properties(None, kb)
    for p in _simple_roles_of(test.target):
        if p.iri in bad:
            raise UnsupportedTarget(
                f"{p.iri.local_name} is not simple (a transitive property or chain implies it), "
                f"so it cannot appear in this target")


def run_test(o: Ontology, test: TddTest, reasoner: Reasoner | None = None,
             timeout: float | None = None) -> TestVerdict:
    """Execute one procedure; the ontology is left exactly as it was found."""
    r = reasoner if reasoner is not None else Reasoner(o)
    if r.o is not o:
        raise ValueError("reasoner is bound to another ontology")
    start = time.perf_counter()
    cls0, q0 = r.clock.read()
    verdict = TestVerdict(Outcome.FALSE)
    ctx = None
    try:
        with r.budget(timeout):
            miss = missing_vocabulary(o, test.target)
            verdict.missing = miss
            if miss:
                verdict.outcome = Outcome.MISSING_VOCABULARY
                verdict.message = "missing vocabulary: " + ", ".join(
                    sorted(m.local_name for m in miss))
            elif not r.is_consistent():
                verdict.outcome = Outcome.INCONSISTENT
                verdict.message = "inconsistent ontology"
            else:
                _check_simple(test, r.kb())
                ctx = _Ctx(o, r, test)
                with r.clock.section("query"):
                    # the chain procedure uses mock classes under both strategies
                    if test.strategy is _T or test.family == "chain":
                        _check_premises(test, r, effective_prefixes(o))
                    ok = REGISTRY[test.test_id].body(ctx)
                verdict.outcome = Outcome.TRUE if ok else Outcome.FALSE
                verdict.warnings = ctx.warnings
    except InconsistentOntologyError as e:
        verdict.outcome, verdict.message = Outcome.INCONSISTENT, str(e)
    except EngineError as e:
        verdict.outcome, verdict.message = Outcome.ERROR, str(e)
    finally:
        if ctx is not None:
            ctx.ledger.teardown()
    cls1, q1 = r.clock.read()
    verdict.elapsed = time.perf_counter() - start
    verdict.classification_time = cls1 - cls0
    verdict.test_time = q1 - q0
    log.debug("%s %s -> %s (%.4fs)", test.test_id, test.target, verdict.outcome.value, verdict.elapsed)
    return verdict


def run_regression(o: Ontology, suite, reasoner: Reasoner | None = None,
                   timeout: float | None = None) -> list:
    """Re-run every test of the suite in order; returns (test, verdict) pairs."""
    r = reasoner if reasoner is not None else Reasoner(o)
    return [(t, run_test(o, t, r, timeout)) for t in suite]


def regression_failures(results) -> list:
    return [t for t, v in results if not v.passed]


# -- the cycle -----------------------------------------------------------------------

class CycleStatus(Enum):
    SUCCESS = "success"
    MISSING_VOCABULARY = "missing-vocabulary"
    ALREADY_ENTAILED = "already-entailed"
    INCONSISTENT = "inconsistent"
    NEW_UNSATISFIABLE = "new-unsatisfiable"
    POST_TEST_FAILED = "post-test-failed"
    REGRESSION_FAILED = "regression-failed"
    ERROR = "error"


@dataclass
class CycleReport:
    test: TddTest
    vocab_check: TestVerdict
    pre_verdict: TestVerdict | None = None
    axiom_added: bool = False
    post_verdict: TestVerdict | None = None
    post_consistency: ConsistencyVerdict | None = None
    new_unsatisfiable_classes: set = field(default_factory=set)
    regression: list = field(default_factory=list)
    status: CycleStatus = CycleStatus.ERROR
    declared: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    message: str = ""
    prefixes: dict = field(default_factory=dict, repr=False)

    @property
    def success(self) -> bool:
        return self.status is CycleStatus.SUCCESS

    def trace(self) -> list[str]:
        """One line per cycle step, for humans."""
        def v(x):
            return "skipped" if x is None else x.outcome.value
        lines = [
            f"1. target         {self.test.test_id}  {_render(self.test.target, self.prefixes)}",
            f"2. vocabulary     {v(self.vocab_check)}"
            + (f" (declared {', '.join(i.local_name for i in self.declared)})" if self.declared else ""),
            f"3. first run      {v(self.pre_verdict)} (expected false)",
            f"4. axiom added    {'yes' if self.axiom_added else 'no'}",
            "5. classification " + ("skipped" if self.post_consistency is None else
                                    ("consistent" if self.post_consistency.consistent else "INCONSISTENT")),
            "   new unsatisfiable: " + (", ".join(sorted(i.local_name for i in self.new_unsatisfiable_classes)) or "none"),
            f"6. second run     {v(self.post_verdict)} (expected true)",
            "7. regression     " + ("skipped" if "regression" in self.skipped else
                                     f"{sum(1 for _, r in self.regression if r.passed)}/{len(self.regression)} passed"),
            f"8. status         {self.status.value}" + (f": {self.message}" if self.message else ""),
        ]
        return lines

    def to_dict(self) -> dict:
        def v(x):
            return None if x is None else x.to_dict()
        return {
            "schema": 1,
            "test_id": self.test.test_id,
            "target": _render(self.test.target, self.prefixes),
            "status": self.status.value,
            "message": self.message,
            "vocab_check": v(self.vocab_check),
            "declared": [i.value for i in self.declared],
            "pre_verdict": v(self.pre_verdict),
            "axiom_added": self.axiom_added,
            "post_verdict": v(self.post_verdict),
            "post_consistency": None if self.post_consistency is None else {
                "consistent": self.post_consistency.consistent,
                "clash_witness": self.post_consistency.clash_witness},
            "new_unsatisfiable_classes": sorted(i.value for i in self.new_unsatisfiable_classes),
            "regression": [{"test_id": t.test_id, "target": _render(t.target, self.prefixes), **r.to_dict()}
                           for t, r in self.regression],
            "skipped": list(self.skipped),
        }


def _render(ax, prefixes=None) -> str:
    return render_axiom(ax, prefixes)


def run_cycle(o: Ontology, test: TddTest, suite=(), policy: str = "report",
              reasoner: Reasoner | None = None, timeout: float | None = None) -> CycleReport:
    """One fail-first round: check names, expect failure, add, classify,
    expect success, re-run the suite. On any failure the ontology is rolled back."""
    if policy not in ("report", "create"):
        raise ValueError("policy is 'report' or 'create'")
    r = reasoner if reasoner is not None else Reasoner(o)
    start = o.snapshot()
    ax = test.target
    miss = missing_vocabulary(o, ax)
    vocab = TestVerdict(Outcome.MISSING_VOCABULARY if miss else Outcome.TRUE, miss)
    rep = CycleReport(test, vocab, prefixes=effective_prefixes(o))
    steps = ["pre", "add", "classify", "post", "regression"]

    def stop(status: CycleStatus, msg: str, done: str):
        rep.status, rep.message = status, msg
        rep.skipped = steps[steps.index(done) + 1:] if done in steps else list(steps)
        if status is not CycleStatus.SUCCESS:
            o.restore(start)
        return rep

    try:
        if miss:
            if policy == "report":
                names = ", ".join(sorted(m.local_name for m in miss))
                return stop(CycleStatus.MISSING_VOCABULARY, f"missing vocabulary: {names}", "vocab")
            classes, props, _ = signature(ax)
            for n in sorted(miss):
                kind = (EntityKind.CLASS if n in classes else
                        EntityKind.PROPERTY if n in props else EntityKind.INDIVIDUAL)
                o.add_axiom(Declaration(kind, n))
                rep.declared.append(n)
        if not r.is_consistent():
            return stop(CycleStatus.INCONSISTENT, "ontology is inconsistent before the edit", "vocab")
        unsat_before = r.unsatisfiable_classes()
        rep.pre_verdict = run_test(o, test, r, timeout)
        pre = rep.pre_verdict.outcome
        if pre is Outcome.TRUE:
            return stop(CycleStatus.ALREADY_ENTAILED, "already entailed", "pre")
        if pre is not Outcome.FALSE:
            return stop(CycleStatus.ERROR, rep.pre_verdict.message, "pre")
        o.add_axiom(ax)
        rep.axiom_added = True
        rep.post_consistency = r.check_consistency()
        if not rep.post_consistency.consistent:
            return stop(CycleStatus.INCONSISTENT, "the edit makes the ontology inconsistent", "classify")
        rep.new_unsatisfiable_classes = r.unsatisfiable_classes() - unsat_before
        if rep.new_unsatisfiable_classes:
            names = ", ".join(sorted(i.local_name for i in rep.new_unsatisfiable_classes))
            return stop(CycleStatus.NEW_UNSATISFIABLE, f"new unsatisfiable classes: {names}", "classify")
        rep.post_verdict = run_test(o, test, r, timeout)
        if not rep.post_verdict.passed:
            return stop(CycleStatus.POST_TEST_FAILED, rep.post_verdict.message or "second run failed", "post")
        rep.regression = run_regression(o, suite, r, timeout)
        bad = regression_failures(rep.regression)
        if bad:
            ids = ", ".join(t.label or t.test_id for t in bad)
            return stop(CycleStatus.REGRESSION_FAILED, f"regression failures: {ids}", "regression")
        return stop(CycleStatus.SUCCESS, "", "regression")
    except EngineError as e:
        return stop(CycleStatus.ERROR, str(e), "vocab")


class TddSession:
    """An ontology plus the suite of tests that have passed so far."""

    def __init__(self, o: Ontology, policy: str = "report", timeout: float | None = None):
        self.o = o
        self.r = Reasoner(o)
        self.policy = policy
        self.timeout = timeout
        self.suite: list[TddTest] = []

    def cycle(self, test: TddTest) -> CycleReport:
        rep = run_cycle(self.o, test, self.suite, self.policy, self.r, self.timeout)
        if rep.success or rep.status is CycleStatus.ALREADY_ENTAILED:
            self.suite.append(test)
        return rep

    def add(self, ax: Axiom) -> None:
        """A plain edit outside the cycle (no test attached)."""
        self.o.add_axiom(ax)

    def regress(self) -> list:
        return run_regression(self.o, self.suite, self.r, self.timeout)


# -- random tests --------------------------------------------------------------------

def _fam_needs(fam: str) -> tuple[int, int]:
    """(classes, properties) a family needs."""
    return {
        "class-subsumption": (2, 0), "class-disjointness": (2, 0), "class-equivalence": (2, 0),
        "existential": (2, 1), "existential-negated-filler": (2, 1),
        "negated-existential": (2, 1), "universal": (2, 1),
        "domain": (1, 1), "range": (1, 1),
        "property-subsumption": (0, 2), "property-equivalence": (0, 2), "inverse": (0, 2),
        "chain": (0, 2), "local-reflexivity": (1, 1),
    }.get(fam, (0, 1))


def applicable_families(o: Ontology) -> list[str]:
    nc, np_ = len(o.vc), len(o.vop)
    return [f for f in FAMILIES if _fam_needs(f)[0] <= nc and _fam_needs(f)[1] <= np_]


def random_target(fam: str, rng: random.Random, classes: list, props: list,
                  distinct: bool = True) -> Axiom:
    """A target of family ``fam``; with ``distinct`` its two names of one kind differ."""
    C = lambda: NamedClass(rng.choice(classes))  # noqa: E731
    R = lambda: NamedProperty(rng.choice(props))  # noqa: E731

    def two(pick):
        a = pick()
        b = pick()
        if distinct:
            if len(set(classes if pick is C else props)) < 2:
                raise EngineError(f"insufficient vocabulary for a {fam} target")
            while b == a:
                b = pick()
        return a, b

    if fam == "class-subsumption":
        return SubClassOf(*two(C))
    if fam == "class-disjointness":
        a, b = two(C)
        return DisjointClasses(a, b) if rng.random() < 0.5 else SubClassOf(a, ComplementOf(b))
    if fam == "class-equivalence":
        return EquivalentClasses(*two(C))
    if fam in ("existential", "existential-negated-filler", "negated-existential", "universal"):
        a, b = two(C)
        p = R()
        if fam == "existential":
            return SubClassOf(a, SomeValuesFrom(p, b))
        if fam == "existential-negated-filler":
            return SubClassOf(a, SomeValuesFrom(p, ComplementOf(b)))
        if fam == "negated-existential":
            return SubClassOf(a, ComplementOf(SomeValuesFrom(p, b)))
        return SubClassOf(a, AllValuesFrom(p, b))
    if fam == "domain":
        return ObjectPropertyDomain(R(), C())
    if fam == "range":
        return ObjectPropertyRange(R(), C())
    if fam == "property-subsumption":
        return SubObjectPropertyOf(*two(R))
    if fam == "property-equivalence":
        return EquivalentObjectProperties(*two(R))
    if fam == "inverse":
        return InverseObjectProperties(*two(R))
    if fam == "chain":
        a, b = two(R)
        return SubPropertyChainOf((a, b), b)
    if fam == "local-reflexivity":
        return SubClassOf(C(), HasSelf(R()))
    kind = next(k for k, f in _CHARACTERISTIC_FAMILY.items() if f == fam)
    return Characteristic(kind, R())


def generate_random_tests(o: Ontology, n: int, seed: int, strategy: Strategy | None = None,
                          families=None) -> list[TddTest]:
    """n targets drawn uniformly over the families the vocabulary can instantiate.

    Arguments are names of the ontology itself. Each returned test uses the
    requested strategy when its family has it, else the other one.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    fams = [f for f in (families or applicable_families(o)) if f in applicable_families(o)]
    if strategy is not None:
        fams = [f for f in fams if strategy in FAMILIES[f]] or fams
    if not fams:
        raise EngineError("insufficient vocabulary: no test family can be instantiated")
    rng = random.Random(seed)
    classes = sorted(i for i in o.vc if not i.value.startswith(MOCK_NS))
    props = sorted(i for i in o.vop if not i.value.startswith(MOCK_NS))
    bad = non_simple_properties(o)
    simple = [p for p in props if p not in bad]
    if not simple:
        fams = [f for f in fams if f not in _SIMPLE_FAMILIES] or fams
    out = []
    for _ in range(n):
        fam = rng.choice(fams)
        ax = random_target(fam, rng, classes, simple if fam in _SIMPLE_FAMILIES and simple else props)
        strat = strategy or _T
        if strat not in FAMILIES[fam]:
            strat = _A if strat is _T else _T
        out.append(select_test(ax, strat))
    return out


def paired(test: TddTest, strategy: Strategy) -> TddTest | None:
    """The same target under another strategy, if that strategy exists."""
    if strategy not in FAMILIES[test.family]:
        return None
    if strategy is test.strategy:
        return test
    return select_test(test.target, strategy, test.label, test.classes)


# -- catalogue -----------------------------------------------------------------------

def catalogue_markdown() -> str:
    """The procedure table written to ``docs/catalogue.md``."""
    rows = ["# Test procedure catalogue", "",
            "Generated from `onto_tdd.tdd.REGISTRY`; regenerate with `onto-tdd catalogue --out docs/catalogue.md`.",
            "", "| id | group | family | strategy | target pattern | implementation |",
            "|---|---|---|---|---|---|"]
    for p in REGISTRY.values():
        rows.append(f"| `{p.test_id}` | {p.group} | {p.family} | {p.strategy.value} | `{p.pattern}` "
                    f"| `{p.body.__name__}` |")
    by_strategy = {s: sum(1 for p in REGISTRY.values() if p.strategy is s) for s in Strategy}
    rows += ["", f"{len(REGISTRY)} procedures: {by_strategy[_T]} query-based (tbox) and "
             f"{by_strategy[_A]} mock-individual (abox), over {len(FAMILIES)} target families.", ""]
    return "\n".join(rows)
