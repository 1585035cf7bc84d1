"""In-memory ontology model: expressions, axioms and a transactional axiom store."""

from __future__ import annotations

import itertools
import uuid
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Union

OWL_NS = "http://www.w3.org/2002/07/owl#"


class ModelError(Exception):
    pass


class SnapshotMismatch(ModelError):
    pass


@dataclass(frozen=True, slots=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not self.value:
            raise ModelError("IRI must be a non-empty string")

    def __str__(self) -> str:
        return self.value

    @property
    def local_name(self) -> str:
        v = self.value
        for sep in ("#", "/", ":"):
            i = v.rfind(sep)
            if 0 <= i < len(v) - 1:
                return v[i + 1:]
        return v


THING_IRI = Iri(OWL_NS + "Thing")
NOTHING_IRI = Iri(OWL_NS + "Nothing")


class EntityKind(Enum):
    CLASS = "Class"
    PROPERTY = "ObjectProperty"
    INDIVIDUAL = "NamedIndividual"


# -- property expressions ---------------------------------------------------

@dataclass(frozen=True, slots=True)
class NamedProperty:
    iri: Iri


@dataclass(frozen=True, slots=True)
class InverseOf:
    prop: NamedProperty

    def __post_init__(self):
        if not isinstance(self.prop, NamedProperty):
            raise ModelError("InverseOf takes a named property; use inverse() to normalise")


PropertyExpression = Union[NamedProperty, InverseOf]


def inverse(p: PropertyExpression) -> PropertyExpression:
    """Inverse of a property expression, collapsing double inverses."""
    if isinstance(p, InverseOf):
        return p.prop
    return InverseOf(p)


def named_of(p: PropertyExpression) -> NamedProperty:
    return p.prop if isinstance(p, InverseOf) else p


# -- class expressions ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class NamedClass:
    iri: Iri


@dataclass(frozen=True, slots=True)
class _Thing:
    pass


@dataclass(frozen=True, slots=True)
class _Nothing:
    pass


THING = _Thing()
NOTHING = _Nothing()


@dataclass(frozen=True, slots=True)
class ComplementOf:
    operand: "ClassExpression"


@dataclass(frozen=True, slots=True)
class IntersectionOf:
    operands: tuple

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ModelError("IntersectionOf needs at least two operands")


@dataclass(frozen=True, slots=True)
class UnionOf:
    operands: tuple

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ModelError("UnionOf needs at least two operands")


@dataclass(frozen=True, slots=True)
class SomeValuesFrom:
    prop: PropertyExpression
    filler: "ClassExpression"


@dataclass(frozen=True, slots=True)
class AllValuesFrom:
    prop: PropertyExpression
    filler: "ClassExpression"


@dataclass(frozen=True, slots=True)
class HasSelf:
    prop: PropertyExpression


ClassExpression = Union[NamedClass, _Thing, _Nothing, ComplementOf, IntersectionOf,
                        UnionOf, SomeValuesFrom, AllValuesFrom, HasSelf]


# -- axioms -----------------------------------------------------------------

class Box(Enum):
    TBOX = "TBox"
    RBOX = "RBox"
    ABOX = "ABox"


class CharacteristicKind(Enum):
    FUNCTIONAL = "Functional"
    INVERSE_FUNCTIONAL = "InverseFunctional"
    TRANSITIVE = "Transitive"
    SYMMETRIC = "Symmetric"
    ASYMMETRIC = "Asymmetric"
    REFLEXIVE = "Reflexive"
    IRREFLEXIVE = "Irreflexive"


@dataclass(frozen=True, slots=True)
class SubClassOf:
    sub: ClassExpression
    sup: ClassExpression
    box = Box.TBOX


@dataclass(frozen=True, slots=True)
class EquivalentClasses:
    first: ClassExpression
    second: ClassExpression
    box = Box.TBOX


@dataclass(frozen=True, slots=True)
class DisjointClasses:
    first: ClassExpression
    second: ClassExpression
    box = Box.TBOX


@dataclass(frozen=True, slots=True)
class ObjectPropertyDomain:
    prop: PropertyExpression
    cls: ClassExpression
    box = Box.RBOX


@dataclass(frozen=True, slots=True)
class ObjectPropertyRange:
    prop: PropertyExpression
    cls: ClassExpression
    box = Box.RBOX


@dataclass(frozen=True, slots=True)
class SubObjectPropertyOf:
    sub: PropertyExpression
    sup: PropertyExpression
    box = Box.RBOX


@dataclass(frozen=True, slots=True)
class SubPropertyChainOf:
    chain: tuple
    sup: PropertyExpression
    box = Box.RBOX

    def __post_init__(self):
        if len(self.chain) < 2:
            raise ModelError("a property chain needs at least two members")


@dataclass(frozen=True, slots=True)
class EquivalentObjectProperties:
    first: PropertyExpression
    second: PropertyExpression
    box = Box.RBOX


@dataclass(frozen=True, slots=True)
class InverseObjectProperties:
    first: NamedProperty
    second: NamedProperty
    box = Box.RBOX


@dataclass(frozen=True, slots=True)
class Characteristic:
    kind: CharacteristicKind
    prop: PropertyExpression
    box = Box.RBOX


@dataclass(frozen=True, slots=True)
class ClassAssertion:
    cls: ClassExpression
    individual: Iri
    box = Box.ABOX


@dataclass(frozen=True, slots=True)
class ObjectPropertyAssertion:
    prop: PropertyExpression
    subject: Iri
    object: Iri
    box = Box.ABOX


@dataclass(frozen=True, slots=True)
class DifferentIndividuals:
    first: Iri
    second: Iri
    box = Box.ABOX


@dataclass(frozen=True, slots=True)
class Declaration:
    """Entity declaration; carries no logical content."""
    kind: EntityKind
    iri: Iri

    @property
    def box(self) -> Box:
        return {EntityKind.CLASS: Box.TBOX, EntityKind.PROPERTY: Box.RBOX,
                EntityKind.INDIVIDUAL: Box.ABOX}[self.kind]


Axiom = Union[SubClassOf, EquivalentClasses, DisjointClasses, ObjectPropertyDomain,
              ObjectPropertyRange, SubObjectPropertyOf, SubPropertyChainOf,
              EquivalentObjectProperties, InverseObjectProperties, Characteristic,
              ClassAssertion, ObjectPropertyAssertion, DifferentIndividuals, Declaration]

AXIOM_TYPES = (SubClassOf, EquivalentClasses, DisjointClasses, ObjectPropertyDomain,
               ObjectPropertyRange, SubObjectPropertyOf, SubPropertyChainOf,
               EquivalentObjectProperties, InverseObjectProperties, Characteristic,
               ClassAssertion, ObjectPropertyAssertion, DifferentIndividuals, Declaration)


def box_of(ax: Axiom) -> Box:
    return ax.box


def is_logical(ax: Axiom) -> bool:
    return not isinstance(ax, Declaration)


# -- signatures -------------------------------------------------------------

def _class_sig(ce, classes: list, props: list) -> None:
    if isinstance(ce, NamedClass):
        classes.append(ce.iri)
    elif isinstance(ce, ComplementOf):
        _class_sig(ce.operand, classes, props)
    elif isinstance(ce, (IntersectionOf, UnionOf)):
        for op in ce.operands:
            _class_sig(op, classes, props)
    elif isinstance(ce, (SomeValuesFrom, AllValuesFrom)):
        props.append(named_of(ce.prop).iri)
        _class_sig(ce.filler, classes, props)
    elif isinstance(ce, HasSelf):
        props.append(named_of(ce.prop).iri)
    elif ce is THING or ce is NOTHING or isinstance(ce, (_Thing, _Nothing)):
        pass
    else:
        raise ModelError(f"not a class expression: {ce!r}")


def signature(ax: Axiom) -> tuple[list, list, list]:
    """Names used by an axiom as (classes, properties, individuals), with repeats."""
    classes: list = []
    props: list = []
    inds: list = []
    if isinstance(ax, (SubClassOf,)):
        _class_sig(ax.sub, classes, props)
        _class_sig(ax.sup, classes, props)
    elif isinstance(ax, (EquivalentClasses, DisjointClasses)):
        _class_sig(ax.first, classes, props)
        _class_sig(ax.second, classes, props)
    elif isinstance(ax, (ObjectPropertyDomain, ObjectPropertyRange)):
        props.append(named_of(ax.prop).iri)
        _class_sig(ax.cls, classes, props)
    elif isinstance(ax, SubObjectPropertyOf):
        props.extend((named_of(ax.sub).iri, named_of(ax.sup).iri))
    elif isinstance(ax, SubPropertyChainOf):
        props.extend(named_of(p).iri for p in ax.chain)
        props.append(named_of(ax.sup).iri)
    elif isinstance(ax, (EquivalentObjectProperties, InverseObjectProperties)):
        props.extend((named_of(ax.first).iri, named_of(ax.second).iri))
    elif isinstance(ax, Characteristic):
        props.append(named_of(ax.prop).iri)
    elif isinstance(ax, ClassAssertion):
        _class_sig(ax.cls, classes, props)
        inds.append(ax.individual)
    elif isinstance(ax, ObjectPropertyAssertion):
        props.append(named_of(ax.prop).iri)
        inds.extend((ax.subject, ax.object))
    elif isinstance(ax, DifferentIndividuals):
        inds.extend((ax.first, ax.second))
    elif isinstance(ax, Declaration):
        {EntityKind.CLASS: classes, EntityKind.PROPERTY: props,
         EntityKind.INDIVIDUAL: inds}[ax.kind].append(ax.iri)
    else:
        raise ModelError(f"not an axiom: {ax!r}")
    # owl:Thing / owl:Nothing are built in, never vocabulary
    classes = [c for c in classes if c != THING_IRI and c != NOTHING_IRI]
    return classes, props, inds


# -- ontology ---------------------------------------------------------------

_state_ids = itertools.count(1)


@dataclass(frozen=True)
class Snapshot:
    owner: str
    axioms: tuple
    mock_axioms: frozenset
    mock_entities: frozenset
    state: int
    tbox_state: int


class Ontology:
    """Insertion-ordered, duplicate-free axiom set with vocabulary indices.

    ``state`` changes on every effective edit; ``tbox_state`` only on edits to
    TBox/RBox axioms. Reasoners key their caches on these counters.
    """

    def __init__(self, axioms: Iterable[Axiom] = (), prefixes: dict | None = None,
                 iri: str | None = None):
        self._uid = uuid.uuid4().hex
        self._axioms: dict = {}
        self._counts = {EntityKind.CLASS: Counter(), EntityKind.PROPERTY: Counter(),
                        EntityKind.INDIVIDUAL: Counter()}
        self.mock_axioms: set = set()
        self.mock_entities: set = set()
        self.prefixes: dict = dict(prefixes or {})
        self.iri = iri
        self.state = next(_state_ids)
        self.tbox_state = self.state
        for ax in axioms:
            self.add_axiom(ax)

    # -- basic protocol
    def __len__(self) -> int:
        return len(self._axioms)

    def __iter__(self) -> Iterator[Axiom]:
        return iter(self._axioms)

    def __contains__(self, ax) -> bool:
        return ax in self._axioms

    @property
    def axioms(self) -> list:
        return list(self._axioms)

    def logical_axiom_count(self) -> int:
        return sum(1 for ax in self._axioms if is_logical(ax))

    def axioms_in(self, box: Box) -> list:
        return [ax for ax in self._axioms if ax.box is box]

    @property
    def mock_marks(self) -> frozenset:
        return frozenset(self.mock_axioms) | frozenset(self.mock_entities)

    # -- vocabulary
    def _names(self, kind: EntityKind) -> frozenset:
        return frozenset(self._counts[kind])

    @property
    def vc(self) -> frozenset:
        return self._names(EntityKind.CLASS)

    @property
    def vop(self) -> frozenset:
        return self._names(EntityKind.PROPERTY)

    @property
    def vi(self) -> frozenset:
        return self._names(EntityKind.INDIVIDUAL)

    def vocab_contains(self, name: Iri, kind: EntityKind) -> bool:
        return name in self._counts[kind]

    def _count(self, ax, delta: int) -> None:
        cs, ps, is_ = signature(ax)
        for kind, names in ((EntityKind.CLASS, cs), (EntityKind.PROPERTY, ps),
                            (EntityKind.INDIVIDUAL, is_)):
            counter = self._counts[kind]
            for n in names:
                counter[n] += delta
                if counter[n] <= 0:
                    del counter[n]

    def rescan_vocabulary(self) -> dict:
        """Vocabulary recomputed from scratch (audit helper)."""
        out = {k: set() for k in EntityKind}
        for ax in self._axioms:
            cs, ps, is_ = signature(ax)
            out[EntityKind.CLASS].update(cs)
            out[EntityKind.PROPERTY].update(ps)
            out[EntityKind.INDIVIDUAL].update(is_)
        return out

    # -- edits
    def _touch(self, ax) -> None:
        self.state = next(_state_ids)
        if ax.box is not Box.ABOX and is_logical(ax):
            self.tbox_state = self.state

    def add_axiom(self, ax: Axiom, mock: bool = False) -> bool:
        if not isinstance(ax, AXIOM_TYPES):
            raise ModelError(f"not an axiom: {ax!r}")
        if ax in self._axioms:
            if mock and ax not in self.mock_axioms:
                self.mock_axioms.add(ax)
                self.state = next(_state_ids)
            return False
        self._axioms[ax] = None
        self._count(ax, +1)
        if mock:
            self.mock_axioms.add(ax)
        self._touch(ax)
        return True

    def remove_axiom(self, ax: Axiom) -> bool:
        if ax not in self._axioms:
            return False
        del self._axioms[ax]
        self._count(ax, -1)
        self.mock_axioms.discard(ax)
        self._touch(ax)
        return True

    def mark_mock(self, name: Iri) -> None:
        if name not in self.mock_entities:
            self.mock_entities.add(name)
            self.state = next(_state_ids)

    # -- transactions
    def snapshot(self) -> Snapshot:
        return Snapshot(self._uid, tuple(self._axioms), frozenset(self.mock_axioms),
                        frozenset(self.mock_entities), self.state, self.tbox_state)

    def restore(self, snap: Snapshot) -> None:
        if not isinstance(snap, Snapshot) or snap.owner != self._uid:
            raise SnapshotMismatch("snapshot mismatch: snapshot was taken from another ontology")
        if self.state == snap.state:
            return
        if tuple(self._axioms) != snap.axioms:
            self._axioms = dict.fromkeys(snap.axioms)
            for counter in self._counts.values():
                counter.clear()
            for ax in snap.axioms:
                self._count(ax, +1)
        self.mock_axioms = set(snap.mock_axioms)
        self.mock_entities = set(snap.mock_entities)
        self.state = snap.state
        self.tbox_state = snap.tbox_state

    def clone(self) -> "Ontology":
        other = Ontology(prefixes=self.prefixes, iri=self.iri)
        for ax in self._axioms:
            other.add_axiom(ax, mock=ax in self.mock_axioms)
        other.mock_entities = set(self.mock_entities)
        return other

    def __repr__(self) -> str:
        return f"<Ontology {len(self)} axioms, {len(self.vc)} classes, " \
               f"{len(self.vop)} properties, {len(self.vi)} individuals>"


# -- function aliases ---------------------------------------------------------

def add_axiom(o: Ontology, ax: Axiom, mock: bool = False) -> bool:
    return o.add_axiom(ax, mock)


def remove_axiom(o: Ontology, ax: Axiom) -> bool:
    return o.remove_axiom(ax)


def snapshot(o: Ontology) -> Snapshot:
    return o.snapshot()


def restore(o: Ontology, s: Snapshot) -> None:
    o.restore(s)


def vocab_contains(o: Ontology, name: Iri, kind: EntityKind) -> bool:
    return o.vocab_contains(name, kind)


# -- convenience constructors used by tests and the generator ---------------

def C(iri: str | Iri) -> NamedClass:
    return NamedClass(iri if isinstance(iri, Iri) else Iri(iri))


def P(iri: str | Iri) -> NamedProperty:
    return NamedProperty(iri if isinstance(iri, Iri) else Iri(iri))


def I(iri: str | Iri) -> Iri:
    return iri if isinstance(iri, Iri) else Iri(iri)


def conj(*ops) -> ClassExpression:
    return ops[0] if len(ops) == 1 else IntersectionOf(tuple(ops))


def disj(*ops) -> ClassExpression:
    return ops[0] if len(ops) == 1 else UnionOf(tuple(ops))
