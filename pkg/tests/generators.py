"""Seeded random ontology generators for oracle comparisons."""

from __future__ import annotations

import random

from onto_tdd.fss import serialize, tokenize
from onto_tdd.model import (
    NOTHING, THING, AllValuesFrom, Characteristic, CharacteristicKind, ClassAssertion, ComplementOf,
    Declaration, DifferentIndividuals, DisjointClasses, EntityKind, EquivalentClasses,
    EquivalentObjectProperties, HasSelf, IntersectionOf, InverseObjectProperties,
    InverseOf, Iri, NamedClass, NamedProperty, ObjectPropertyAssertion, ObjectPropertyDomain,
    ObjectPropertyRange, Ontology, SomeValuesFrom, SubClassOf, SubObjectPropertyOf,
    SubPropertyChainOf, UnionOf,
)

NS = "http://example.org/onto#"


def _classes(k: int):
    return [NamedClass(Iri(NS + c)) for c in "ABCDE"[:k]]


def _props(k: int):
    return [NamedProperty(Iri(NS + p)) for p in "RS"[:k]]


def _inds(k: int):
    return [Iri(NS + i) for i in "abc"[:k]]


def random_concept(rng: random.Random, classes, props, depth: int, inverse: bool = False):
    if depth <= 0 or rng.random() < 0.3:
        c = rng.choice(classes)
        return ComplementOf(c) if rng.random() < 0.25 else c
    kind = rng.choice(["not", "and", "or", "some", "all"])
    sub = lambda: random_concept(rng, classes, props, depth - 1, inverse)
    if kind == "not":
        return ComplementOf(sub())
    if kind == "and":
        return IntersectionOf((sub(), sub()))
    if kind == "or":
        return UnionOf((sub(), sub()))
    p = rng.choice(props)
    if inverse and rng.random() < 0.3:
        p = InverseOf(p)
    return (SomeValuesFrom if kind == "some" else AllValuesFrom)(p, sub())


def random_alc(seed: int) -> Ontology:
    """≤5 classes, ≤2 properties, ≤6 axioms; ALC subsumptions plus assertions."""
    rng = random.Random(seed)
    classes = _classes(rng.randint(1, 5))
    props = _props(rng.randint(1, 2))
    inds = _inds(rng.randint(1, 3))
    axioms = []
    for _ in range(rng.randint(1, 6)):
        r = rng.random()
        if r < 0.55:
            axioms.append(SubClassOf(random_concept(rng, classes, props, 2),
                                     random_concept(rng, classes, props, 2)))
        elif r < 0.8:
            axioms.append(ClassAssertion(random_concept(rng, classes, props, 2), rng.choice(inds)))
        else:
            axioms.append(ObjectPropertyAssertion(rng.choice(props), rng.choice(inds), rng.choice(inds)))
    return Ontology(axioms)


def random_extended(seed: int) -> Ontology:
    """Like random_alc but also with inverses, hierarchy, chains and characteristics."""
    rng = random.Random(seed)
    classes = _classes(rng.randint(1, 4))
    props = _props(2)
    inds = _inds(rng.randint(1, 3))
    axioms = []
    for _ in range(rng.randint(1, 7)):
        r = rng.random()
        if r < 0.35:
            axioms.append(SubClassOf(random_concept(rng, classes, props, 2, True),
                                     random_concept(rng, classes, props, 2, True)))
        elif r < 0.45:
            axioms.append(rng.choice([EquivalentClasses, DisjointClasses])(
                random_concept(rng, classes, props, 1, True), random_concept(rng, classes, props, 1, True)))
        elif r < 0.55:
            axioms.append(ClassAssertion(random_concept(rng, classes, props, 2, True), rng.choice(inds)))
        elif r < 0.65:
            axioms.append(ObjectPropertyAssertion(rng.choice(props), rng.choice(inds), rng.choice(inds)))
        elif r < 0.7:
            a, b = rng.sample(inds, 2) if len(inds) > 1 else (inds[0], inds[0])
            if a != b:
                axioms.append(DifferentIndividuals(a, b))
        elif r < 0.8:
            axioms.append(Characteristic(rng.choice(list(CharacteristicKind)), rng.choice(props)))
        elif r < 0.87:
            p, q = props
            axioms.append(SubObjectPropertyOf(rng.choice([p, InverseOf(p)]), q))
        elif r < 0.92:
            p, q = props
            axioms.append(SubPropertyChainOf((p, q), q))
        elif r < 0.96:
            axioms.append(rng.choice([ObjectPropertyDomain, ObjectPropertyRange])(
                rng.choice(props), random_concept(rng, classes, props, 1)))
        else:
            axioms.append(SubClassOf(rng.choice(classes), HasSelf(rng.choice(props))))
    return Ontology(_simple_only(axioms))


_RESTRICTED = (CharacteristicKind.FUNCTIONAL, CharacteristicKind.INVERSE_FUNCTIONAL,
               CharacteristicKind.ASYMMETRIC, CharacteristicKind.IRREFLEXIVE)


def _simple_only(axioms: list) -> list:
    """Drop axioms that put a restricted characteristic or Self on a non-simple property."""
    def name(p):
        return p.prop.iri if isinstance(p, InverseOf) else p.iri

    bad = {a.prop.iri for a in axioms
           if isinstance(a, Characteristic) and a.kind is CharacteristicKind.TRANSITIVE}
    bad |= {a.sup.iri for a in axioms if isinstance(a, SubPropertyChainOf)}
    grew = True
    while grew:
        up = {a.sup.iri for a in axioms if isinstance(a, SubObjectPropertyOf) and name(a.sub) in bad}
        grew = not up <= bad
        bad |= up

    def ok(a):
        if isinstance(a, Characteristic) and a.kind in _RESTRICTED:
            return a.prop.iri not in bad
        if isinstance(a, SubClassOf) and isinstance(a.sup, HasSelf):
            return a.sup.prop.iri not in bad
        return True
    return [a for a in axioms if ok(a)]


# -- well-formed document fuzzing ---------------------------------------------------

_NAMESPACES = ["http://example.org/onto#", "http://example.org/onto#sub/", "urn:x:", "http://a.b/c/"]
_LOCALS = ["A", "B", "Person", "has_part", "x-1", "C9", "9lives", "a/b", "%41", "r.s"]


def _names(rng, ns_list, k):
    return [Iri(rng.choice(ns_list) + rng.choice(_LOCALS) + str(i)) for i in range(k)]


def _fuzz_concept(rng, classes, props, depth):
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.06:
            return THING
        if r < 0.1:
            return NOTHING
        return rng.choice(classes)
    kind = rng.choice(["not", "and", "or", "some", "all", "self"])
    sub = lambda: _fuzz_concept(rng, classes, props, depth - 1)  # noqa: E731
    p = rng.choice(props)
    if rng.random() < 0.2:
        p = InverseOf(p)
    if kind == "not":
        return ComplementOf(sub())
    if kind in ("and", "or"):
        ops = tuple(sub() for _ in range(rng.randint(2, 3)))
        return (IntersectionOf if kind == "and" else UnionOf)(ops)
    if kind == "self":
        return HasSelf(p)
    return (SomeValuesFrom if kind == "some" else AllValuesFrom)(p, sub())


def fuzz_ontology(seed: int) -> Ontology:
    rng = random.Random(seed)
    ns_list = rng.sample(_NAMESPACES, rng.randint(1, len(_NAMESPACES)))
    classes = [NamedClass(i) for i in _names(rng, ns_list, rng.randint(1, 5))]
    props = [NamedProperty(i) for i in _names(rng, ns_list, rng.randint(1, 3))]
    inds = _names(rng, ns_list, rng.randint(1, 3))
    C = lambda d=2: _fuzz_concept(rng, classes, props, d)  # noqa: E731

    def P():
        p = rng.choice(props)
        return InverseOf(p) if rng.random() < 0.25 else p

    makers = [
        lambda: SubClassOf(C(), C()),
        lambda: EquivalentClasses(C(1), C(1)),
        lambda: DisjointClasses(C(1), C(1)),
        lambda: ObjectPropertyDomain(P(), C(1)),
        lambda: ObjectPropertyRange(P(), C(1)),
        lambda: SubObjectPropertyOf(P(), P()),
        lambda: SubPropertyChainOf(tuple(P() for _ in range(rng.randint(2, 3))), P()),
        lambda: EquivalentObjectProperties(P(), P()),
        lambda: InverseObjectProperties(rng.choice(props), rng.choice(props)),
        lambda: Characteristic(rng.choice(list(CharacteristicKind)), P()),
        lambda: ClassAssertion(C(1), rng.choice(inds)),
        lambda: ObjectPropertyAssertion(rng.choice(props), rng.choice(inds), rng.choice(inds)),
        lambda: DifferentIndividuals(rng.choice(inds), rng.choice(inds)),
        lambda: Declaration(rng.choice(list(EntityKind)), rng.choice(inds)),
    ]
    prefixes = {}
    if rng.random() < 0.8:
        prefixes[""] = ns_list[0]
    for k, ns in enumerate(ns_list[1:]):
        prefixes[f"p{k}"] = ns
    o = Ontology(prefixes=prefixes, iri=f"http://example.org/fuzz/{seed}" if rng.random() < 0.8 else None)
    for _ in range(rng.randint(0, 12)):
        try:
            o.add_axiom(rng.choice(makers)())
        except Exception:
            # the model rejects some shapes on its own (e.g. a class related to itself)
            continue
    return o


_SEPARATORS = [" ", "  ", "\t", "\n", "\n\n", " \r\n", " # note (with parens) <and> \"quotes\"\n"]


def fuzz_document(seed: int) -> tuple[str, Ontology]:
    """A well-formed document for a random ontology with randomized layout."""
    o = fuzz_ontology(seed)
    rng = random.Random(~seed)
    text = serialize(o)
    prefixes = dict(o.prefixes)
    out = ["# fuzzed document\n"] if rng.random() < 0.5 else []
    toks = tokenize(text)
    for k, tok in enumerate(toks):
        if tok.kind == "EOF":
            break
        word = tok.text
        in_prefix_decl = k >= 2 and toks[k - 2].text == "Prefix"
        if tok.kind == "IRI":
            word = f"<{tok.text}>"
        elif tok.kind == "NAME" and ":" in word and not in_prefix_decl and rng.random() < 0.3:
            pfx, local = word.split(":", 1)
            if pfx in prefixes:
                word = f"<{prefixes[pfx]}{local}>"
        out.append(word)
        out.append(rng.choice(_SEPARATORS) if rng.random() < 0.5 else " ")
    return "".join(out), o
