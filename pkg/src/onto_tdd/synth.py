"""Synthetic ontologies of a requested size for benchmarking.

Each ontology has two class trees. Classes of the first tree get existential
restrictions whose fillers come from the second tree, and the second tree has
no restrictions at all. Siblings may be declared disjoint, but the two roots
never are. Every individual is typed with a single class and property
assertions respect the declared domains and ranges. Together these rules keep
the result consistent and free of unsatisfiable classes, so every random
test target remains meaningful.
"""

from __future__ import annotations

import random
from pathlib import Path

from .fss import save
from .model import (
    CharacteristicKind, ClassAssertion, Characteristic, Declaration, DisjointClasses, EntityKind, Iri,
    NamedClass, NamedProperty, ObjectPropertyAssertion, ObjectPropertyDomain, ObjectPropertyRange,
    Ontology, SomeValuesFrom, SubClassOf, SubObjectPropertyOf,
)

BASE = "http://example.org/synth/"

# share of the axiom budget per kind; the rest goes to property assertions
_SHARES = {"classes": 0.30, "some": 0.12, "disjoint": 0.06, "types": 0.22}


def _tree(rng: random.Random, names: list) -> dict:
    """Random recursive tree over names (depth grows like log n); names[0] is the root."""
    parent = {names[0]: None}
    for k, n in enumerate(names[1:], start=1):
        parent[n] = names[rng.randrange(k)]
    return parent


def synthetic_ontology(n_axioms: int, seed: int = 0, name: str | None = None) -> Ontology:
    """Build an ontology with roughly ``n_axioms`` logical axioms."""
    if n_axioms < 10:
        raise ValueError("at least 10 axioms")
    rng = random.Random(seed)
    tag = name or f"s{n_axioms}_{seed}"
    ns = f"{BASE}{tag}#"
    o = Ontology(prefixes={"": ns}, iri=f"{BASE}{tag}")

    n_cls = max(4, int(n_axioms * _SHARES["classes"]))
    n_a = max(2, n_cls * 3 // 5)
    tree_a = [Iri(f"{ns}A{i}") for i in range(n_a)]
    tree_b = [Iri(f"{ns}B{i}") for i in range(n_cls - n_a)]
    pa, pb = _tree(rng, tree_a), _tree(rng, tree_b)

    n_props = max(3, min(40, n_axioms // 60))
    props = [NamedProperty(Iri(f"{ns}r{i}")) for i in range(n_props)]
    # r0 stays plain; a few others get characteristics that cannot cause clashes
    transitive = {p for p in props[1:] if rng.random() < 0.15}
    symmetric = {p for p in props[1:] if p not in transitive and rng.random() < 0.1}
    irreflexive = {p for p in props[1:] if rng.random() < 0.1}

    for i in tree_a + tree_b:
        o.add_axiom(Declaration(EntityKind.CLASS, i))
    for p in props:
        o.add_axiom(Declaration(EntityKind.PROPERTY, p.iri))
    for tree, par in ((tree_a, pa), (tree_b, pb)):
        for c in tree[1:]:
            o.add_axiom(SubClassOf(NamedClass(c), NamedClass(par[c])))

    root_a, root_b = NamedClass(tree_a[0]), NamedClass(tree_b[0])
    plain = [p for p in props if p not in symmetric]
    for p in props:
        if p in symmetric:
            o.add_axiom(Characteristic(CharacteristicKind.SYMMETRIC, p))
            continue
        o.add_axiom(ObjectPropertyDomain(p, root_a))
        o.add_axiom(ObjectPropertyRange(p, root_b))
        if p in transitive:
            o.add_axiom(Characteristic(CharacteristicKind.TRANSITIVE, p))
    for p in irreflexive:
        o.add_axiom(Characteristic(CharacteristicKind.IRREFLEXIVE, p))
    # a shallow hierarchy among the plain properties
    for k in range(1, len(plain), 4):
        if plain[k] not in transitive:
            o.add_axiom(SubObjectPropertyOf(plain[k], plain[k - 1]))

    for _ in range(int(n_axioms * _SHARES["some"])):
        c = NamedClass(rng.choice(tree_a))
        o.add_axiom(SubClassOf(c, SomeValuesFrom(rng.choice(plain), NamedClass(rng.choice(tree_b)))))

    kids: dict = {}
    for par in (pa, pb):
        for c, p in par.items():
            if p is not None:
                kids.setdefault(p, []).append(c)
    groups = [v for v in kids.values() if len(v) > 1]
    for _ in range(int(n_axioms * _SHARES["disjoint"])):
        if not groups:
            break
        x, y = rng.sample(rng.choice(groups), 2)
        o.add_axiom(DisjointClasses(NamedClass(x), NamedClass(y)))

    n_types = max(2, int(n_axioms * _SHARES["types"]))
    inds = [Iri(f"{ns}i{k}") for k in range(n_types)]
    typed_a, typed_b = [], []
    for k, i in enumerate(inds):
        in_a = k % 2 == 0
        c = rng.choice(tree_a if in_a else tree_b)
        (typed_a if in_a else typed_b).append(i)
        o.add_axiom(ClassAssertion(NamedClass(c), i))

    # property assertions fill the remaining budget
    count = sum(1 for ax in o if not isinstance(ax, Declaration))
    tries = 0
    while count < n_axioms and tries < n_axioms * 4:
        tries += 1
        p = rng.choice(props)
        if p in symmetric:
            s, t = rng.sample(inds, 2)
        else:
            s, t = rng.choice(typed_a), rng.choice(typed_b)
        if s != t and o.add_axiom(ObjectPropertyAssertion(p, s, t)):
            count += 1
    return o


def write_corpus(directory, sizes, seed: int = 0) -> list[Path]:
    """Write one ``.ofn`` file per requested size and return the paths."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k, n in enumerate(sizes):
        name = f"synth_{n:06d}_{k}"
        path = out / f"{name}.ofn"
        save(synthetic_ontology(n, seed + k, name), path)
        paths.append(path)
    return paths
