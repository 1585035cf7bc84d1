from __future__ import annotations

import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass

from ..errors import EngineError, InconsistentOntologyError
from ..model import (
    NOTHING_IRI, THING_IRI, AllValuesFrom, Box, Characteristic, CharacteristicKind,
    ClassAssertion, ComplementOf, Declaration, DifferentIndividuals, DisjointClasses,
    EquivalentClasses, EquivalentObjectProperties, HasSelf, IntersectionOf,
    InverseObjectProperties, Iri, NamedClass, ObjectPropertyAssertion, ObjectPropertyDomain,
    ObjectPropertyRange, Ontology, SubClassOf, SubObjectPropertyOf,
    SubPropertyChainOf, inverse,
)
from .kb import KB
from .tableau import DEFAULT_MAX_NODES, EMPTY, Tableau, TableauResult

PROBE_NS = "urn:tdd:probe:"
PROBE_CLASS = NamedClass(Iri(PROBE_NS + "B"))


def _probe(i: int) -> Iri:
    return Iri(f"{PROBE_NS}x{i}")


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    clash_witness: str | None = None

    def __bool__(self) -> bool:
        return self.consistent


@dataclass(frozen=True)
class ClassProfile:
    subsumers: frozenset | None
    root_roles: frozenset
    self_roles: frozenset


@dataclass(frozen=True)
class ClassNode:
    direct_supers: frozenset
    equivalents: frozenset


class Clock:
    """Nested timer splitting wall time into classification and query shares."""

    def __init__(self):
        self.totals = {"classification": 0.0, "query": 0.0}
        self._stack: list = []

    @contextmanager
    def section(self, kind: str):
        start = time.perf_counter()
        frame = [0.0]
        self._stack.append(frame)
        try:
            yield
        finally:
            self._stack.pop()
            dt = time.perf_counter() - start
            self.totals[kind] += max(0.0, dt - frame[0])
            if self._stack:
                self._stack[-1][0] += dt

    def read(self) -> tuple[float, float]:
        return self.totals["classification"], self.totals["query"]


class _ABoxIndex:
    def __init__(self, o: Ontology):
        self.order: list[Iri] = []
        seen = set()
        self.types = defaultdict(list)
        self.edges = defaultdict(list)  # ind -> [(prop, s, o)]
        self.diff = defaultdict(list)
        self.adj = defaultdict(set)
        for ax in o.axioms_in(Box.ABOX):
            if isinstance(ax, ClassAssertion):
                inds = (ax.individual,)
                self.types[ax.individual].append(ax.cls)
            elif isinstance(ax, ObjectPropertyAssertion):
                inds = (ax.subject, ax.object)
                self.edges[ax.subject].append(ax)
                self.adj[ax.subject].add(ax.object)
                self.adj[ax.object].add(ax.subject)
            elif isinstance(ax, DifferentIndividuals):
                inds = (ax.first, ax.second)
                self.diff[ax.first].append(ax.second)
                self.adj[ax.first].add(ax.second)
                self.adj[ax.second].add(ax.first)
            else:
                inds = (ax.iri,)
            for i in inds:
                if i not in seen:
                    seen.add(i)
                    self.order.append(i)
        self.rank = {i: k for k, i in enumerate(self.order)}
        self._comp: dict = {}

    def component(self, seeds) -> list[Iri]:
        out = set()
        for s in seeds:
            if s in out:
                continue
            todo = [s]
            out.add(s)
            while todo:
                x = todo.pop()
                for y in self.adj.get(x, ()):
                    if y not in out:
                        out.add(y)
                        todo.append(y)
        return sorted(out, key=lambda i: (self.rank.get(i, len(self.rank)), i.value))

    def component_id(self, ind: Iri):
        cid = self._comp.get(ind)
        if cid is None:
            for member in self.component([ind]):
                self._comp[member] = ind
            cid = ind
        return cid


class Reasoner:
    """Decision procedures bound to one (mutable) ontology.

    Results are memoised on the ontology's state counters: the compiled
    terminology on ``tbox_state`` and the consistency verdict on ``state``.
    """

    def __init__(self, ontology: Ontology, max_nodes: int = DEFAULT_MAX_NODES,
                 timeout: float | None = None, memoize: bool = True):
        self.o = ontology
        self.max_nodes = max_nodes
        self.timeout = timeout
        self.memoize = memoize
        self.clock = Clock()
        self.deadline: float | None = None
        self._kb: KB | None = None
        self._kb_state = None
        self._kbs: dict = {}
        self._consistency: dict = {}
        self._abox: _ABoxIndex | None = None
        self._abox_state = None
        self._taxonomy: dict = {}
        self._tax_base = None
        self._model_atoms: dict = {}
        self.last_result: TableauResult | None = None

    # -- plumbing ------------------------------------------------------------
    @contextmanager
    def budget(self, seconds: float | None):
        """Bound every tableau run inside the block by a shared deadline."""
        old = self.deadline
        self.deadline = None if seconds is None else time.monotonic() + seconds
        try:
            yield
        finally:
            self.deadline = old

    def kb(self) -> KB:
        key = self.o.tbox_state
        if self._kb is None or self._kb_state != key or not self.memoize:
            kb = self._kbs.get(key) if self.memoize else None
            if kb is None:
                with self.clock.section("classification"):
                    kb = KB([ax for ax in self.o if ax.box is not Box.ABOX])
                if len(self._kbs) >= 4:
                    self._kbs.clear()
                self._kbs[key] = kb
            self._kb, self._kb_state = kb, key
        return self._kb

    def _abox_index(self) -> _ABoxIndex:
        if self._abox is None or self._abox_state != self.o.state:
            self._abox = _ABoxIndex(self.o)
            self._abox_state = self.o.state
        return self._abox

    def _tableau(self) -> Tableau:
        deadline = self.deadline
        if deadline is None and self.timeout is not None:
            deadline = time.monotonic() + self.timeout
        return Tableau(self.kb(), self.max_nodes, deadline)

    def _run(self, setup) -> TableauResult:
        t = self._tableau()
        res = t.seed(setup)
        if res is None:
            res = t.run()
        self.last_result = res
        self.last_tableau = t
        return res

    def _load_abox(self, t: Tableau, inds, extra=()) -> None:
        """Seed t with the assertions about ``inds`` plus extra (kind, ...) facts."""
        ix = self._abox_index()
        cs, roles = t.cs, t.kb.roles
        for i in inds:
            t.individual(i)
        for i in inds:
            x = t.by_name[i]
            for ce in ix.types.get(i, ()):
                t.add_label(x, cs.of(ce), EMPTY)
            for ax in ix.edges.get(i, ()):
                t.add_edge(x, t.individual(ax.object), roles.of(ax.prop), EMPTY)
            for j in ix.diff.get(i, ()):
                t.add_distinct(x, t.individual(j), EMPTY)
        _apply_extra(t, extra)

    # -- consistency ---------------------------------------------------------
    def check_consistency(self) -> ConsistencyVerdict:
        key = self.o.state
        hit = self._consistency.get(key) if self.memoize else None
        if hit is not None:
            return hit
        with self.clock.section("classification"):
            ix = self._abox_index()
            inds = list(ix.order)

            def setup(t: Tableau):
                if inds:
                    self._load_abox(t, inds)
                else:
                    t.new_node(name=Iri(PROBE_NS + "root"))

            res = self._run(setup)
            verdict = ConsistencyVerdict(res.consistent, res.witness)
        if self.memoize:
            if len(self._consistency) > 64:
                self._consistency.clear()
            self._consistency[key] = verdict
        return verdict

    def is_consistent(self) -> bool:
        return self.check_consistency().consistent

    def require_consistent(self) -> None:
        if not self.is_consistent():
            raise InconsistentOntologyError("inconsistent ontology")

    # -- concept level -------------------------------------------------------
    def _concept_sat(self, ce) -> bool:
        kb = self.kb()
        c = kb.concepts.of(ce)

        def setup(t: Tableau):
            x = t.new_node(name=Iri(PROBE_NS + "root"))
            t.add_label(x, c, EMPTY)

        return self._run(setup).consistent

    def is_satisfiable(self, ce) -> bool:
        if not self.is_consistent():
            return False
        with self.clock.section("query"):
            return self._concept_sat(ce)

    def _subsumed(self, sub, sup) -> bool:
        return not self._concept_sat(IntersectionOf((sub, ComplementOf(sup))))

    # -- ABox level ----------------------------------------------------------
    def _abox_unsat(self, seeds, extra) -> bool:
        """True iff the ABox component of ``seeds`` plus ``extra`` facts is inconsistent."""
        ix = self._abox_index()
        comp = ix.component([s for s in seeds if s in ix.rank])
        comp += [s for s in seeds if s not in ix.rank and s not in comp]
        return not self._run(lambda t: self._load_abox(t, comp, extra)).consistent

    def is_instance(self, ce, ind: Iri) -> bool:
        if not self.is_consistent():
            return True
        with self.clock.section("query"):
            return self._abox_unsat([ind], [("type", ind, ComplementOf(ce))])

    def has_property_assertion(self, p, s: Iri, o: Iri) -> bool:
        if not self.is_consistent():
            return True
        with self.clock.section("query"):
            return self._abox_unsat([s, o], [("type", o, PROBE_CLASS),
                                             ("type", s, AllValuesFrom(p, ComplementOf(PROBE_CLASS)))])

    def instances_of(self, ce) -> set:
        self.require_consistent()
        return {a for a in sorted(self.o.vi) if self.is_instance(ce, a)}

    def entailed_property_assertions(self, p, subject: Iri | None = None,
                                     obj: Iri | None = None) -> set:
        self.require_consistent()
        if subject is None and obj is None:
            raise ValueError("at most one of subject/object may be unbound")
        ix = self._abox_index()
        vi = sorted(self.o.vi)
        if subject is not None and obj is not None:
            pairs = [(subject, obj)]
        elif subject is not None:
            pairs = [(subject, b) for b in vi]
        else:
            pairs = [(a, obj) for a in vi]
        out = set()
        for a, b in pairs:
            # distinct components stay apart in some model (no nominals)
            if a != b and a in ix.rank and b in ix.rank and ix.component_id(a) != ix.component_id(b):
                continue
            if self.has_property_assertion(p, a, b):
                out.add((a, b))
        return out

    # -- entailment ----------------------------------------------------------
    def _probe_unsat(self, extra) -> bool:
        return not self._run(lambda t: _apply_extra(t, extra)).consistent

    def entails(self, ax) -> bool:
        if not self.is_consistent():
            return True
        with self.clock.section("query"):
            return self._entails(ax)

    def _entails(self, ax) -> bool:
        x, y, z = _probe(0), _probe(1), _probe(2)
        B = PROBE_CLASS
        notB = ComplementOf(B)
        if isinstance(ax, SubClassOf):
            return self._subsumed(ax.sub, ax.sup)
        if isinstance(ax, EquivalentClasses):
            return self._subsumed(ax.first, ax.second) and self._subsumed(ax.second, ax.first)
        if isinstance(ax, DisjointClasses):
            return not self._concept_sat(IntersectionOf((ax.first, ax.second)))
        if isinstance(ax, ObjectPropertyDomain):
            return self._probe_unsat([("edge", ax.prop, x, y), ("type", x, ComplementOf(ax.cls))])
        if isinstance(ax, ObjectPropertyRange):
            return self._probe_unsat([("edge", ax.prop, x, y), ("type", y, ComplementOf(ax.cls))])
        if isinstance(ax, SubObjectPropertyOf):
            return self._sub_role([ax.sub], ax.sup)
        if isinstance(ax, SubPropertyChainOf):
            return self._sub_role(list(ax.chain), ax.sup)
        if isinstance(ax, EquivalentObjectProperties):
            return self._sub_role([ax.first], ax.second) and self._sub_role([ax.second], ax.first)
        if isinstance(ax, InverseObjectProperties):
            return (self._sub_role([ax.first], inverse(ax.second))
                    and self._sub_role([ax.second], inverse(ax.first)))
        if isinstance(ax, Characteristic):
            R, k = ax.prop, ax.kind
            if k is CharacteristicKind.FUNCTIONAL:
                return self._probe_unsat([("edge", R, x, y), ("edge", R, x, z), ("diff", y, z)])
            if k is CharacteristicKind.INVERSE_FUNCTIONAL:
                return self._probe_unsat([("edge", R, y, x), ("edge", R, z, x), ("diff", y, z)])
            if k is CharacteristicKind.TRANSITIVE:
                return self._sub_role([R, R], R)
            if k is CharacteristicKind.SYMMETRIC:
                return self._sub_role([R], inverse(R))
            if k is CharacteristicKind.ASYMMETRIC:
                return self._probe_unsat([("edge", R, x, y), ("edge", R, y, x)])
            if k is CharacteristicKind.REFLEXIVE:
                return self._probe_unsat([("type", x, ComplementOf(HasSelf(R)))])
            if k is CharacteristicKind.IRREFLEXIVE:
                return self._probe_unsat([("edge", R, x, x)])
        if isinstance(ax, ClassAssertion):
            return self._abox_unsat([ax.individual], [("type", ax.individual, ComplementOf(ax.cls))])
        if isinstance(ax, ObjectPropertyAssertion):
            return self._abox_unsat([ax.subject, ax.object],
                                    [("type", ax.object, B),
                                     ("type", ax.subject, AllValuesFrom(ax.prop, notB))])
        if isinstance(ax, DifferentIndividuals):
            return self._abox_unsat([ax.first, ax.second], [("same", ax.first, ax.second)])
        if isinstance(ax, Declaration):
            return True
        raise EngineError(f"cannot decide entailment of {type(ax).__name__}")

    def _sub_role(self, chain: list, sup) -> bool:
        """chain ⊑ sup via a probe path x0 -chain-> xn with B(xn), ∀sup.¬B(x0)."""
        pts = [_probe(i) for i in range(len(chain) + 1)]
        extra = [("edge", p, pts[i], pts[i + 1]) for i, p in enumerate(chain)]
        extra += [("type", pts[-1], PROBE_CLASS),
                  ("type", pts[0], AllValuesFrom(sup, ComplementOf(PROBE_CLASS)))]
        return self._probe_unsat(extra)

    # -- classification --------------------------------------------------------
    def _profile(self, a: Iri) -> "ClassProfile":
        """Named subsumers of a plus the root roles of one model of a."""
        kb = self.kb()
        c = kb.concepts.atom(a)

        def setup(t: Tableau):
            x = t.new_node(name=Iri(PROBE_NS + "root"))
            t.add_label(x, c, EMPTY)

        res = self._run(setup)
        if not res.consistent:
            return ClassProfile(None, frozenset(), frozenset())
        t = self.last_tableau
        forced = t.forced_atoms_at(0)
        cands = t.atoms_at(0)
        roles, loops = t.roles_at(0)
        vc = self.o.vc
        out = set()
        for b in sorted(cands):
            if b == a or b not in vc:
                continue
            # atoms derived without any choice hold in every model
            if b in forced or self._subsumed(NamedClass(a), NamedClass(b)):
                out.add(b)
        return ClassProfile(frozenset(out), frozenset(roles), frozenset(loops))

    def taxonomy(self) -> dict:
        """Profiles of every named class, memoised on the terminology state."""
        if not self.is_consistent():
            raise InconsistentOntologyError("inconsistent ontology")
        key = self.o.tbox_state
        hit = self._taxonomy.get(key) if self.memoize else None
        if hit is None:
            with self.clock.section("classification"):
                hit = self._extend_taxonomy()
                if hit is None:
                    hit = {a: self._profile(a) for a in sorted(self.o.vc)}
                    tbox = frozenset(ax for ax in self.o if ax.box is not Box.ABOX)
                    self._tax_base = (tbox, frozenset(hit), hit)
            if len(self._taxonomy) >= 4:
                self._taxonomy.clear()
            self._taxonomy[key] = hit
        missing = [a for a in self.o.vc if a not in hit]
        if missing:
            # names that only occur in assertions: the terminology is unchanged
            with self.clock.section("classification"):
                for a in sorted(missing):
                    hit[a] = self._profile(a)
        return hit

    def _extend_taxonomy(self) -> dict | None:
        """Reuse the last full taxonomy when the only new terminology axioms
        define fresh class names (a conservative extension for old names)."""
        if self._tax_base is None or not self.memoize:
            return None
        base_axioms, base_names, base = self._tax_base
        tbox = {ax for ax in self.o if ax.box is not Box.ABOX}
        if not base_axioms <= tbox:
            return None
        fresh = set()
        for ax in tbox - base_axioms:
            if isinstance(ax, Declaration):
                continue
            if not (isinstance(ax, SubClassOf) and isinstance(ax.sub, NamedClass)
                    and ax.sub.iri not in base_names):
                return None
            fresh.add(ax.sub.iri)
        out = dict(base)
        for a in sorted(self.o.vc):
            if a not in base_names:
                out[a] = self._profile(a)
        return out

    def model_atoms(self, ce) -> set | None:
        """Named classes at the root of one model of ce; None if ce is unsatisfiable.

        Every named subsumer of ce is among them, so they bound the candidates
        of queries with a class variable on the right-hand side.
        """
        key = (self.o.tbox_state, ce)
        if key in self._model_atoms:
            return self._model_atoms[key]
        with self.clock.section("query"):
            c = self.kb().concepts.of(ce)

            def setup(t: Tableau):
                x = t.new_node(name=Iri(PROBE_NS + "root"))
                t.add_label(x, c, EMPTY)

            res = self._run(setup)
            out = self.last_tableau.atoms_at(0) if res.consistent else None
        if len(self._model_atoms) > 256:
            self._model_atoms.clear()
        self._model_atoms[key] = out
        return out

    def _subsumers(self, a: Iri) -> set | None:
        prof = self._taxonomy.get(self.o.tbox_state, {}).get(a)
        if prof is None:
            prof = self._profile(a)
        return None if prof.subsumers is None else set(prof.subsumers)

    def unsatisfiable_classes(self) -> set:
        if not self.is_consistent():
            raise InconsistentOntologyError("inconsistent ontology")
        return {a for a, p in self.taxonomy().items() if p.subsumers is None}

    def classify(self) -> dict:
        tax = self.taxonomy()
        subs = {a: p.subsumers for a, p in tax.items()}
        names = sorted(subs)
        unsat = {a for a, s in subs.items() if s is None}
        out = {}
        for a in names:
            if a in unsat:
                out[a] = ClassNode(frozenset(), frozenset((unsat - {a}) | {NOTHING_IRI}))
                continue
            s = subs[a]
            eq = {b for b in s if subs[b] is not None and a in subs[b]}
            strict = s - eq
            direct = {b for b in strict
                      if not any(b in subs[c] and c not in eq and b != c and c not in subs[b]
                                 for c in strict)}
            if not direct:
                direct = {THING_IRI}
            out[a] = ClassNode(frozenset(direct), frozenset(eq))
        return out

    def direct_superclasses(self, a: Iri) -> set:
        s = self._subsumers(a)
        if s is None:
            return set()
        subs = {b: (self._subsumers(b) or set()) for b in s}
        strict = {b for b in s if a not in subs[b]}
        direct = {b for b in strict
                  if not any(c != b and b in subs[c] and c not in subs[b] for c in strict)}
        return direct or {THING_IRI}


def _apply_extra(t: Tableau, extra) -> None:
    cs, roles = t.cs, t.kb.roles
    for fact in extra:
        kind = fact[0]
        if kind == "type":
            _, ind, ce = fact
            t.add_label(t.individual(ind), cs.of(ce), EMPTY)
        elif kind == "edge":
            _, p, s, o = fact
            t.add_edge(t.individual(s), t.individual(o), roles.of(p), EMPTY)
        elif kind == "diff":
            _, a, b = fact
            t.add_distinct(t.individual(a), t.individual(b), EMPTY)
        elif kind == "same":
            _, a, b = fact
            t.merge(t.individual(a), t.individual(b), EMPTY)
        else:  # pragma: no cover
            raise ValueError(kind)


# -- function-style API ---------------------------------------------------------

def check_consistency(o: Ontology) -> ConsistencyVerdict:
    return Reasoner(o).check_consistency()


def is_satisfiable(o: Ontology, ce) -> bool:
    return Reasoner(o).is_satisfiable(ce)


def entails(o: Ontology, ax) -> bool:
    return Reasoner(o).entails(ax)


def classify(o: Ontology) -> dict:
    return Reasoner(o).classify()


def instances_of(o: Ontology, ce) -> set:
    return Reasoner(o).instances_of(ce)


def entailed_property_assertions(o: Ontology, p, subject=None, obj=None) -> set:
    return Reasoner(o).entailed_property_assertions(p, subject, obj)
