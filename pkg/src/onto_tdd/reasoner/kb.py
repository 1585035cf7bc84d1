"""Compilation of TBox/RBox axioms into the integer tables the tableau runs on.

Concepts are interned in negation normal form. Roles are encoded as ints:
``2*i`` for the i-th named property, ``2*i + 1`` for its inverse.
"""

from __future__ import annotations

from collections import defaultdict

from ..errors import FragmentViolation, NonRegularChainError
from ..model import (
    AllValuesFrom, Characteristic, CharacteristicKind, ClassAssertion, ComplementOf, Declaration,
    DifferentIndividuals, DisjointClasses, EquivalentClasses, EquivalentObjectProperties, HasSelf,
    IntersectionOf, InverseObjectProperties, InverseOf, Iri, NamedClass, NamedProperty,
    ObjectPropertyAssertion, ObjectPropertyDomain, ObjectPropertyRange, SomeValuesFrom,
    SubClassOf, SubObjectPropertyOf, SubPropertyChainOf, UnionOf, _Nothing, _Thing,
)

TOP, BOT, ATOM, NATOM, AND, OR, SOME, ALL, SELF, NSELF = range(10)
KIND_NAMES = ("TOP", "BOT", "ATOM", "NATOM", "AND", "OR", "SOME", "ALL", "SELF", "NSELF")


class Roles:
    def __init__(self):
        self.index: dict[Iri, int] = {}
        self.names: list[Iri] = []

    def named(self, iri: Iri) -> int:
        i = self.index.get(iri)
        if i is None:
            i = self.index[iri] = len(self.names)
            self.names.append(iri)
        return 2 * i

    def of(self, p) -> int:
        if isinstance(p, InverseOf):
            return self.named(p.prop.iri) + 1
        if isinstance(p, NamedProperty):
            return self.named(p.iri)
        raise FragmentViolation(f"fragment violation: not a property expression: {p!r}")

    def render(self, r: int) -> str:
        name = self.names[r >> 1].local_name
        return f"{name}⁻" if r & 1 else name


class Concepts:
    def __init__(self, roles: Roles):
        self.roles = roles
        self.kind: list[int] = []
        self.a: list = []
        self.b: list = []
        self._index: dict = {}
        self._neg: dict[int, int] = {}
        self.atom_of: dict[Iri, int] = {}
        self.iri_of: dict[int, Iri] = {}
        self.top = self._intern(TOP, None, None)
        self.bot = self._intern(BOT, None, None)
        self._neg[self.top] = self.bot
        self._neg[self.bot] = self.top

    def __len__(self) -> int:
        return len(self.kind)

    def _intern(self, kind, a, b) -> int:
        key = (kind, a, b)
        c = self._index.get(key)
        if c is None:
            c = self._index[key] = len(self.kind)
            self.kind.append(kind)
            self.a.append(a)
            self.b.append(b)
        return c

    def atom(self, iri: Iri) -> int:
        c = self.atom_of.get(iri)
        if c is None:
            k = len(self.atom_of)
            c = self._intern(ATOM, k, None)
            n = self._intern(NATOM, k, None)
            self._neg[c] = n
            self._neg[n] = c
            self.atom_of[iri] = c
            self.iri_of[c] = iri
        return c

    def neg(self, c: int) -> int:
        n = self._neg.get(c)
        if n is not None:
            return n
        k = self.kind[c]
        if k == AND:
            n = self.disj([self.neg(x) for x in self.a[c]])
        elif k == OR:
            n = self.conj([self.neg(x) for x in self.a[c]])
        elif k == SOME:
            n = self.all(self.a[c], self.neg(self.b[c]))
        elif k == ALL:
            n = self.some(self.a[c], self.neg(self.b[c]))
        elif k == SELF:
            n = self._intern(NSELF, self.a[c], None)
        elif k == NSELF:
            n = self._intern(SELF, self.a[c], None)
        else:  # pragma: no cover
            raise AssertionError(k)
        self._neg[c] = n
        # a simplified negation may be an existing concept with its own entry
        self._neg.setdefault(n, c)
        return n

    def conj(self, items) -> int:
        flat: set[int] = set()
        for x in items:
            if self.kind[x] == AND:
                flat.update(self.a[x])
            elif x == self.bot:
                return self.bot
            elif x != self.top:
                flat.add(x)
        for x in flat:
            if self._neg.get(x) in flat and self.kind[x] in (ATOM, NATOM):
                return self.bot
        if not flat:
            return self.top
        if len(flat) == 1:
            return next(iter(flat))
        return self._intern(AND, tuple(sorted(flat)), None)

    def disj(self, items) -> int:
        flat: set[int] = set()
        for x in items:
            if self.kind[x] == OR:
                flat.update(self.a[x])
            elif x == self.top:
                return self.top
            elif x != self.bot:
                flat.add(x)
        if not flat:
            return self.bot
        if len(flat) == 1:
            return next(iter(flat))
        return self._intern(OR, tuple(sorted(flat)), None)

    def some(self, r: int, f: int) -> int:
        if f == self.bot:
            return self.bot
        return self._intern(SOME, r, f)

    def all(self, r: int, f: int) -> int:
        if f == self.top:
            return self.top
        return self._intern(ALL, r, f)

    def self_(self, r: int) -> int:
        return self._intern(SELF, r, None)

    def of(self, ce, negated: bool = False) -> int:
        """Intern a model class expression (NNF, optionally negated)."""
        c = self._of(ce)
        return self.neg(c) if negated else c

    def _of(self, ce) -> int:
        if isinstance(ce, NamedClass):
            return self.atom(ce.iri)
        if isinstance(ce, _Thing):
            return self.top
        if isinstance(ce, _Nothing):
            return self.bot
        if isinstance(ce, ComplementOf):
            return self.neg(self._of(ce.operand))
        if isinstance(ce, IntersectionOf):
            return self.conj([self._of(x) for x in ce.operands])
        if isinstance(ce, UnionOf):
            return self.disj([self._of(x) for x in ce.operands])
        if isinstance(ce, SomeValuesFrom):
            return self.some(self.roles.of(ce.prop), self._of(ce.filler))
        if isinstance(ce, AllValuesFrom):
            return self.all(self.roles.of(ce.prop), self._of(ce.filler))
        if isinstance(ce, HasSelf):
            return self.self_(self.roles.of(ce.prop))
        raise FragmentViolation(f"fragment violation: not a class expression: {ce!r}")

    def render(self, c: int) -> str:
        k = self.kind[c]
        if k == TOP:
            return "⊤"
        if k == BOT:
            return "⊥"
        if k == ATOM:
            return self.iri_of[c].local_name
        if k == NATOM:
            return "¬" + self.iri_of[self._neg[c]].local_name
        if k in (AND, OR):
            sep = " ⊓ " if k == AND else " ⊔ "
            return "(" + sep.join(self.render(x) for x in self.a[c]) + ")"
        r = self.roles.render(self.a[c])
        if k == SOME:
            return f"∃{r}.{self.render(self.b[c])}"
        if k == ALL:
            return f"∀{r}.{self.render(self.b[c])}"
        if k == SELF:
            return f"∃{r}.Self"
        return f"¬∃{r}.Self"


class KB:
    """Compiled terminology: unfolding table, GCIs, role hierarchy and role rules."""

    def __init__(self, axioms):
        self.roles = Roles()
        self.concepts = Concepts(self.roles)
        self.unfold: dict[int, list[int]] = defaultdict(list)
        self.universal: list[int] = []
        self.domain: dict[int, list[int]] = defaultdict(list)
        self._sub_edges: dict[int, set[int]] = defaultdict(set)
        self.functional: set[int] = set()
        self.irreflexive: set[int] = set()
        self.asymmetric: set[int] = set()
        self.reflexive: list[int] = []
        self._transitive_named: set[int] = set()
        self.chains: list[tuple[tuple[int, ...], int]] = []
        self._supers_cache: dict[int, frozenset] = {}
        self._named_supers_cache: dict[int, tuple] = {}
        self._trans_sub_cache: dict[int, tuple] = {}
        for ax in axioms:
            self._add(ax)
        self.unfold = dict(self.unfold)
        self.domain = dict(self.domain)
        seen: set = set()
        self.universal = [c for c in self.universal if not (c in seen or seen.add(c))]
        self.trans = self._close_transitive()
        self.chains_by_role: dict[int, list] = defaultdict(list)
        for chain, sup in self.chains:
            for pos, r in enumerate(chain):
                self.chains_by_role[r].append((chain, pos, sup))
        # chains compose explicit edges only, so a transitive role that feeds a
        # chain (directly or through a super-role) must have its implied edges
        # materialised as well
        in_chains = {r for chain, _ in self.chains for r in chain}
        in_chains |= {r ^ 1 for r in in_chains}
        for t in sorted(self.trans):
            if self.supers(t) & in_chains:
                self.chains_by_role[t].append(((t, t), 0, t))
                self.chains_by_role[t].append(((t, t), 1, t))
        self.chains_by_role = dict(self.chains_by_role)
        self.check_regularity()
        self.check_simple()

    # -- ingestion
    def _sub(self, a: int, b: int) -> None:
        self._sub_edges[a].add(b)
        self._sub_edges[a ^ 1].add(b ^ 1)

    def _gci(self, lhs, rhs) -> None:
        """Record lhs ⊑ rhs for model class expressions."""
        cs = self.concepts
        if isinstance(lhs, NamedClass):
            self.unfold[cs.atom(lhs.iri)].append(cs.of(rhs))
        elif isinstance(lhs, _Thing):
            self.universal.append(cs.of(rhs))
        elif isinstance(lhs, _Nothing):
            pass
        elif isinstance(lhs, UnionOf):
            for op in lhs.operands:
                self._gci(op, rhs)
        elif isinstance(lhs, SomeValuesFrom) and isinstance(lhs.filler, _Thing):
            self.domain[self.roles.of(lhs.prop)].append(cs.of(rhs))
        elif isinstance(lhs, IntersectionOf) and any(isinstance(x, NamedClass) for x in lhs.operands):
            ops = list(lhs.operands)
            k = next(i for i, x in enumerate(ops) if isinstance(x, NamedClass))
            head = ops.pop(k)
            rest = [cs.of(x, negated=True) for x in ops]
            self.unfold[cs.atom(head.iri)].append(cs.disj(rest + [cs.of(rhs)]))
        else:
            self.universal.append(cs.disj([cs.of(lhs, negated=True), cs.of(rhs)]))

    def _add(self, ax) -> None:
        cs, roles = self.concepts, self.roles
        if isinstance(ax, SubClassOf):
            self._gci(ax.sub, ax.sup)
        elif isinstance(ax, EquivalentClasses):
            self._gci(ax.first, ax.second)
            self._gci(ax.second, ax.first)
        elif isinstance(ax, DisjointClasses):
            self._gci(ax.first, ComplementOf(ax.second))
        elif isinstance(ax, ObjectPropertyDomain):
            self.domain[roles.of(ax.prop)].append(cs.of(ax.cls))
        elif isinstance(ax, ObjectPropertyRange):
            self.domain[roles.of(ax.prop) ^ 1].append(cs.of(ax.cls))
        elif isinstance(ax, SubObjectPropertyOf):
            self._sub(roles.of(ax.sub), roles.of(ax.sup))
        elif isinstance(ax, EquivalentObjectProperties):
            a, b = roles.of(ax.first), roles.of(ax.second)
            self._sub(a, b)
            self._sub(b, a)
        elif isinstance(ax, InverseObjectProperties):
            a, b = roles.of(ax.first), roles.of(ax.second)
            self._sub(a, b ^ 1)
            self._sub(b ^ 1, a)
        elif isinstance(ax, SubPropertyChainOf):
            chain = tuple(roles.of(p) for p in ax.chain)
            sup = roles.of(ax.sup)
            self.chains.append((chain, sup))
            # the mirrored chain for the inverse keeps composition direction-agnostic
            self.chains.append((tuple(r ^ 1 for r in reversed(chain)), sup ^ 1))
        elif isinstance(ax, Characteristic):
            r = roles.of(ax.prop)
            k = ax.kind
            if k is CharacteristicKind.FUNCTIONAL:
                self.functional.add(r)
            elif k is CharacteristicKind.INVERSE_FUNCTIONAL:
                self.functional.add(r ^ 1)
            elif k is CharacteristicKind.TRANSITIVE:
                self._transitive_named.add(r & ~1)
            elif k is CharacteristicKind.SYMMETRIC:
                self._sub(r, r ^ 1)
            elif k is CharacteristicKind.ASYMMETRIC:
                self.asymmetric.add(r >> 1)
            elif k is CharacteristicKind.REFLEXIVE:
                if (r >> 1) not in self.reflexive:
                    self.reflexive.append(r >> 1)
            elif k is CharacteristicKind.IRREFLEXIVE:
                self.irreflexive.add(r >> 1)
        elif isinstance(ax, (ClassAssertion, ObjectPropertyAssertion, DifferentIndividuals, Declaration)):
            pass
        else:
            raise FragmentViolation(f"fragment violation: {type(ax).__name__}")

    # -- role hierarchy
    def supers(self, r: int) -> frozenset:
        """All role expressions s with r ⊑* s (reflexive-transitive)."""
        hit = self._supers_cache.get(r)
        if hit is None:
            seen = {r}
            todo = [r]
            while todo:
                x = todo.pop()
                for y in self._sub_edges.get(x, ()):
                    if y not in seen:
                        seen.add(y)
                        todo.append(y)
            hit = self._supers_cache[r] = frozenset(seen)
        return hit

    def named_supers(self, named_index: int) -> tuple:
        """For an edge of named role i: tuple of (named j, forward?) it saturates to."""
        hit = self._named_supers_cache.get(named_index)
        if hit is None:
            hit = tuple(sorted((s >> 1, not (s & 1)) for s in self.supers(2 * named_index)))
            self._named_supers_cache[named_index] = hit
        return hit

    def _close_transitive(self) -> frozenset:
        out: set[int] = set()
        for r in self._transitive_named:
            for s in (r, r ^ 1):
                for t in self.supers(s):
                    if s in self.supers(t):  # equivalent roles share transitivity
                        out.add(t)
                        out.add(t ^ 1)
        return frozenset(out)

    def non_simple(self) -> frozenset:
        """Role expressions implied by a transitive role or a chain, with their inverses."""
        hit = getattr(self, "_non_simple", None)
        if hit is None:
            seeds = set(self.trans) | {sup for _, sup in self.chains}
            out: set[int] = set()
            for t in seeds:
                for s in self.supers(t):
                    out.update((s, s ^ 1))
            hit = self._non_simple = frozenset(out)
        return hit

    def trans_sub(self, s: int) -> tuple:
        """Transitive role expressions t with t ⊑* s."""
        hit = self._trans_sub_cache.get(s)
        if hit is None:
            hit = tuple(sorted(t for t in self.trans if s in self.supers(t)))
            self._trans_sub_cache[s] = hit
        return hit

    def check_simple(self) -> None:
        """Reject restricted characteristics and self restrictions on non-simple roles.

        Transitivity is handled by propagating universal restrictions, so the
        implied edges these constructs would have to inspect never exist.
        """
        bad = self.non_simple()
        uses = [(r, "functional") for r in self.functional]
        uses += [(i << 1, "asymmetric") for i in self.asymmetric]
        uses += [(i << 1, "irreflexive") for i in self.irreflexive]
        cs = self.concepts
        uses += [(cs.a[c], "self restriction") for c in range(len(cs)) if cs.kind[c] in (SELF, NSELF)]
        for r, what in uses:
            if r in bad:
                raise FragmentViolation(f"fragment violation: {what} on non-simple property "
                                        f"{self.roles.render(r)}")

    def check_regularity(self) -> None:
        """Reject role-inclusion sets that admit no regular order."""
        strict: list[tuple[int, int]] = []
        loose: list[tuple[int, int]] = []
        for a, bs in self._sub_edges.items():
            for b in bs:
                loose.append((a >> 1, b >> 1))
        seen_chains = set()
        for chain, sup in self.chains:
            key = (chain, sup) if not (sup & 1) else (tuple(r ^ 1 for r in reversed(chain)), sup ^ 1)
            if key in seen_chains:
                continue
            seen_chains.add(key)
            chain, sup = key
            n = len(chain)
            if n == 2 and chain[0] == sup and chain[1] == sup:
                continue
            for pos, r in enumerate(chain):
                if r == sup and (pos == 0 or pos == n - 1) and not (chain[0] == sup and chain[-1] == sup):
                    continue
                strict.append((r >> 1, sup >> 1))
        graph: dict[int, set[int]] = defaultdict(set)
        for a, b in strict + loose:
            graph[a].add(b)
        reach_cache: dict[int, set[int]] = {}

        def reach(x: int) -> set[int]:
            if x not in reach_cache:
                seen = {x}
                todo = [x]
                while todo:
                    y = todo.pop()
                    for z in graph.get(y, ()):
                        if z not in seen:
                            seen.add(z)
                            todo.append(z)
                reach_cache[x] = seen
            return reach_cache[x]

        for a, b in strict:
            if a in reach(b):
                raise NonRegularChainError(
                    f"non-regular chain: role {self.roles.names[b].local_name} depends on itself "
                    f"through {self.roles.names[a].local_name}")
