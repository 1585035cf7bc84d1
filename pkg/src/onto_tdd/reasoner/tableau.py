"""Completion-graph tableau with pairwise blocking, merging and backjumping.

Every fact (label entry, edge, inequality, merge) carries a dependency set: the
ids of the choice points it rests on. A clash whose dependency set misses the
newest choice point lets the search jump straight past it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from ..errors import FragmentViolation, NodeLimitExceeded, ReasonerTimeout
from .kb import ALL, AND, ATOM, BOT, KB, NATOM, NSELF, OR, SELF, SOME

EMPTY: frozenset = frozenset()
DEFAULT_MAX_NODES = 200_000

_LABEL, _EDGE, _NODE, _ALIAS, _NEQ = range(5)


class Clash(Exception):
    __slots__ = ("deps", "why")

    def __init__(self, deps: frozenset, why: str):
        self.deps = deps
        self.why = why


@dataclass
class _Choice:
    cid: int
    mark: tuple
    node: int
    alts: tuple
    index: int
    deps: frozenset
    failed: frozenset
    negs: list = None


@dataclass
class TableauResult:
    consistent: bool
    witness: str | None
    nodes: int
    model_size: int
    branches: int


class Tableau:
    def __init__(self, kb: KB, max_nodes: int = DEFAULT_MAX_NODES, deadline: float | None = None):
        self.kb = kb
        cs = kb.concepts
        self.cs = cs
        self.kind = cs.kind
        self.ca = cs.a
        self.cb = cs.b
        self.unfold = kb.unfold
        self.domain = kb.domain
        self.max_nodes = max_nodes
        # equality blocking suffices unless at-most-one constraints meet inverses
        self.pairwise = bool(kb.functional)
        self.deadline = deadline
        # per-node state
        self.label: list[dict] = []
        self.nbrs: list[dict] = []
        self.neq: list[dict] = []
        self.parent: list[int] = []
        self.alias: list[int] = []
        self.root: list[bool] = []
        self.names: list = []
        # search state
        self.trail: list = []
        self.agenda: list = []
        self.acur = 0
        self.some: list = []
        self.scur = 0
        self.ors: list = []
        self.ocur = 0
        self.stack: list[_Choice] = []
        self.next_cid = 1
        self.branches = 0
        self.ticks = 0
        self.by_name: dict = {}

    # -- nodes ---------------------------------------------------------------
    def find(self, x: int) -> int:
        alias = self.alias
        while alias[x] >= 0:
            x = alias[x]
        return x

    def new_node(self, parent: int = -1, name=None, deps: frozenset = EMPTY) -> int:
        x = len(self.label)
        if x >= self.max_nodes:
            raise NodeLimitExceeded(f"node ceiling of {self.max_nodes} reached")
        self.label.append({})
        self.nbrs.append({})
        self.neq.append({})
        self.parent.append(parent)
        self.alias.append(-1)
        self.root.append(parent < 0)
        self.names.append(name)
        self.trail.append((_NODE,))
        for c in self.kb.universal:
            self.add_label(x, c, deps)
        for i in self.kb.reflexive:
            self.add_edge(x, x, 2 * i, deps)
        return x

    def individual(self, name) -> int:
        x = self.by_name.get(name)
        if x is None:
            x = self.by_name[name] = self.new_node(name=name)
        return x

    # -- facts ---------------------------------------------------------------
    def add_label(self, x: int, c: int, d: frozenset) -> None:
        L = self.label[x]
        if c in L:
            return
        k = self.kind[c]
        if k == BOT:
            raise Clash(d, f"{self._node_name(x)} has ⊥")
        if k == ATOM or k == NATOM:
            n = self.cs.neg(c)
            nd = L.get(n)
            if nd is not None:
                raise Clash(d | nd, f"{self._node_name(x)} has {self.cs.render(c)} and {self.cs.render(n)}")
        elif k == NSELF:
            if self.ca[c] in self.kb.non_simple():
                raise FragmentViolation(f"fragment violation: {self.cs.render(c)} on a non-simple property")
            ed = self.nbrs[x].get(self.ca[c], {}).get(x)
            if ed is not None:
                raise Clash(d | ed, f"{self._node_name(x)} has {self.cs.render(c)} and a self edge")
        L[c] = d
        self.trail.append((_LABEL, x, c))
        self.agenda.append((x, c))

    def add_edge(self, x: int, y: int, r: int, d: frozenset) -> None:
        if r & 1:
            x, y = y, x
        for j, fwd in self.kb.named_supers(r >> 1):
            if fwd:
                self._add_named(x, y, j, d)
            else:
                self._add_named(y, x, j, d)

    def _add_named(self, x: int, y: int, j: int, d: frozenset) -> None:
        fw = self.nbrs[x].get(2 * j)
        if fw is None:
            fw = self.nbrs[x][2 * j] = {}
        elif y in fw:
            return
        fw[y] = d
        bw = self.nbrs[y].get(2 * j + 1)
        if bw is None:
            bw = self.nbrs[y][2 * j + 1] = {}
        bw[x] = d
        self.trail.append((_EDGE, x, y, j))
        self.agenda.append((x, y, j))

    def add_distinct(self, x: int, y: int, d: frozenset) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            raise Clash(d, f"{self._node_name(x)} must differ from itself")
        if y in self.neq[x]:
            return
        self.neq[x][y] = d
        self.neq[y][x] = d
        self.trail.append((_NEQ, x, y))

    def merge(self, a: int, b: int, d: frozenset) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        ra, rb = self.root[a], self.root[b]
        if ra != rb:
            keep, gone = (a, b) if ra else (b, a)
        else:
            keep, gone = (a, b) if a < b else (b, a)
        nd = self.neq[gone].get(keep)
        if nd is not None:
            raise Clash(d | nd, f"{self._node_name(keep)} and {self._node_name(gone)} must be merged but are distinct")
        self.alias[gone] = keep
        self.trail.append((_ALIAS, gone))
        self._prune(gone, keep)
        for c, cd in list(self.label[gone].items()):
            self.add_label(keep, c, cd | d)
        for r, m in list(self.nbrs[gone].items()):
            for w, ed in list(m.items()):
                if w == gone:
                    w = keep
                elif self.alias[w] >= 0:
                    continue
                self.add_edge(keep, w, r, ed | d)
        for w, wd in list(self.neq[gone].items()):
            if self.alias[w] < 0:
                self.add_distinct(keep, w, wd | d)

    def _prune(self, x: int, keep: int) -> None:
        # the subtree below a merged node is dropped; the survivor regenerates
        # whatever successors it still needs
        stack = [x]
        while stack:
            p = stack.pop()
            for m in self.nbrs[p].values():
                for y in m:
                    if self.parent[y] == p and not self.root[y] and self.alias[y] < 0:
                        self.alias[y] = keep
                        self.trail.append((_ALIAS, y))
                        stack.append(y)

    # -- undo ----------------------------------------------------------------
    def mark(self) -> tuple:
        return (len(self.trail), len(self.agenda), self.acur, len(self.some), self.scur,
                len(self.ors), self.ocur)

    def undo(self, mark: tuple) -> None:
        tlen, alen, self.acur, slen, self.scur, olen, self.ocur = mark
        trail = self.trail
        while len(trail) > tlen:
            e = trail.pop()
            t = e[0]
            if t == _LABEL:
                del self.label[e[1]][e[2]]
            elif t == _EDGE:
                _, x, y, j = e
                del self.nbrs[x][2 * j][y]
                del self.nbrs[y][2 * j + 1][x]
            elif t == _ALIAS:
                self.alias[e[1]] = -1
            elif t == _NEQ:
                _, x, y = e
                del self.neq[x][y]
                if x != y:
                    del self.neq[y][x]
            else:
                self.label.pop()
                self.nbrs.pop()
                self.neq.pop()
                self.parent.pop()
                self.alias.pop()
                self.root.pop()
                name = self.names.pop()
                if name is not None:
                    del self.by_name[name]
        del self.agenda[alen:]
        del self.some[slen:]
        del self.ors[olen:]

    # -- rules ---------------------------------------------------------------
    def _fire_label(self, x: int, c: int) -> None:
        if self.alias[x] >= 0:
            return
        k = self.kind[c]
        d = self.label[x][c]
        if k == ATOM or k == NATOM:
            for e in self.unfold.get(c, ()):
                self.add_label(x, e, d)
        elif k == AND:
            for e in self.ca[c]:
                self.add_label(x, e, d)
        elif k == SOME:
            self.some.append((x, c))
        elif k == OR:
            self.ors.append((x, c))
        elif k == ALL:
            r, f = self.ca[c], self.cb[c]
            alias = self.alias
            m = self.nbrs[x].get(r)
            if m:
                for y, ed in list(m.items()):
                    if alias[y] < 0:
                        self.add_label(y, f, d | ed)
            for t in self.kb.trans_sub(r):
                m = self.nbrs[x].get(t)
                if m:
                    allt = self.cs.all(t, f)
                    for y, ed in list(m.items()):
                        if alias[y] < 0:
                            self.add_label(y, allt, d | ed)
        elif k == SELF:
            self.add_edge(x, x, self.ca[c], d)

    def _alls_over(self, x: int, r: int, y: int, ed: frozenset) -> None:
        L = self.label[x]
        items = list(L.items()) if x == y else L.items()
        kind, ca, cb = self.kind, self.ca, self.cb
        pending = []
        for c, cd in items:
            if kind[c] == ALL:
                s = ca[c]
                if s == r:
                    pending.append((cb[c], cd))
                if r in self.kb.trans_sub(s):
                    pending.append((self.cs.all(r, cb[c]), cd))
        for f, cd in pending:
            self.add_label(y, f, cd | ed)

    def _fire_edge(self, x: int, y: int, j: int) -> None:
        alias = self.alias
        if alias[x] >= 0 or alias[y] >= 0:
            return
        r, ri = 2 * j, 2 * j + 1
        nx = self.nbrs[x]
        d = nx[r][y]
        kb = self.kb
        if x == y:
            if j in kb.irreflexive:
                raise Clash(d, f"{self._node_name(x)} has a self edge on irreflexive {kb.roles.render(r)}")
            L = self.label[x]
            for rr in (r, ri):
                ns = self.cs._index.get((NSELF, rr, None))
                if ns is not None and ns in L:
                    raise Clash(d | L[ns], f"{self._node_name(x)} has {self.cs.render(ns)} and a self edge")
        if j in kb.asymmetric:
            back = nx.get(ri, {}).get(y)
            if back is not None:
                raise Clash(d | back, f"asymmetric {kb.roles.render(r)} used both ways between "
                                      f"{self._node_name(x)} and {self._node_name(y)}")
        for e in self.domain.get(r, ()):
            self.add_label(x, e, d)
        for e in self.domain.get(ri, ()):
            self.add_label(y, e, d)
        self._alls_over(x, r, y, d)
        self._alls_over(y, ri, x, d)
        chains = kb.chains_by_role
        if chains:
            for chain, pos, sup in chains.get(r, ()):
                self._compose(chain, pos, sup, x, y, d)
            for chain, pos, sup in chains.get(ri, ()):
                self._compose(chain, pos, sup, y, x, d)
        if r in kb.functional:
            self._merge_siblings(x, r, y, d)
        if ri in kb.functional and alias[x] < 0 and alias[y] < 0:
            self._merge_siblings(y, ri, x, nx[r][y])

    def _merge_siblings(self, x: int, r: int, y: int, d: frozenset) -> None:
        """x has r-successor y (deps d) and r is functional: merge all r-successors of x."""
        alias = self.alias
        for z, zd in list(self.nbrs[x][r].items()):
            if alias[x] >= 0:
                return
            if z == y or alias[z] >= 0 or alias[y] >= 0:
                continue
            self.merge(y, z, d | zd)
            if alias[y] >= 0:
                y, d = z, zd

    def _compose(self, chain: tuple, pos: int, sup: int, a: int, b: int, d: frozenset) -> None:
        alias = self.alias
        lefts = [(a, d)]
        for i in range(pos - 1, -1, -1):
            step = chain[i] ^ 1
            nxt = []
            for node, dd in lefts:
                for z, ed in self.nbrs[node].get(step, {}).items():
                    if alias[z] < 0:
                        nxt.append((z, dd | ed))
            lefts = nxt
            if not lefts:
                return
        rights = [(b, EMPTY)]
        for i in range(pos + 1, len(chain)):
            step = chain[i]
            nxt = []
            for node, dd in rights:
                for z, ed in self.nbrs[node].get(step, {}).items():
                    if alias[z] < 0:
                        nxt.append((z, dd | ed))
            rights = nxt
            if not rights:
                return
        for s, d1 in lefts:
            for t, d2 in rights:
                self.add_edge(s, t, sup, d1 | d2)

    # -- blocking ------------------------------------------------------------
    def _edge_roles(self, p: int, x: int) -> frozenset:
        return frozenset(r for r, m in self.nbrs[p].items() if x in m)

    def _ancestors(self, x: int) -> list[int]:
        out = [x]
        while not self.root[x]:
            x = self.find(self.parent[x])
            out.append(x)
        return out

    def blocked(self, x: int) -> bool:
        if self.root[x]:
            return False
        chain = self._ancestors(x)
        label = self.label
        # chain[i+1] is the parent of chain[i]; chain[-1] is a root
        for i in range(len(chain) - 1):
            w, pw = chain[i], chain[i + 1]
            if self.root[w]:
                break
            lw = label[w]
            if not self.pairwise:
                for k in range(i + 1, len(chain)):
                    v = chain[k]
                    if self.root[v]:
                        break
                    lv = label[v]
                    if len(lv) == len(lw) and lv.keys() == lw.keys():
                        return True
                continue
            lpw = label[pw]
            ew = None
            for k in range(i + 1, len(chain) - 1):
                v, pv = chain[k], chain[k + 1]
                lv = label[v]
                if len(lv) != len(lw) or lv.keys() != lw.keys():
                    continue
                if label[pv].keys() != lpw.keys():
                    continue
                if ew is None:
                    ew = self._edge_roles(pw, w)
                if self._edge_roles(pv, v) == ew:
                    return True
        return False

    def _satisfied_some(self, x: int, c: int) -> bool:
        m = self.nbrs[x].get(self.ca[c])
        if not m:
            return False
        f = self.cb[c]
        alias, label = self.alias, self.label
        for y in m:
            if alias[y] < 0 and f in label[y]:
                return True
        return False

    def _generate(self, x: int, c: int) -> None:
        d = self.label[x][c]
        y = self.new_node(parent=x, deps=d)
        self.add_edge(x, y, self.ca[c], d)
        self.add_label(y, self.cb[c], d)

    # -- search --------------------------------------------------------------
    def _drain(self) -> None:
        agenda = self.agenda
        while self.acur < len(agenda):
            ev = agenda[self.acur]
            self.acur += 1
            if len(ev) == 2:
                self._fire_label(ev[0], ev[1])
            else:
                self._fire_edge(ev[0], ev[1], ev[2])
            self.ticks += 1
            if self.deadline is not None and not (self.ticks & 1023) and time.monotonic() > self.deadline:
                raise ReasonerTimeout("reasoner timeout")

    def _final_scan(self) -> bool:
        """Queue rules that were skipped while their node was blocked."""
        work, pending = [], []
        kind, ca = self.kind, self.ca
        for x in range(len(self.label)):
            if self.alias[x] >= 0:
                continue
            blocked = None
            L = self.label[x]
            for c in L:
                k = kind[c]
                if k == SOME:
                    if self._satisfied_some(x, c):
                        continue
                elif k == OR:
                    if any(a in L for a in ca[c]):
                        continue
                else:
                    continue
                if blocked is None:
                    blocked = self.blocked(x)
                if blocked:
                    break
                (work if k == SOME else pending).append((x, c))
        self.some.extend(work)
        self.ors.extend(pending)
        return bool(work or pending)

    def _expand(self) -> None:
        # disjunctions are settled before successors are generated: a node must
        # reach its final label before it can be compared for blocking
        while True:
            self._drain()
            if self.ocur < len(self.ors):
                x, c = self.ors[self.ocur]
                self.ocur += 1
                if self.alias[x] >= 0:
                    continue
                L = self.label[x]
                alts = self.ca[c]
                if any(a in L for a in alts) or self.blocked(x):
                    continue  # blocked nodes are revisited by the final scan
                self._branch(x, c, alts)
                continue
            if self.scur < len(self.some):
                x, c = self.some[self.scur]
                self.scur += 1
                if self.alias[x] < 0 and not self._satisfied_some(x, c) and not self.blocked(x):
                    self._generate(x, c)
                continue
            if self._final_scan():
                continue
            return

    def _branch(self, x: int, c: int, alts: tuple) -> None:
        d = self.label[x][c]
        cp = _Choice(self.next_cid, self.mark(), x, alts, 0, d, EMPTY)
        self.next_cid += 1
        self.branches += 1
        self.stack.append(cp)
        self.add_label(x, alts[0], d | {cp.cid})

    def _backtrack(self, deps: frozenset) -> bool:
        while True:
            stack = self.stack
            while stack and stack[-1].cid not in deps:
                stack.pop()
            if not stack:
                return False
            cp = stack[-1]
            self.undo(cp.mark)
            why = deps - {cp.cid}
            cp.failed = cp.failed | why
            # semantic branching: the refuted disjunct is false from now on
            if cp.negs is None:
                cp.negs = []
            cp.negs.append((self.cs.neg(cp.alts[cp.index]), cp.deps | why))
            cp.index += 1
            if cp.index == len(cp.alts) - 1:
                stack.pop()
                d = cp.deps | cp.failed
            else:
                d = cp.deps | {cp.cid}
            self.branches += 1
            try:
                for nc, nd in cp.negs:
                    self.add_label(cp.node, nc, nd)
                self.add_label(cp.node, cp.alts[cp.index], d)
                return True
            except Clash as clash:
                deps = clash.deps

    def run(self) -> TableauResult:
        witness = None
        while True:
            try:
                self._expand()
                ok = True
                break
            except Clash as clash:
                witness = clash.why
                if not self._backtrack(clash.deps):
                    ok = False
                    break
        alive = [x for x in range(len(self.label)) if self.alias[x] < 0]
        size = sum(1 for x in alive if not self.blocked(x)) if ok else 0
        return TableauResult(ok, None if ok else witness, len(alive), size, self.branches)

    def seed(self, fn) -> "TableauResult | None":
        """Apply initial facts; a clash here (no choices yet) means unsatisfiable."""
        try:
            fn(self)
        except Clash as clash:
            return TableauResult(False, clash.why, 0, 0, 0)
        return None

    # -- inspection ----------------------------------------------------------
    def atoms_at(self, x: int) -> set:
        x = self.find(x)
        iri_of = self.cs.iri_of
        return {iri_of[c] for c in self.label[x] if self.kind[c] == ATOM}

    def forced_atoms_at(self, x: int) -> set:
        """Atoms at x whose derivation depends on no choice."""
        x = self.find(x)
        iri_of = self.cs.iri_of
        return {iri_of[c] for c, d in self.label[x].items() if self.kind[c] == ATOM and not d}

    def roles_at(self, x: int) -> tuple[set, set]:
        """Role expressions on edges leaving x, and those that loop back to x."""
        x = self.find(x)
        out, loops = set(), set()
        for r, nb in self.nbrs[x].items():
            for y in nb:
                out.add(r)
                if self.find(y) == x:
                    loops.add(r)
        return out, loops

    def _node_name(self, x: int) -> str:
        n = self.names[x]
        if n is not None:
            return n.local_name if hasattr(n, "local_name") else str(n)
        return f"_:n{x}"
