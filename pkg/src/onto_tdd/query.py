"""Single-variable schema queries answered by entailment over the vocabulary.

A query atom is an axiom pattern with ``?x`` in exactly one argument slot,
written in functional-style syntax::

    SubClassOf(?x :D)
    ObjectComplementOf(:C ?x)
    SubObjectPropertyOf(ObjectPropertyChain(:R :S) ?x)
    Type(?x :C)            PropertyValue(:a :R ?x)

The answer is the set of vocabulary names ``n`` such that the ontology
entails the atom with ``?x := n``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentOntologyError
from .fss import ParseError, Parser, Variable, _describe
from .model import (
    AllValuesFrom, ClassAssertion, ComplementOf, DisjointClasses, EntityKind,
    EquivalentClasses, EquivalentObjectProperties, HasSelf, IntersectionOf,
    InverseObjectProperties, Iri, NamedClass, NamedProperty, ObjectPropertyAssertion,
    ObjectPropertyDomain, ObjectPropertyRange, Ontology, SomeValuesFrom, SubClassOf,
    SubObjectPropertyOf, SubPropertyChainOf, THING, UnionOf, inverse,
)
from .reasoner import PROBE_NS, Reasoner

# form -> (variable kind per slot, axiom builder)
_C, _P, _I = EntityKind.CLASS, EntityKind.PROPERTY, EntityKind.INDIVIDUAL

FORMS = {
    "SubClassOf": ((_C, _C), lambda a, b: SubClassOf(a, b)),
    "EquivalentClasses": ((_C, _C), lambda a, b: EquivalentClasses(a, b)),
    "DisjointClasses": ((_C, _C), lambda a, b: DisjointClasses(a, b)),
    "ComplementOf": ((_C, _C), lambda a, b: SubClassOf(a, ComplementOf(b))),
    "ObjectPropertyDomain": ((_P, _C), lambda p, c: ObjectPropertyDomain(p, c)),
    "ObjectPropertyRange": ((_P, _C), lambda p, c: ObjectPropertyRange(p, c)),
    "SubObjectPropertyOf": ((_P, _P), lambda a, b: SubObjectPropertyOf(a, b)),
    "SubPropertyChainOf": ((None, _P), lambda ch, s: SubPropertyChainOf(ch, s)),
    "EquivalentObjectProperties": ((_P, _P), lambda a, b: EquivalentObjectProperties(a, b)),
    "InverseObjectProperties": ((_P, _P), lambda a, b: InverseObjectProperties(a, b)),
    "Type": ((_C, _I), lambda c, i: ClassAssertion(c, i)),
    "PropertyAssertion": ((_P, _I, _I), lambda p, s, o: ObjectPropertyAssertion(p, s, o)),
}

# forms where the bound name would trivially answer itself
_REFLEXIVE = {"SubClassOf", "EquivalentClasses", "SubObjectPropertyOf",
              "EquivalentObjectProperties"}


class QueryError(ParseError):
    pass


@dataclass(frozen=True)
class QueryAtom:
    form: str
    args: tuple
    var: int

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"unknown query form {self.form}")
        slots = [i for i, a in enumerate(self.args) if isinstance(a, Variable)]
        if slots != [self.var]:
            raise ValueError("a query atom has exactly one variable")

    @property
    def kind(self) -> EntityKind:
        return FORMS[self.form][0][self.var]

    def bind(self, name: Iri):
        if self.kind is _C:
            return NamedClass(name)
        if self.kind is _P:
            return NamedProperty(name)
        return name

    def instantiate(self, name: Iri):
        args = list(self.args)
        args[self.var] = self.bind(name)
        return FORMS[self.form][1](*args)

    def bound_names(self) -> set:
        out = set()
        for a in self.args:
            if isinstance(a, (NamedClass, NamedProperty)):
                out.add(a.iri)
        return out


def atom(form: str, *args) -> QueryAtom:
    """Build an atom from Python values; ``None`` (or a Variable) marks ``?x``."""
    kinds = FORMS[form][0]
    vals, var = [], None
    for i, a in enumerate(args):
        if a is None or isinstance(a, Variable):
            var = i
            a = Variable(kinds[i])
        vals.append(a)
    if var is None:
        raise ValueError("no variable given")
    return QueryAtom(form, tuple(vals), var)


# -- parsing -----------------------------------------------------------------

def _has_var(x) -> bool:
    if isinstance(x, Variable):
        return True
    if isinstance(x, (ComplementOf,)):
        return _has_var(x.operand)
    if isinstance(x, (IntersectionOf, UnionOf)):
        return any(_has_var(o) for o in x.operands)
    if isinstance(x, (SomeValuesFrom, AllValuesFrom)):
        return _has_var(x.prop) or _has_var(x.filler)
    if isinstance(x, HasSelf):
        return _has_var(x.prop)
    if isinstance(x, tuple):
        return any(_has_var(o) for o in x)
    return False


def _parse_atom(p: Parser) -> QueryAtom:
    start = p.tok
    kw = p.at_keyword()
    if kw is None:
        raise p.error(f"unexpected {_describe(start)}", "query atom")
    p.advance()
    p.expect("(")
    if kw in ("SubClassOf", "EquivalentClasses", "DisjointClasses", "ObjectComplementOf"):
        args = (p.class_expression(), p.class_expression())
        form = "ComplementOf" if kw == "ObjectComplementOf" else kw
    elif kw in ("ObjectPropertyDomain", "ObjectPropertyRange"):
        args = (p.property_expression(), p.class_expression())
        form = kw
    elif kw == "SubObjectPropertyOf" and p.at_keyword() == "ObjectPropertyChain":
        p.advance()
        p.expect("(")
        chain = [p.property_expression()]
        while not p.at(")"):
            chain.append(p.property_expression())
        p.expect(")", "')'")
        if len(chain) < 2:
            raise p.error("a property chain needs at least two members", tok=start)
        args = (tuple(chain), p.property_expression())
        form = "SubPropertyChainOf"
    elif kw in ("SubObjectPropertyOf", "EquivalentObjectProperties", "InverseObjectProperties"):
        args = (p.property_expression(), p.property_expression())
        form = kw
    elif kw == "Type":
        ind = p.individual()
        args = (p.class_expression(), ind)
        form = "Type"
    elif kw == "ClassAssertion":
        args = (p.class_expression(), p.individual())
        form = "Type"
    elif kw == "PropertyValue":
        s = p.individual()
        prop = p.property_expression()
        args = (prop, s, p.individual())
        form = "PropertyAssertion"
    elif kw == "ObjectPropertyAssertion":
        args = (p.property_expression(), p.individual(), p.individual())
        form = "PropertyAssertion"
    else:
        raise QueryError(start.line, start.col, f"unsupported query atom {kw}")
    p.expect(")", "')'")
    slots = [i for i, a in enumerate(args) if isinstance(a, Variable)]
    nested = [a for a in args if not isinstance(a, Variable) and _has_var(a)]
    if nested:
        raise QueryError(start.line, start.col, "the variable must be a direct argument")
    if len(slots) != 1:
        raise QueryError(start.line, start.col, "a query atom needs exactly one variable")
    want = FORMS[form][0][slots[0]]
    if args[slots[0]].kind is not want:
        raise QueryError(start.line, start.col, f"variable cannot stand in this position of {kw}")
    return QueryAtom(form, args, slots[0])


def _split_top(text: str):
    """Split on commas outside parentheses and IRIs, keeping start columns."""
    parts, depth, in_iri, start = [], 0, False, 0
    for i, ch in enumerate(text):
        if in_iri:
            in_iri = ch != ">"
        elif ch == "<":
            in_iri = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def parse_query(text: str, prefixes: dict | None = None) -> list[QueryAtom]:
    """Parse one atom or a comma-separated conjunction sharing the variable."""
    atoms = []
    for part, off in _split_top(text):
        p = Parser(part, prefixes, allow_vars=True, col=off + 1)
        atoms.append(_parse_atom(p))
        if not p.at("EOF"):
            raise p.error(f"unexpected {_describe(p.tok)}", "end of query atom")
    kinds = {a.kind for a in atoms}
    if len(kinds) > 1:
        raise QueryError(1, 1, "conjoined atoms bind the variable to different kinds")
    return atoms


# -- evaluation ----------------------------------------------------------------

def _candidates(o: Ontology, q: QueryAtom, exclude_bound: bool = True) -> list[Iri]:
    pool = {_C: o.vc, _P: o.vop, _I: o.vi}[q.kind]
    skip = q.bound_names() if exclude_bound and q.form in _REFLEXIVE else set()
    return sorted(n for n in pool if n not in skip and not n.value.startswith(PROBE_NS))


def _named(ce) -> Iri | None:
    return ce.iri if isinstance(ce, NamedClass) else None


def _by_depth(tax: dict, cands) -> list:
    return sorted(cands, key=lambda n: (len(tax[n].subsumers or ()), n))


def _supers_of(r: Reasoner, ce, cands: list, build) -> set:
    """Names n with ce ⊑ n; candidates are bounded by one model of ce."""
    atoms = r.model_atoms(ce)
    if atoms is None:
        return set(cands)
    return {n for n in cands if n in atoms and r.entails(build(n))}


def _subs_of(r: Reasoner, sup, cands: list, build) -> set:
    """Names n with n ⊑ sup, visiting the hierarchy top-down."""
    tax = r.taxonomy()
    d = _named(sup)
    if d is not None and d in tax:
        return {n for n in cands if tax[n].subsumers is None or d in tax[n].subsumers}
    # edges carry all their named super-roles, so a role missing at the root
    # of some model of n means n is not subsumed
    need = None
    if isinstance(sup, (SomeValuesFrom, HasSelf)):
        need = r.kb().roles.of(sup.prop)
    out = set()
    for n in _by_depth(tax, cands):
        prof = tax[n]
        if prof.subsumers is None or prof.subsumers & out:
            out.add(n)
            continue
        if need is not None:
            pool = prof.self_roles if isinstance(sup, HasSelf) else prof.root_roles
            if need not in pool:
                continue
        if r.entails(build(n)):
            out.add(n)
    return out


def _disjoint_from(r: Reasoner, d, cands: list) -> set:
    """Names n with n ⊓ d unsatisfiable."""
    tax = r.taxonomy()
    shared = r.model_atoms(d)
    if shared is None:
        return set(cands)
    out, overlap = set(), set()
    for n in _by_depth(tax, cands):
        prof = tax[n]
        if prof.subsumers is None or prof.subsumers & out:
            out.add(n)
        elif n in shared:
            overlap.add(n)  # one model of d is also in n
        elif not r.is_satisfiable(IntersectionOf((NamedClass(n), d))):
            out.add(n)
    return out


def _equivalent_answers(r: Reasoner, q: QueryAtom, cands: list) -> set:
    d = q.args[1 - q.var]
    tax = r.taxonomy()
    if _named(d) in tax:
        d = _named(d)
        sd = tax[d].subsumers
        out = set()
        for n in cands:
            sn = tax[n].subsumers
            if sd is None or sn is None:
                if sd is None and sn is None:
                    out.add(n)
            elif d in sn and n in sd:
                out.add(n)
        return out
    ups = _supers_of(r, d, cands, lambda n: SubClassOf(d, NamedClass(n)))
    return {n for n in ups if r.entails(SubClassOf(NamedClass(n), d))}


def eval_atom(o: Ontology, q: QueryAtom, reasoner: Reasoner | None = None,
              candidates=None, exclude_bound: bool = True) -> set:
    r = reasoner or Reasoner(o)
    if not r.is_consistent():
        raise InconsistentOntologyError("inconsistent ontology: queries refused")
    cands = _candidates(o, q, exclude_bound)
    if candidates is not None:
        keep = set(candidates)
        cands = [n for n in cands if n in keep]
    f, args = q.form, q.args
    if f == "SubClassOf":
        if q.var == 0:
            return _subs_of(r, args[1], cands, q.instantiate)
        return _supers_of(r, args[0], cands, q.instantiate)
    if f == "EquivalentClasses":
        return _equivalent_answers(r, q, cands)
    if f in ("DisjointClasses", "ComplementOf"):
        return _disjoint_from(r, args[1 - q.var], cands)
    if f == "ObjectPropertyDomain":
        return _supers_of(r, SomeValuesFrom(args[0], THING), cands, q.instantiate)
    if f == "ObjectPropertyRange":
        return _supers_of(r, SomeValuesFrom(inverse(args[0]), THING), cands, q.instantiate)
    if f == "Type":
        return {n for n in cands if r.is_instance(args[0], n)}
    if f == "PropertyAssertion":
        keep = set(cands)
        if q.var == 1:
            pairs = r.entailed_property_assertions(args[0], obj=args[2])
            return {a for a, _ in pairs if a in keep}
        pairs = r.entailed_property_assertions(args[0], subject=args[1])
        return {b for _, b in pairs if b in keep}
    return {n for n in cands if r.entails(q.instantiate(n))}


def evaluate(o: Ontology, query, reasoner: Reasoner | None = None,
             exclude_bound: bool = True) -> set:
    """Answer an atom, a conjunction (list of atoms) or query text.

    In a conjunction the assertion atoms go first: they are confined to one
    ABox component and so narrow the candidates for the remaining atoms.
    """
    if isinstance(query, str):
        query = parse_query(query, o.prefixes)
    if isinstance(query, QueryAtom):
        query = [query]
    r = reasoner or Reasoner(o)
    order = sorted(query, key=lambda q: q.form != "PropertyAssertion")
    out = None
    for q in order:
        out = eval_atom(o, q, r, candidates=out, exclude_bound=exclude_bound)
        if not out:
            return set()
    return out
