"""Functional-style syntax reader/writer for the supported OWL fragment.

Also reads test-suite manifests (see ``docs/manifest.md`` for the grammar).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .model import (
    NOTHING, NOTHING_IRI, OWL_NS, THING, THING_IRI, AllValuesFrom, Axiom, Characteristic,
    CharacteristicKind, ClassAssertion, ComplementOf, Declaration, DifferentIndividuals,
    DisjointClasses, EntityKind, EquivalentClasses, EquivalentObjectProperties, HasSelf,
    IntersectionOf, InverseObjectProperties, InverseOf, Iri, NamedClass, NamedProperty,
    ObjectPropertyAssertion, ObjectPropertyDomain, ObjectPropertyRange, Ontology,
    SomeValuesFrom, SubClassOf, SubObjectPropertyOf, SubPropertyChainOf, UnionOf,
    _Nothing, _Thing, inverse,
)

DEFAULT_NS = "http://example.org/onto#"

STANDARD_PREFIXES = {
    "owl": OWL_NS,
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}

CHARACTERISTIC_KEYWORDS = {
    "FunctionalObjectProperty": CharacteristicKind.FUNCTIONAL,
    "InverseFunctionalObjectProperty": CharacteristicKind.INVERSE_FUNCTIONAL,
    "TransitiveObjectProperty": CharacteristicKind.TRANSITIVE,
    "SymmetricObjectProperty": CharacteristicKind.SYMMETRIC,
    "AsymmetricObjectProperty": CharacteristicKind.ASYMMETRIC,
    "ReflexiveObjectProperty": CharacteristicKind.REFLEXIVE,
    "IrreflexiveObjectProperty": CharacteristicKind.IRREFLEXIVE,
}
KEYWORD_OF_KIND = {v: k for k, v in CHARACTERISTIC_KEYWORDS.items()}

# Constructs of OWL 2 that exist but lie outside the supported fragment.
UNSUPPORTED = frozenset("""
    ObjectOneOf ObjectHasValue ObjectMinCardinality ObjectMaxCardinality ObjectExactCardinality
    DataSomeValuesFrom DataAllValuesFrom DataHasValue DataMinCardinality DataMaxCardinality
    DataExactCardinality DataIntersectionOf DataUnionOf DataComplementOf DataOneOf
    DatatypeRestriction DisjointUnion DisjointObjectProperties DataPropertyDomain
    DataPropertyRange SubDataPropertyOf EquivalentDataProperties DisjointDataProperties
    FunctionalDataProperty DatatypeDefinition HasKey SameIndividual
    NegativeObjectPropertyAssertion DataPropertyAssertion NegativeDataPropertyAssertion
    AnnotationAssertion SubAnnotationPropertyOf AnnotationPropertyDomain
    AnnotationPropertyRange Annotation Import DataProperty AnnotationProperty Datatype
""".split())

UNSUPPORTED_ENTITIES = {
    OWL_NS + "topObjectProperty", OWL_NS + "bottomObjectProperty",
    OWL_NS + "topDataProperty", OWL_NS + "bottomDataProperty",
}


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str, expected: str | None = None):
        self.line = line
        self.column = column
        self.message = message
        self.expected = expected
        text = f"{line}:{column}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class UnsupportedConstruct(ParseError):
    pass


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # '(' ')' '=' IRI NAME VAR STRING EOF
    text: str
    line: int
    col: int


@dataclass(frozen=True, slots=True)
class Variable:
    """Placeholder for ``?x`` in query atoms; ``kind`` is the vocabulary it ranges over."""
    kind: EntityKind
    name: str = "x"


_NAME_CHARS = re.compile(r"[A-Za-z0-9_\-.:%/]+")
_VAR = re.compile(r"\?[A-Za-z_][A-Za-z0-9_]*")
_PN_LOCAL = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")


def tokenize(text: str, line: int = 1, col: int = 1) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r﻿":
            i += 1
            col += 1
            continue
        if ch == "#":
            j = text.find("\n", i)
            j = n if j < 0 else j
            col += j - i
            i = j
            continue
        if ch in "()=":
            toks.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "<":
            j = text.find(">", i + 1)
            nl = text.find("\n", i + 1)
            if j < 0 or (0 <= nl < j):
                raise ParseError(line, col, "unterminated IRI", "'>'")
            body = text[i + 1:j]
            if not body or any(c in body for c in ' <"{}|\\^`'):
                raise ParseError(line, col, f"malformed IRI <{body}>")
            toks.append(Token("IRI", body, line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    j += 1
                if j < n and text[j] == "\n":
                    break
                j += 1
            if j >= n or text[j] != '"':
                raise ParseError(line, col, "unterminated string literal", "'\"'")
            toks.append(Token("STRING", text[i:j + 1], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "?":
            m = _VAR.match(text, i)
            if not m:
                raise ParseError(line, col, "malformed variable", "?x")
            toks.append(Token("VAR", m.group(), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _NAME_CHARS.match(text, i)
        if not m:
            raise ParseError(line, col, f"unexpected character {ch!r}")
        toks.append(Token("NAME", m.group(), line, col))
        col += m.end() - i
        i = m.end()
    toks.append(Token("EOF", "", line, col))
    return toks


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


class Parser:
    def __init__(self, text: str, prefixes: dict | None = None, allow_vars: bool = False,
                 line: int = 1, col: int = 1):
        self.toks = tokenize(text, line, col)
        self.pos = 0
        self.prefixes = {":": DEFAULT_NS, **{k + ":": v for k, v in STANDARD_PREFIXES.items()}}
        for k, v in (prefixes or {}).items():
            self.prefixes[k if k.endswith(":") else k + ":"] = v
        self.declared: dict = {}
        self.allow_vars = allow_vars

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, message: str, expected: str | None = None, tok: Token | None = None):
        t = tok or self.tok
        return ParseError(t.line, t.col, message, expected)

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind:
            raise self.error(f"unexpected {_describe(t)}", what or repr(kind))
        return self.advance()

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_keyword(self) -> str | None:
        """Return the keyword if the current token is ``Keyword(``."""
        t = self.tok
        if t.kind == "NAME" and ":" not in t.text and self.toks[self.pos + 1].kind == "(":
            return t.text
        return None

    def unsupported(self, name: str, tok: Token | None = None):
        t = tok or self.tok
        return UnsupportedConstruct(t.line, t.col, f"unsupported construct: {name}")

    # -- names
    def iri(self, what: str = "IRI") -> Iri:
        t = self.tok
        if t.kind == "IRI":
            self.advance()
            return Iri(t.text)
        if t.kind == "NAME":
            if ":" not in t.text:
                if self.toks[self.pos + 1].kind == "(" and t.text in UNSUPPORTED:
                    raise self.unsupported(t.text)
                raise self.error(f"unexpected {_describe(t)}", what)
            pfx, _, local = t.text.partition(":")
            ns = self.prefixes.get(pfx + ":")
            if ns is None:
                raise self.error(f"undeclared prefix '{pfx}:'")
            self.advance()
            return Iri(ns + local)
        raise self.error(f"unexpected {_describe(t)}", what)

    def variable(self, kind: EntityKind):
        t = self.tok
        if t.kind == "VAR":
            if not self.allow_vars:
                raise self.error("variables are only allowed in queries")
            self.advance()
            return Variable(kind, t.text[1:])
        return None

    def individual(self):
        v = self.variable(EntityKind.INDIVIDUAL)
        if v is not None:
            return v
        return self.iri("individual")

    def named_property(self):
        v = self.variable(EntityKind.PROPERTY)
        if v is not None:
            return v
        t = self.tok
        iri = self.iri("object property")
        if iri.value in UNSUPPORTED_ENTITIES:
            raise self.unsupported(iri.local_name, t)
        return NamedProperty(iri)

    def property_expression(self):
        kw = self.at_keyword()
        if kw == "ObjectInverseOf":
            self.advance()
            self.expect("(")
            t = self.tok
            p = self.property_expression()
            if isinstance(p, Variable):
                raise self.error("variable not allowed inside ObjectInverseOf", tok=t)
            self.expect(")", "')'")
            return inverse(p)
        if kw is not None:
            if kw in UNSUPPORTED:
                raise self.unsupported(kw)
            raise self.error(f"unknown construct {kw}", "object property expression")
        return self.named_property()

    def class_expression(self):
        v = self.variable(EntityKind.CLASS)
        if v is not None:
            return v
        kw = self.at_keyword()
        if kw is None:
            iri = self.iri("class expression")
            if iri == THING_IRI:
                return THING
            if iri == NOTHING_IRI:
                return NOTHING
            return NamedClass(iri)
        start = self.tok
        self.advance()
        self.expect("(")
        if kw in ("ObjectIntersectionOf", "ObjectUnionOf"):
            ops = [self.class_expression()]
            while not self.at(")"):
                ops.append(self.class_expression())
            if len(ops) < 2:
                raise self.error(f"{kw} needs at least two operands", "class expression")
            out = (IntersectionOf if kw == "ObjectIntersectionOf" else UnionOf)(tuple(ops))
        elif kw == "ObjectComplementOf":
            out = ComplementOf(self.class_expression())
        elif kw in ("ObjectSomeValuesFrom", "ObjectAllValuesFrom"):
            p = self.property_expression()
            f = self.class_expression()
            out = (SomeValuesFrom if kw == "ObjectSomeValuesFrom" else AllValuesFrom)(p, f)
        elif kw == "ObjectHasSelf":
            out = HasSelf(self.property_expression())
        elif kw in UNSUPPORTED:
            raise self.unsupported(kw, start)
        else:
            raise self.error(f"unknown construct {kw}", "class expression", start)
        self.expect(")", "')'")
        return out

    # -- axioms
    def axiom(self) -> list:
        """Parse one axiom; n-ary forms come back as several binary axioms."""
        t = self.tok
        kw = self.at_keyword()
        if kw is None:
            raise self.error(f"unexpected {_describe(t)}", "axiom")
        if kw in UNSUPPORTED:
            raise self.unsupported(kw)
        handler = _AXIOM_HANDLERS.get(kw)
        if handler is None:
            raise self.error(f"unknown construct {kw}", "axiom")
        self.advance()
        self.expect("(")
        if self.at_keyword() == "Annotation":
            raise self.unsupported("Annotation")
        out = handler(self)
        self.expect(")", "')'")
        return out

    def _class_list(self, minimum: int) -> list:
        items = [self.class_expression()]
        while not self.at(")"):
            items.append(self.class_expression())
        if len(items) < minimum:
            raise self.error("too few operands", "class expression")
        return items

    def prefix_decl(self) -> None:
        self.advance()
        self.expect("(")
        t = self.expect("NAME", "prefix name")
        if not t.text.endswith(":") or t.text.count(":") != 1:
            raise self.error("malformed prefix name", "prefix name ending in ':'", t)
        self.expect("=", "'='")
        iri = self.expect("IRI", "IRI").text
        self.expect(")", "')'")
        self.prefixes[t.text] = iri
        self.declared[t.text[:-1]] = iri

    def document(self) -> Ontology:
        while self.at_keyword() == "Prefix":
            self.prefix_decl()
        if self.at_keyword() != "Ontology":
            raise self.error(f"unexpected {_describe(self.tok)}", "'Prefix(' or 'Ontology('")
        self.advance()
        self.expect("(")
        onto_iri = None
        if self.at("IRI") or (self.at("NAME") and ":" in self.tok.text):
            onto_iri = self.iri().value
            if self.at("IRI") or (self.at("NAME") and ":" in self.tok.text):
                self.iri()  # version IRI, not retained
        axioms = []
        while not self.at(")"):
            if self.at("EOF"):
                raise self.error("unexpected end of input", "axiom or ')'")
            axioms.extend(self.axiom())
        self.advance()
        if not self.at("EOF"):
            raise self.error(f"unexpected {_describe(self.tok)} after ontology", "end of input")
        return Ontology(axioms, prefixes=self.declared, iri=onto_iri)


def _binary_or_pairs(cls, items: list) -> list:
    return [cls(a, b) for a, b in combinations(items, 2)]


def _h_subclass(p: Parser):
    return [SubClassOf(p.class_expression(), p.class_expression())]


def _h_equiv(p: Parser):
    return _binary_or_pairs(EquivalentClasses, p._class_list(2))


def _h_disjoint(p: Parser):
    return _binary_or_pairs(DisjointClasses, p._class_list(2))


def _h_domain(p: Parser):
    return [ObjectPropertyDomain(p.property_expression(), p.class_expression())]


def _h_range(p: Parser):
    return [ObjectPropertyRange(p.property_expression(), p.class_expression())]


def _h_subprop(p: Parser):
    if p.at_keyword() == "ObjectPropertyChain":
        p.advance()
        p.expect("(")
        chain = [p.property_expression()]
        while not p.at(")"):
            chain.append(p.property_expression())
        if len(chain) < 2:
            raise p.error("a property chain needs at least two members", "object property")
        p.expect(")", "')'")
        return [SubPropertyChainOf(tuple(chain), p.property_expression())]
    return [SubObjectPropertyOf(p.property_expression(), p.property_expression())]


def _h_equivprop(p: Parser):
    items = [p.property_expression(), p.property_expression()]
    while not p.at(")"):
        items.append(p.property_expression())
    return _binary_or_pairs(EquivalentObjectProperties, items)


def _h_inverse(p: Parser):
    a, b = p.property_expression(), p.property_expression()
    ia, ib = isinstance(a, InverseOf), isinstance(b, InverseOf)
    if ia and ib:
        return [InverseObjectProperties(a.prop, b.prop)]
    if ia:
        return [EquivalentObjectProperties(a.prop, b)]
    if ib:
        return [EquivalentObjectProperties(a, b.prop)]
    return [InverseObjectProperties(a, b)]


def _characteristic(kind: CharacteristicKind):
    def handler(p: Parser):
        return [Characteristic(kind, p.property_expression())]
    return handler


def _h_class_assertion(p: Parser):
    return [ClassAssertion(p.class_expression(), p.individual())]


def _h_prop_assertion(p: Parser):
    return [ObjectPropertyAssertion(p.property_expression(), p.individual(), p.individual())]


def _h_different(p: Parser):
    items = [p.individual(), p.individual()]
    while not p.at(")"):
        items.append(p.individual())
    return _binary_or_pairs(DifferentIndividuals, items)


_DECL_KINDS = {"Class": EntityKind.CLASS, "ObjectProperty": EntityKind.PROPERTY,
               "NamedIndividual": EntityKind.INDIVIDUAL}


def _h_declaration(p: Parser):
    kw = p.at_keyword()
    if kw in ("DataProperty", "AnnotationProperty", "Datatype"):
        raise p.unsupported(kw)
    if kw not in _DECL_KINDS:
        raise p.error(f"unexpected {_describe(p.tok)}", "entity (Class, ObjectProperty, NamedIndividual)")
    p.advance()
    p.expect("(")
    iri = p.iri("entity IRI")
    p.expect(")", "')'")
    return [Declaration(_DECL_KINDS[kw], iri)]


_AXIOM_HANDLERS = {
    "Declaration": _h_declaration,
    "SubClassOf": _h_subclass,
    "EquivalentClasses": _h_equiv,
    "DisjointClasses": _h_disjoint,
    "ObjectPropertyDomain": _h_domain,
    "ObjectPropertyRange": _h_range,
    "SubObjectPropertyOf": _h_subprop,
    "EquivalentObjectProperties": _h_equivprop,
    "InverseObjectProperties": _h_inverse,
    "ClassAssertion": _h_class_assertion,
    "ObjectPropertyAssertion": _h_prop_assertion,
    "DifferentIndividuals": _h_different,
    **{k: _characteristic(v) for k, v in CHARACTERISTIC_KEYWORDS.items()},
}


# -- public parse API ---------------------------------------------------------

def parse_document(text: str) -> Ontology:
    return Parser(text).document()


def parse_axioms(text: str, prefixes: dict | None = None) -> list:
    p = Parser(text, prefixes)
    out = p.axiom()
    if not p.at("EOF"):
        raise p.error(f"unexpected {_describe(p.tok)} after axiom", "end of input")
    return out


def parse_axiom(text: str, prefixes: dict | None = None) -> Axiom:
    """Parse a single axiom. n-ary input expanding to several axioms is rejected."""
    out = parse_axioms(text, prefixes)
    if len(out) != 1:
        raise ParseError(1, 1, "n-ary axiom expands to several axioms; give one pair")
    return out[0]


def parse_class_expression(text: str, prefixes: dict | None = None):
    p = Parser(text, prefixes)
    ce = p.class_expression()
    p.expect("EOF", "end of input")
    return ce


def load(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


# -- serializer ---------------------------------------------------------------

def effective_prefixes(o: Ontology) -> dict:
    pfx = {"": DEFAULT_NS, **STANDARD_PREFIXES}
    pfx.update(o.prefixes)
    return pfx


class Writer:
    def __init__(self, prefixes: dict):
        # longest namespace first so the most specific prefix wins
        self.ns = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))
        self._cache: dict = {}

    def iri(self, iri: Iri) -> str:
        hit = self._cache.get(iri)
        if hit is None:
            v = iri.value
            hit = f"<{v}>"
            for name, ns in self.ns:
                if v.startswith(ns) and _PN_LOCAL.match(v[len(ns):]):
                    hit = f"{name}:{v[len(ns):]}"
                    break
            self._cache[iri] = hit
        return hit

    def prop(self, p) -> str:
        if isinstance(p, InverseOf):
            return f"ObjectInverseOf({self.iri(p.prop.iri)})"
        if isinstance(p, Variable):
            return f"?{p.name}"
        return self.iri(p.iri)

    def cls(self, ce) -> str:
        if isinstance(ce, NamedClass):
            return self.iri(ce.iri)
        if isinstance(ce, _Thing):
            return "owl:Thing"
        if isinstance(ce, _Nothing):
            return "owl:Nothing"
        if isinstance(ce, ComplementOf):
            return f"ObjectComplementOf({self.cls(ce.operand)})"
        if isinstance(ce, IntersectionOf):
            return "ObjectIntersectionOf(" + " ".join(self.cls(x) for x in ce.operands) + ")"
        if isinstance(ce, UnionOf):
            return "ObjectUnionOf(" + " ".join(self.cls(x) for x in ce.operands) + ")"
        if isinstance(ce, SomeValuesFrom):
            return f"ObjectSomeValuesFrom({self.prop(ce.prop)} {self.cls(ce.filler)})"
        if isinstance(ce, AllValuesFrom):
            return f"ObjectAllValuesFrom({self.prop(ce.prop)} {self.cls(ce.filler)})"
        if isinstance(ce, HasSelf):
            return f"ObjectHasSelf({self.prop(ce.prop)})"
        if isinstance(ce, Variable):
            return f"?{ce.name}"
        raise TypeError(f"not a class expression: {ce!r}")

    def ind(self, i) -> str:
        return f"?{i.name}" if isinstance(i, Variable) else self.iri(i)

    def axiom(self, ax) -> str:
        c, p, i = self.cls, self.prop, self.ind
        if isinstance(ax, SubClassOf):
            return f"SubClassOf({c(ax.sub)} {c(ax.sup)})"
        if isinstance(ax, EquivalentClasses):
            return f"EquivalentClasses({c(ax.first)} {c(ax.second)})"
        if isinstance(ax, DisjointClasses):
            return f"DisjointClasses({c(ax.first)} {c(ax.second)})"
        if isinstance(ax, ObjectPropertyDomain):
            return f"ObjectPropertyDomain({p(ax.prop)} {c(ax.cls)})"
        if isinstance(ax, ObjectPropertyRange):
            return f"ObjectPropertyRange({p(ax.prop)} {c(ax.cls)})"
        if isinstance(ax, SubObjectPropertyOf):
            return f"SubObjectPropertyOf({p(ax.sub)} {p(ax.sup)})"
        if isinstance(ax, SubPropertyChainOf):
            chain = " ".join(p(x) for x in ax.chain)
            return f"SubObjectPropertyOf(ObjectPropertyChain({chain}) {p(ax.sup)})"
        if isinstance(ax, EquivalentObjectProperties):
            return f"EquivalentObjectProperties({p(ax.first)} {p(ax.second)})"
        if isinstance(ax, InverseObjectProperties):
            return f"InverseObjectProperties({p(ax.first)} {p(ax.second)})"
        if isinstance(ax, Characteristic):
            return f"{KEYWORD_OF_KIND[ax.kind]}({p(ax.prop)})"
        if isinstance(ax, ClassAssertion):
            return f"ClassAssertion({c(ax.cls)} {i(ax.individual)})"
        if isinstance(ax, ObjectPropertyAssertion):
            return f"ObjectPropertyAssertion({p(ax.prop)} {i(ax.subject)} {i(ax.object)})"
        if isinstance(ax, DifferentIndividuals):
            return f"DifferentIndividuals({i(ax.first)} {i(ax.second)})"
        if isinstance(ax, Declaration):
            return f"Declaration({ax.kind.value}({self.iri(ax.iri)}))"
        raise TypeError(f"not an axiom: {ax!r}")


def serialize(o: Ontology) -> str:
    pfx = effective_prefixes(o)
    w = Writer(pfx)
    order = sorted(pfx, key=lambda k: (k != "", k))
    lines = [f"Prefix({k}:=<{pfx[k]}>)" for k in order]
    lines.append(f"Ontology(<{o.iri}>" if o.iri else "Ontology(")
    for name in sorted(o.mock_entities):
        lines.append(f"# mock-entity <{name.value}>")
    mocks = o.mock_axioms
    for ax in o:
        text = w.axiom(ax)
        lines.append(text + "  # mock" if ax in mocks else text)
    lines.append(")")
    return "\n".join(lines) + "\n"


def render_axiom(ax, prefixes: dict | None = None) -> str:
    return Writer({"": DEFAULT_NS, **STANDARD_PREFIXES, **(prefixes or {})}).axiom(ax)


def render_class(ce, prefixes: dict | None = None) -> str:
    return Writer({"": DEFAULT_NS, **STANDARD_PREFIXES, **(prefixes or {})}).cls(ce)


def short_name(iri: Iri, prefixes: dict | None = None) -> str:
    """Display form: default-namespace names lose their ':' prefix."""
    text = Writer({"": DEFAULT_NS, **STANDARD_PREFIXES, **(prefixes or {})}).iri(iri)
    return text[1:] if text.startswith(":") else text


def save(o: Ontology, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(o))


# -- suite manifests ------------------------------------------------------------

@dataclass(frozen=True)
class SuiteEntry:
    axiom: Axiom
    line: int
    strategy: str | None = None  # "tbox" | "abox" | "both"
    expect: str = "pass"  # "pass" | "fail"
    test_id: str | None = None
    text: str = ""


_DIRECTIVES = {"@strategy": ("tbox", "abox", "both"), "@expect": ("pass", "fail"), "@test": None}


def _strip_comment(line: str) -> str:
    depth_iri = False
    for k, ch in enumerate(line):
        if ch == "<":
            depth_iri = True
        elif ch == ">":
            depth_iri = False
        elif ch == "#" and not depth_iri:
            return line[:k]
    return line


def parse_suite(text: str, prefixes: dict | None = None) -> list[SuiteEntry]:
    """Parse a ``.suite`` manifest: one axiom per line plus trailing directives."""
    pfx = dict(prefixes or {})
    entries: list[SuiteEntry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        # directives are split off first so the axiom text stays plain FSS
        at = _find_directive_start(body)
        axiom_text, directive_text = body[:at], body[at:]
        opts = _parse_directives(directive_text, lineno, at + 1)
        stripped = axiom_text.strip()
        if not stripped:
            raise ParseError(lineno, 1, "directive without an axiom", "axiom")
        col = len(axiom_text) - len(axiom_text.lstrip()) + 1
        p = Parser(stripped, pfx, line=lineno, col=col)
        if p.at_keyword() == "Prefix":
            p.prefix_decl()
            p.expect("EOF", "end of line")
            pfx.update(p.declared)
            continue
        axs = p.axiom()
        if not p.at("EOF"):
            raise p.error(f"unexpected {_describe(p.tok)}", "end of line or directive")
        for ax in axs:
            entries.append(SuiteEntry(ax, lineno, text=stripped, **opts))
    return entries


def _find_directive_start(body: str) -> int:
    in_iri = False
    for k, ch in enumerate(body):
        if ch == "<":
            in_iri = True
        elif ch == ">":
            in_iri = False
        elif ch == "@" and not in_iri:
            return k
    return len(body)


def _parse_directives(text: str, line: int, col0: int) -> dict:
    opts: dict = {}
    words = [(m.group(), m.start()) for m in re.finditer(r"\S+", text)]
    k = 0
    while k < len(words):
        word, off = words[k]
        if word not in _DIRECTIVES:
            raise ParseError(line, col0 + off, f"unknown directive {word}", "@strategy, @expect or @test")
        if k + 1 >= len(words):
            raise ParseError(line, col0 + off, f"{word} needs an argument")
        value, voff = words[k + 1]
        allowed = _DIRECTIVES[word]
        if allowed is not None and value not in allowed:
            raise ParseError(line, col0 + voff, f"bad value {value!r} for {word}", " or ".join(allowed))
        key = {"@strategy": "strategy", "@expect": "expect", "@test": "test_id"}[word]
        if key in opts:
            raise ParseError(line, col0 + off, f"duplicate {word}")
        opts[key] = value
        k += 2
    return opts


def load_suite(path, prefixes: dict | None = None) -> list[SuiteEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_suite(fh.read(), prefixes)
