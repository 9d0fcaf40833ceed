"""Turtle subset: parser and deterministic serializer.

Supported: ``@prefix``/``@base`` (and the SPARQL-style ``PREFIX``/``BASE``),
absolute and relative IRIs, prefixed names, the ``a`` keyword, quoted literals
with ``^^datatype`` or ``@lang``, integer/decimal/double/boolean shorthands,
``;`` and ``,`` lists, labelled blank nodes and ``[ ... ]`` property lists.
Collections and quoted triples are rejected with :class:`Unsupported`.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Optional
from urllib.parse import urljoin

from . import errors
from .rdf.graph import Graph, shrink
from .rdf.terms import (
    IRI,
    RDF_LANGSTRING,
    RDF_TYPE,
    XSD,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BNode,
    Literal,
    Term,
    Triple,
    escape_string,
    is_valid_iri,
)

_PN_CHARS_ESC = r"\\[_~.\-!$&'()*+,;=/?#@%]"
_PLX = rf"(?:%[0-9A-Fa-f]{{2}}|{_PN_CHARS_ESC})"
_PN_LOCAL = rf"(?:[\w:]|{_PLX})(?:(?:[\w\-.:]|{_PLX})*(?:[\w\-:]|{_PLX}))?"
_PN_PREFIX = r"[A-Za-z](?:[\w\-.]*[\w\-])?"

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("LONG_STRING", r'"""(?:[^"\\]|\\.|"(?!""))*"""' + r"|'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING", r'"(?:[^"\\\r\n]|\\.)*"' + r"|'(?:[^'\\\r\n]|\\.)*'"),
    ("QUOTED_OPEN", r"<<"),
    ("QUOTED_CLOSE", r">>"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("PNAME", rf"(?:{_PN_PREFIX})?:(?:{_PN_LOCAL})?"),
    ("BLANK", r"_:[A-Za-z0-9_]+"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("DTYPE", r"\^\^"),
    ("PUNCT", r"[.;,\[\]()]"),
    ("NAME", r"[A-Za-z][A-Za-z0-9_]*"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))

_STRING_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


@dataclass
class Diagnostic:
    line: int
    column: int
    message: str


@dataclass
class TurtleDocument:
    source_text: str
    graph: Graph = field(default_factory=Graph)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


class _Positions:
    def __init__(self, text: str):
        self.starts = [0] + [m.end() for m in re.finditer(r"\n", text)]

    def at(self, offset: int) -> tuple[int, int]:
        i = bisect.bisect_right(self.starts, offset) - 1
        return i + 1, offset - self.starts[i] + 1


def tokenize(text: str) -> list[Token]:
    pos = _Positions(text)
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        m = _MASTER.match(text, i)
        if not m or m.end() == i:
            line, col = pos.at(i)
            raise errors.SyntaxError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            line, col = pos.at(i)
            tokens.append(Token(kind, m.group(), line, col))
        i = m.end()
    return tokens


def _unescape_string(body: str, tok: Token) -> str:
    def repl(m):
        esc = m.group(1)
        if esc[0] in "uU" and len(esc) > 1:
            try:
                return chr(int(esc[1:], 16))
            except (ValueError, OverflowError):
                raise errors.SyntaxError(f"invalid unicode escape \\{esc}", tok.line, tok.column) from None
        if esc in _STRING_ESCAPES:
            return _STRING_ESCAPES[esc]
        raise errors.SyntaxError(f"invalid escape sequence \\{esc}", tok.line, tok.column)

    return _ESCAPE_RE.sub(repl, body)


def _unescape_local(local: str) -> str:
    return re.sub(_PN_CHARS_ESC, lambda m: m.group()[1], local)


class _Parser:
    def __init__(self, text: str, base: Optional[str]):
        self.tokens = tokenize(text)
        self.i = 0
        self.base = base
        self.graph = Graph()
        explicit = {t.text[2:] for t in self.tokens if t.kind == "BLANK"}
        self._explicit_labels = explicit
        self._anon = 0

    # token helpers

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("EOF", "", 1, 1)
            raise errors.SyntaxError("unexpected end of input", last.line, last.column + len(last.text))
        self.i += 1
        return tok

    def is_punct(self, ch: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind == "PUNCT" and tok.text == ch

    def expect(self, ch: str) -> Token:
        tok = self.next()
        if tok.kind != "PUNCT" or tok.text != ch:
            raise errors.SyntaxError(f"expected {ch!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def fresh_blank(self) -> BNode:
        while True:
            label = f"anon{self._anon}"
            self._anon += 1
            if label not in self._explicit_labels:
                return BNode(label)

    # grammar

    def parse(self) -> Graph:
        while self.peek() is not None:
            self.statement()
        return self.graph

    def statement(self):
        tok = self.peek()
        if tok.kind == "LANGTAG" and tok.text in ("@prefix", "@base"):
            self.next()
            if tok.text == "@prefix":
                self.prefix_decl()
            else:
                self.base_decl()
            self.expect(".")
            return
        if tok.kind == "NAME" and tok.text.upper() in ("PREFIX", "BASE"):
            self.next()
            if tok.text.upper() == "PREFIX":
                self.prefix_decl()
            else:
                self.base_decl()
            return
        self.triples()
        self.expect(".")

    def prefix_decl(self):
        tok = self.next()
        if tok.kind != "PNAME" or not tok.text.endswith(":") or tok.text.count(":") != 1:
            raise errors.SyntaxError(f"expected prefix label, found {tok.text!r}", tok.line, tok.column)
        ns = self.iriref(self.next(), "namespace IRI")
        self.graph.prefixes[tok.text[:-1]] = ns

    def base_decl(self):
        self.base = self.iriref(self.next(), "base IRI")

    def iriref(self, tok: Token, what: str = "IRI") -> str:
        if tok.kind != "IRIREF":
            raise errors.SyntaxError(f"expected {what}, found {tok.text!r}", tok.line, tok.column)
        raw = tok.text[1:-1]
        if not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", raw):
            if self.base is None:
                raise errors.SyntaxError(f"relative IRI <{raw}> without a base", tok.line, tok.column)
            raw = urljoin(self.base, raw)
        if not is_valid_iri(raw):
            raise errors.SyntaxError(f"invalid IRI <{raw}>", tok.line, tok.column)
        return raw

    def pname(self, tok: Token) -> str:
        label, _, local = tok.text.partition(":")
        if label not in self.graph.prefixes:
            err = errors.UnknownPrefix(label)
            err.line, err.column = tok.line, tok.column
            raise err
        iri = self.graph.prefixes[label] + _unescape_local(local)
        if not is_valid_iri(iri):
            raise errors.SyntaxError(f"prefixed name expands to invalid IRI {iri!r}", tok.line, tok.column)
        return iri

    def iri(self, tok: Token) -> IRI:
        if tok.kind == "IRIREF":
            return IRI(self.iriref(tok))
        if tok.kind == "PNAME":
            return IRI(self.pname(tok))
        raise errors.SyntaxError(f"expected IRI, found {tok.text!r}", tok.line, tok.column)

    def unsupported_check(self, tok: Token):
        if tok.kind == "PUNCT" and tok.text == "(":
            raise errors.Unsupported("collections", tok.line, tok.column)
        if tok.kind in ("QUOTED_OPEN", "QUOTED_CLOSE"):
            raise errors.Unsupported("quoted triples", tok.line, tok.column)

    def triples(self):
        tok = self.peek()
        self.unsupported_check(tok)
        if tok.kind == "PUNCT" and tok.text == "[":
            subject = self.blank_node_property_list()
            nxt = self.peek()
            if nxt is not None and not (nxt.kind == "PUNCT" and nxt.text == "."):
                self.predicate_object_list(subject)
            return
        subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self):
        tok = self.next()
        self.unsupported_check(tok)
        if tok.kind == "BLANK":
            return BNode(tok.text[2:])
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri(tok)
        raise errors.SyntaxError(f"expected subject, found {tok.text!r}", tok.line, tok.column)

    def verb(self) -> IRI:
        tok = self.next()
        if tok.kind == "NAME" and tok.text == "a":
            return RDF_TYPE
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri(tok)
        self.unsupported_check(tok)
        raise errors.SyntaxError(f"expected predicate, found {tok.text!r}", tok.line, tok.column)

    def predicate_object_list(self, subject):
        while True:
            predicate = self.verb()
            self.object_list(subject, predicate)
            if not self.is_punct(";"):
                return
            while self.is_punct(";"):
                self.next()
            nxt = self.peek()
            if nxt is None or (nxt.kind == "PUNCT" and nxt.text in ".]"):
                return

    def object_list(self, subject, predicate):
        while True:
            obj = self.object()
            self.graph.add(Triple(subject, predicate, obj))
            if not self.is_punct(","):
                return
            self.next()

    def blank_node_property_list(self) -> BNode:
        self.expect("[")
        node = self.fresh_blank()
        if self.is_punct("]"):
            self.next()
            return node
        self.predicate_object_list(node)
        self.expect("]")
        return node

    def object(self) -> Term:
        tok = self.peek()
        if tok is None:
            self.next()
        self.unsupported_check(tok)
        if tok.kind == "PUNCT" and tok.text == "[":
            return self.blank_node_property_list()
        tok = self.next()
        if tok.kind == "BLANK":
            return BNode(tok.text[2:])
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri(tok)
        if tok.kind in ("STRING", "LONG_STRING"):
            return self.string_literal(tok)
        if tok.kind == "INTEGER":
            return Literal(tok.text, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            return Literal(tok.text, XSD_DECIMAL)
        if tok.kind == "DOUBLE":
            return Literal(tok.text, XSD_DOUBLE)
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD_BOOLEAN)
        raise errors.SyntaxError(f"expected object, found {tok.text!r}", tok.line, tok.column)

    def string_literal(self, tok: Token) -> Literal:
        q = 3 if tok.kind == "LONG_STRING" else 1
        lexical = _unescape_string(tok.text[q:-q], tok)
        nxt = self.peek()
        if nxt is not None and nxt.kind == "LANGTAG":
            self.next()
            return Literal(lexical, RDF_LANGSTRING, nxt.text[1:])
        if nxt is not None and nxt.kind == "DTYPE":
            self.next()
            dt_tok = self.next()
            return Literal(lexical, self.iri(dt_tok).value)
        return Literal(lexical, XSD_STRING)


def parse_turtle(text: str, base: Optional[str] = None) -> Graph:
    """Parse a Turtle document into a :class:`Graph` (prefixes retained)."""
    if text.startswith("\ufeff"):
        text = text[1:]
    try:
        return _Parser(text, base).parse()
    except errors.InvalidTerm as exc:
        raise errors.SyntaxError(str(exc)) from exc


def parse_document(text: str, base: Optional[str] = None) -> TurtleDocument:
    """Parse without raising; failures are reported as diagnostics."""
    doc = TurtleDocument(text)
    try:
        doc.graph = parse_turtle(text, base)
    except (errors.SyntaxError, errors.Unsupported) as exc:
        doc.diagnostics.append(Diagnostic(exc.line, exc.column, str(exc)))
    except errors.UnknownPrefix as exc:
        doc.diagnostics.append(Diagnostic(getattr(exc, "line", 1), getattr(exc, "column", 1), str(exc)))
    return doc


# serializer

_INTEGER_LEX = re.compile(r"^[+-]?\d+$")
_DECIMAL_LEX = re.compile(r"^[+-]?\d*\.\d+$")
_DOUBLE_LEX = re.compile(r"^[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)$")


def _render_iri(iri: str, prefixes) -> str:
    name = shrink(prefixes, iri)
    return name if name is not None else f"<{iri}>"


def _render(term: Term, prefixes) -> str:
    if isinstance(term, IRI):
        return _render_iri(term.value, prefixes)
    if isinstance(term, BNode):
        return term.n3()
    lex = term.lexical
    if term.language:
        return f'"{escape_string(lex)}"@{term.language}'
    dt = term.datatype
    if dt == XSD_STRING:
        return f'"{escape_string(lex)}"'
    if dt == XSD_INTEGER and _INTEGER_LEX.match(lex):
        return lex
    if dt == XSD_DECIMAL and _DECIMAL_LEX.match(lex):
        return lex
    if dt == XSD_DOUBLE and _DOUBLE_LEX.match(lex):
        return lex
    if dt == XSD_BOOLEAN and lex in ("true", "false"):
        return lex
    return f'"{escape_string(lex)}"^^{_render_iri(dt, prefixes)}'


def serialize_turtle(graph: Graph) -> str:
    """Deterministic Turtle: sorted prefixes, subjects, predicates and objects."""
    prefixes = graph.prefixes
    lines = [f"@prefix {label}: <{prefixes[label]}> ." for label in sorted(prefixes)]

    by_subject: dict[str, dict[tuple[int, str], set[str]]] = {}
    for t in graph:
        s = _render(t.subject, prefixes)
        p = (0, "a") if t.predicate == RDF_TYPE else (1, _render(t.predicate, prefixes))
        by_subject.setdefault(s, {}).setdefault(p, set()).add(_render(t.object, prefixes))

    for s in sorted(by_subject):
        if lines:
            lines.append("")
        preds = by_subject[s]
        parts = []
        for p in sorted(preds):
            objs = ", ".join(sorted(preds[p]))
            parts.append(f"{p[1]} {objs}")
        lines.append(f"{s} " + " ;\n    ".join(parts) + " .")
    return "\n".join(lines) + "\n" if lines else ""


def to_ntriples(graph: Graph) -> str:
    """N-Triples rendering, one sorted line per triple."""
    from .rdf.terms import term_key

    return "".join(
        f"{term_key(t.subject)} {term_key(t.predicate)} {term_key(t.object)} .\n" for t in graph.sorted_triples()
    )


__all__ = [
    "Diagnostic",
    "TurtleDocument",
    "XSD",
    "parse_document",
    "parse_turtle",
    "serialize_turtle",
    "to_ntriples",
    "tokenize",
]
