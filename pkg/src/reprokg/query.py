"""SELECT-query subset: parser and evaluator over a :class:`~reprokg.store.Store`.

Grammar (keywords case-insensitive)::

    query     := prologue 'SELECT' 'DISTINCT'? ('*' | var+) 'WHERE'? '{' group '}'
                 ('ORDER' 'BY' order)? ('LIMIT' INTEGER)?
    prologue  := ('PREFIX' PNAME_NS IRIREF | 'BASE' IRIREF)*
    group     := (triples | filter) ('.'? (triples | filter))* '.'?
    triples   := term verb term (',' term)* (';' verb term (',' term)*)*
    filter    := 'FILTER' '(' var op term ')' | 'FILTER' '(' term op var ')'
               | 'FILTER' 'regex' '(' var ',' STRING (',' STRING)? ')'
    order     := var | ('ASC' | 'DESC') '(' var ')'
    op        := '=' | '!=' | '<' | '<=' | '>' | '>='

OPTIONAL, UNION, MINUS, GRAPH, SERVICE, BIND, VALUES, sub-queries,
aggregates, property paths and non-SELECT forms raise :class:`Unsupported`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union
from urllib.parse import urljoin

from . import errors
from .rdf.graph import STANDARD_PREFIXES
from .rdf.terms import (
    IRI,
    RDF_LANGSTRING,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BNode,
    Literal,
    Term,
    is_valid_iri,
    term_key,
)
from .store import Binding, Store, TriplePattern, Variable
from .turtle import _PN_LOCAL, _PN_PREFIX, _Positions, _unescape_local, _unescape_string

COMPARATORS = ("=", "!=", "<", "<=", ">", ">=", "regex")
_FLIP = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}

_UNSUPPORTED_KEYWORDS = {
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "CONSTRUCT", "ASK",
    "DESCRIBE", "GROUP", "HAVING", "OFFSET", "INSERT", "DELETE", "FROM", "NAMED", "EXISTS", "NOT",
    "COUNT", "SUM", "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT", "REDUCED",
}


@dataclass(frozen=True)
class Filter:
    variable: str
    comparator: str
    operand: Union[Term, str]
    flags: str = ""

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise errors.MalformedQuery(f"unknown comparator {self.comparator!r}")
        if self.comparator == "regex" and not isinstance(self.operand, str):
            raise errors.MalformedQuery("regex filter needs pattern text")
        if self.comparator != "regex" and isinstance(self.operand, str):
            raise errors.MalformedQuery("comparison filter needs an RDF term operand")


@dataclass(frozen=True)
class OrderBy:
    variable: str
    descending: bool = False


@dataclass
class SelectQuery:
    projection: Union[list[str], str]  # list of variable names, or "*"
    patterns: list[TriplePattern]
    filters: list[Filter] = field(default_factory=list)
    distinct: bool = False
    order_by: Optional[OrderBy] = None
    limit: Optional[int] = None

    def pattern_variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables
        return out

    def output_variables(self) -> list[str]:
        if self.projection == "*":
            seen: list[str] = []
            for p in self.patterns:
                for t in p:
                    if isinstance(t, Variable) and t.name not in seen:
                        seen.append(t.name)
            return seen
        return list(self.projection)

    def validate(self) -> None:
        if not self.patterns:
            raise errors.MalformedQuery("query has no triple patterns")
        bound = self.pattern_variables()
        proj = [] if self.projection == "*" else self.projection
        for name in proj:
            if name not in bound:
                raise errors.MalformedQuery(f"projected variable ?{name} is not bound by any pattern")
        for f in self.filters:
            if f.variable not in bound:
                raise errors.MalformedQuery(f"filter variable ?{f.variable} is not bound by any pattern")
        if self.order_by is not None and self.order_by.variable not in bound:
            raise errors.MalformedQuery(f"ORDER BY variable ?{self.order_by.variable} is not bound by any pattern")
        if self.limit is not None and self.limit < 0:
            raise errors.MalformedQuery("LIMIT must be non-negative")


# filter semantics


def numeric(term: Term) -> Optional[float]:
    if isinstance(term, Literal):
        return term.numeric_value()
    return None


def filter_holds(term: Term, f: Filter) -> bool:
    """Evaluate one filter on a bound value; type errors count as false."""
    op = f.comparator
    if op == "regex":
        if isinstance(term, Literal):
            text = term.lexical
        elif isinstance(term, IRI):
            text = term.value
        else:
            return False
        flags = re.IGNORECASE if "i" in f.flags else 0
        try:
            return re.search(f.operand, text, flags) is not None
        except re.error:
            return False
    other = f.operand
    a, b = numeric(term), numeric(other)
    if a is not None and b is not None:
        return {"=": a == b, "!=": a != b, "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
    if op == "=":
        return term == other
    if op == "!=":
        return term != other
    if (
        isinstance(term, Literal)
        and isinstance(other, Literal)
        and a is None
        and b is None
        and term.datatype == other.datatype
        and term.language == other.language
    ):
        x, y = term.lexical, other.lexical
        return {"<": x < y, "<=": x <= y, ">": x > y, ">=": x >= y}[op]
    return False


def order_key(term: Term):
    n = numeric(term)
    if n is not None:
        return (0, n, "")
    return (1, 0.0, term_key(term))


def row_key(row: Binding) -> tuple:
    return tuple((name, term_key(row[name])) for name in sorted(row))


# evaluation


def _ground_count(pattern: TriplePattern, bound: set[str]) -> int:
    return sum(1 for t in pattern if not isinstance(t, Variable) or t.name in bound)


def evaluate(store: Store, query: SelectQuery) -> list[Binding]:
    """Join, filter, order, project, deduplicate and truncate."""
    query.validate()
    remaining = list(enumerate(query.patterns))
    pending = list(query.filters)
    rows: list[Binding] = [{}]
    bound: set[str] = set()
    while remaining and rows:
        # most ground positions first, then the smallest index cardinality
        remaining.sort(key=lambda ip: (-_ground_count(ip[1], bound), store.estimate(ip[1]), ip[0]))
        _, pattern = remaining.pop(0)
        new_rows = []
        for row in rows:
            for b in store.match(pattern.substitute(row)):
                merged = dict(row)
                merged.update(b)
                new_rows.append(merged)
        rows = new_rows
        bound |= pattern.variables
        ready = [f for f in pending if f.variable in bound]
        if ready:
            pending = [f for f in pending if f.variable not in bound]
            rows = [r for r in rows if all(filter_holds(r[f.variable], f) for f in ready)]
    if remaining:
        rows = []

    rows.sort(key=row_key)
    if query.order_by is not None:
        name = query.order_by.variable
        rows.sort(key=lambda r: order_key(r[name]), reverse=query.order_by.descending)

    out_vars = query.output_variables()
    projected = [{v: r[v] for v in out_vars} for r in rows]
    if query.distinct:
        seen = set()
        unique = []
        for r in projected:
            k = row_key(r)
            if k not in seen:
                seen.add(k)
                unique.append(r)
        projected = unique
    if query.limit is not None:
        projected = projected[: query.limit]
    return projected


def select(store: Store, query: Union[SelectQuery, str]) -> list[Binding]:
    if isinstance(query, str):
        query = parse_query(query, store.prefixes)
    return evaluate(store, query)


# parsing

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("LONG_STRING", r'"""(?:[^"\\]|\\.|"(?!""))*"""' + r"|'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING", r'"(?:[^"\\\r\n]|\\.)*"' + r"|'(?:[^'\\\r\n]|\\.)*'"),
    ("VAR", r"[?$][A-Za-z_][A-Za-z0-9_]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("PNAME", rf"(?:{_PN_PREFIX})?:(?:{_PN_LOCAL})?"),
    ("BLANK", r"_:[A-Za-z0-9_]+"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("DTYPE", r"\^\^"),
    ("OP", r"!=|<=|>=|=|<|>|&&|\|\||!"),
    ("PATH", r"[/|^+?]"),
    ("PUNCT", r"[{}().;,*\[\]]"),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_]*"),
]
_MASTER = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def _tokenize(text: str) -> list[_Tok]:
    pos = _Positions(text)
    out = []
    i = 0
    while i < len(text):
        m = _MASTER.match(text, i)
        if not m or m.end() == i:
            line, col = pos.at(i)
            raise errors.SyntaxError(f"unexpected character {text[i]!r}", line, col)
        if m.lastgroup not in ("WS", "COMMENT"):
            line, col = pos.at(i)
            out.append(_Tok(m.lastgroup, m.group(), line, col))
        i = m.end()
    end_line, end_col = pos.at(len(text))
    out.append(_Tok("EOF", "", end_line, end_col))
    return out


class _QueryParser:
    def __init__(self, text: str, prefixes: Mapping[str, str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes = dict(STANDARD_PREFIXES)
        self.prefixes.update(prefixes)
        self.base: Optional[str] = None

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.peek()
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def fail(self, tok: _Tok, msg: str):
        raise errors.SyntaxError(msg, tok.line, tok.column)

    def check_unsupported(self, tok: _Tok):
        if tok.kind == "NAME" and tok.upper in _UNSUPPORTED_KEYWORDS:
            raise errors.Unsupported(tok.upper, tok.line, tok.column)
        if tok.kind == "PATH":
            raise errors.Unsupported("property paths", tok.line, tok.column)

    def keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok.kind == "NAME" and tok.upper == word:
            self.next()
            return True
        return False

    def expect_punct(self, ch: str) -> _Tok:
        tok = self.next()
        if tok.kind != "PUNCT" or tok.text != ch:
            self.check_unsupported(tok)
            self.fail(tok, f"expected {ch!r}, found {tok.text or 'end of query'!r}")
        return tok

    def is_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == ch

    def parse(self) -> SelectQuery:
        while True:
            if self.keyword("PREFIX"):
                label = self.next()
                if label.kind != "PNAME" or not label.text.endswith(":") or label.text.count(":") != 1:
                    self.fail(label, "expected prefix label")
                self.prefixes[label.text[:-1]] = self.iriref(self.next())
            elif self.keyword("BASE"):
                self.base = self.iriref(self.next())
            else:
                break
        tok = self.peek()
        if not self.keyword("SELECT"):
            self.check_unsupported(tok)
            self.fail(tok, "expected SELECT")
        distinct = self.keyword("DISTINCT")
        self.check_unsupported(self.peek())
        projection: Union[list[str], str]
        if self.is_punct("*"):
            self.next()
            projection = "*"
        else:
            projection = []
            while self.peek().kind == "VAR":
                projection.append(self.next().text[1:])
            if not projection:
                tok = self.peek()
                self.check_unsupported(tok)
                if tok.kind == "PUNCT" and tok.text == "(":
                    raise errors.Unsupported("projection expressions", tok.line, tok.column)
                self.fail(tok, "expected variables or '*' after SELECT")
        self.check_unsupported(self.peek())
        self.keyword("WHERE")
        patterns, filters = self.group()
        order = None
        if self.keyword("ORDER"):
            if not self.keyword("BY"):
                self.fail(self.peek(), "expected BY after ORDER")
            order = self.order_condition()
            if self.peek().kind == "VAR" or (self.peek().kind == "NAME" and self.peek().upper in ("ASC", "DESC")):
                tok = self.peek()
                raise errors.Unsupported("multiple ORDER BY keys", tok.line, tok.column)
        limit = None
        if self.keyword("LIMIT"):
            tok = self.next()
            if tok.kind != "INTEGER" or tok.text.startswith(("-", "+")):
                self.fail(tok, "LIMIT expects a non-negative integer")
            limit = int(tok.text)
        tok = self.peek()
        if tok.kind != "EOF":
            self.check_unsupported(tok)
            self.fail(tok, f"unexpected {tok.text!r} after query")
        q = SelectQuery(projection, patterns, filters, distinct, order, limit)
        q.validate()
        return q

    def order_condition(self) -> OrderBy:
        tok = self.next()
        if tok.kind == "VAR":
            return OrderBy(tok.text[1:])
        if tok.kind == "NAME" and tok.upper in ("ASC", "DESC"):
            self.expect_punct("(")
            v = self.next()
            if v.kind != "VAR":
                raise errors.Unsupported("ORDER BY expressions", v.line, v.column)
            self.expect_punct(")")
            return OrderBy(v.text[1:], tok.upper == "DESC")
        self.fail(tok, "expected ORDER BY variable")

    def group(self):
        self.expect_punct("{")
        patterns: list[TriplePattern] = []
        filters: list[Filter] = []
        while True:
            tok = self.peek()
            if tok.kind == "PUNCT" and tok.text == "}":
                self.next()
                return patterns, filters
            if tok.kind == "EOF":
                self.fail(tok, "unterminated group: expected '}'")
            self.check_unsupported(tok)
            if tok.kind == "PUNCT" and tok.text == "{":
                raise errors.Unsupported("nested groups", tok.line, tok.column)
            if tok.kind == "NAME" and tok.upper == "FILTER":
                self.next()
                filters.append(self.filter())
            elif tok.kind == "NAME" and tok.upper == "SELECT":
                raise errors.Unsupported("sub-queries", tok.line, tok.column)
            else:
                self.triples(patterns)
            if self.is_punct("."):
                self.next()

    def triples(self, out: list[TriplePattern]):
        subject = self.term(position="subject")
        while True:
            predicate = self.verb()
            while True:
                obj = self.term(position="object")
                out.append(TriplePattern(subject, predicate, obj))
                if self.is_punct(","):
                    self.next()
                    continue
                break
            if self.peek().kind == "PATH":
                raise errors.Unsupported("property paths", self.peek().line, self.peek().column)
            if self.is_punct(";"):
                while self.is_punct(";"):
                    self.next()
                if self.is_punct(".") or self.is_punct("}"):
                    return
                continue
            return

    def verb(self):
        tok = self.peek()
        if tok.kind == "NAME" and tok.text == "a":
            self.next()
            return RDF_TYPE
        term = self.term(position="predicate")
        if self.peek().kind == "PATH" or (self.is_punct("*") and self.peek(1).kind != "EOF"):
            nxt = self.peek()
            raise errors.Unsupported("property paths", nxt.line, nxt.column)
        if isinstance(term, (Literal, BNode)):
            self.fail(tok, "predicate must be an IRI or variable")
        return term

    def term(self, position: str):
        tok = self.next()
        self.check_unsupported(tok)
        if tok.kind == "VAR":
            return Variable(tok.text[1:])
        if tok.kind == "IRIREF":
            return IRI(self.iriref(tok))
        if tok.kind == "PNAME":
            return IRI(self.pname(tok))
        if tok.kind == "BLANK":
            if position == "predicate":
                self.fail(tok, "blank node in predicate position")
            return BNode(tok.text[2:])
        if position == "object" or position == "operand":
            lit = self.literal(tok)
            if lit is not None:
                return lit
        if tok.kind == "PUNCT" and tok.text in "([":
            what = "collections" if tok.text == "(" else "blank node property lists"
            raise errors.Unsupported(what, tok.line, tok.column)
        self.fail(tok, f"expected {position}, found {tok.text or 'end of query'!r}")

    def literal(self, tok: _Tok) -> Optional[Literal]:
        if tok.kind in ("STRING", "LONG_STRING"):
            q = 3 if tok.kind == "LONG_STRING" else 1
            lexical = _unescape_string(tok.text[q:-q], tok)
            nxt = self.peek()
            if nxt.kind == "LANGTAG":
                self.next()
                return Literal(lexical, RDF_LANGSTRING, nxt.text[1:])
            if nxt.kind == "DTYPE":
                self.next()
                dt = self.next()
                if dt.kind == "IRIREF":
                    return Literal(lexical, self.iriref(dt))
                if dt.kind == "PNAME":
                    return Literal(lexical, self.pname(dt))
                self.fail(dt, "expected datatype IRI")
            return Literal(lexical, XSD_STRING)
        if tok.kind == "INTEGER":
            return Literal(tok.text, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            return Literal(tok.text, XSD_DECIMAL)
        if tok.kind == "DOUBLE":
            return Literal(tok.text, XSD_DOUBLE)
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD_BOOLEAN)
        return None

    def iriref(self, tok: _Tok) -> str:
        if tok.kind != "IRIREF":
            self.fail(tok, "expected IRI")
        raw = tok.text[1:-1]
        if not re.match(r"^[A-Za-z][A-Za-z0-9+.\-]*:", raw):
            if self.base is None:
                self.fail(tok, f"relative IRI <{raw}> without BASE")
            raw = urljoin(self.base, raw)
        if not is_valid_iri(raw):
            self.fail(tok, f"invalid IRI <{raw}>")
        return raw

    def pname(self, tok: _Tok) -> str:
        label, _, local = tok.text.partition(":")
        if label not in self.prefixes:
            err = errors.UnknownPrefix(label)
            err.line, err.column = tok.line, tok.column
            raise err
        return self.prefixes[label] + _unescape_local(local)

    def filter(self) -> Filter:
        tok = self.peek()
        if tok.kind == "NAME" and tok.upper == "REGEX":
            self.next()
            return self.regex_args()
        self.expect_punct("(")
        tok = self.peek()
        if tok.kind == "NAME" and tok.upper == "REGEX":
            self.next()
            f = self.regex_args()
            self.expect_punct(")")
            return f
        left = self.term(position="operand")
        op = self.next()
        if op.kind != "OP" or op.text not in _FLIP:
            if op.kind == "OP" or op.kind == "NAME":
                raise errors.Unsupported(f"filter operator {op.text!r}", op.line, op.column)
            self.fail(op, "expected comparison operator")
        right = self.term(position="operand")
        close = self.peek()
        if not self.is_punct(")"):
            raise errors.Unsupported("compound filter expressions", close.line, close.column)
        self.next()
        if isinstance(left, Variable) and not isinstance(right, Variable):
            return Filter(left.name, op.text, right)
        if isinstance(right, Variable) and not isinstance(left, Variable):
            return Filter(right.name, _FLIP[op.text], left)
        raise errors.Unsupported("filters must compare one variable with one constant", tok.line, tok.column)

    def regex_args(self) -> Filter:
        self.expect_punct("(")
        v = self.next()
        if v.kind != "VAR":
            raise errors.Unsupported("regex over expressions", v.line, v.column)
        self.expect_punct(",")
        pat = self.next()
        if pat.kind not in ("STRING", "LONG_STRING"):
            self.fail(pat, "regex pattern must be a string")
        q = 3 if pat.kind == "LONG_STRING" else 1
        pattern = _unescape_string(pat.text[q:-q], pat)
        flags = ""
        if self.is_punct(","):
            self.next()
            ft = self.next()
            if ft.kind != "STRING":
                self.fail(ft, "regex flags must be a string")
            flags = ft.text[1:-1]
        self.expect_punct(")")
        try:
            re.compile(pattern)
        except re.error as exc:
            self.fail(pat, f"invalid regular expression: {exc}")
        return Filter(v.text[1:], "regex", pattern, flags)


def parse_query(text: str, prefixes: Optional[Mapping[str, str]] = None) -> SelectQuery:
    """Parse query text; prefixed names resolve against ``prefixes`` and PREFIX declarations."""
    return _QueryParser(text, prefixes or {}).parse()


__all__ = ["COMPARATORS", "Filter", "OrderBy", "SelectQuery", "evaluate", "filter_holds", "parse_query", "select"]
