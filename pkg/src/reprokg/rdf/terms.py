"""RDF terms, triples and namespaces."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from ..errors import InvalidIri, InvalidTerm

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
# whitespace, controls and the characters an IRIREF cannot carry unescaped
_FORBIDDEN = re.compile(r'[\x00-\x20\x7f-\x9f<>"{}|^`\\]')
_BLANK_LABEL = re.compile(r"^[A-Za-z0-9_]+$")
_LANG = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATETIME = XSD + "dateTime"
RDF_LANGSTRING = RDF_NS + "langString"

NUMERIC_DATATYPES = frozenset(
    XSD + name
    for name in (
        "integer", "decimal", "double", "float", "long", "int", "short", "byte",
        "nonNegativeInteger", "positiveInteger", "nonPositiveInteger", "negativeInteger",
        "unsignedLong", "unsignedInt", "unsignedShort", "unsignedByte",
    )
)


def is_valid_iri(text: str) -> bool:
    return bool(text) and bool(_SCHEME.match(text)) and not _FORBIDDEN.search(text)


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not is_valid_iri(self.value):
            raise InvalidIri(f"not an absolute IRI: {self.value!r}")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class BNode:
    label: str

    def __post_init__(self):
        if not isinstance(self.label, str) or not _BLANK_LABEL.match(self.label):
            raise InvalidTerm(f"invalid blank node label: {self.label!r}")

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self) -> str:
        return self.n3()


@dataclass(frozen=True, order=True)
class Literal:
    """A literal compared by (lexical, datatype, language), never by value."""

    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.lexical, str):
            raise InvalidTerm(f"literal lexical form must be text, got {type(self.lexical).__name__}")
        if self.language is not None:
            if not _LANG.match(self.language):
                raise InvalidTerm(f"invalid language tag: {self.language!r}")
            if self.datatype == XSD_STRING:
                object.__setattr__(self, "datatype", RDF_LANGSTRING)
            elif self.datatype != RDF_LANGSTRING:
                raise InvalidTerm("a language tag requires the language-string datatype")
            object.__setattr__(self, "language", self.language.lower())
        elif self.datatype == RDF_LANGSTRING:
            raise InvalidTerm("language-string literal without a language tag")
        if not is_valid_iri(self.datatype):
            raise InvalidIri(f"invalid datatype IRI: {self.datatype!r}")

    @property
    def is_numeric(self) -> bool:
        return self.datatype in NUMERIC_DATATYPES

    def to_python(self):
        """Best-effort native value; falls back to the lexical form."""
        try:
            if self.datatype in (XSD_DECIMAL, XSD_DOUBLE, XSD + "float"):
                return float(self.lexical)
            if self.datatype in NUMERIC_DATATYPES:
                return int(self.lexical)
            if self.datatype == XSD_BOOLEAN:
                if self.lexical in ("true", "1"):
                    return True
                if self.lexical in ("false", "0"):
                    return False
        except ValueError:
            pass
        return self.lexical

    def numeric_value(self) -> Optional[float]:
        """Numeric value when the literal is numeric-typed and well formed, else None."""
        if not self.is_numeric:
            return None
        try:
            return float(self.lexical)
        except ValueError:
            return None

    def __str__(self) -> str:
        return self.lexical


Term = Union[IRI, BNode, Literal]


def make_iri(text: str) -> IRI:
    if not text:
        raise InvalidIri("empty IRI")
    return IRI(text)


def literal(value, datatype: Optional[str] = None, lang: Optional[str] = None) -> Literal:
    """Build a literal from a Python value, choosing the XSD datatype for numbers/booleans."""
    if lang is not None:
        return Literal(str(value), RDF_LANGSTRING, lang)
    if datatype is not None:
        return Literal(str(value), datatype)
    if isinstance(value, bool):
        return Literal("true" if value else "false", XSD_BOOLEAN)
    if isinstance(value, int):
        return Literal(str(value), XSD_INTEGER)
    if isinstance(value, float):
        return Literal(decimal_lexical(value), XSD_DECIMAL)
    return Literal(str(value), XSD_STRING)


def decimal_lexical(value: float) -> str:
    from decimal import Decimal

    if value != value or value in (float("inf"), float("-inf")):
        raise InvalidTerm(f"not a finite decimal: {value!r}")
    text = format(Decimal(repr(float(value))), "f")
    if "." not in text:
        text += ".0"
    return text


def term_key(term: Term) -> str:
    """Canonical N-Triples-like rendering, used for ordering and interning."""
    if isinstance(term, IRI):
        return term.n3()
    if isinstance(term, BNode):
        return term.n3()
    lex = escape_string(term.lexical)
    if term.language:
        return f'"{lex}"@{term.language}'
    if term.datatype == XSD_STRING:
        return f'"{lex}"'
    return f'"{lex}"^^<{term.datatype}>'


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


@dataclass(frozen=True)
class Triple:
    subject: Union[IRI, BNode]
    predicate: IRI
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (IRI, BNode)):
            raise InvalidTerm(f"subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise InvalidTerm(f"predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (IRI, BNode, Literal)):
            raise InvalidTerm(f"object must be an RDF term, got {self.object!r}")

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def sort_key(self):
        return (term_key(self.subject), term_key(self.predicate), term_key(self.object))


class Namespace(str):
    """String subclass where attribute / item access mints IRIs under the namespace."""

    def __new__(cls, value: str):
        if not is_valid_iri(value):
            raise InvalidIri(f"invalid namespace IRI: {value!r}")
        return super().__new__(cls, value)

    def term(self, local: str) -> IRI:
        return IRI(str(self) + local)

    def __getattr__(self, local: str) -> IRI:
        if local.startswith("__"):
            raise AttributeError(local)
        return self.term(local)

    def __getitem__(self, local):  # type: ignore[override]
        if isinstance(local, str):
            return self.term(local)
        return str.__getitem__(self, local)


RDF = Namespace(RDF_NS)
RDFS = Namespace(RDFS_NS)
OWL = Namespace(OWL_NS)
XSDNS = Namespace(XSD)
PROV = Namespace("http://www.w3.org/ns/prov#")

RDF_TYPE = RDF.type
RDFS_LABEL = RDFS.label
