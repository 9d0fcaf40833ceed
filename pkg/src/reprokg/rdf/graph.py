"""Set-semantics RDF graph with a prefix map."""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Optional

from ..errors import InvalidIri, UnknownPrefix
from .terms import IRI, BNode, Literal, Term, Triple, is_valid_iri

_PREFIX_LABEL = re.compile(r"^([A-Za-z][A-Za-z0-9_\-]*)?$")
# local parts the serializer may emit unescaped as a prefixed name
_LOCAL_PART = re.compile(r"^([A-Za-z0-9_]([A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?$")

STANDARD_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "prov": "http://www.w3.org/ns/prov#",
}


class Graph:
    """A set of triples plus a prefix map used for expansion and serialization."""

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[Mapping[str, str]] = None):
        self._triples: set[Triple] = set()
        self.prefixes: dict[str, str] = {}
        for label, ns in (prefixes or {}).items():
            self.bind(label, ns)
        for t in triples:
            self.add(t)

    def bind(self, label: str, namespace: str) -> None:
        if not _PREFIX_LABEL.match(label):
            raise ValueError(f"invalid prefix label: {label!r}")
        if not is_valid_iri(namespace):
            raise InvalidIri(f"invalid namespace IRI for prefix {label!r}: {namespace!r}")
        self.prefixes[label] = namespace

    def add(self, triple: Triple) -> int:
        """Insert a triple; return 1 if it was new, 0 if already present."""
        if not isinstance(triple, Triple):
            triple = Triple(*triple)
        if triple in self._triples:
            return 0
        self._triples.add(triple)
        return 1

    insert = add

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(self.add(t) for t in triples)

    def discard(self, triple: Triple) -> None:
        self._triples.discard(triple)

    def __contains__(self, triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<Graph {len(self)} triples, {len(self.prefixes)} prefixes>"

    @property
    def triples(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def sorted_triples(self) -> list[Triple]:
        return sorted(self._triples, key=Triple.sort_key)

    def copy(self) -> "Graph":
        g = Graph(prefixes=self.prefixes)
        g._triples = set(self._triples)
        return g

    def __or__(self, other: "Graph") -> "Graph":
        g = self.copy()
        for label, ns in other.prefixes.items():
            g.prefixes.setdefault(label, ns)
        g._triples |= other._triples
        return g

    def triples_matching(self, s=None, p=None, o=None) -> Iterator[Triple]:
        for t in self._triples:
            if (s is None or t.subject == s) and (p is None or t.predicate == p) and (o is None or t.object == o):
                yield t

    def objects(self, s, p) -> list[Term]:
        return [t.object for t in self.triples_matching(s, p)]

    def subjects(self, p, o) -> list[Term]:
        return [t.subject for t in self.triples_matching(None, p, o)]

    def value(self, s, p) -> Optional[Term]:
        """The single object of (s, p), or None; sorted choice if several exist."""
        objs = sorted(self.objects(s, p), key=lambda t: (type(t).__name__, str(t)))
        return objs[0] if objs else None

    def blank_nodes(self) -> set[BNode]:
        out = set()
        for t in self._triples:
            if isinstance(t.subject, BNode):
                out.add(t.subject)
            if isinstance(t.object, BNode):
                out.add(t.object)
        return out

    def relabel_blanks(self, prefix: str) -> "Graph":
        """Copy with every blank label prefixed, so graphs can be merged without clashes."""

        def fix(term):
            return BNode(prefix + term.label) if isinstance(term, BNode) else term

        g = Graph(prefixes=self.prefixes)
        g._triples = {Triple(fix(t.subject), t.predicate, fix(t.object)) for t in self._triples}
        return g

    # prefixed names

    def expand(self, prefixed_name: str) -> str:
        return expand(self.prefixes, prefixed_name)

    def shrink(self, iri: str) -> Optional[str]:
        return shrink(self.prefixes, iri)


def expand(prefixes: Mapping[str, str], prefixed_name: str) -> str:
    label, sep, local = prefixed_name.partition(":")
    if not sep:
        raise ValueError(f"not a prefixed name: {prefixed_name!r}")
    if label not in prefixes:
        raise UnknownPrefix(label)
    return prefixes[label] + local


def shrink(prefixes: Mapping[str, str], iri: str) -> Optional[str]:
    """Shortest-local-part prefixed name for iri, or None when no namespace applies."""
    best = None
    for label in sorted(prefixes):
        ns = prefixes[label]
        if iri.startswith(ns):
            local = iri[len(ns):]
            if _LOCAL_PART.match(local) and (best is None or len(local) < len(best[1])):
                best = (label, local)
    if best is None:
        return None
    return f"{best[0]}:{best[1]}"

