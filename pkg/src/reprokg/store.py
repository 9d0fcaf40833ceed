"""Indexed in-memory triple store with basic-graph-pattern evaluation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .errors import MalformedQuery
from .rdf.graph import STANDARD_PREFIXES, Graph
from .rdf.terms import IRI, BNode, Literal, Term, Triple, term_key

_VARNAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VARNAME.match(self.name):
            raise MalformedQuery(f"invalid variable name: {self.name!r}")

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Term, Variable]
Binding = dict  # variable name -> Term


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    @property
    def variables(self) -> set[str]:
        return {t.name for t in self if isinstance(t, Variable)}

    def substitute(self, binding: Binding) -> "TriplePattern":
        def sub(x):
            if isinstance(x, Variable) and x.name in binding:
                return binding[x.name]
            return x

        return TriplePattern(sub(self.subject), sub(self.predicate), sub(self.object))


def var(name: str) -> Variable:
    return Variable(name.lstrip("?$"))


class Store:
    """Triples interned to integer ids and indexed three ways (SPO, POS, OSP).

    Readers may share a store; writers need exclusive access, which callers enforce.
    """

    def __init__(self, graphs: Iterable[Graph] = ()):
        self._ids: dict[Term, int] = {}
        self._terms: list[Term] = []
        self._spo: dict[int, dict[int, set[int]]] = {}
        self._pos: dict[int, dict[int, set[int]]] = {}
        self._osp: dict[int, dict[int, set[int]]] = {}
        self._size = 0
        self.prefixes: dict[str, str] = dict(STANDARD_PREFIXES)
        for g in graphs:
            self.load(g)

    # interning

    def _intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._ids[term] = tid
            self._terms.append(term)
        return tid

    def term_id(self, term: Term) -> Optional[int]:
        return self._ids.get(term)

    def term(self, tid: int) -> Term:
        return self._terms[tid]

    # mutation

    def add(self, triple: Triple) -> int:
        s, p, o = (self._intern(x) for x in triple)
        objs = self._spo.setdefault(s, {}).setdefault(p, set())
        if o in objs:
            return 0
        objs.add(o)
        self._pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._osp.setdefault(o, {}).setdefault(s, set()).add(p)
        self._size += 1
        return 1

    def load(self, graph: Graph) -> int:
        """Add every triple of graph; return the number that were new."""
        for label, ns in getattr(graph, "prefixes", {}).items():
            self.prefixes.setdefault(label, ns)
        return sum(self.add(t) for t in graph)

    def __len__(self) -> int:
        return self._size

    def __contains__(self, triple: Triple) -> bool:
        ids = [self._ids.get(x) for x in triple]
        if None in ids:
            return False
        s, p, o = ids
        return o in self._spo.get(s, {}).get(p, ())

    def __iter__(self) -> Iterator[Triple]:
        return self.iter_index("spo")

    def iter_index(self, order: str) -> Iterator[Triple]:
        """Enumerate all triples through one of the three indexes."""
        t = self._terms
        if order == "spo":
            for s, po in self._spo.items():
                for p, os_ in po.items():
                    for o in os_:
                        yield Triple(t[s], t[p], t[o])
        elif order == "pos":
            for p, os_ in self._pos.items():
                for o, ss in os_.items():
                    for s in ss:
                        yield Triple(t[s], t[p], t[o])
        elif order == "osp":
            for o, sp in self._osp.items():
                for s, ps in sp.items():
                    for p in ps:
                        yield Triple(t[s], t[p], t[o])
        else:
            raise ValueError(f"unknown index order {order!r}")

    def index_sizes(self) -> tuple[int, int, int]:
        def count(idx):
            return sum(len(c) for inner in idx.values() for c in inner.values())

        return count(self._spo), count(self._pos), count(self._osp)

    def to_graph(self) -> Graph:
        return Graph(self, prefixes=self.prefixes)

    # matching

    def _ids_for(self, pattern: TriplePattern):
        """Interned ids for ground positions; None for variables; False if a ground term is unknown."""
        out = []
        for x in pattern:
            if isinstance(x, Variable):
                out.append(None)
            else:
                tid = self._ids.get(x)
                if tid is None:
                    return False
                out.append(tid)
        return out

    def _match_ids(self, s, p, o) -> Iterator[tuple[int, int, int]]:
        if s is not None:
            po = self._spo.get(s, {})
            if p is not None:
                objs = po.get(p, ())
                if o is not None:
                    if o in objs:
                        yield s, p, o
                else:
                    for oo in objs:
                        yield s, p, oo
            elif o is not None:
                for pp in self._osp.get(o, {}).get(s, ()):
                    yield s, pp, o
            else:
                for pp, objs in po.items():
                    for oo in objs:
                        yield s, pp, oo
        elif p is not None:
            os_ = self._pos.get(p, {})
            if o is not None:
                for ss in os_.get(o, ()):
                    yield ss, p, o
            else:
                for oo, ss_ in os_.items():
                    for ss in ss_:
                        yield ss, p, oo
        elif o is not None:
            for ss, ps in self._osp.get(o, {}).items():
                for pp in ps:
                    yield ss, pp, o
        else:
            for ss, po in self._spo.items():
                for pp, objs in po.items():
                    for oo in objs:
                        yield ss, pp, oo

    def triples(self, s=None, p=None, o=None) -> Iterator[Triple]:
        """Triples matching the given ground positions (None = wildcard)."""
        ids = []
        for x in (s, p, o):
            if x is None:
                ids.append(None)
            else:
                tid = self._ids.get(x)
                if tid is None:
                    return
                ids.append(tid)
        t = self._terms
        for a, b, c in self._match_ids(*ids):
            yield Triple(t[a], t[b], t[c])

    def objects(self, s, p) -> list[Term]:
        return [t.object for t in self.triples(s, p, None)]

    def subjects(self, p, o) -> list[Term]:
        return [t.subject for t in self.triples(None, p, o)]

    def value(self, s, p) -> Optional[Term]:
        objs = sorted(self.objects(s, p), key=term_key)
        return objs[0] if objs else None

    def instances(self, cls: IRI) -> list[Term]:
        from .rdf.terms import RDF_TYPE

        return sorted(set(self.subjects(RDF_TYPE, cls)), key=term_key)

    def match(self, pattern: TriplePattern) -> list[Binding]:
        """One binding per matching triple; a ground pattern yields [{}] or []."""
        ids = self._ids_for(pattern)
        if ids is False:
            return []
        t = self._terms
        out = []
        for triple_ids in self._match_ids(*ids):
            binding: Binding = {}
            ok = True
            for pos, tid in zip(pattern, triple_ids):
                if isinstance(pos, Variable):
                    term = t[tid]
                    prev = binding.get(pos.name)
                    if prev is not None and prev != term:
                        ok = False
                        break
                    binding[pos.name] = term
            if ok:
                out.append(binding)
        return out

    def estimate(self, pattern: TriplePattern) -> int:
        """Upper bound on the number of matches, read from index cardinalities."""
        ids = self._ids_for(pattern)
        if ids is False:
            return 0
        s, p, o = ids
        if s is not None and p is not None:
            return len(self._spo.get(s, {}).get(p, ())) if o is None else 1
        if p is not None and o is not None:
            return len(self._pos.get(p, {}).get(o, ()))
        if s is not None and o is not None:
            return len(self._osp.get(o, {}).get(s, ()))
        if s is not None:
            return sum(len(x) for x in self._spo.get(s, {}).values())
        if p is not None:
            return sum(len(x) for x in self._pos.get(p, {}).values())
        if o is not None:
            return sum(len(x) for x in self._osp.get(o, {}).values())
        return self._size

    def select(self, query) -> list[Binding]:
        from .query import evaluate

        return evaluate(self, query)

    def query(self, text: str) -> list[Binding]:
        from .query import evaluate, parse_query

        return evaluate(self, parse_query(text, self.prefixes))


def load(store: Store, graph: Graph) -> int:
    return store.load(graph)


def match(store: Store, pattern: TriplePattern) -> list[Binding]:
    return store.match(pattern)


def is_ground(x) -> bool:
    return isinstance(x, (IRI, BNode, Literal))


__all__ = ["Binding", "Store", "TriplePattern", "Variable", "load", "match", "var"]
