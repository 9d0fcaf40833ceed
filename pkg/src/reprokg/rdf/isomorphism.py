"""Exact blank-node isomorphism for small graphs."""

from __future__ import annotations

from collections import Counter

from ..errors import TooManyBlankNodes
from .graph import Graph
from .terms import BNode, Triple, term_key

MAX_BLANK_NODES = 8


def _signature(blank: BNode, triples) -> tuple:
    # blank-invariant description of how a node is used; equal under any relabeling
    sig = Counter()
    for t in triples:
        s_b = isinstance(t.subject, BNode)
        o_b = isinstance(t.object, BNode)
        if t.subject == blank:
            other = "*self" if t.object == blank else ("*" if o_b else term_key(t.object))
            sig[("out", term_key(t.predicate), other)] += 1
        if t.object == blank and t.subject != blank:
            other = "*" if s_b else term_key(t.subject)
            sig[("in", term_key(t.predicate), other)] += 1
    return tuple(sorted(sig.items()))


def find_bijection(a: Graph, b: Graph):
    """Return a blank-node mapping a→b that makes the triple sets equal, or None."""
    ba, bb = a.blank_nodes(), b.blank_nodes()
    if len(ba) > MAX_BLANK_NODES or len(bb) > MAX_BLANK_NODES:
        raise TooManyBlankNodes(
            f"isomorphism check limited to {MAX_BLANK_NODES} blank nodes per graph "
            f"(got {len(ba)} and {len(bb)})"
        )
    if len(a) != len(b) or len(ba) != len(bb):
        return None

    ground_a = {t for t in a if not isinstance(t.subject, BNode) and not isinstance(t.object, BNode)}
    ground_b = {t for t in b if not isinstance(t.subject, BNode) and not isinstance(t.object, BNode)}
    if ground_a != ground_b:
        return None
    blank_a = [t for t in a if t not in ground_a]
    blank_b = set(t for t in b if t not in ground_b)

    sig_b: dict[tuple, list[BNode]] = {}
    for n in bb:
        sig_b.setdefault(_signature(n, blank_b), []).append(n)
    order = sorted(ba, key=lambda n: n.label)
    candidates = {}
    for n in order:
        cands = sig_b.get(_signature(n, blank_a))
        if not cands:
            return None
        candidates[n] = sorted(cands, key=lambda x: x.label)
    # most constrained first
    order.sort(key=lambda n: (len(candidates[n]), n.label))

    def image(t: Triple, mapping):
        s = mapping.get(t.subject) if isinstance(t.subject, BNode) else t.subject
        o = mapping.get(t.object) if isinstance(t.object, BNode) else t.object
        if s is None or o is None:
            return None
        return Triple(s, t.predicate, o)

    by_node: dict[BNode, list[Triple]] = {n: [] for n in order}
    for t in blank_a:
        for x in (t.subject, t.object):
            if isinstance(x, BNode):
                by_node[x].append(t)

    mapping: dict[BNode, BNode] = {}
    used: set[BNode] = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return {image(t, mapping) for t in blank_a} == blank_b
        n = order[i]
        for c in candidates[n]:
            if c in used:
                continue
            mapping[n] = c
            used.add(c)
            ok = True
            for t in by_node[n]:
                img = image(t, mapping)
                if img is not None and img not in blank_b:
                    ok = False
                    break
            if ok and extend(i + 1):
                return True
            del mapping[n]
            used.discard(c)
        return False

    return dict(mapping) if extend(0) else None


def isomorphic(a: Graph, b: Graph) -> bool:
    """True iff some blank-node bijection makes the two triple sets equal."""
    return find_bijection(a, b) is not None
