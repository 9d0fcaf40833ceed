import random

import pytest

from conftest import EX, random_graph
from oracles import brute_isomorphic
from reprokg import errors
from reprokg.rdf import BNode, Graph, IRI, Triple, isomorphic

P = IRI(EX + "p")
O = IRI(EX + "o")


def g(*triples):
    return Graph([Triple(*t) for t in triples])


def test_identical_ground_graphs():
    assert isomorphic(g((IRI(EX + "s"), P, O)), g((IRI(EX + "s"), P, O)))


def test_relabeling():
    assert isomorphic(g((BNode("a"), P, O)), g((BNode("b"), P, O)))


def test_self_loop_is_not_a_two_node_edge():
    a = g((BNode("a"), P, BNode("a")))
    b = g((BNode("a"), P, BNode("b")))
    assert not isomorphic(a, b)
    assert not brute_isomorphic(a, b)


def test_bound_is_enforced():
    big = g(*[(BNode(f"x{i}"), P, O) for i in range(9)])
    with pytest.raises(errors.TooManyBlankNodes):
        isomorphic(big, big)


def _shuffle_labels(rng, graph):
    blanks = sorted(graph.blank_nodes(), key=lambda b: b.label)
    labels = [f"r{i}" for i in range(len(blanks))]
    rng.shuffle(labels)
    m = {b: BNode(lab) for b, lab in zip(blanks, labels)}
    f = lambda x: m.get(x, x)  # noqa: E731
    return Graph([Triple(f(t.subject), t.predicate, f(t.object)) for t in graph])


def _perturb(rng, graph):
    triples = list(graph)
    if triples and rng.random() < 0.5:
        triples.pop(rng.randrange(len(triples)))
    else:
        triples.append(Triple(BNode("b0"), P, BNode("b1")))
    return Graph(triples)


def test_agrees_with_brute_force_oracle():
    rng = random.Random(7)
    for _ in range(300):
        a = random_graph(rng, max_triples=10, max_blanks=5)
        b = _shuffle_labels(rng, a) if rng.random() < 0.5 else _perturb(rng, _shuffle_labels(rng, a))
        assert isomorphic(a, b) == brute_isomorphic(a, b)


def test_equivalence_relation():
    rng = random.Random(11)
    for _ in range(100):
        a = random_graph(rng, max_triples=10, max_blanks=5)
        b = _shuffle_labels(rng, a)
        c = _shuffle_labels(rng, b)
        assert isomorphic(a, a)
        assert isomorphic(a, b) and isomorphic(b, a)
        assert isomorphic(a, c)
        d = _perturb(rng, a)
        assert isomorphic(a, d) == isomorphic(d, a)
