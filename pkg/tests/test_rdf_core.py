import random

import pytest

from conftest import EX, random_graph
from reprokg import errors
from reprokg.rdf import BNode, Graph, IRI, Literal, Triple, expand, shrink
from reprokg.rdf.terms import RDF_LANGSTRING, XSD_INTEGER, XSD_STRING


def test_iri_requires_scheme_and_no_whitespace():
    assert IRI("http://example.org/a").value == "http://example.org/a"
    for bad in ["", "relative/path", "http://exa mple.org", "http://x/<y>", "http://x/\n"]:
        with pytest.raises(errors.InvalidIri):
            IRI(bad)


def test_literal_defaults_and_language():
    assert Literal("x").datatype == XSD_STRING
    lit = Literal("hi", language="EN-gb")
    assert lit.datatype == RDF_LANGSTRING and lit.language == "en-gb"
    with pytest.raises(errors.InvalidTerm):
        Literal("hi", XSD_INTEGER, "en")
    with pytest.raises(errors.InvalidTerm):
        Literal("hi", RDF_LANGSTRING)


def test_literals_compare_lexically_not_by_value():
    assert Literal("1", XSD_INTEGER) != Literal("01", XSD_INTEGER)
    assert Literal("1", XSD_INTEGER) != Literal("1")


def test_blank_label_validation():
    with pytest.raises(errors.InvalidTerm):
        BNode("has space")


def test_insert_is_idempotent():
    rng = random.Random(1)
    for _ in range(50):
        g = random_graph(rng)
        t = Triple(IRI(EX + "s"), IRI(EX + "p"), Literal("o"))
        assert g.add(t) == 1
        size = len(g)
        assert g.add(t) == 0
        assert len(g) == size


def test_triple_subject_and_predicate_positions():
    with pytest.raises(errors.InputError):
        Triple(Literal("x"), IRI(EX + "p"), IRI(EX + "o"))
    with pytest.raises(errors.InputError):
        Triple(IRI(EX + "s"), BNode("p"), IRI(EX + "o"))


def test_expand_shrink_identity():
    prefixes = {"ex": EX, "scm": "http://example.org/cpes-repro/ns/scm#"}
    for iri in [EX + "thing", EX + "a_b-c", "http://example.org/cpes-repro/ns/scm#System"]:
        name = shrink(prefixes, iri)
        assert name is not None
        assert expand(prefixes, name) == iri


def test_expand_unknown_prefix():
    with pytest.raises(errors.UnknownPrefix):
        expand({}, "nope:x")


def test_graph_equality_and_union():
    a = Graph([Triple(IRI(EX + "s"), IRI(EX + "p"), Literal("1"))])
    b = Graph([Triple(IRI(EX + "s"), IRI(EX + "p"), Literal("2"))])
    u = a | b
    assert len(u) == 2
    assert a == a.copy()
    assert a != b
