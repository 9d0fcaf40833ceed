"""Knowledge-graph annotation, validation and evaluation of energy-system test artifacts."""

from .rdf import IRI, BNode, Graph, Literal, Triple, isomorphic, literal, make_iri
from .store import Store
from .turtle import parse_turtle, serialize_turtle

__version__ = "0.1.0"

__all__ = [
    "BNode", "Graph", "IRI", "Literal", "Store", "Triple", "__version__", "isomorphic", "literal", "make_iri",
    "parse_turtle", "serialize_turtle",
]
