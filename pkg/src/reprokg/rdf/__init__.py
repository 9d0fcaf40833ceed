"""RDF atoms: terms, triples, graphs, namespaces and isomorphism."""

from .graph import STANDARD_PREFIXES, Graph, expand, shrink
from .isomorphism import MAX_BLANK_NODES, find_bijection, isomorphic
from .terms import (
    IRI,
    OWL,
    PROV,
    RDF,
    RDF_TYPE,
    RDFS,
    RDFS_LABEL,
    XSD,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    XSDNS,
    BNode,
    Literal,
    Namespace,
    Term,
    Triple,
    is_valid_iri,
    literal,
    make_iri,
    term_key,
)

__all__ = [
    "BNode", "Graph", "IRI", "Literal", "MAX_BLANK_NODES", "Namespace", "OWL", "PROV", "RDF",
    "RDFS", "RDFS_LABEL", "RDF_TYPE", "STANDARD_PREFIXES", "Term", "Triple", "XSD", "XSDNS",
    "XSD_BOOLEAN", "XSD_DATETIME", "XSD_DECIMAL", "XSD_DOUBLE", "XSD_INTEGER", "XSD_STRING",
    "expand", "find_bijection", "is_valid_iri", "isomorphic", "literal", "make_iri", "shrink",
    "term_key",
]
