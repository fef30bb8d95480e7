"""RDF substrate: terms, graphs, Turtle I/O, prefix handling."""
from .graph import Graph, isomorphic, match
from .terms import (
    DASH_NS,
    OWL_NS,
    RDF_FIRST,
    RDF_LANGSTRING,
    RDF_NIL,
    RDF_NS,
    RDF_REST,
    RDF_TYPE,
    RDFS_NS,
    SH_NS,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_NS,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    Term,
    TermError,
    Triple,
    UnknownPrefixError,
    expand_curie,
)
from .turtle import TurtleSyntaxError, parse_turtle, serialize_turtle

__all__ = [
    "BlankNode", "Graph", "Iri", "Literal", "PrefixMap", "Term", "TermError",
    "Triple", "TurtleSyntaxError", "UnknownPrefixError", "expand_curie",
    "isomorphic", "match", "parse_turtle", "serialize_turtle",
    "RDF_NS", "RDFS_NS", "XSD_NS", "SH_NS", "DASH_NS", "OWL_NS",
    "RDF_TYPE", "RDF_FIRST", "RDF_REST", "RDF_NIL", "RDF_LANGSTRING",
    "XSD_STRING", "XSD_BOOLEAN", "XSD_INTEGER", "XSD_DECIMAL", "XSD_DOUBLE",
]
