"""RDF term model: IRIs, blank nodes, literals, triples, prefix maps.

Terms compare by term equality (all fields equal), never by value: the
literals "2.0"^^xsd:decimal and "2"^^xsd:decimal are distinct terms.
Value comparison lives in the query layer.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
SH_NS = "http://www.w3.org/ns/shacl#"
DASH_NS = "http://datashapes.org/dash#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

RDF_TYPE = RDF_NS + "type"
RDF_FIRST = RDF_NS + "first"
RDF_REST = RDF_NS + "rest"
RDF_NIL = RDF_NS + "nil"
RDF_LANGSTRING = RDF_NS + "langString"
XSD_STRING = XSD_NS + "string"
XSD_BOOLEAN = XSD_NS + "boolean"
XSD_INTEGER = XSD_NS + "integer"
XSD_DECIMAL = XSD_NS + "decimal"
XSD_DOUBLE = XSD_NS + "double"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


class TermError(ValueError):
    """Raised when a term or triple violates the RDF data model."""


class Term:
    """Base class for RDF terms; concrete terms are Iri, BlankNode, Literal."""

    __slots__ = ()

    def sort_key(self) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class Iri(Term):
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME_RE.match(self.value):
            raise TermError(f"IRI is not absolute (missing scheme): {self.value!r}")

    def local_name(self) -> str:
        """Substring after the last '#', '/' or ':', the common display fallback."""
        for sep in ("#", "/"):
            if sep in self.value:
                return self.value.rsplit(sep, 1)[1]
        return self.value.rsplit(":", 1)[1]

    def sort_key(self) -> tuple:
        return (0, self.value)

    def __repr__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class BlankNode(Term):
    local_id: str

    def sort_key(self) -> tuple:
        return (1, self.local_id)

    def __repr__(self) -> str:
        return f"_:{self.local_id}"


@dataclass(frozen=True, slots=True)
class Literal(Term):
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if self.language is not None and self.datatype != RDF_LANGSTRING:
            # Language-tagged literals always carry rdf:langString.
            object.__setattr__(self, "datatype", RDF_LANGSTRING)
        if self.language is None and self.datatype == RDF_LANGSTRING:
            raise TermError("rdf:langString literal requires a language tag")

    def sort_key(self) -> tuple:
        return (2, self.lexical, self.datatype, self.language or "")

    def __repr__(self) -> str:
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype}>'


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise TermError(f"triple subject must not be a literal: {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TermError(f"triple predicate must be an IRI: {self.predicate!r}")

    def sort_key(self) -> tuple:
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())

    def __iter__(self) -> Iterator[Term]:
        return iter((self.subject, self.predicate, self.object))


class UnknownPrefixError(KeyError):
    def __init__(self, prefix: str):
        super().__init__(prefix)
        self.prefix = prefix

    def __str__(self) -> str:
        return f"unknown prefix: {self.prefix!r}"


@dataclass
class PrefixMap:
    """prefix -> namespace IRI bindings, with CURIE expansion/compression."""

    bindings: dict[str, str] = field(default_factory=dict)

    def bind(self, prefix: str, namespace: str) -> None:
        self.bindings[prefix] = namespace

    def expand(self, curie: str) -> Iri:
        prefix, _, local = curie.partition(":")
        if prefix not in self.bindings:
            raise UnknownPrefixError(prefix)
        return Iri(self.bindings[prefix] + local)

    def compress(self, iri: str) -> Optional[str]:
        """Longest-namespace CURIE for an IRI, or None if nothing matches."""
        best: Optional[tuple[str, str]] = None
        for prefix, ns in self.bindings.items():
            if iri.startswith(ns) and (best is None or len(ns) > len(self.bindings[best[0]])):
                best = (prefix, iri[len(ns):])
        return f"{best[0]}:{best[1]}" if best else None

    def copy(self) -> "PrefixMap":
        return PrefixMap(dict(self.bindings))

    def __contains__(self, prefix: str) -> bool:
        return prefix in self.bindings

    def __len__(self) -> int:
        return len(self.bindings)


def expand_curie(curie: str, prefixes: PrefixMap) -> Iri:
    """Expand a prefixed name against a prefix map (raises UnknownPrefixError)."""
    return prefixes.expand(curie)
