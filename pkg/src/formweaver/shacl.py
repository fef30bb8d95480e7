"""Typed SHACL shape model parsed from a shapes graph.

Supported constraint vocabulary: sh:targetClass, sh:property, sh:path
(single predicate), sh:class, sh:datatype, sh:nodeKind, sh:minCount,
sh:maxCount, sh:qualifiedValueShape with qualified counts, sh:node, sh:or,
sh:in, sh:name, sh:description, sh:order, sh:group, sh:rule with
sh:SPARQLRule/sh:construct, dash:editor. Unknown components are collected
as warnings, never errors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from .rdf import (
    DASH_NS,
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    RDFS_NS,
    SH_NS,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
)
from .sparql import parse_sparql
from .sparql.parser import SparqlSyntaxError, UnsupportedFeatureError

SH = {name: Iri(SH_NS + name) for name in (
    "NodeShape", "PropertyShape", "PropertyGroup", "SPARQLRule",
    "targetClass", "property", "path", "class", "datatype", "nodeKind",
    "minCount", "maxCount", "qualifiedValueShape", "qualifiedMinCount",
    "qualifiedMaxCount", "node", "or", "in", "name", "description",
    "order", "group", "rule", "construct", "IRI", "Literal", "BlankNode",
)}
DASH_EDITOR = Iri(DASH_NS + "editor")
DASH_DETAILS = Iri(DASH_NS + "DetailsEditor")
DASH_INSTANCES_SELECT = Iri(DASH_NS + "InstancesSelectEditor")
RDFS_LABEL = Iri(RDFS_NS + "label")

_KNOWN_NODE_PREDICATES = {
    SH["targetClass"], SH["property"], SH["or"], SH["rule"], SH["class"],
    SH["name"], SH["description"], SH["nodeKind"], Iri(RDF_TYPE), RDFS_LABEL,
}
_KNOWN_PROPERTY_PREDICATES = {
    SH["path"], SH["class"], SH["datatype"], SH["nodeKind"], SH["minCount"],
    SH["maxCount"], SH["qualifiedValueShape"], SH["qualifiedMinCount"],
    SH["qualifiedMaxCount"], SH["node"], SH["in"], SH["name"],
    SH["description"], SH["order"], SH["group"], DASH_EDITOR, Iri(RDF_TYPE),
}


class ShapeResolutionError(Exception):
    """A shape reference cannot be resolved or a shape is malformed."""


class MalformedListError(Exception):
    """An RDF collection (sh:or, sh:in) does not terminate in rdf:nil."""


@dataclass
class SparqlRule:
    construct_text: str
    owning_shape: Term


@dataclass
class PropertyGroup:
    iri: Iri
    label: str
    order: Decimal


@dataclass
class QualifiedShape:
    shape: "NodeShape"
    q_min: Optional[int] = None
    q_max: Optional[int] = None


@dataclass
class PropertyShape:
    ident: Term                          # IRI or anonymous blank node
    path: Iri
    editor: Optional[str] = None         # "DetailsEditor" | "InstancesSelectEditor"
    value_class: Optional[Iri] = None
    datatype: Optional[Iri] = None
    node_kind: Optional[Iri] = None
    min_count: Optional[int] = None
    max_count: Optional[int] = None
    qualified: Optional[QualifiedShape] = None
    in_values: Optional[list[Term]] = None
    name: Optional[str] = None
    description: Optional[str] = None
    order: Optional[Decimal] = None
    group: Optional[Iri] = None
    embedded_node: Optional["NodeShape"] = None

    def effective_min(self) -> int:
        if self.qualified is not None and self.qualified.q_min is not None:
            return self.qualified.q_min
        return self.min_count or 0

    def effective_max(self) -> Optional[int]:
        if self.qualified is not None and self.qualified.q_max is not None:
            return self.qualified.q_max
        return self.max_count

    def nested_shape(self) -> Optional["NodeShape"]:
        """Shape governing the value nodes: sh:node or the qualified shape."""
        if self.embedded_node is not None:
            return self.embedded_node
        if self.qualified is not None:
            return self.qualified.shape
        return None

    def field_id(self) -> str:
        """Stable submission key: the qualified value class when the path is
        shared (the shapes reuse prov:wasDerivedFrom), otherwise the path."""
        if self.qualified is not None and self.qualified.shape.node_class is not None:
            return self.qualified.shape.node_class.value
        return self.path.value


@dataclass
class NodeShape:
    ident: Term
    target_class: Optional[Iri] = None
    node_class: Optional[Iri] = None     # sh:class asserted on the node shape
    property_shapes: list[PropertyShape] = field(default_factory=list)
    variants: Optional[list["NodeShape"]] = None
    rules: list[SparqlRule] = field(default_factory=list)
    label: Optional[str] = None

    def display_label(self) -> str:
        if self.label:
            return self.label
        if self.target_class is not None:
            return self.target_class.local_name()
        if isinstance(self.ident, Iri):
            return self.ident.local_name()
        return self.ident.local_id


@dataclass
class ShapesDocument:
    shapes: dict[Term, NodeShape] = field(default_factory=dict)
    groups: dict[Iri, PropertyGroup] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def root_shapes(self) -> list[NodeShape]:
        roots = [s for s in self.shapes.values() if s.target_class is not None]
        return sorted(roots, key=lambda s: s.display_label())

    def shape_for_target(self, cls: Iri) -> Optional[NodeShape]:
        for shape in self.shapes.values():
            if shape.target_class == cls:
                return shape
        return None

    def all_rules(self) -> list[SparqlRule]:
        return [r for s in self.shapes.values() for r in s.rules]

    def model_signature(self) -> list:
        """Structural fingerprint, stable under blank-node renaming."""
        return sorted(_shape_signature(s) for s in self.shapes.values()
                      if isinstance(s.ident, Iri) or s.target_class)


def _shape_signature(shape: NodeShape) -> str:
    parts = [
        f"target={shape.target_class}" if shape.target_class else "",
        f"class={shape.node_class}" if shape.node_class else "",
        f"label={shape.label or ''}",
        "props=" + "|".join(sorted(_ps_signature(p) for p in shape.property_shapes)),
        "variants=" + ",".join(sorted(_shape_signature(v) for v in (shape.variants or []))),
        "rules=" + str(len(shape.rules)),
    ]
    return ";".join(parts)


def _ps_signature(ps: PropertyShape) -> str:
    nested = ps.nested_shape()
    return ";".join([
        str(ps.path), str(ps.editor), str(ps.value_class), str(ps.datatype),
        str(ps.node_kind), str(ps.min_count), str(ps.max_count),
        str(ps.qualified.q_min) if ps.qualified else "-",
        str(ps.qualified.q_max) if ps.qualified else "-",
        str(sorted(map(repr, ps.in_values))) if ps.in_values else "-",
        str(ps.name), str(ps.order), str(ps.group),
        _shape_signature(nested) if nested else "-",
    ])


# --- parsing ----------------------------------------------------------------

def _rdf_list(graph: Graph, head: Term) -> list[Term]:
    items: list[Term] = []
    seen: set[Term] = set()
    node = head
    while node != Iri(RDF_NIL):
        if node in seen:
            raise MalformedListError(f"cyclic RDF list at {node!r}")
        seen.add(node)
        first = graph.object(node, Iri(RDF_FIRST))
        rest = graph.object(node, Iri(RDF_REST))
        if first is None or rest is None:
            raise MalformedListError(f"broken RDF list at {node!r}")
        items.append(first)
        node = rest
    return items


def _string_of(term: Optional[Term]) -> Optional[str]:
    return term.lexical if isinstance(term, Literal) else None


def _int_of(term: Optional[Term]) -> Optional[int]:
    return int(term.lexical) if isinstance(term, Literal) else None


class _ShapesParser:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.doc = ShapesDocument()

    def parse(self) -> ShapesDocument:
        seeds = {t.subject for t in self.graph.match(None, Iri(RDF_TYPE), SH["NodeShape"])}
        seeds |= {t.subject for t in self.graph.match(None, SH["targetClass"], None)}
        for subject in sorted(seeds, key=lambda t: t.sort_key()):
            self.node_shape(subject)
        self.collect_groups()
        return self.doc

    def node_shape(self, ident: Term) -> NodeShape:
        # A shape already in the registry may still be mid-parse (reference
        # cycles via sh:node); the shared mutable object is completed in place.
        if ident in self.doc.shapes:
            return self.doc.shapes[ident]
        if isinstance(ident, Literal):
            raise ShapeResolutionError(f"literal used as shape reference: {ident!r}")
        if not self.graph.match(ident, None, None):
            raise ShapeResolutionError(f"dangling shape reference: {ident!r}")

        shape = NodeShape(ident=ident)
        self.doc.shapes[ident] = shape
        g = self.graph

        tc = g.object(ident, SH["targetClass"])
        shape.target_class = tc if isinstance(tc, Iri) else None
        nc = g.object(ident, SH["class"])
        shape.node_class = nc if isinstance(nc, Iri) else None
        shape.label = (_string_of(g.object(ident, RDFS_LABEL))
                       or _string_of(g.object(ident, SH["name"])))

        for t in g.match(ident, SH["property"], None):
            shape.property_shapes.append(self.property_shape(t.object, shape))
        shape.property_shapes.sort(
            key=lambda p: (p.order is None, p.order if p.order is not None else Decimal(0),
                           p.path.value, p.field_id()))

        or_head = g.object(ident, SH["or"])
        if or_head is not None:
            members = _rdf_list(g, or_head)
            if len(members) < 2:
                raise ShapeResolutionError(
                    f"sh:or on {ident!r} needs at least two members")
            shape.variants = [self.node_shape(m) for m in members]

        for t in g.match(ident, SH["rule"], None):
            rule_node = t.object
            types = {x.object for x in g.match(rule_node, Iri(RDF_TYPE), None)}
            if SH["SPARQLRule"] not in types:
                self.doc.warnings.append(f"ignored non-SPARQL rule on {ident!r}")
                continue
            construct = _string_of(g.object(rule_node, SH["construct"]))
            if construct is None:
                raise ShapeResolutionError(f"sh:SPARQLRule without sh:construct on {ident!r}")
            try:
                parse_sparql(construct)
            except (SparqlSyntaxError, UnsupportedFeatureError) as exc:
                raise ShapeResolutionError(
                    f"rule on {ident!r} does not parse: {exc}") from exc
            shape.rules.append(SparqlRule(construct, ident))

        for t in g.match(ident, None, None):
            if t.predicate not in _KNOWN_NODE_PREDICATES and t.predicate != SH["or"]:
                self.doc.warnings.append(
                    f"unknown component {t.predicate!r} on node shape {ident!r}")
        return shape

    def property_shape(self, ident: Term, owner: NodeShape) -> PropertyShape:
        g = self.graph
        path = g.object(ident, SH["path"])
        if path is None:
            raise ShapeResolutionError(
                f"property shape {ident!r} in {owner.ident!r} has no sh:path")
        if not isinstance(path, Iri):
            raise ShapeResolutionError(
                f"only single-predicate paths are supported, got {path!r}")

        ps = PropertyShape(ident=ident, path=path)
        editor = g.object(ident, DASH_EDITOR)
        if editor == DASH_DETAILS:
            ps.editor = "DetailsEditor"
        elif editor == DASH_INSTANCES_SELECT:
            ps.editor = "InstancesSelectEditor"
        elif editor is not None:
            self.doc.warnings.append(f"unknown dash:editor {editor!r} on {ident!r}")

        vc = g.object(ident, SH["class"])
        ps.value_class = vc if isinstance(vc, Iri) else None
        dt = g.object(ident, SH["datatype"])
        ps.datatype = dt if isinstance(dt, Iri) else None
        nk = g.object(ident, SH["nodeKind"])
        ps.node_kind = nk if isinstance(nk, Iri) else None
        ps.min_count = _int_of(g.object(ident, SH["minCount"]))
        ps.max_count = _int_of(g.object(ident, SH["maxCount"]))
        ps.name = _string_of(g.object(ident, SH["name"]))
        ps.description = _string_of(g.object(ident, SH["description"]))
        order = g.object(ident, SH["order"])
        ps.order = Decimal(order.lexical) if isinstance(order, Literal) else None
        grp = g.object(ident, SH["group"])
        ps.group = grp if isinstance(grp, Iri) else None

        qshape = g.object(ident, SH["qualifiedValueShape"])
        if qshape is not None:
            if ps.min_count is not None or ps.max_count is not None:
                raise ShapeResolutionError(
                    f"{ident!r}: qualified shape must use qualified counts, "
                    "not sh:minCount/sh:maxCount")
            ps.qualified = QualifiedShape(
                shape=self.node_shape(qshape),
                q_min=_int_of(g.object(ident, SH["qualifiedMinCount"])),
                q_max=_int_of(g.object(ident, SH["qualifiedMaxCount"])),
            )

        node_ref = g.object(ident, SH["node"])
        if node_ref is not None:
            ps.embedded_node = self.node_shape(node_ref)

        in_head = g.object(ident, SH["in"])
        if in_head is not None:
            ps.in_values = _rdf_list(g, in_head)

        for t in g.match(ident, None, None):
            if t.predicate not in _KNOWN_PROPERTY_PREDICATES:
                self.doc.warnings.append(
                    f"unknown component {t.predicate!r} on property shape {ident!r}")
        return ps

    def collect_groups(self) -> None:
        referenced: set[Iri] = set()

        def walk(shape: NodeShape, seen: set[Term]) -> None:
            if shape.ident in seen:
                return
            seen.add(shape.ident)
            for ps in shape.property_shapes:
                if ps.group is not None:
                    referenced.add(ps.group)
                nested = ps.nested_shape()
                if nested is not None:
                    walk(nested, seen)
            for v in shape.variants or []:
                walk(v, seen)

        seen: set[Term] = set()
        for shape in self.doc.shapes.values():
            walk(shape, seen)
        for iri in sorted(referenced, key=lambda t: t.sort_key()):
            label = _string_of(self.graph.object(iri, RDFS_LABEL)) or iri.local_name()
            order = self.graph.object(iri, SH["order"])
            self.doc.groups[iri] = PropertyGroup(
                iri=iri, label=label,
                order=Decimal(order.lexical) if isinstance(order, Literal) else Decimal(0))


def parse_shapes(shapes_graph: Graph) -> ShapesDocument:
    """Parse a shapes graph; empty graphs yield an empty document."""
    return _ShapesParser(shapes_graph).parse()


def root_forms(doc: ShapesDocument) -> list[NodeShape]:
    """Node shapes with a target class, sorted by label: one web form each."""
    return doc.root_shapes()
