"""Constraint validation and SPARQL rule execution over a data graph.

Checks cardinalities, qualified cardinalities, sh:class (with
rdfs:subClassOf closure taken from the supplied graph), sh:datatype,
sh:nodeKind, sh:in and sh:or. Problems become report entries, never
exceptions. Rules run separately and return only inferred triples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .rdf import (
    RDF_TYPE,
    RDFS_NS,
    SH_NS,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
)
from .shacl import NodeShape, PropertyShape, ShapesDocument
from .sparql import ConstructQuery, eval_construct, parse_sparql

RDFS_SUBCLASS = Iri(RDFS_NS + "subClassOf")
_NODEKIND_IRI = Iri(SH_NS + "IRI")
_NODEKIND_LITERAL = Iri(SH_NS + "Literal")
_NODEKIND_BNODE = Iri(SH_NS + "BlankNode")


@dataclass
class ValidationResult:
    focus_node: Term
    path: Optional[Iri]
    source_shape: Term
    component: str
    message: str

    def to_json_dict(self) -> dict:
        return {
            "focus_node": repr(self.focus_node),
            "path": self.path.value if self.path else None,
            "source_shape": repr(self.source_shape),
            "component": self.component,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    conforms: bool
    results: list[ValidationResult] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {"conforms": self.conforms,
                "results": [r.to_json_dict() for r in self.results]}


class RuleEvaluationError(Exception):
    def __init__(self, shape: Term, cause: Exception):
        super().__init__(f"rule of shape {shape!r} failed: {cause}")
        self.shape = shape
        self.cause = cause


def subclass_closure(graph: Graph) -> dict[Iri, set[Iri]]:
    """class -> {class and all transitive rdfs:subClassOf descendants}."""
    children: dict[Iri, set[Iri]] = {}
    for t in graph.match(None, RDFS_SUBCLASS, None):
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri):
            children.setdefault(t.object, set()).add(t.subject)
    closure: dict[Iri, set[Iri]] = {}

    def collect(cls: Iri) -> set[Iri]:
        if cls in closure:
            return closure[cls]
        closure[cls] = {cls}
        stack = [cls]
        seen = {cls}
        while stack:
            current = stack.pop()
            for child in children.get(current, ()):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        closure[cls] = seen
        return seen

    for cls in set(children) | {c for subs in children.values() for c in subs}:
        collect(cls)
    return closure


class _Validator:
    def __init__(self, data: Graph, shapes: ShapesDocument):
        self.data = data
        self.shapes = shapes
        self.closure = subclass_closure(data)
        self._active: set[tuple[Term, Term]] = set()

    def subclasses(self, cls: Iri) -> set[Iri]:
        return self.closure.get(cls, {cls})

    def types_of(self, node: Term) -> set[Iri]:
        return {t.object for t in self.data.match(node, Iri(RDF_TYPE), None)
                if isinstance(t.object, Iri)}

    def is_instance(self, node: Term, cls: Iri) -> bool:
        return bool(self.types_of(node) & self.subclasses(cls))

    def focus_nodes(self, shape: NodeShape) -> list[Term]:
        assert shape.target_class is not None
        nodes: set[Term] = set()
        for cls in self.subclasses(shape.target_class):
            nodes.update(t.subject for t in self.data.match(None, Iri(RDF_TYPE), cls))
        return sorted(nodes, key=lambda t: t.sort_key())

    # --- node-shape conformance ---------------------------------------------

    def check_node(self, focus: Term, shape: NodeShape) -> list[ValidationResult]:
        key = (focus, shape.ident)
        if key in self._active:
            return []  # recursive shape reference: assume conformance
        self._active.add(key)
        try:
            results: list[ValidationResult] = []
            if shape.node_class is not None and not self.is_instance(focus, shape.node_class):
                results.append(ValidationResult(
                    focus, None, shape.ident, "Class",
                    f"node is not an instance of {shape.node_class!r}"))
            for ps in shape.property_shapes:
                results.extend(self.check_property(focus, ps, shape))
            if shape.variants:
                if not any(self.conforms(focus, v) for v in shape.variants):
                    labels = ", ".join(v.display_label() for v in shape.variants)
                    results.append(ValidationResult(
                        focus, None, shape.ident, "Or",
                        f"node conforms to none of the variants: {labels}"))
            return results
        finally:
            self._active.discard(key)

    def conforms(self, focus: Term, shape: NodeShape) -> bool:
        return not self.check_node(focus, shape)

    # --- property-shape constraints -------------------------------------------

    def check_property(self, focus: Term, ps: PropertyShape,
                       owner: NodeShape) -> list[ValidationResult]:
        values = [t.object for t in self.data.match(focus, ps.path, None)]
        results: list[ValidationResult] = []

        def add(component: str, message: str) -> None:
            results.append(ValidationResult(focus, ps.path, owner.ident,
                                            component, message))

        if ps.min_count is not None and len(values) < ps.min_count:
            add("MinCount", f"found {len(values)} values, requires at least {ps.min_count}")
        if ps.max_count is not None and len(values) > ps.max_count:
            add("MaxCount", f"found {len(values)} values, allows at most {ps.max_count}")

        if ps.datatype is not None:
            for v in values:
                if not isinstance(v, Literal) or v.datatype != ps.datatype.value:
                    add("Datatype", f"value {v!r} is not a literal of {ps.datatype!r}")
        if ps.node_kind is not None:
            expected = {_NODEKIND_IRI: Iri, _NODEKIND_LITERAL: Literal,
                        _NODEKIND_BNODE: BlankNode}.get(ps.node_kind)
            if expected is not None:
                for v in values:
                    if not isinstance(v, expected):
                        add("NodeKind", f"value {v!r} is not of kind {ps.node_kind.local_name()}")
        if ps.value_class is not None:
            for v in values:
                if isinstance(v, Literal) or not self.is_instance(v, ps.value_class):
                    add("Class", f"value {v!r} is not an instance of {ps.value_class!r}")
        if ps.in_values is not None:
            for v in values:
                if v not in ps.in_values:
                    add("In", f"value {v!r} is not in the allowed list")
        if ps.embedded_node is not None:
            for v in values:
                if isinstance(v, Literal) or not self.conforms(v, ps.embedded_node):
                    add("Node", f"value {v!r} does not conform to "
                                f"{ps.embedded_node.display_label()}")

        if ps.qualified is not None:
            conforming = [v for v in values
                          if not isinstance(v, Literal)
                          and self.conforms(v, ps.qualified.shape)]
            label = ps.qualified.shape.display_label()
            if ps.qualified.q_min is not None and len(conforming) < ps.qualified.q_min:
                add("QualifiedMinCount",
                    f"found {len(conforming)} values conforming to {label}, "
                    f"requires at least {ps.qualified.q_min}")
            if ps.qualified.q_max is not None and len(conforming) > ps.qualified.q_max:
                add("QualifiedMaxCount",
                    f"found {len(conforming)} values conforming to {label}, "
                    f"allows at most {ps.qualified.q_max}")
        return results


def validate(data: Graph, shapes: ShapesDocument,
             focus: Optional[Term] = None) -> ValidationReport:
    """Validate focus nodes against root forms.

    With `focus` given, only that node is checked (against every root form
    whose target class covers one of its types). Subclass reasoning uses the
    rdfs:subClassOf triples present in `data`, so callers include the
    ontology in the graph they pass.
    """
    validator = _Validator(data, shapes)
    results: list[ValidationResult] = []
    for shape in shapes.root_shapes():
        if focus is None:
            nodes = validator.focus_nodes(shape)
        else:
            nodes = [focus] if validator.is_instance(focus, shape.target_class) else []
        for node in nodes:
            results.extend(validator.check_node(node, shape))
    return ValidationReport(conforms=not results, results=results)


def apply_rules(data: Graph, shapes: ShapesDocument, focus: Term) -> Graph:
    """Run every applicable shape rule with $this bound to focus.

    Returns only the inferred triples. Rules are non-recursive: repeated
    application over data that already contains the output is a fixpoint.
    """
    validator = _Validator(data, shapes)
    inferred = Graph(prefixes=data.prefixes)
    for shape in shapes.root_shapes():
        if not shape.rules or not validator.is_instance(focus, shape.target_class):
            continue
        for rule in shape.rules:
            try:
                ast = parse_sparql(rule.construct_text)
                if not isinstance(ast, ConstructQuery):
                    raise TypeError("rule text is not a CONSTRUCT query")
                out = eval_construct(ast, data, bindings={"this": focus})
            except Exception as exc:  # wrap with owning-shape context
                raise RuleEvaluationError(shape.ident, exc) from exc
            inferred.add_all(out)
    return inferred
