"""Compile node shapes into form descriptors: the UI contract.

Widget inference, first match wins:
  1. DetailsEditor with a nested shape        -> nested form
  2. InstancesSelectEditor with a value class -> instance selector
     (chips when the snapshot holds <= 5 selectable instances, else dropdown)
  3. qualified value-object shape whose embedded node constrains the
     qudt value/unit pair                     -> number-with-unit input
  4. sh:in                                    -> enum selector
  5. sh:datatype                              -> text input
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from .rdf import RDF_TYPE, RDFS_NS, Graph, Iri, Literal, Term
from .shacl import NodeShape, PropertyShape, ShapesDocument
from .validation import subclass_closure

QUDT_NS = "http://qudt.org/schema/qudt/"
QUDT_QUANTITY_VALUE = Iri(QUDT_NS + "quantityValue")
QUDT_VALUE = Iri(QUDT_NS + "value")
QUDT_UNIT = Iri(QUDT_NS + "unit")
QUDT_SYMBOL = Iri(QUDT_NS + "symbol")
PMD_VALUE_OBJECT = Iri("https://w3id.org/pmd/co/ValueObject")
RDFS_LABEL = Iri(RDFS_NS + "label")

CHIPS_THRESHOLD = 5  # paper states the dependency, not the number


class WidgetInferenceError(Exception):
    def __init__(self, ps: PropertyShape, owner: Term):
        super().__init__(
            f"no widget rule matches property shape {ps.ident!r} "
            f"(path {ps.path!r}) of shape {owner!r}")
        self.property_shape = ps
        self.owner = owner


@dataclass
class InstanceOption:
    iri: Iri
    cls: Iri
    label: str

    def to_json_dict(self) -> dict:
        return {"iri": self.iri.value, "class": self.cls.value, "label": self.label}


@dataclass
class WidgetSpec:
    kind: str                                   # text | number_with_unit | instance_select
    #                                           # | nested_form | enum_select | variant_selector
    datatype: Optional[Iri] = None
    value_object_class: Optional[Iri] = None
    unit_iri: Optional[Iri] = None
    unit_symbol: Optional[str] = None
    numeric_datatype: Optional[Iri] = None
    value_class: Optional[Iri] = None
    presentation: Optional[str] = None          # dropdown | chips
    can_create: Optional[bool] = None
    options: Optional[list[InstanceOption]] = None
    form: Optional["FormDescriptor"] = None
    allowed: Optional[list[Term]] = None
    labels: Optional[list[str]] = None

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "text":
            out["datatype"] = self.datatype.value if self.datatype else None
        elif self.kind == "number_with_unit":
            out["value_object_class"] = self.value_object_class.value
            out["unit_iri"] = self.unit_iri.value if self.unit_iri else None
            out["unit_symbol"] = self.unit_symbol
            out["numeric_datatype"] = self.numeric_datatype.value
        elif self.kind == "instance_select":
            out["value_class"] = self.value_class.value
            out["presentation"] = self.presentation
            out["can_create"] = self.can_create
            out["options"] = [o.to_json_dict() for o in self.options or []]
        elif self.kind == "nested_form":
            out["form"] = self.form.to_json_dict()
        elif self.kind == "enum_select":
            out["allowed"] = [_term_json(t) for t in self.allowed or []]
        elif self.kind == "variant_selector":
            out["labels"] = list(self.labels or [])
        return out


def _term_json(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "iri", "value": term.value}
    if isinstance(term, Literal):
        out = {"type": "literal", "value": term.lexical, "datatype": term.datatype}
        if term.language:
            out["lang"] = term.language
        return out
    return {"type": "bnode", "value": term.local_id}


@dataclass
class FieldDescriptor:
    field_id: str
    path: Iri
    label: str
    required: bool
    multi: bool
    widget: WidgetSpec
    description: Optional[str] = None
    group: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "field_id": self.field_id,
            "path": self.path.value,
            "label": self.label,
            "description": self.description,
            "required": self.required,
            "multi": self.multi,
            "group": self.group,
            "widget": self.widget.to_json_dict(),
        }


@dataclass
class VariantDescriptor:
    variant_class: Iri
    label: str
    fields: list[FieldDescriptor]

    def to_json_dict(self) -> dict:
        return {"variant_class": self.variant_class.value, "label": self.label,
                "fields": [f.to_json_dict() for f in self.fields]}


@dataclass
class FormDescriptor:
    form_id: Term
    target_class: Optional[Iri]
    title: str
    groups: list[dict] = field(default_factory=list)
    fields: list[FieldDescriptor] = field(default_factory=list)
    variants: Optional[list[VariantDescriptor]] = None
    variant_selector: Optional[WidgetSpec] = None

    def field_by_id(self, field_id: str, variant: Optional[Iri] = None) -> Optional[FieldDescriptor]:
        for f in self.fields:
            if f.field_id == field_id:
                return f
        if variant is not None and self.variants:
            for v in self.variants:
                if v.variant_class == variant:
                    for f in v.fields:
                        if f.field_id == field_id:
                            return f
        return None

    def to_json_dict(self) -> dict:
        out = {
            "form_id": self.form_id.value if isinstance(self.form_id, Iri)
                       else f"_:{self.form_id.local_id}",
            "target_class": self.target_class.value if self.target_class else None,
            "title": self.title,
            "groups": self.groups,
            "fields": [f.to_json_dict() for f in self.fields],
        }
        if self.variants is not None:
            out["variants"] = [v.to_json_dict() for v in self.variants]
            out["variant_selector"] = (self.variant_selector.to_json_dict()
                                       if self.variant_selector else None)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, ensure_ascii=False)


_CAMEL = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z0-9]+|[A-Z]+")


def default_label(name: str) -> str:
    words = _CAMEL.findall(name.replace("_", " ").replace("-", " "))
    if not words:
        return name
    text = " ".join(w.lower() for w in words)
    return text[0].upper() + text[1:]


class _Compiler:
    def __init__(self, snapshot: Graph, doc: ShapesDocument,
                 units: Optional[dict[str, str]] = None):
        self.snapshot = snapshot
        self.doc = doc
        self.units = units or {}
        self.closure = subclass_closure(snapshot)
        self.parents: dict[Iri, set[Iri]] = {}
        for cls, subs in self.closure.items():
            for sub in subs:
                self.parents.setdefault(sub, set()).add(cls)

    def superclasses(self, cls: Iri) -> set[Iri]:
        return self.parents.get(cls, {cls})

    def subclasses(self, cls: Iri) -> set[Iri]:
        return self.closure.get(cls, {cls})

    def unit_symbol(self, unit: Iri) -> Optional[str]:
        if unit.value in self.units:
            return self.units[unit.value]
        sym = self.snapshot.object(unit, QUDT_SYMBOL)
        return sym.lexical if isinstance(sym, Literal) else None

    def instances_of(self, cls: Iri) -> list[InstanceOption]:
        out = []
        for sub in self.subclasses(cls):
            for t in self.snapshot.match(None, Iri(RDF_TYPE), sub):
                if not isinstance(t.subject, Iri):
                    continue
                label = self.snapshot.object(t.subject, RDFS_LABEL)
                out.append(InstanceOption(
                    iri=t.subject, cls=sub,
                    label=label.lexical if isinstance(label, Literal)
                          else t.subject.local_name()))
        out.sort(key=lambda o: (o.label, o.iri.value))
        return out

    def has_root_form(self, cls: Iri) -> bool:
        targets = {s.target_class for s in self.doc.root_shapes()}
        return bool(self.superclasses(cls) & targets)

    # --- widget inference -----------------------------------------------------

    def infer_widget(self, ps: PropertyShape, owner: Term) -> WidgetSpec:
        nested = ps.nested_shape()

        if ps.editor == "DetailsEditor" and nested is not None:
            return WidgetSpec(kind="nested_form", form=self.compile(nested))

        value_class = ps.value_class
        if value_class is None and ps.qualified is not None:
            value_class = ps.qualified.shape.node_class
        if ps.editor == "InstancesSelectEditor" and value_class is not None:
            options = self.instances_of(value_class)
            return WidgetSpec(
                kind="instance_select",
                value_class=value_class,
                presentation="chips" if len(options) <= CHIPS_THRESHOLD else "dropdown",
                can_create=self.has_root_form(value_class),
                options=options,
            )

        if ps.qualified is not None:
            spec = self.try_number_with_unit(ps)
            if spec is not None:
                return spec

        if ps.in_values is not None:
            return WidgetSpec(kind="enum_select", allowed=list(ps.in_values))

        if ps.datatype is not None:
            return WidgetSpec(kind="text", datatype=ps.datatype)

        raise WidgetInferenceError(ps, owner)

    def try_number_with_unit(self, ps: PropertyShape) -> Optional[WidgetSpec]:
        qshape = ps.qualified.shape
        vo_class = qshape.node_class
        if vo_class is None or vo_class not in self.subclasses(PMD_VALUE_OBJECT):
            return None
        for inner in qshape.property_shapes:
            if inner.path != QUDT_QUANTITY_VALUE:
                continue
            quantity_shape = inner.nested_shape()
            if quantity_shape is None:
                continue
            value_ps = unit_ps = None
            for qps in quantity_shape.property_shapes:
                if qps.path == QUDT_VALUE:
                    value_ps = qps
                elif qps.path == QUDT_UNIT:
                    unit_ps = qps
            if value_ps is None or value_ps.datatype is None:
                continue
            unit_iri: Optional[Iri] = None
            if unit_ps is not None and unit_ps.in_values:
                first = unit_ps.in_values[0]
                if isinstance(first, Iri):
                    unit_iri = first
            return WidgetSpec(
                kind="number_with_unit",
                value_object_class=vo_class,
                unit_iri=unit_iri,
                unit_symbol=self.unit_symbol(unit_iri) if unit_iri else None,
                numeric_datatype=value_ps.datatype,
            )
        return None

    # --- form assembly ----------------------------------------------------------

    def compile_field(self, ps: PropertyShape, owner: Term) -> FieldDescriptor:
        widget = self.infer_widget(ps, owner)
        if ps.name:
            label = ps.name
        elif ps.qualified is not None and ps.qualified.shape.node_class is not None:
            label = default_label(ps.qualified.shape.node_class.local_name())
        else:
            label = default_label(ps.path.local_name())
        group_label = None
        if ps.group is not None and ps.group in self.doc.groups:
            group_label = self.doc.groups[ps.group].label
        minimum = ps.effective_min()
        maximum = ps.effective_max()
        return FieldDescriptor(
            field_id=ps.field_id(),
            path=ps.path,
            label=label,
            description=ps.description,
            required=minimum >= 1,
            multi=maximum is None or maximum > 1,
            widget=widget,
            group=group_label,
        )

    def sort_fields(self, pairs: list[tuple[PropertyShape, FieldDescriptor]]) -> list[FieldDescriptor]:
        def key(pair):
            ps, fd = pair
            if ps.group is not None and ps.group in self.doc.groups:
                group_order = (0, self.doc.groups[ps.group].order)
            else:
                group_order = (1, Decimal(0))  # ungrouped fields sort last
            field_order = (0, ps.order) if ps.order is not None else (1, Decimal(0))
            return (group_order, field_order, fd.label, fd.field_id)
        return [fd for _, fd in sorted(pairs, key=key)]

    def compile(self, shape: NodeShape) -> FormDescriptor:
        pairs = [(ps, self.compile_field(ps, shape.ident))
                 for ps in shape.property_shapes]
        fields = self.sort_fields(pairs)

        used_groups = {ps.group for ps, _ in pairs if ps.group is not None}
        groups = [{"label": g.label, "order": float(g.order)}
                  for g in sorted((self.doc.groups[i] for i in used_groups
                                   if i in self.doc.groups),
                                  key=lambda g: (g.order, g.label))]

        descriptor = FormDescriptor(
            form_id=shape.ident,
            target_class=shape.target_class or shape.node_class,
            title=shape.display_label(),
            groups=groups,
            fields=fields,
        )
        if shape.variants:
            descriptor.variants = []
            for variant in shape.variants:
                vpairs = [(ps, self.compile_field(ps, variant.ident))
                          for ps in variant.property_shapes]
                descriptor.variants.append(VariantDescriptor(
                    variant_class=variant.node_class or variant.target_class,
                    label=variant.display_label(),
                    fields=self.sort_fields(vpairs),
                ))
            descriptor.variant_selector = WidgetSpec(
                kind="variant_selector",
                labels=[v.label for v in descriptor.variants])
        return descriptor


def compile_form(shape: NodeShape, snapshot: Graph, doc: ShapesDocument,
                 units: Optional[dict[str, str]] = None) -> FormDescriptor:
    """Compile one node shape into a form descriptor.

    `snapshot` supplies instance option lists, the chips/dropdown decision,
    and the subclass closure for value-object detection. `units` maps QUDT
    unit IRIs to display symbols; qudt:symbol triples in the snapshot are
    the fallback.
    """
    return _Compiler(snapshot, doc, units).compile(shape)


def infer_widget(ps: PropertyShape, snapshot: Graph, doc: ShapesDocument,
                 units: Optional[dict[str, str]] = None) -> WidgetSpec:
    """Widget for a single property shape (first matching rule wins)."""
    return _Compiler(snapshot, doc, units).infer_widget(ps, ps.ident)
