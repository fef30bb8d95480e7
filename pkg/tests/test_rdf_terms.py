import pytest

from formweaver.rdf import (
    RDF_LANGSTRING,
    XSD_DECIMAL,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    TermError,
    Triple,
    UnknownPrefixError,
    expand_curie,
)

TABLE1 = {
    "dash": "http://datashapes.org/dash#",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "hash": "http://purls.helmholtz-metadaten.de/herbie/hash/#",
    "mbs": "http://purls.helmholtz-metadaten.de/herbie/mb/mbs/#",
    "nfdi": "http://nfdi.fiz-karlsruhe.de/ontology/",
    "pmd": "https://w3id.org/pmd/co/",
    "prima": "https://purls.helmholtz-metadaten.de/prima/core#",
    "prima_experiment": "https://purls.helmholtz-metadaten.de/prima/experiment#",
    "prov": "http://www.w3.org/ns/prov#",
    "qudt": "http://qudt.org/schema/qudt/",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "sh": "http://www.w3.org/ns/shacl#",
}


def test_iri_requires_scheme():
    Iri("urn:x")
    Iri("http://example.org/a")
    with pytest.raises(TermError):
        Iri("no-scheme-here/path")


def test_literal_language_forces_langstring():
    lit = Literal("hello", language="en")
    assert lit.datatype == RDF_LANGSTRING
    with pytest.raises(TermError):
        Literal("x", datatype=RDF_LANGSTRING)


def test_term_equality_is_term_level_not_value_level():
    assert Literal("2", XSD_DECIMAL) != Literal("2.0", XSD_DECIMAL)
    assert Literal("2") != Literal("2", XSD_DECIMAL)
    assert Literal("a", XSD_STRING) == Literal("a")


def test_triple_positional_invariants():
    s, p, o = Iri("urn:s"), Iri("urn:p"), Literal("v")
    Triple(s, p, o)
    Triple(BlankNode("b0"), p, o)
    with pytest.raises(TermError):
        Triple(Literal("bad"), p, o)
    with pytest.raises(TermError):
        Triple(s, BlankNode("b0"), o)


@pytest.mark.parametrize("curie,expected", [
    ("prov:wasDerivedFrom", "http://www.w3.org/ns/prov#wasDerivedFrom"),
    ("qudt:value", "http://qudt.org/schema/qudt/value"),
    ("foaf:givenName", "http://xmlns.com/foaf/0.1/givenName"),
    ("mbs:ScanEntry", "http://purls.helmholtz-metadaten.de/herbie/mb/mbs/#ScanEntry"),
])
def test_expand_curie_table_bindings(curie, expected):
    pm = PrefixMap(dict(TABLE1))
    assert expand_curie(curie, pm) == Iri(expected)


def test_expand_curie_unknown_prefix():
    with pytest.raises(UnknownPrefixError) as exc:
        expand_curie("zzz:x", PrefixMap())
    assert exc.value.prefix == "zzz"


def test_expansion_injective_within_namespace():
    pm = PrefixMap(dict(TABLE1))
    locals_ = ["value", "unit", "quantityValue", "Quantity"]
    expanded = {expand_curie(f"qudt:{l}", pm) for l in locals_}
    assert len(expanded) == len(locals_)
