import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formweaver.rdf import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    TurtleSyntaxError,
    isomorphic,
    parse_turtle,
    serialize_turtle,
)


def test_empty_document():
    g = parse_turtle("")
    assert len(g) == 0


def test_single_prefixed_triple():
    g = parse_turtle('@prefix foaf: <http://xmlns.com/foaf/0.1/> . '
                     '<urn:u1> foaf:givenName "Ada" .')
    assert len(g) == 1
    t = next(iter(g))
    assert t.predicate == Iri("http://xmlns.com/foaf/0.1/givenName")
    assert t.object == Literal("Ada")


def test_collection_expands_to_first_rest_nil():
    # hand-expanded: (a b) -> _:c1 first a; _:c1 rest _:c2; _:c2 first b; _:c2 rest nil
    g = parse_turtle("<urn:s> <urn:p> ( <urn:a> <urn:b> ) .")
    assert len(g) == 5
    firsts = g.match(None, Iri(RDF_FIRST), None)
    rests = g.match(None, Iri(RDF_REST), None)
    assert len(firsts) == 2 and len(rests) == 2
    assert [t.object for t in firsts] != []
    assert any(t.object == Iri(RDF_NIL) for t in rests)
    head = g.object(Iri("urn:s"), Iri("urn:p"))
    assert isinstance(head, BlankNode)
    assert g.object(head, Iri(RDF_FIRST)) == Iri("urn:a")


def test_empty_collection_is_nil():
    g = parse_turtle("<urn:s> <urn:p> () .")
    assert list(g) == [Triple(Iri("urn:s"), Iri("urn:p"), Iri(RDF_NIL))]


def test_predicate_object_lists_and_bnode_property_list():
    text = """
    @prefix ex: <urn:ex:> .
    ex:s a ex:T ;
        ex:p "a", "b" ;
        ex:q [ ex:r 1 ] .
    """
    g = parse_turtle(text)
    assert len(g) == 5
    assert len(g.match(Iri("urn:ex:s"), Iri("urn:ex:p"), None)) == 2
    inner = g.object(Iri("urn:ex:s"), Iri("urn:ex:q"))
    assert isinstance(inner, BlankNode)
    assert g.object(inner, Iri("urn:ex:r")) == Literal("1", XSD_INTEGER)


def test_numeric_boolean_and_lang_literals():
    g = parse_turtle('@prefix ex: <urn:ex:> . ex:s ex:a 37 ; ex:b 23.28 ; '
                     'ex:c true ; ex:d "hi"@en .')
    objs = {t.predicate.local_name(): t.object for t in g}
    assert objs["a"] == Literal("37", XSD_INTEGER)
    assert objs["b"] == Literal("23.28", XSD_DECIMAL)
    assert objs["c"] == Literal("true", XSD_BOOLEAN)
    assert objs["d"] == Literal("hi", language="en")


def test_blank_node_labels_renamed_consistently():
    g = parse_turtle("_:x <urn:p> _:y . _:y <urn:p> _:x .")
    labels = {t.subject.local_id for t in g}
    assert labels == {"b0", "b1"}
    # same document labels map to the same fresh id
    t1, t2 = list(g)
    assert {t1.subject, t1.object} == {t2.subject, t2.object}


def test_syntax_error_carries_position():
    with pytest.raises(TurtleSyntaxError) as exc:
        parse_turtle("<urn:s> <urn:p>\n  ;;; .")
    assert exc.value.line == 2


def test_unknown_prefix_reported_with_name():
    with pytest.raises(TurtleSyntaxError) as exc:
        parse_turtle("zzz:a <urn:p> 1 .")
    assert "zzz" in str(exc.value)


def test_base_resolution():
    g = parse_turtle("@base <http://ex.org/dir/> . <item> <urn:p> <#frag> .")
    t = next(iter(g))
    assert t.subject == Iri("http://ex.org/dir/item")
    assert t.object == Iri("http://ex.org/dir/#frag")


def test_decimal_datatype_survives_round_trip():
    g = Graph()
    g.add(Triple(Iri("urn:s"), Iri("urn:p"), Literal("37", XSD_DECIMAL)))
    g2 = parse_turtle(serialize_turtle(g))
    assert list(g2) == list(g)


def test_round_trip_with_bnodes_isomorphic():
    text = """
    @prefix sh: <http://www.w3.org/ns/shacl#> .
    @prefix ex: <urn:ex:> .
    ex:Shape a sh:NodeShape ;
        sh:property [ sh:path ex:p ; sh:minCount 1 ],
                    [ sh:path ex:q ; sh:maxCount 1 ] .
    """
    g = parse_turtle(text)
    g2 = parse_turtle(serialize_turtle(g))
    assert isomorphic(g, g2)


_literals = st.one_of(
    st.text(alphabet=st.characters(codec="utf-8", exclude_characters="\x00"),
            max_size=12).map(Literal),
    st.integers(-999, 999).map(lambda i: Literal(str(i), XSD_INTEGER)),
    st.text(alphabet="abz ", max_size=6).map(lambda s: Literal(s, language="en")),
)
_nodes = st.one_of(
    st.sampled_from([Iri(f"urn:n{i}") for i in range(6)]),
    st.sampled_from([BlankNode(f"b{i}") for i in range(4)]),
)
_triples = st.builds(
    Triple,
    _nodes,
    st.sampled_from([Iri(f"urn:p{i}") for i in range(4)]),
    st.one_of(_nodes, _literals),
)


@given(st.lists(_triples, max_size=25))
@settings(max_examples=60, deadline=None)
def test_round_trip_isomorphism_property(triples):
    g = Graph(triples)
    g2 = parse_turtle(serialize_turtle(g))
    assert isomorphic(g, g2)
