import pytest

from formweaver.rdf import (
    XSD_DECIMAL,
    XSD_INTEGER,
    Graph,
    Iri,
    Literal,
    Triple,
    parse_turtle,
)
from formweaver.sparql import (
    Aggregate,
    ConstructQuery,
    SelectQuery,
    SparqlSyntaxError,
    UnsupportedFeatureError,
    eval_construct,
    eval_select,
    parse_sparql,
)

DATA = """
@prefix ex: <urn:ex:> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:a a ex:Widget ; rdfs:label "alpha" ; ex:size 3 .
ex:b a ex:Widget ; rdfs:label "beta" ; ex:size 12.5 .
ex:c a ex:Gadget ; rdfs:label "gamma" ; ex:partOf ex:a .
ex:d a ex:Gadget ; ex:partOf ex:c .
"""


@pytest.fixture()
def graph():
    return parse_turtle(DATA)


def q(text):
    return "PREFIX ex: <urn:ex:>\nPREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n" + text


def test_parse_simple_select():
    ast = parse_sparql(q("SELECT ?s WHERE { ?s a ex:Widget }"))
    assert isinstance(ast, SelectQuery)
    assert [v.name for v in ast.projection] == ["s"]
    assert len(ast.where.elements) == 1


def test_parse_count_aggregate():
    ast = parse_sparql(q("SELECT (COUNT(DISTINCT ?s) AS ?n) WHERE { ?s a ex:Widget }"))
    agg = ast.projection[0]
    assert isinstance(agg, Aggregate)
    assert agg.distinct and agg.alias.name == "n"


def test_unsupported_service():
    with pytest.raises(UnsupportedFeatureError) as exc:
        parse_sparql("SELECT ?x WHERE { SERVICE <urn:x> {} }")
    assert exc.value.feature == "SERVICE"


def test_unsupported_subquery():
    with pytest.raises(UnsupportedFeatureError):
        parse_sparql("SELECT ?x WHERE { { SELECT ?y WHERE { ?y a ?z } } }")


def test_syntax_error_position():
    with pytest.raises(SparqlSyntaxError) as exc:
        parse_sparql("SELECT ?x WHERE { ?x a }")
    assert exc.value.line == 1


def test_basic_select(graph):
    table = eval_select(parse_sparql(q("SELECT ?s WHERE { ?s a ex:Widget }")), graph)
    assert table.variables == ["s"]
    assert [r["s"].value for r in table.rows] == ["urn:ex:a", "urn:ex:b"]


def test_join_and_filter_numeric_coercion(graph):
    table = eval_select(parse_sparql(q(
        "SELECT ?l WHERE { ?s ex:size ?n ; rdfs:label ?l . FILTER(?n > 5) }")), graph)
    assert [r["l"].lexical for r in table.rows] == ["beta"]
    # integer 3 vs decimal boundary: coercion, not lexical comparison
    table2 = eval_select(parse_sparql(q(
        "SELECT ?l WHERE { ?s ex:size ?n ; rdfs:label ?l . FILTER(?n >= 3.0) }")), graph)
    assert len(table2) == 2


def test_optional_leaves_unbound(graph):
    table = eval_select(parse_sparql(q(
        "SELECT ?s ?l WHERE { ?s a ex:Gadget . OPTIONAL { ?s rdfs:label ?l } }")), graph)
    by_s = {r["s"].value: r["l"] for r in table.rows}
    assert by_s["urn:ex:c"].lexical == "gamma"
    assert by_s["urn:ex:d"] is None


def test_optional_never_matching_keeps_rows(graph):
    plain = eval_select(parse_sparql(q("SELECT ?s WHERE { ?s a ex:Widget }")), graph)
    opt = eval_select(parse_sparql(q(
        "SELECT ?s ?x WHERE { ?s a ex:Widget . OPTIONAL { ?s ex:nothing ?x } }")), graph)
    assert [r["s"] for r in opt.rows] == [r["s"] for r in plain.rows]
    assert all(r["x"] is None for r in opt.rows)


def test_filter_true_is_identity(graph):
    base = eval_select(parse_sparql(q("SELECT ?s WHERE { ?s a ex:Widget }")), graph)
    filtered = eval_select(parse_sparql(q(
        "SELECT ?s WHERE { ?s a ex:Widget . FILTER(true) }")), graph)
    assert base.rows == filtered.rows


def test_union_and_count(graph):
    table = eval_select(parse_sparql(q(
        "SELECT (COUNT(?s) AS ?n) WHERE { { ?s a ex:Widget } UNION { ?s a ex:Gadget } }")), graph)
    assert table.rows[0]["n"] == Literal("4", XSD_INTEGER)


def test_count_union_equals_sum_minus_duplicates(graph):
    # brute-force check on this fixture: widgets (2) + gadgets (2), no overlap
    widgets = {t.subject for t in graph.match(None, Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), Iri("urn:ex:Widget"))}
    gadgets = {t.subject for t in graph.match(None, Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), Iri("urn:ex:Gadget"))}
    expected = len(widgets) + len(gadgets) - len(widgets & gadgets)
    table = eval_select(parse_sparql(q(
        "SELECT (COUNT(DISTINCT ?s) AS ?n) WHERE { { ?s a ex:Widget } UNION { ?s a ex:Gadget } }")), graph)
    assert table.rows[0]["n"].lexical == str(expected)


def test_group_by_counts(graph):
    table = eval_select(parse_sparql(q(
        "SELECT ?t (COUNT(?s) AS ?n) WHERE { ?s a ?t } GROUP BY ?t")), graph)
    counts = {r["t"].value.rsplit(":", 1)[1]: r["n"].lexical for r in table.rows}
    assert counts == {"Widget": "2", "Gadget": "2"}


def test_values_restricts(graph):
    table = eval_select(parse_sparql(q(
        "SELECT ?s WHERE { VALUES ?s { ex:a ex:c } ?s a ?t }")), graph)
    assert [r["s"].value for r in table.rows] == ["urn:ex:a", "urn:ex:c"]


def test_order_by_desc_and_limit(graph):
    table = eval_select(parse_sparql(q(
        "SELECT ?s ?n WHERE { ?s ex:size ?n } ORDER BY DESC(?n) LIMIT 1")), graph)
    assert table.rows[0]["s"].value == "urn:ex:b"


def test_property_path_in_select(graph):
    table = eval_select(parse_sparql(q(
        "SELECT ?x WHERE { ?x ex:partOf+ ex:a }")), graph)
    assert [r["x"].value for r in table.rows] == ["urn:ex:c", "urn:ex:d"]


def test_bind_concat_str(graph):
    table = eval_select(parse_sparql(q(
        'SELECT ?out WHERE { ?s rdfs:label ?l . FILTER(?l = "alpha") '
        'BIND(CONCAT("x-", STR(?s)) AS ?out) }')), graph)
    assert table.rows[0]["out"].lexical == "x-urn:ex:a"


def test_regex_and_lang():
    g = parse_turtle('@prefix ex: <urn:ex:> . ex:a ex:p "Magnesium"@en .')
    table = eval_select(parse_sparql(q(
        'SELECT ?v WHERE { ?s ex:p ?v . FILTER(REGEX(STR(?v), "^mag", "i") && LANG(?v) = "en") }')), g)
    assert len(table) == 1


def test_select_deterministic_without_order(graph):
    t1 = eval_select(parse_sparql(q("SELECT ?s ?t WHERE { ?s a ?t }")), graph)
    t2 = eval_select(parse_sparql(q("SELECT ?s ?t WHERE { ?s a ?t }")), graph)
    assert t1.rows == t2.rows


def test_construct_with_bind(graph):
    ast = parse_sparql(q(
        'CONSTRUCT { ?s rdfs:label ?new } WHERE { ?s a ex:Widget ; rdfs:label ?l . '
        'BIND(CONCAT(?l, "!") AS ?new) }'))
    assert isinstance(ast, ConstructQuery)
    out = eval_construct(ast, graph)
    labels = sorted(t.object.lexical for t in out)
    assert labels == ["alpha!", "beta!"]


def test_construct_skips_unbound_template_rows(graph):
    out = eval_construct(parse_sparql(q(
        "CONSTRUCT { ?s ex:label ?l } WHERE { ?s a ex:Gadget . OPTIONAL { ?s rdfs:label ?l } }")), graph)
    assert len(out) == 1  # ex:d has no label -> its template triple is skipped


def test_construct_empty_where(graph):
    out = eval_construct(parse_sparql(q(
        "CONSTRUCT { ?s ex:p ?o } WHERE { ?s ex:never ?o }")), graph)
    assert len(out) == 0


def test_prebound_variable_this(graph):
    ast = parse_sparql(q("SELECT ?l WHERE { $this rdfs:label ?l }"))
    table = eval_select(ast, graph, bindings={"this": Iri("urn:ex:a")})
    assert [r["l"].lexical for r in table.rows] == ["alpha"]
