from hypothesis import given, settings
from hypothesis import strategies as st

from formweaver.rdf import Graph, Iri, Literal, Triple, match


def tri(s, p, o):
    return Triple(Iri(f"urn:{s}"), Iri(f"urn:{p}"), Iri(f"urn:{o}"))


def test_duplicate_insert_is_noop():
    g = Graph()
    g.add(tri("s", "p", "o"))
    g.add(tri("s", "p", "o"))
    assert len(g) == 1


def test_match_wildcards_and_bound_positions():
    g = Graph([tri("s", "p", "o1"), tri("s", "p", "o2"), tri("t", "q", "o1")])
    assert len(match(g)) == 3
    assert len(match(g, s=Iri("urn:s"))) == 2
    assert match(g, p=Iri("urn:q"))[0].subject == Iri("urn:t")
    assert match(g, s=Iri("urn:s"), p=Iri("urn:p"), o=Iri("urn:o2")) == [tri("s", "p", "o2")]
    assert match(g, s=Iri("urn:missing")) == []


def test_match_on_empty_graph():
    assert match(Graph(), Iri("urn:s"), None, None) == []


def test_match_order_deterministic():
    g1 = Graph([tri("b", "p", "x"), tri("a", "p", "x")])
    g2 = Graph([tri("a", "p", "x"), tri("b", "p", "x")])
    assert match(g1) == match(g2)
    assert [t.subject.value for t in match(g1)] == ["urn:a", "urn:b"]


def test_prefix_bindings_unique_per_graph():
    g = Graph()
    g.bind("ex", "urn:one:")
    g.bind("ex", "urn:two:")
    assert g.prefixes.bindings["ex"] == "urn:two:"
    assert len(g.prefixes) == 1


_ts = st.builds(
    tri,
    st.sampled_from("abcd"),
    st.sampled_from("pq"),
    st.sampled_from("xyz"),
)


@given(st.lists(_ts, max_size=15), _ts, st.sampled_from("abcd"))
@settings(max_examples=50, deadline=None)
def test_match_is_monotone_under_insertion(triples, extra, subj):
    g = Graph(triples)
    before = set(match(g, s=Iri(f"urn:{subj}")))
    g.add(extra)
    after = set(match(g, s=Iri(f"urn:{subj}")))
    assert before <= after
