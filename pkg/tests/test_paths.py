"""Path evaluation against an independent brute-force closure oracle."""
import random

import pytest

from formweaver.rdf import Graph, Iri, Triple
from formweaver.sparql import (
    PathAlt,
    PathInverse,
    PathLink,
    PathOneOrMore,
    PathSeq,
    PathZeroOrMore,
    eval_path,
)

P = Iri("urn:p")
Q = Iri("urn:q")


def node(i):
    return Iri(f"urn:n{i}")


def random_graph(rng, n_nodes, n_edges, preds=(P, Q)):
    g = Graph()
    edges = []
    for _ in range(n_edges):
        s, o = node(rng.randrange(n_nodes)), node(rng.randrange(n_nodes))
        p = preds[rng.randrange(len(preds))]
        g.add(Triple(s, p, o))
        edges.append((s, p, o))
    return g, edges


# --- independent oracle: set-based closure over explicit edge lists ---------

def oracle_edges(edges, pred):
    return {(s, o) for (s, p, o) in edges if p == pred}


def oracle_closure(pairs, nodes):
    """Floyd-Warshall-style transitive closure over node pairs."""
    reach = {n: {m for (s, m) in pairs if s == n} for n in nodes}
    changed = True
    while changed:
        changed = False
        for a in nodes:
            extra = set()
            for b in reach[a]:
                extra |= reach.get(b, set())
            if not extra <= reach[a]:
                reach[a] |= extra
                changed = True
    return {(a, b) for a in nodes for b in reach[a]}


def oracle_compose(pairs1, pairs2):
    return {(a, c) for (a, b) in pairs1 for (b2, c) in pairs2 if b == b2}


def all_nodes(edges):
    out = set()
    for s, _, o in edges:
        out.add(s)
        out.add(o)
    return out


def oracle_eval(path_kind, edges):
    """Expected (start, end) pairs for each tested path shape."""
    nodes = all_nodes(edges)
    p_pairs = oracle_edges(edges, P)
    q_pairs = oracle_edges(edges, Q)
    if path_kind == "star":       # p*
        return oracle_closure(p_pairs, nodes) | {(n, n) for n in nodes}
    if path_kind == "plus":       # p+
        return oracle_closure(p_pairs, nodes)
    if path_kind == "seq":        # p/q
        return oracle_compose(p_pairs, q_pairs)
    if path_kind == "alt":        # p|q
        return p_pairs | q_pairs
    if path_kind == "seq_star":   # p/q*
        qc = oracle_closure(q_pairs, nodes) | {(n, n) for n in nodes}
        return oracle_compose(p_pairs, qc)
    if path_kind == "inv":        # ^p
        return {(o, s) for (s, o) in p_pairs}
    raise ValueError(path_kind)


PATHS = {
    "star": PathZeroOrMore(PathLink(P)),
    "plus": PathOneOrMore(PathLink(P)),
    "seq": PathSeq((PathLink(P), PathLink(Q))),
    "alt": PathAlt((PathLink(P), PathLink(Q))),
    "seq_star": PathSeq((PathLink(P), PathZeroOrMore(PathLink(Q)))),
    "inv": PathInverse(PathLink(P)),
}


def test_zero_or_more_from_node_in_empty_graph_is_identity():
    g = Graph()
    start = Iri("urn:lonely")
    assert eval_path(PATHS["star"], start, g) == {start}


def test_one_or_more_terminates_on_cycle():
    g = Graph([Triple(node(0), P, node(1)), Triple(node(1), P, node(0))])
    assert eval_path(PATHS["plus"], node(0), g) == {node(0), node(1)}


def test_backward_direction_inverts():
    g = Graph([Triple(node(0), P, node(1))])
    assert eval_path(PathLink(P), node(1), g, "backward") == {node(0)}
    assert eval_path(PathInverse(PathLink(P)), node(1), g) == {node(0)}


@pytest.mark.parametrize("path_kind", sorted(PATHS))
def test_path_oracle_equivalence_1000_random_graphs(path_kind):
    rng = random.Random(20240 + hash(path_kind) % 1000)
    for _ in range(1000):
        n_nodes = rng.randrange(1, 13)
        n_edges = rng.randrange(0, 2 * n_nodes + 1)
        g, edges = random_graph(rng, n_nodes, n_edges)
        expected_pairs = oracle_eval(path_kind, edges)
        nodes = all_nodes(edges) | {node(0)}
        for start in nodes:
            expected = {e for (s, e) in expected_pairs if s == start}
            if path_kind == "star":
                expected |= {start}
            got = eval_path(PATHS[path_kind], start, g)
            assert got == expected, (path_kind, start, sorted(edges, key=repr))
