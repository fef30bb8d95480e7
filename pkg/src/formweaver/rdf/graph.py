"""Set-semantics triple container with pattern matching and isomorphism."""
from __future__ import annotations

from collections import defaultdict
from itertools import permutations
from typing import Iterable, Iterator, Optional

from .terms import BlankNode, Iri, PrefixMap, Term, Triple


class Graph:
    """A set of triples plus prefix bindings.

    Insertion of an existing triple is a no-op. Published graphs are treated
    as immutable snapshots by convention; mutate only graphs you own.
    """

    __slots__ = ("_triples", "prefixes", "_by_s", "_by_p", "_by_o")

    def __init__(self, triples: Optional[Iterable[Triple]] = None,
                 prefixes: Optional[PrefixMap] = None):
        self._triples: set[Triple] = set()
        self.prefixes = prefixes.copy() if prefixes else PrefixMap()
        self._by_s: dict[Term, set[Triple]] = defaultdict(set)
        self._by_p: dict[Term, set[Triple]] = defaultdict(set)
        self._by_o: dict[Term, set[Triple]] = defaultdict(set)
        if triples:
            for t in triples:
                self.add(t)

    def add(self, triple: Triple) -> None:
        if triple in self._triples:
            return
        self._triples.add(triple)
        self._by_s[triple.subject].add(triple)
        self._by_p[triple.predicate].add(triple)
        self._by_o[triple.object].add(triple)

    def add_all(self, triples: Iterable[Triple]) -> None:
        for t in triples:
            self.add(t)

    def discard(self, triple: Triple) -> None:
        if triple not in self._triples:
            return
        self._triples.discard(triple)
        self._by_s[triple.subject].discard(triple)
        self._by_p[triple.predicate].discard(triple)
        self._by_o[triple.object].discard(triple)

    def bind(self, prefix: str, namespace: str) -> None:
        self.prefixes.bind(prefix, namespace)

    def match(self, s: Optional[Term] = None, p: Optional[Term] = None,
              o: Optional[Term] = None) -> list[Triple]:
        """All triples matching the pattern; None positions are wildcards.

        Result order is deterministic (sorted by term serialization).
        """
        candidates: Optional[set[Triple]] = None
        for bound, index in ((s, self._by_s), (p, self._by_p), (o, self._by_o)):
            if bound is None:
                continue
            found = index.get(bound, set())
            candidates = found if candidates is None else candidates & found
            if not candidates:
                return []
        if candidates is None:
            candidates = self._triples
        return sorted(candidates, key=Triple.sort_key)

    def objects(self, s: Term, p: Term) -> list[Term]:
        return [t.object for t in self.match(s, p, None)]

    def object(self, s: Term, p: Term) -> Optional[Term]:
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def subjects(self, p: Term, o: Term) -> list[Term]:
        return [t.subject for t in self.match(None, p, o)]

    def copy(self) -> "Graph":
        return Graph(self._triples, self.prefixes)

    def union(self, other: "Graph") -> "Graph":
        g = self.copy()
        g.add_all(other)
        for prefix, ns in other.prefixes.bindings.items():
            g.prefixes.bindings.setdefault(prefix, ns)
        return g

    def terms(self) -> set[Term]:
        """All subject and object terms (path-evaluation node domain)."""
        nodes: set[Term] = set()
        for t in self._triples:
            nodes.add(t.subject)
            nodes.add(t.object)
        return nodes

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=Triple.sort_key))

    def __repr__(self) -> str:
        return f"<Graph {len(self)} triples, {len(self.prefixes)} prefixes>"


def match(graph: Graph, s: Optional[Term] = None, p: Optional[Term] = None,
          o: Optional[Term] = None) -> list[Triple]:
    return graph.match(s, p, o)


# --- graph isomorphism (test-scale: small blank-node counts) ---------------

def _ground(term: Term) -> bool:
    return not isinstance(term, BlankNode)


def _signature(graph: Graph, colors: dict[BlankNode, str]) -> dict[BlankNode, str]:
    """One refinement round: color each bnode by its ground neighborhood."""
    sigs: dict[BlankNode, list[str]] = {b: [] for b in colors}
    for t in graph:
        for pos, term in (("s", t.subject), ("o", t.object)):
            if isinstance(term, BlankNode):
                other = t.object if pos == "s" else t.subject
                other_repr = colors[other] if isinstance(other, BlankNode) else repr(other)
                sigs[term].append(f"{pos}|{t.predicate.value}|{other_repr}")
    return {b: colors[b] + "§" + "·".join(sorted(parts)) for b, parts in sigs.items()}


def isomorphic(g1: Graph, g2: Graph, max_backtrack_nodes: int = 12) -> bool:
    """Blank-node-bijection graph equality.

    Iterative color refinement, then brute-force matching within surviving
    color classes. Intended for fixtures; refuses to brute-force more than
    `max_backtrack_nodes` bnodes sharing one color.
    """
    if len(g1) != len(g2):
        return False
    b1 = {t for term in g1.terms() if isinstance(term, BlankNode) for t in [term]}
    b2 = {t for term in g2.terms() if isinstance(term, BlankNode) for t in [term]}
    if len(b1) != len(b2):
        return False
    ground1 = {t for t in g1 if _ground(t.subject) and _ground(t.object)}
    ground2 = {t for t in g2 if _ground(t.subject) and _ground(t.object)}
    if ground1 != ground2:
        return False
    if not b1:
        return True

    colors1 = {b: "" for b in b1}
    colors2 = {b: "" for b in b2}
    for _ in range(len(b1) + 1):
        new1, new2 = _signature(g1, colors1), _signature(g2, colors2)
        if sorted(new1.values()) != sorted(new2.values()):
            return False
        if new1 == colors1 and new2 == colors2:
            break
        colors1, colors2 = new1, new2

    classes1: dict[str, list[BlankNode]] = defaultdict(list)
    classes2: dict[str, list[BlankNode]] = defaultdict(list)
    for b, c in colors1.items():
        classes1[c].append(b)
    for b, c in colors2.items():
        classes2[c].append(b)

    mapping: dict[BlankNode, BlankNode] = {}
    class_list = sorted(classes1.items(), key=lambda kv: kv[0])

    def substitute(t: Triple, m: dict[BlankNode, BlankNode]) -> Triple:
        def sub(x: Term) -> Term:
            return m.get(x, x) if isinstance(x, BlankNode) else x
        return Triple(sub(t.subject), t.predicate, sub(t.object))

    def assign(idx: int) -> bool:
        if idx == len(class_list):
            return all(substitute(t, mapping) in g2 for t in g1)
        color, members = class_list[idx]
        targets = classes2[color]
        if len(members) != len(targets):
            return False
        if len(members) > max_backtrack_nodes:
            raise ValueError(f"isomorphism check too large: {len(members)} bnodes in one class")
        for perm in permutations(targets):
            for a, b in zip(members, perm):
                mapping[a] = b
            if assign(idx + 1):
                return True
        for a in members:
            mapping.pop(a, None)
        return False

    return assign(0)
