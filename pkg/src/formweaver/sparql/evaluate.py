"""Evaluation of the SPARQL subset over an immutable Graph snapshot.

Solutions are dicts mapping variable names to terms. Joins run left to
right with binding substitution; paths follow SPARQL 1.1 semantics with
visited-set termination on cycles. Expression errors eliminate rows
(FILTER) or leave the target unbound (BIND), per SPARQL error semantics.
"""
from __future__ import annotations

import uuid
from fractions import Fraction
from typing import Iterable, Optional, Union

from ..rdf import (
    RDF_LANGSTRING,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
)
from .ast import (
    Aggregate,
    BindPattern,
    ConstructQuery,
    Expr,
    ExprAnd,
    ExprCall,
    ExprCompare,
    ExprIn,
    ExprNot,
    ExprOr,
    ExprTerm,
    ExprVar,
    FilterPattern,
    GroupPattern,
    OptionalPattern,
    Path,
    PathAlt,
    PathInverse,
    PathLink,
    PathOneOrMore,
    PathSeq,
    PathZeroOrMore,
    QueryAst,
    SelectQuery,
    TriplePattern,
    UnionPattern,
    ValuesPattern,
    Var,
)

Solution = dict[str, Term]

_NUMERIC = {XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE,
            "http://www.w3.org/2001/XMLSchema#float",
            "http://www.w3.org/2001/XMLSchema#long",
            "http://www.w3.org/2001/XMLSchema#int",
            "http://www.w3.org/2001/XMLSchema#nonNegativeInteger",
            "http://www.w3.org/2001/XMLSchema#positiveInteger"}


class EvaluationError(Exception):
    """Raised for malformed queries at evaluation time (bad aggregates)."""


class _ExprError(Exception):
    """Internal: SPARQL expression error; handled per error semantics."""


# --- property paths ---------------------------------------------------------

def _step(path: Path, node: Term, graph: Graph, forward: bool) -> set[Term]:
    if isinstance(path, PathLink):
        if forward:
            return {t.object for t in graph.match(node, path.iri, None)}
        return {t.subject for t in graph.match(None, path.iri, node)}
    if isinstance(path, PathInverse):
        return _step(path.inner, node, graph, not forward)
    if isinstance(path, PathSeq):
        parts = path.parts if forward else tuple(reversed(path.parts))
        frontier = {node}
        for part in parts:
            nxt: set[Term] = set()
            for n in frontier:
                nxt |= _step(part, n, graph, forward)
            frontier = nxt
            if not frontier:
                break
        return frontier
    if isinstance(path, PathAlt):
        out: set[Term] = set()
        for option in path.options:
            out |= _step(option, node, graph, forward)
        return out
    if isinstance(path, PathZeroOrMore):
        return _closure(path.inner, node, graph, forward, include_start=True)
    if isinstance(path, PathOneOrMore):
        return _closure(path.inner, node, graph, forward, include_start=False)
    raise TypeError(f"unknown path type: {path!r}")


def _closure(inner: Path, start: Term, graph: Graph, forward: bool,
             include_start: bool) -> set[Term]:
    visited: set[Term] = set()
    frontier = {start} if include_start else _step(inner, start, graph, forward)
    while frontier:
        visited |= frontier
        nxt: set[Term] = set()
        for n in frontier:
            nxt |= _step(inner, n, graph, forward)
        frontier = nxt - visited
    return visited


def eval_path(path: Path, start: Term, graph: Graph,
              direction: str = "forward") -> set[Term]:
    """Set of terms reachable from start via the path (SPARQL 1.1 semantics).

    ZeroOrMore includes the start node itself; cyclic graphs terminate.
    """
    return _step(path, start, graph, direction == "forward")


def _path_pairs(path: Path, graph: Graph) -> Iterable[tuple[Term, Term]]:
    """All (start, end) pairs when both endpoints are unbound."""
    for node in sorted(graph.terms(), key=lambda t: t.sort_key()):
        for end in sorted(eval_path(path, node, graph), key=lambda t: t.sort_key()):
            yield node, end


# --- basic graph patterns ---------------------------------------------------

def _resolve(x: Union[Term, Var], sol: Solution) -> Optional[Term]:
    if isinstance(x, Var):
        return sol.get(x.name)
    return x


def _bind_if_var(x: Union[Term, Var], value: Term, sol: Solution) -> Optional[Solution]:
    if isinstance(x, Var):
        current = sol.get(x.name)
        if current is None:
            out = dict(sol)
            out[x.name] = value
            return out
        return sol if current == value else None
    return sol if x == value else None


def _eval_triple(tp: TriplePattern, graph: Graph, sol: Solution) -> list[Solution]:
    s = _resolve(tp.subject, sol)
    o = _resolve(tp.object, sol)
    out: list[Solution] = []

    if isinstance(tp.predicate, (Iri, Var)):
        p = _resolve(tp.predicate, sol) if isinstance(tp.predicate, Var) else tp.predicate
        for t in graph.match(s, p, o):
            row: Optional[Solution] = sol
            for pat, val in ((tp.subject, t.subject), (tp.predicate, t.predicate),
                             (tp.object, t.object)):
                row = _bind_if_var(pat, val, row)
                if row is None:
                    break
            if row is not None:
                out.append(row)
        return out

    path = tp.predicate
    if s is not None:
        targets = eval_path(path, s, graph, "forward")
        if o is not None:
            return [sol] if o in targets else []
        for target in sorted(targets, key=lambda t: t.sort_key()):
            row = _bind_if_var(tp.object, target, sol)
            if row is not None:
                out.append(row)
        return out
    if o is not None:
        sources = eval_path(path, o, graph, "backward")
        for source in sorted(sources, key=lambda t: t.sort_key()):
            row = _bind_if_var(tp.subject, source, sol)
            if row is not None:
                out.append(row)
        return out
    for start, end in _path_pairs(path, graph):
        row = _bind_if_var(tp.subject, start, sol)
        if row is None:
            continue
        row = _bind_if_var(tp.object, end, row)
        if row is not None:
            out.append(row)
    return out


def _eval_group(group: GroupPattern, graph: Graph,
                rows: list[Solution]) -> list[Solution]:
    for element in group.elements:
        if isinstance(element, TriplePattern):
            rows = [m for row in rows for m in _eval_triple(element, graph, row)]
        elif isinstance(element, OptionalPattern):
            nxt: list[Solution] = []
            for row in rows:
                extended = _eval_group(element.group, graph, [row])
                nxt.extend(extended if extended else [row])
            rows = nxt
        elif isinstance(element, FilterPattern):
            kept = []
            for row in rows:
                try:
                    if _ebv(_eval_expr(element.expr, row)):
                        kept.append(row)
                except _ExprError:
                    pass
            rows = kept
        elif isinstance(element, BindPattern):
            nxt = []
            for row in rows:
                try:
                    value = _eval_expr(element.expr, row)
                    merged = dict(row)
                    merged[element.var.name] = value
                    nxt.append(merged)
                except _ExprError:
                    nxt.append(row)  # error -> var stays unbound
            rows = nxt
        elif isinstance(element, ValuesPattern):
            nxt = []
            for row in rows:
                bound = row.get(element.var.name)
                if bound is not None:
                    if bound in element.terms:
                        nxt.append(row)
                else:
                    for term in element.terms:
                        merged = dict(row)
                        merged[element.var.name] = term
                        nxt.append(merged)
            rows = nxt
        elif isinstance(element, UnionPattern):
            nxt = []
            for row in rows:
                for branch in element.branches:
                    nxt.extend(_eval_group(branch, graph, [row]))
            rows = nxt
        else:
            raise TypeError(f"unknown pattern element: {element!r}")
        if not rows:
            return []
    return rows


# --- expressions ------------------------------------------------------------

def _numeric(lit: Literal) -> Fraction:
    try:
        if lit.datatype == XSD_DOUBLE or "e" in lit.lexical or "E" in lit.lexical:
            return Fraction(float(lit.lexical))
        return Fraction(lit.lexical)
    except (ValueError, ZeroDivisionError) as exc:
        raise _ExprError(str(exc)) from exc


def _is_numeric(term: Term) -> bool:
    return isinstance(term, Literal) and term.datatype in _NUMERIC


def _ebv(term: Term) -> bool:
    if isinstance(term, Literal):
        if term.datatype == XSD_BOOLEAN:
            return term.lexical == "true"
        if _is_numeric(term):
            return _numeric(term) != 0
        if term.datatype in (XSD_STRING, RDF_LANGSTRING):
            return len(term.lexical) > 0
    raise _ExprError(f"no effective boolean value for {term!r}")


def _string_value(term: Term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, Iri):
        return term.value
    raise _ExprError(f"no string form for {term!r}")


def _compare(op: str, left: Term, right: Term) -> bool:
    if _is_numeric(left) and _is_numeric(right):
        a, b = _numeric(left), _numeric(right)
    elif (isinstance(left, Literal) and isinstance(right, Literal)
          and left.datatype == right.datatype and left.language == right.language):
        a, b = left.lexical, right.lexical
    elif op in ("=", "!="):
        return (left == right) if op == "=" else (left != right)
    else:
        raise _ExprError(f"incomparable terms: {left!r} vs {right!r}")
    return {"=": a == b, "!=": a != b, "<": a < b,
            "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _eval_expr(expr: Expr, sol: Solution) -> Term:
    if isinstance(expr, ExprVar):
        value = sol.get(expr.var.name)
        if value is None:
            raise _ExprError(f"unbound variable ?{expr.var.name}")
        return value
    if isinstance(expr, ExprTerm):
        return expr.term
    if isinstance(expr, ExprNot):
        return _bool(not _ebv(_eval_expr(expr.inner, sol)))
    if isinstance(expr, ExprAnd):
        return _bool(all(_ebv(_eval_expr(p, sol)) for p in expr.parts))
    if isinstance(expr, ExprOr):
        return _bool(any(_ebv(_eval_expr(p, sol)) for p in expr.parts))
    if isinstance(expr, ExprCompare):
        return _bool(_compare(expr.op, _eval_expr(expr.left, sol),
                              _eval_expr(expr.right, sol)))
    if isinstance(expr, ExprIn):
        value = _eval_expr(expr.value, sol)
        hit = any(_compare("=", value, _eval_expr(o, sol)) for o in expr.options)
        return _bool(hit != expr.negated)
    if isinstance(expr, ExprCall):
        return _eval_call(expr, sol)
    raise TypeError(f"unknown expression: {expr!r}")


def _bool(value: bool) -> Literal:
    return Literal("true" if value else "false", XSD_BOOLEAN)


def _eval_call(call: ExprCall, sol: Solution) -> Term:
    args = [_eval_expr(a, sol) for a in call.args]
    if call.func == "CONCAT":
        return Literal("".join(_string_value(a) for a in args))
    if call.func == "STR":
        return Literal(_string_value(args[0]))
    if call.func == "IRI":
        try:
            return Iri(_string_value(args[0]))
        except ValueError as exc:
            raise _ExprError(str(exc)) from exc
    if call.func == "UUID":
        return Iri(f"urn:uuid:{uuid.uuid4()}")
    if call.func == "LANG":
        arg = args[0]
        if not isinstance(arg, Literal):
            raise _ExprError("LANG expects a literal")
        return Literal(arg.language or "")
    if call.func == "REGEX":
        import re as _re
        text = _string_value(args[0])
        pattern = _string_value(args[1])
        flags = _re.IGNORECASE if (len(args) > 2 and "i" in _string_value(args[2])) else 0
        try:
            return _bool(bool(_re.search(pattern, text, flags)))
        except _re.error as exc:
            raise _ExprError(str(exc)) from exc
    raise _ExprError(f"unknown function {call.func}")


# --- result tables ----------------------------------------------------------

class ResultTable:
    """Tabular SELECT result: ordered variables, rows of optional terms."""

    def __init__(self, variables: list[str], rows: list[dict[str, Optional[Term]]]):
        self.variables = variables
        self.rows = rows

    def column(self, var: str) -> list[Optional[Term]]:
        return [row.get(var) for row in self.rows]

    def to_json_dict(self) -> dict:
        def cell(term: Optional[Term]) -> Optional[dict]:
            if term is None:
                return None
            if isinstance(term, Iri):
                return {"type": "iri", "value": term.value}
            if isinstance(term, BlankNode):
                return {"type": "bnode", "value": term.local_id}
            out = {"type": "literal", "value": term.lexical, "datatype": term.datatype}
            if term.language:
                out["lang"] = term.language
            return out
        return {"variables": self.variables,
                "rows": [{v: cell(r.get(v)) for v in self.variables} for r in self.rows]}

    def to_csv(self) -> str:
        import csv
        import io
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(self.variables)
        for row in self.rows:
            writer.writerow([_plain(row.get(v)) for v in self.variables])
        return buf.getvalue()

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return f"<ResultTable {self.variables} ({len(self.rows)} rows)>"


def _plain(term: Optional[Term]) -> str:
    if term is None:
        return ""
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, Iri):
        return term.value
    return f"_:{term.local_id}"


# --- SELECT / CONSTRUCT -----------------------------------------------------

def _order_key(term: Optional[Term]):
    if term is None:
        return (0,)
    if isinstance(term, BlankNode):
        return (1, term.local_id)
    if isinstance(term, Iri):
        return (2, term.value)
    if _is_numeric(term):
        try:
            return (3, 0, _numeric(term))
        except _ExprError:
            pass
    return (3, 1, term.lexical, term.datatype, term.language or "")


def _sort_solutions(rows: list[Solution], order_by, distinct_serial=False):
    def key(row: Solution):
        return tuple(
            _order_key(_try_expr(cond.expr, row)) for cond in order_by
        )
    # stable multi-key sort honoring per-condition direction
    for cond_index in range(len(order_by) - 1, -1, -1):
        cond = order_by[cond_index]
        rows.sort(key=lambda r: _order_key(_try_expr(cond.expr, r)),
                  reverse=not cond.ascending)
    return rows


def _try_expr(expr: Expr, row: Solution) -> Optional[Term]:
    try:
        return _eval_expr(expr, row)
    except _ExprError:
        return None


def _serialize_row(row: dict[str, Optional[Term]], variables: list[str]) -> tuple:
    return tuple(repr(row.get(v)) for v in variables)


def eval_select(query: SelectQuery, graph: Graph,
                bindings: Optional[Solution] = None) -> ResultTable:
    """Evaluate a SELECT query; `bindings` pre-binds variables ($this etc.)."""
    solutions = _eval_group(query.where, graph, [dict(bindings or {})])

    aggregates = [p for p in query.projection if isinstance(p, Aggregate)]
    plain_vars = [p for p in query.projection if isinstance(p, Var)]

    if aggregates or query.group_by:
        if any(v not in query.group_by for v in plain_vars):
            raise EvaluationError(
                "non-aggregate projection variables must appear in GROUP BY")
        groups: dict[tuple, list[Solution]] = {}
        for row in solutions:
            key = tuple(repr(row.get(v.name)) for v in query.group_by)
            groups.setdefault(key, []).append(row)
        if not query.group_by and not groups:
            groups[()] = []
        solutions = []
        for rows_in_group in groups.values():
            out: Solution = {}
            if rows_in_group:
                for v in query.group_by:
                    if rows_in_group[0].get(v.name) is not None:
                        out[v.name] = rows_in_group[0][v.name]
            for agg in aggregates:
                if agg.func != "COUNT":
                    raise EvaluationError(f"unsupported aggregate {agg.func}")
                if agg.arg is None:
                    count = len(rows_in_group)
                else:
                    vals = [r.get(agg.arg.name) for r in rows_in_group
                            if r.get(agg.arg.name) is not None]
                    count = len(set(vals)) if agg.distinct else len(vals)
                out[agg.alias.name] = Literal(str(count), XSD_INTEGER)
            solutions.append(out)

    if query.order_by:
        solutions = _sort_solutions(solutions, query.order_by)

    if query.projection:
        variables = [p.name if isinstance(p, Var) else p.alias.name
                     for p in query.projection]
    else:
        seen: list[str] = []
        for row in solutions:
            for name in row:
                if name not in seen:
                    seen.append(name)
        variables = sorted(seen)

    projected: list[dict[str, Optional[Term]]] = [
        {v: row.get(v) for v in variables} for row in solutions]

    if query.distinct:
        seen_rows: set[tuple] = set()
        deduped = []
        for row in projected:
            key = _serialize_row(row, variables)
            if key not in seen_rows:
                seen_rows.add(key)
                deduped.append(row)
        projected = deduped

    if not query.order_by:
        projected.sort(key=lambda r: _serialize_row(r, variables))

    if query.limit is not None:
        projected = projected[:query.limit]

    return ResultTable(variables, projected)


def eval_construct(query: ConstructQuery, graph: Graph,
                   bindings: Optional[Solution] = None) -> Graph:
    """Instantiate the template once per solution; duplicates collapse."""
    solutions = _eval_group(query.where, graph, [dict(bindings or {})])
    out = Graph(prefixes=graph.prefixes)
    for i, row in enumerate(solutions):
        bnode_map: dict[str, BlankNode] = {}

        def materialize(x, row=row, bnode_map=bnode_map, i=i):
            if isinstance(x, Var):
                return row.get(x.name)
            if isinstance(x, BlankNode):
                key = x.local_id
                if key not in bnode_map:
                    bnode_map[key] = BlankNode(f"c{i}_{key}")
                return bnode_map[key]
            return x
        for tp in query.template:
            s = materialize(tp.subject)
            p = materialize(tp.predicate)
            o = materialize(tp.object)
            if s is None or p is None or o is None:
                continue  # unbound template variable: skip this triple
            if isinstance(s, Literal) or not isinstance(p, Iri):
                continue
            out.add(Triple(s, p, o))
    return out


def evaluate(query: QueryAst, graph: Graph,
             bindings: Optional[Solution] = None) -> Union[ResultTable, Graph]:
    if isinstance(query, SelectQuery):
        return eval_select(query, graph, bindings)
    return eval_construct(query, graph, bindings)
