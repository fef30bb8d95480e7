"""Query AST for the supported SPARQL subset."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..rdf import Iri, Term


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


# --- property paths ---------------------------------------------------------

class Path:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class PathLink(Path):
    iri: Iri


@dataclass(frozen=True, slots=True)
class PathInverse(Path):
    inner: Path


@dataclass(frozen=True, slots=True)
class PathSeq(Path):
    parts: tuple[Path, ...]


@dataclass(frozen=True, slots=True)
class PathAlt(Path):
    options: tuple[Path, ...]


@dataclass(frozen=True, slots=True)
class PathZeroOrMore(Path):
    inner: Path


@dataclass(frozen=True, slots=True)
class PathOneOrMore(Path):
    inner: Path


# --- expressions ------------------------------------------------------------

class Expr:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class ExprVar(Expr):
    var: Var


@dataclass(frozen=True, slots=True)
class ExprTerm(Expr):
    term: Term


@dataclass(frozen=True, slots=True)
class ExprCall(Expr):
    func: str                      # CONCAT, STR, IRI, UUID, REGEX, LANG
    args: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class ExprCompare(Expr):
    op: str                        # = != < <= > >=
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class ExprAnd(Expr):
    parts: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class ExprOr(Expr):
    parts: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class ExprNot(Expr):
    inner: Expr


@dataclass(frozen=True, slots=True)
class ExprIn(Expr):
    value: Expr
    options: tuple[Expr, ...]
    negated: bool = False


# --- graph patterns ---------------------------------------------------------

PredicateLike = Union[Iri, Var, Path]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: Union[Term, Var]
    predicate: PredicateLike
    object: Union[Term, Var]


@dataclass(slots=True)
class GroupPattern:
    """Conjunction of pattern elements, evaluated left to right."""
    elements: list = field(default_factory=list)


@dataclass(slots=True)
class OptionalPattern:
    group: GroupPattern


@dataclass(slots=True)
class FilterPattern:
    expr: Expr


@dataclass(slots=True)
class BindPattern:
    expr: Expr
    var: Var


@dataclass(slots=True)
class ValuesPattern:
    var: Var
    terms: list[Term]


@dataclass(slots=True)
class UnionPattern:
    branches: list[GroupPattern]


# --- query forms ------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Aggregate:
    func: str                      # COUNT only
    arg: Optional[Var]             # None means COUNT(*)
    distinct: bool
    alias: Var


@dataclass(slots=True)
class OrderCondition:
    expr: Expr
    ascending: bool = True


@dataclass(slots=True)
class SelectQuery:
    projection: list               # Var | Aggregate; empty means SELECT *
    where: GroupPattern
    distinct: bool = False
    group_by: list[Var] = field(default_factory=list)
    order_by: list[OrderCondition] = field(default_factory=list)
    limit: Optional[int] = None


@dataclass(slots=True)
class ConstructQuery:
    template: list[TriplePattern]
    where: GroupPattern


QueryAst = Union[SelectQuery, ConstructQuery]
