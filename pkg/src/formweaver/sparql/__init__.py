"""SPARQL subset: parser, property paths, SELECT/CONSTRUCT evaluation."""
from .ast import (
    Aggregate,
    ConstructQuery,
    GroupPattern,
    OrderCondition,
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
    Var,
)
from .evaluate import (
    EvaluationError,
    ResultTable,
    eval_construct,
    eval_path,
    eval_select,
    evaluate,
)
from .parser import SparqlSyntaxError, UnsupportedFeatureError, parse_sparql

__all__ = [
    "Aggregate", "ConstructQuery", "EvaluationError", "GroupPattern",
    "OrderCondition", "Path", "PathAlt", "PathInverse", "PathLink",
    "PathOneOrMore", "PathSeq", "PathZeroOrMore", "QueryAst", "ResultTable",
    "SelectQuery", "SparqlSyntaxError", "TriplePattern", "UnsupportedFeatureError",
    "Var", "eval_construct", "eval_path", "eval_select", "evaluate", "parse_sparql",
]
