"""Recursive-descent parser for the supported SPARQL subset.

Grammar: SELECT (DISTINCT, COUNT with GROUP BY, ORDER BY, LIMIT) and
CONSTRUCT; WHERE with basic graph patterns, property paths (/ | ^ * +),
OPTIONAL, FILTER, BIND, VALUES, UNION; functions CONCAT, STR, IRI, UUID,
REGEX, LANG. Anything else raises UnsupportedFeatureError by name.
"""
from __future__ import annotations

from typing import Optional, Union

from ..rdf import (
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    RDF_LANGSTRING,
    Iri,
    Literal,
    PrefixMap,
    Term,
    UnknownPrefixError,
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
    UnionPattern,
    ValuesPattern,
    Var,
)

_UNSUPPORTED = {"SERVICE", "GRAPH", "MINUS", "EXISTS", "ASK", "DESCRIBE",
                "INSERT", "DELETE", "OFFSET", "HAVING", "SAMPLE", "SUM",
                "AVG", "MIN", "MAX", "GROUP_CONCAT", "REDUCED", "NOT"}

_FUNCTIONS = {"CONCAT", "STR", "IRI", "UUID", "REGEX", "LANG"}


class SparqlSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int, column: int, token: str = ""):
        shown = f" near {token!r}" if token else ""
        super().__init__(f"{message} at line {line}, column {column}{shown}")
        self.line = line
        self.column = column


class UnsupportedFeatureError(Exception):
    def __init__(self, feature: str):
        super().__init__(f"unsupported SPARQL feature: {feature}")
        self.feature = feature


# --- tokenizer --------------------------------------------------------------

_PUNCT2 = ("^^", "&&", "||", "!=", "<=", ">=")
_PUNCT1 = set("{}().,;*+/|^=<>!")
_WORD_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-")
_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "'": "'", "\\": "\\"}


class _Tok:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind, self.value, self.line, self.col = kind, value, line, col

    def __repr__(self):
        return f"{self.kind}({self.value!r})"


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, col = 0, 1, 1
    n = len(text)

    def err(msg: str) -> SparqlSyntaxError:
        return SparqlSyntaxError(msg, line, col)

    def advance(k: int = 1) -> str:
        nonlocal pos, line, col
        chunk = text[pos:pos + k]
        for ch in chunk:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos += k
        return chunk

    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                advance()
            continue
        l0, c0 = line, col
        if ch == "<":
            # IRIREF only if it looks like one; otherwise comparison operator
            end = text.find(">", pos + 1)
            segment = text[pos + 1:end] if end != -1 else ""
            if end != -1 and not any(c in segment for c in " \t\n<"):
                advance(end - pos + 1)
                toks.append(_Tok("IRIREF", segment, l0, c0))
                continue
        if ch in "?$":
            advance()
            start = pos
            while pos < n and text[pos] in _WORD_CHARS:
                advance()
            if pos == start:
                toks.append(_Tok("?", "?", l0, c0))  # bare '?' = zero-or-one path op
            else:
                toks.append(_Tok("VAR", text[start:pos], l0, c0))
            continue
        if ch in "\"'":
            quote = ch
            long = text[pos:pos + 3] == quote * 3
            advance(3 if long else 1)
            out = []
            while True:
                if pos >= n:
                    raise err("unterminated string")
                if long and text[pos:pos + 3] == quote * 3:
                    advance(3)
                    break
                c = advance()
                if not long and c == quote:
                    break
                if not long and c == "\n":
                    raise err("newline in string")
                if c == "\\":
                    e = advance()
                    if e in _ESCAPES:
                        out.append(_ESCAPES[e])
                    elif e == "u":
                        out.append(chr(int(advance(4), 16)))
                    else:
                        raise err(f"bad escape \\{e}")
                else:
                    out.append(c)
            toks.append(_Tok("STRING", "".join(out), l0, c0))
            continue
        if ch == "@":
            advance()
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "-"):
                advance()
            toks.append(_Tok("LANGTAG", text[start:pos], l0, c0))
            continue
        if text[pos:pos + 2] in _PUNCT2:
            toks.append(_Tok(text[pos:pos + 2], advance(2), l0, c0))
            continue
        if ch.isdigit() or (ch in "+-" and pos + 1 < n and
                            (text[pos + 1].isdigit() or text[pos + 1] == ".")):
            start = pos
            if ch in "+-":
                advance()
            while pos < n and text[pos].isdigit():
                advance()
            kind = "INTEGER"
            if pos < n and text[pos] == "." and pos + 1 < n and text[pos + 1].isdigit():
                kind = "DECIMAL"
                advance()
                while pos < n and text[pos].isdigit():
                    advance()
            if pos < n and text[pos] in "eE":
                kind = "DOUBLE"
                advance()
                if pos < n and text[pos] in "+-":
                    advance()
                while pos < n and text[pos].isdigit():
                    advance()
            toks.append(_Tok(kind, text[start:pos], l0, c0))
            continue
        if ch in _PUNCT1:
            toks.append(_Tok(ch, advance(), l0, c0))
            continue
        if ch == "_" and text[pos:pos + 2] == "_:":
            raise err("blank node labels are not allowed in queries here")
        # word: keyword, 'a', pname, or prefixed name with colon
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos] in _WORD_CHARS or text[pos] == "."):
                # trailing dot belongs to triple termination, not the word
                if text[pos] == "." and (pos + 1 >= n or text[pos + 1] not in _WORD_CHARS):
                    break
                advance()
            word = text[start:pos]
            if pos < n and text[pos] == ":":
                advance()
                lstart = pos
                while pos < n and (text[pos] in _WORD_CHARS or
                                   (text[pos] == "." and pos + 1 < n and text[pos + 1] in _WORD_CHARS)):
                    advance()
                toks.append(_Tok("PNAME", f"{word}:{text[lstart:pos]}", l0, c0))
            else:
                toks.append(_Tok("WORD", word, l0, c0))
            continue
        if ch == ":":
            advance()
            lstart = pos
            while pos < n and text[pos] in _WORD_CHARS:
                advance()
            toks.append(_Tok("PNAME", f":{text[lstart:pos]}", l0, c0))
            continue
        raise err(f"unexpected character {ch!r}")
    toks.append(_Tok("EOF", "", line, col))
    return toks


# --- parser -----------------------------------------------------------------

class _QueryParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes = PrefixMap()

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def err(self, msg: str, tok: Optional[_Tok] = None) -> SparqlSyntaxError:
        tok = tok or self.peek()
        return SparqlSyntaxError(msg, tok.line, tok.col, tok.value)

    def expect(self, kind: str) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise self.err(f"expected {kind}", t)
        return t

    def at_word(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "WORD" and t.value.upper() in words

    def take_word(self, *words: str) -> bool:
        if self.at_word(*words):
            self.next()
            return True
        return False

    def check_unsupported(self) -> None:
        t = self.peek()
        if t.kind == "WORD" and t.value.upper() in _UNSUPPORTED:
            raise UnsupportedFeatureError(t.value.upper())

    # prologue

    def parse(self) -> QueryAst:
        while self.at_word("PREFIX", "BASE"):
            kw = self.next().value.upper()
            if kw == "PREFIX":
                pn = self.expect("PNAME")
                iri = self.expect("IRIREF")
                self.prefixes.bind(pn.value[:-1] if pn.value.endswith(":") else
                                   pn.value.rsplit(":", 1)[0], iri.value)
            else:
                self.expect("IRIREF")  # accepted, queries here use absolute IRIs
        self.check_unsupported()
        if self.take_word("SELECT"):
            return self.parse_select()
        if self.take_word("CONSTRUCT"):
            return self.parse_construct()
        raise self.err("expected SELECT or CONSTRUCT")

    # SELECT

    def parse_select(self) -> SelectQuery:
        q = SelectQuery(projection=[], where=GroupPattern())
        if self.take_word("DISTINCT"):
            q.distinct = True
        if self.peek().kind == "*":
            self.next()
        else:
            while True:
                t = self.peek()
                if t.kind == "VAR":
                    q.projection.append(Var(self.next().value))
                elif t.kind == "(":
                    q.projection.append(self.parse_projection_alias())
                else:
                    break
            if not q.projection:
                raise self.err("empty SELECT projection")
        if self.take_word("WHERE") or self.peek().kind == "{":
            q.where = self.parse_group()
        else:
            raise self.err("expected WHERE clause")
        while True:
            if self.take_word("GROUP"):
                if not self.take_word("BY"):
                    raise self.err("expected BY after GROUP")
                while self.peek().kind == "VAR":
                    q.group_by.append(Var(self.next().value))
                if not q.group_by:
                    raise self.err("GROUP BY needs at least one variable")
            elif self.take_word("ORDER"):
                if not self.take_word("BY"):
                    raise self.err("expected BY after ORDER")
                q.order_by = self.parse_order_conditions()
            elif self.take_word("LIMIT"):
                q.limit = int(self.expect("INTEGER").value)
            else:
                break
        self.check_unsupported()
        self.expect("EOF")
        return q

    def parse_projection_alias(self) -> Aggregate:
        self.expect("(")
        t = self.peek()
        if t.kind == "WORD" and t.value.upper() == "COUNT":
            self.next()
            self.expect("(")
            distinct = self.take_word("DISTINCT")
            if self.peek().kind == "*":
                self.next()
                arg = None
            else:
                arg = Var(self.expect("VAR").value)
            self.expect(")")
            if not self.take_word("AS"):
                raise self.err("expected AS in aggregate projection")
            alias = Var(self.expect("VAR").value)
            self.expect(")")
            return Aggregate("COUNT", arg, distinct, alias)
        if t.kind == "WORD" and t.value.upper() in _UNSUPPORTED | {"SUM", "AVG"}:
            raise UnsupportedFeatureError(t.value.upper())
        raise self.err("only COUNT aggregates are supported in projections", t)

    def parse_order_conditions(self) -> list[OrderCondition]:
        conds: list[OrderCondition] = []
        while True:
            t = self.peek()
            if t.kind == "WORD" and t.value.upper() in ("ASC", "DESC"):
                self.next()
                asc = t.value.upper() == "ASC"
                self.expect("(")
                expr = self.parse_expr()
                self.expect(")")
                conds.append(OrderCondition(expr, asc))
            elif t.kind == "VAR":
                conds.append(OrderCondition(ExprVar(Var(self.next().value)), True))
            else:
                break
        if not conds:
            raise self.err("ORDER BY needs at least one condition")
        return conds

    # CONSTRUCT

    def parse_construct(self) -> ConstructQuery:
        self.expect("{")
        template: list[TriplePattern] = []
        while self.peek().kind != "}":
            template.extend(self.parse_triples_same_subject(paths_allowed=False))
            if self.peek().kind == ".":
                self.next()
        self.expect("}")
        if not self.take_word("WHERE"):
            raise self.err("expected WHERE after CONSTRUCT template")
        where = self.parse_group()
        self.expect("EOF")
        return ConstructQuery(template, where)

    # graph patterns

    def parse_group(self) -> GroupPattern:
        self.expect("{")
        group = GroupPattern()
        while True:
            t = self.peek()
            if t.kind == "}":
                self.next()
                return group
            if t.kind == "EOF":
                raise self.err("unterminated group pattern")
            if t.kind == ".":
                self.next()
                continue
            self.check_unsupported()
            if t.kind == "{":
                group.elements.append(self.parse_union_or_group())
                continue
            if self.at_word("OPTIONAL"):
                self.next()
                group.elements.append(OptionalPattern(self.parse_group()))
                continue
            if self.at_word("FILTER"):
                self.next()
                if self.at_word("NOT", "EXISTS"):
                    raise UnsupportedFeatureError("NOT EXISTS")
                self.expect("(")
                expr = self.parse_expr()
                self.expect(")")
                group.elements.append(FilterPattern(expr))
                continue
            if self.at_word("BIND"):
                self.next()
                self.expect("(")
                expr = self.parse_expr()
                if not self.take_word("AS"):
                    raise self.err("expected AS in BIND")
                var = Var(self.expect("VAR").value)
                self.expect(")")
                group.elements.append(BindPattern(expr, var))
                continue
            if self.at_word("VALUES"):
                self.next()
                var = Var(self.expect("VAR").value)
                self.expect("{")
                terms: list[Term] = []
                while self.peek().kind != "}":
                    terms.append(self.parse_term_strict())
                self.next()
                group.elements.append(ValuesPattern(var, terms))
                continue
            if self.at_word("SELECT"):
                raise UnsupportedFeatureError("subquery")
            group.elements.extend(self.parse_triples_same_subject(paths_allowed=True))
            if self.peek().kind == ".":
                self.next()

    def parse_union_or_group(self) -> object:
        branches = [self.parse_group()]
        while self.at_word("UNION"):
            self.next()
            branches.append(self.parse_group())
        if len(branches) == 1:
            return UnionPattern(branches)  # grouping braces: single branch union
        return UnionPattern(branches)

    def parse_triples_same_subject(self, paths_allowed: bool) -> list[TriplePattern]:
        subject = self.parse_term_or_var()
        if isinstance(subject, Literal):
            raise self.err("literal subject in pattern")
        out: list[TriplePattern] = []
        while True:
            predicate = self.parse_predicate(paths_allowed)
            while True:
                obj = self.parse_term_or_var()
                out.append(TriplePattern(subject, predicate, obj))
                if self.peek().kind == ",":
                    self.next()
                    continue
                break
            if self.peek().kind == ";":
                while self.peek().kind == ";":
                    self.next()
                if self.peek().kind in (".", "}"):
                    break
                continue
            break
        return out

    def parse_predicate(self, paths_allowed: bool):
        t = self.peek()
        if t.kind == "VAR":
            self.next()
            return Var(t.value)
        if not paths_allowed:
            term = self.parse_iri_or_a()
            return term
        path = self.parse_path_alt()
        if isinstance(path, PathLink):
            return path.iri
        return path

    # property paths (precedence: | lowest, then /, then unary ^ and postfix * +)

    def parse_path_alt(self) -> Path:
        parts = [self.parse_path_seq()]
        while self.peek().kind == "|":
            self.next()
            parts.append(self.parse_path_seq())
        return parts[0] if len(parts) == 1 else PathAlt(tuple(parts))

    def parse_path_seq(self) -> Path:
        parts = [self.parse_path_elt()]
        while self.peek().kind == "/":
            self.next()
            parts.append(self.parse_path_elt())
        return parts[0] if len(parts) == 1 else PathSeq(tuple(parts))

    def parse_path_elt(self) -> Path:
        inverse = False
        if self.peek().kind == "^":
            self.next()
            inverse = True
        if self.peek().kind == "(":
            self.next()
            primary: Path = self.parse_path_alt()
            self.expect(")")
        else:
            primary = PathLink(self.parse_iri_or_a())
        t = self.peek()
        if t.kind == "*":
            self.next()
            primary = PathZeroOrMore(primary)
        elif t.kind == "+":
            self.next()
            primary = PathOneOrMore(primary)
        elif t.kind == "?":
            raise UnsupportedFeatureError("zero-or-one path (?)")
        if inverse:
            primary = PathInverse(primary)
        return primary

    # terms

    def parse_iri_or_a(self) -> Iri:
        t = self.next()
        if t.kind == "WORD" and t.value == "a":
            return Iri(RDF_TYPE)
        if t.kind == "IRIREF":
            return Iri(t.value)
        if t.kind == "PNAME":
            return self.expand(t)
        raise self.err("expected IRI", t)

    def expand(self, tok: _Tok) -> Iri:
        try:
            return self.prefixes.expand(tok.value)
        except UnknownPrefixError as exc:
            raise SparqlSyntaxError(str(exc), tok.line, tok.col, tok.value) from exc

    def parse_term_or_var(self) -> Union[Term, Var]:
        t = self.peek()
        if t.kind == "VAR":
            self.next()
            return Var(t.value)
        return self.parse_term_strict()

    def parse_term_strict(self) -> Term:
        t = self.next()
        if t.kind == "IRIREF":
            return Iri(t.value)
        if t.kind == "PNAME":
            return self.expand(t)
        if t.kind == "WORD" and t.value == "a":
            return Iri(RDF_TYPE)
        if t.kind == "WORD" and t.value in ("true", "false"):
            return Literal(t.value, XSD_BOOLEAN)
        if t.kind == "STRING":
            nxt = self.peek()
            if nxt.kind == "LANGTAG":
                self.next()
                return Literal(t.value, RDF_LANGSTRING, nxt.value.lower())
            if nxt.kind == "^^":
                self.next()
                dt = self.next()
                if dt.kind == "IRIREF":
                    return Literal(t.value, dt.value)
                if dt.kind == "PNAME":
                    return Literal(t.value, self.expand(dt).value)
                raise self.err("expected datatype IRI", dt)
            return Literal(t.value, XSD_STRING)
        if t.kind == "INTEGER":
            return Literal(t.value, XSD_INTEGER)
        if t.kind == "DECIMAL":
            return Literal(t.value, XSD_DECIMAL)
        if t.kind == "DOUBLE":
            return Literal(t.value, XSD_DOUBLE)
        raise self.err("expected RDF term", t)

    # expressions

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        parts = [self.parse_and()]
        while self.peek().kind == "||":
            self.next()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else ExprOr(tuple(parts))

    def parse_and(self) -> Expr:
        parts = [self.parse_relational()]
        while self.peek().kind == "&&":
            self.next()
            parts.append(self.parse_relational())
        return parts[0] if len(parts) == 1 else ExprAnd(tuple(parts))

    def parse_relational(self) -> Expr:
        left = self.parse_primary_expr()
        t = self.peek()
        if t.kind in ("=", "!=", "<", "<=", ">", ">="):
            self.next()
            right = self.parse_primary_expr()
            return ExprCompare(t.kind, left, right)
        if self.at_word("IN"):
            self.next()
            self.expect("(")
            options = [self.parse_primary_expr()]
            while self.peek().kind == ",":
                self.next()
                options.append(self.parse_primary_expr())
            self.expect(")")
            return ExprIn(left, tuple(options))
        return left

    def parse_primary_expr(self) -> Expr:
        t = self.peek()
        if t.kind == "!":
            self.next()
            return ExprNot(self.parse_primary_expr())
        if t.kind == "(":
            self.next()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if t.kind == "VAR":
            self.next()
            return ExprVar(Var(t.value))
        if t.kind == "WORD" and t.value.upper() in _FUNCTIONS:
            self.next()
            func = t.value.upper()
            args: list[Expr] = []
            self.expect("(")
            if self.peek().kind != ")":
                args.append(self.parse_expr())
                while self.peek().kind == ",":
                    self.next()
                    args.append(self.parse_expr())
            self.expect(")")
            return ExprCall(func, tuple(args))
        if t.kind == "WORD" and t.value.upper() in _UNSUPPORTED:
            raise UnsupportedFeatureError(t.value.upper())
        return ExprTerm(self.parse_term_strict())


def parse_sparql(text: str) -> QueryAst:
    """Parse query text; raises SparqlSyntaxError or UnsupportedFeatureError."""
    return _QueryParser(text).parse()
