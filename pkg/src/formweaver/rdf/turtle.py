"""Turtle reader/writer for the subset used by shapes, ontologies and data.

Supported: @prefix/@base (and SPARQL-style PREFIX/BASE), predicate and object
lists, blank node property lists, RDF collections, numeric/boolean literals,
language tags, datatyped literals, long strings, comments.

Blank node labels are renamed to fresh document-scoped ids (b0, b1, ...) so
fixtures are stable. Collections expand to rdf:first/rdf:rest/rdf:nil chains.
"""
from __future__ import annotations

import re
from typing import Optional
from urllib.parse import urljoin

from .graph import Graph
from .terms import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    RDF_LANGSTRING,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    Term,
    Triple,
    UnknownPrefixError,
)


_SCHEME_START = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


class TurtleSyntaxError(SyntaxError):
    def __init__(self, message: str, line: int, column: int, token: str = ""):
        shown = f" near {token!r}" if token else ""
        super().__init__(f"{message} at line {line}, column {column}{shown}")
        self.line = line
        self.column = column
        self.token = token


# --- tokenizer --------------------------------------------------------------

_PUNCT = {".", ";", ",", "(", ")", "[", "]"}
_WS = " \t\r\n"

_PN_FIRST = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_")
_PN_CHARS = _PN_FIRST | set("0123456789-·")
_STRING_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
                   '"': '"', "'": "'", "\\": "\\"}


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind: str, value: str, line: int, col: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self) -> str:
        return f"{self.kind}({self.value!r})@{self.line}:{self.col}"


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, token: str = "") -> TurtleSyntaxError:
        return TurtleSyntaxError(message, self.line, self.col, token)

    def _advance(self, n: int = 1) -> str:
        chunk = self.text[self.pos:self.pos + n]
        for ch in chunk:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return chunk

    def _peek(self, n: int = 1) -> str:
        return self.text[self.pos:self.pos + n]

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in _WS:
                self._advance()
            elif ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            tok = self.next_token()
            out.append(tok)
            if tok.kind == "EOF":
                return out

    def next_token(self) -> _Token:
        self._skip_ws()
        line, col = self.line, self.col
        if self.pos >= len(self.text):
            return _Token("EOF", "", line, col)
        ch = self.text[self.pos]

        if ch == "<":
            return _Token("IRIREF", self._read_iriref(), line, col)
        if ch in "\"'":
            return _Token("STRING", self._read_string(ch), line, col)
        if ch == "@":
            self._advance()
            word = self._read_name_chars()
            if word in ("prefix", "base"):
                return _Token("DIRECTIVE", "@" + word, line, col)
            return _Token("LANGTAG", word, line, col)
        if ch == "^" and self._peek(2) == "^^":
            self._advance(2)
            return _Token("HATHAT", "^^", line, col)
        if ch in _PUNCT:
            self._advance()
            return _Token(ch, ch, line, col)
        if ch == "_" and self._peek(2) == "_:":
            self._advance(2)
            label = self._read_local()
            if not label:
                raise self.error("blank node label expected")
            return _Token("BNODE_LABEL", label, line, col)
        if ch.isdigit() or (ch in "+-" and len(self._peek(2)) > 1 and
                            (self._peek(2)[1].isdigit() or self._peek(2)[1] == ".")):
            return self._read_number(line, col)
        if ch == "." and len(self._peek(2)) > 1 and self._peek(2)[1].isdigit():
            return self._read_number(line, col)

        # prefixed name, bare keyword (a, true, false, PREFIX, BASE) or error
        word = self._read_pname()
        if word is None:
            raise self.error("unexpected character", ch)
        return _Token("PNAME_OR_KEYWORD", word, line, col)

    def _read_iriref(self) -> str:
        self._advance()  # <
        out = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated IRI")
            ch = self._advance()
            if ch == ">":
                return "".join(out)
            if ch in " \n\t\r\"{}|^`":
                raise self.error("illegal character in IRI", ch)
            if ch == "\\":
                esc = self._advance()
                if esc == "u":
                    out.append(chr(int(self._advance(4), 16)))
                elif esc == "U":
                    out.append(chr(int(self._advance(8), 16)))
                else:
                    raise self.error("bad IRI escape", esc)
            else:
                out.append(ch)

    def _read_string(self, quote: str) -> str:
        long = self._peek(3) == quote * 3
        self._advance(3 if long else 1)
        out = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string")
            if long and self._peek(3) == quote * 3:
                self._advance(3)
                return "".join(out)
            ch = self._advance()
            if not long and ch == quote:
                return "".join(out)
            if not long and ch == "\n":
                raise self.error("newline in single-line string")
            if ch == "\\":
                esc = self._advance()
                if esc in _STRING_ESCAPES:
                    out.append(_STRING_ESCAPES[esc])
                elif esc == "u":
                    out.append(chr(int(self._advance(4), 16)))
                elif esc == "U":
                    out.append(chr(int(self._advance(8), 16)))
                else:
                    raise self.error("bad string escape", esc)
            else:
                out.append(ch)

    def _read_number(self, line: int, col: int) -> _Token:
        start = self.pos
        if self._peek() in "+-":
            self._advance()
        digits = "0123456789"
        while self._peek() and self._peek() in digits:
            self._advance()
        kind = "INTEGER"
        if self._peek() == "." and len(self._peek(2)) > 1 and self._peek(2)[1] in digits:
            kind = "DECIMAL"
            self._advance()
            while self._peek() and self._peek() in digits:
                self._advance()
        if self._peek() in ("e", "E"):
            kind = "DOUBLE"
            self._advance()
            if self._peek() in "+-":
                self._advance()
            if not (self._peek() and self._peek() in digits):
                raise self.error("malformed double exponent")
            while self._peek() and self._peek() in digits:
                self._advance()
        return _Token(kind, self.text[start:self.pos], line, col)

    def _read_name_chars(self) -> str:
        start = self.pos
        while self._peek() and (self._peek().isalnum() or self._peek() in "-_"):
            self._advance()
        return self.text[start:self.pos]

    def _read_local(self) -> str:
        out = []
        while self._peek():
            ch = self._peek()
            if ch in _PN_CHARS or (ch == "." and len(self._peek(2)) > 1
                                   and self._peek(2)[1] in _PN_CHARS):
                out.append(self._advance())
            else:
                break
        return "".join(out)

    def _read_pname(self) -> Optional[str]:
        ch = self._peek()
        if ch not in _PN_FIRST and not ch.isalpha():
            return None
        start = self.pos
        self._read_local()
        if self._peek() == ":":
            self._advance()
            self._read_local()
        return self.text[start:self.pos]


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, base: Optional[str]):
        self.tokens = _Lexer(text).tokens()
        self.idx = 0
        self.base = base
        self.graph = Graph()
        self.bnode_map: dict[str, BlankNode] = {}
        self.bnode_counter = 0

    # token helpers

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def next(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise TurtleSyntaxError(f"expected {kind}", tok.line, tok.col, tok.value)
        return tok

    def error(self, message: str, tok: _Token) -> TurtleSyntaxError:
        return TurtleSyntaxError(message, tok.line, tok.col, tok.value)

    def fresh_bnode(self) -> BlankNode:
        node = BlankNode(f"b{self.bnode_counter}")
        self.bnode_counter += 1
        return node

    def labeled_bnode(self, label: str) -> BlankNode:
        if label not in self.bnode_map:
            self.bnode_map[label] = self.fresh_bnode()
        return self.bnode_map[label]

    def resolve_iri(self, value: str, tok: _Token) -> Iri:
        if self.base and not _SCHEME_START.match(value):
            value = urljoin(self.base, value)
        try:
            return Iri(value)
        except ValueError as exc:
            raise self.error(str(exc), tok) from None

    # grammar

    def parse(self) -> Graph:
        while self.peek().kind != "EOF":
            tok = self.peek()
            if tok.kind == "DIRECTIVE":
                self.parse_at_directive()
            elif tok.kind == "PNAME_OR_KEYWORD" and tok.value in ("PREFIX", "BASE"):
                self.parse_sparql_directive()
            else:
                self.parse_triples_block()
        return self.graph

    def parse_at_directive(self) -> None:
        tok = self.next()
        if tok.value == "@prefix":
            name = self.expect("PNAME_OR_KEYWORD")
            if not name.value.endswith(":"):
                raise self.error("prefix declaration must end with ':'", name)
            iri = self.expect("IRIREF")
            self.graph.bind(name.value[:-1], self.resolve_iri(iri.value, iri).value)
            self.expect(".")
        else:  # @base
            iri = self.expect("IRIREF")
            self.base = self.resolve_iri(iri.value, iri).value
            self.expect(".")

    def parse_sparql_directive(self) -> None:
        tok = self.next()
        if tok.value == "PREFIX":
            name = self.expect("PNAME_OR_KEYWORD")
            if not name.value.endswith(":"):
                raise self.error("prefix declaration must end with ':'", name)
            iri = self.expect("IRIREF")
            self.graph.bind(name.value[:-1], self.resolve_iri(iri.value, iri).value)
        else:
            iri = self.expect("IRIREF")
            self.base = self.resolve_iri(iri.value, iri).value

    def parse_triples_block(self) -> None:
        tok = self.peek()
        if tok.kind == "[":
            subject = self.parse_bnode_property_list()
            if self.peek().kind != ".":
                self.parse_predicate_object_list(subject)
        else:
            subject = self.parse_term(position="subject")
            if isinstance(subject, Literal):
                raise self.error("literal cannot be a subject", tok)
            self.parse_predicate_object_list(subject)
        self.expect(".")

    def parse_predicate_object_list(self, subject: Term) -> None:
        while True:
            pred = self.parse_predicate()
            self.parse_object_list(subject, pred)
            if self.peek().kind == ";":
                while self.peek().kind == ";":
                    self.next()
                if self.peek().kind in (".", "]"):
                    return
                continue
            return

    def parse_predicate(self) -> Iri:
        tok = self.peek()
        if tok.kind == "PNAME_OR_KEYWORD" and tok.value == "a":
            self.next()
            return Iri(RDF_TYPE)
        term = self.parse_term(position="predicate")
        if not isinstance(term, Iri):
            raise self.error("predicate must be an IRI", tok)
        return term

    def parse_object_list(self, subject: Term, pred: Iri) -> None:
        while True:
            obj = self.parse_term(position="object")
            self.graph.add(Triple(subject, pred, obj))
            if self.peek().kind == ",":
                self.next()
                continue
            return

    def parse_term(self, position: str) -> Term:
        tok = self.next()
        if tok.kind == "IRIREF":
            return self.resolve_iri(tok.value, tok)
        if tok.kind == "PNAME_OR_KEYWORD":
            if tok.value == "true":
                return Literal("true", XSD_BOOLEAN)
            if tok.value == "false":
                return Literal("false", XSD_BOOLEAN)
            if ":" not in tok.value:
                raise self.error("unexpected keyword", tok)
            try:
                return expand_pname(tok.value, self.graph.prefixes)
            except UnknownPrefixError as exc:
                raise TurtleSyntaxError(str(exc), tok.line, tok.col, tok.value) from exc
        if tok.kind == "BNODE_LABEL":
            return self.labeled_bnode(tok.value)
        if tok.kind == "STRING":
            return self.parse_literal_tail(tok.value)
        if tok.kind == "INTEGER":
            return Literal(tok.value, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            return Literal(tok.value, XSD_DECIMAL)
        if tok.kind == "DOUBLE":
            return Literal(tok.value, XSD_DOUBLE)
        if tok.kind == "[":
            self.idx -= 1
            return self.parse_bnode_property_list()
        if tok.kind == "(":
            self.idx -= 1
            return self.parse_collection()
        raise self.error(f"unexpected token in {position} position", tok)

    def parse_literal_tail(self, lexical: str) -> Literal:
        tok = self.peek()
        if tok.kind == "LANGTAG":
            self.next()
            return Literal(lexical, RDF_LANGSTRING, tok.value.lower())
        if tok.kind == "HATHAT":
            self.next()
            dtok = self.next()
            if dtok.kind == "IRIREF":
                return Literal(lexical, self.resolve_iri(dtok.value, dtok).value)
            if dtok.kind == "PNAME_OR_KEYWORD" and ":" in dtok.value:
                try:
                    return Literal(lexical, expand_pname(dtok.value, self.graph.prefixes).value)
                except UnknownPrefixError as exc:
                    raise TurtleSyntaxError(str(exc), dtok.line, dtok.col, dtok.value) from exc
            raise self.error("datatype must be an IRI", dtok)
        return Literal(lexical, XSD_STRING)

    def parse_bnode_property_list(self) -> BlankNode:
        self.expect("[")
        node = self.fresh_bnode()
        if self.peek().kind != "]":
            self.parse_predicate_object_list(node)
        self.expect("]")
        return node

    def parse_collection(self) -> Term:
        self.expect("(")
        items = []
        while self.peek().kind != ")":
            items.append(self.parse_term(position="object"))
        self.expect(")")
        if not items:
            return Iri(RDF_NIL)
        first = self.fresh_bnode()
        node = first
        for i, item in enumerate(items):
            self.graph.add(Triple(node, Iri(RDF_FIRST), item))
            if i == len(items) - 1:
                self.graph.add(Triple(node, Iri(RDF_REST), Iri(RDF_NIL)))
            else:
                nxt = self.fresh_bnode()
                self.graph.add(Triple(node, Iri(RDF_REST), nxt))
                node = nxt
        return first


def expand_pname(pname: str, prefixes: PrefixMap) -> Iri:
    prefix, _, local = pname.partition(":")
    if prefix not in prefixes:
        raise UnknownPrefixError(prefix)
    return Iri(prefixes.bindings[prefix] + local)


def parse_turtle(text: str, base: Optional[str] = None) -> Graph:
    """Parse a Turtle document into a Graph.

    Raises TurtleSyntaxError (with line/column) or UnknownPrefixError via
    TurtleSyntaxError wrapping for undeclared prefixes.
    """
    return _Parser(text, base).parse()


# --- serializer -------------------------------------------------------------

_CHAR_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t",
                 "\b": "\\b", "\f": "\\f"}


def _quote(text: str) -> str:
    return '"' + "".join(_CHAR_ESCAPES.get(ch, ch) for ch in text) + '"'


def _pname_ok(local: str) -> bool:
    if local == "":
        return True
    if local[0] not in _PN_FIRST and not local[0].isdigit():
        return False
    return all(ch in _PN_CHARS for ch in local) and not local.endswith(".")


def _term_text(term: Term, prefixes: PrefixMap) -> str:
    if isinstance(term, Iri):
        if term.value == RDF_TYPE:
            return "a"
        curie = prefixes.compress(term.value)
        if curie is not None and _pname_ok(curie.partition(":")[2]):
            return curie
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.local_id}"
    assert isinstance(term, Literal)
    quoted = _quote(term.lexical)
    if term.language:
        return f"{quoted}@{term.language}"
    if term.datatype == XSD_STRING:
        return quoted
    dt = prefixes.compress(term.datatype)
    if dt is not None and _pname_ok(dt.partition(":")[2]):
        return f"{quoted}^^{dt}"
    return f"{quoted}^^<{term.datatype}>"


def serialize_turtle(graph: Graph) -> str:
    """Render a graph as Turtle; reparsing yields an isomorphic graph."""
    prefixes = graph.prefixes
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(prefixes.bindings.items())]
    if lines:
        lines.append("")

    by_subject: dict[Term, list[Triple]] = {}
    for t in graph:
        by_subject.setdefault(t.subject, []).append(t)

    for subject in sorted(by_subject, key=lambda t: t.sort_key()):
        triples = by_subject[subject]
        by_pred: dict[Iri, list[Term]] = {}
        for t in triples:
            by_pred.setdefault(t.predicate, []).append(t.object)
        # rdf:type first, then alphabetical: matches hand-written documents
        preds = sorted(by_pred, key=lambda p: (p.value != RDF_TYPE, p.value))
        stext = _term_text(subject, prefixes)
        parts = []
        for p in preds:
            objs = ", ".join(_term_text(o, prefixes)
                             for o in sorted(by_pred[p], key=lambda t: t.sort_key()))
            parts.append(f"{_term_text(p, prefixes)} {objs}")
        joined = " ;\n    ".join(parts)
        lines.append(f"{stext} {joined} .")
    return "\n".join(lines) + ("\n" if lines else "")
