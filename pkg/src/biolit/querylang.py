"""Query language: parser, canonical printer, and semantic autocomplete.

Grammar (documented in docs/query-grammar.md)::

    query    = or_expr
    or_expr  = and_expr { OR and_expr }
    and_expr = not_expr { [AND] not_expr }      ; adjacency is implicit AND
    not_expr = NOT not_expr | primary
    primary  = "(" or_expr ")" | phrase | entity | relation | word
    phrase   = '"' ... '"'
    entity   = "@TYPE_Name"
    relation = "relations:" type "|" endpoint "|" endpoint

Operators are case-insensitive; OR binds loosest, then AND, then NOT.
A query that is pure negation is rejected.  Relation terms accept ``ANY``
as the type and need at least one concrete ``@`` endpoint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .docmodel import EntityType, RelationType, is_semantic_key
from .errors import EmptyQuery, QueryParseError
from .index import IndexSnapshot

# --- AST -------------------------------------------------------------------


class Node:
    pass


@dataclass(frozen=True)
class Keyword(Node):
    term: str


@dataclass(frozen=True)
class Phrase(Node):
    terms: tuple[str, ...]


@dataclass(frozen=True)
class Entity(Node):
    key: str


@dataclass(frozen=True)
class RelationTerm(Node):
    rtype: RelationType | None
    e1: str
    e2: str


@dataclass(frozen=True)
class And(Node):
    children: tuple[Node, ...]


@dataclass(frozen=True)
class Or(Node):
    children: tuple[Node, ...]


@dataclass(frozen=True)
class Not(Node):
    child: Node


# --- lexer -------------------------------------------------------------------


@dataclass(frozen=True)
class _Tok:
    kind: str  # WORD, PHRASE, LPAREN, RPAREN, EOF
    value: str
    pos: int


_WORD_BREAK = set(' \t\r\n()"')


def _lex(text: str) -> list[_Tok]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "(":
            tokens.append(_Tok("LPAREN", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Tok("RPAREN", c, i))
            i += 1
        elif c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise QueryParseError("unterminated phrase", i)
            tokens.append(_Tok("PHRASE", text[i + 1 : j], i))
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in _WORD_BREAK:
                j += 1
            tokens.append(_Tok("WORD", text[i:j], i))
            i = j
    tokens.append(_Tok("EOF", "", n))
    return tokens


# --- parser ------------------------------------------------------------------

_ENTITY_TYPE_BY_FOLD = {t.value.lower(): t for t in EntityType}


def _parse_relation_word(word: str, pos: int) -> RelationTerm:
    body = word[len("relations:") :]
    parts = body.split("|")
    if len(parts) != 3:
        raise QueryParseError("relation term needs TYPE|A|B", pos)
    type_token, a, b = parts
    if type_token.upper() == "ANY":
        rtype = None
    else:
        try:
            rtype = RelationType(type_token.upper())
        except ValueError:
            raise QueryParseError(
                f"unknown relation type {type_token!r}", pos
            ) from None
    endpoints = []
    concrete = 0
    for endpoint in (a, b):
        if endpoint.startswith("@"):
            if not is_semantic_key(endpoint):
                raise QueryParseError(f"malformed semantic key {endpoint!r}", pos)
            concrete += 1
            endpoints.append(endpoint)
        else:
            etype = _ENTITY_TYPE_BY_FOLD.get(endpoint.lower())
            if etype is None:
                raise QueryParseError(
                    f"relation endpoint {endpoint!r} is neither a key nor an entity type",
                    pos,
                )
            endpoints.append(etype.value)
    if concrete == 0:
        raise QueryParseError("relation term needs at least one concrete @key", pos)
    return RelationTerm(rtype, endpoints[0], endpoints[1])


class _Parser:
    def __init__(self, tokens: list[_Tok]):
        self.tokens = tokens
        self.i = 0
        self.first_not_pos: int | None = None

    @property
    def cur(self) -> _Tok:
        return self.tokens[self.i]

    def advance(self) -> _Tok:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _is_operator(self, name: str) -> bool:
        return self.cur.kind == "WORD" and self.cur.value.upper() == name

    def parse(self) -> Node:
        node = self.parse_or()
        if self.cur.kind != "EOF":
            raise QueryParseError(f"unexpected {self.cur.value!r}", self.cur.pos)
        return node

    def parse_or(self) -> Node:
        children = [self.parse_and()]
        while self._is_operator("OR"):
            self.advance()
            children.append(self.parse_and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def _starts_operand(self) -> bool:
        if self.cur.kind in ("PHRASE", "LPAREN"):
            return True
        if self.cur.kind == "WORD":
            return self.cur.value.upper() != "OR"
        return False

    def parse_and(self) -> Node:
        children = [self.parse_not()]
        while True:
            if self._is_operator("AND"):
                self.advance()
                children.append(self.parse_not())
            elif self._starts_operand():
                children.append(self.parse_not())
            else:
                break
        return children[0] if len(children) == 1 else And(tuple(children))

    def parse_not(self) -> Node:
        if self._is_operator("NOT"):
            tok = self.advance()
            if self.first_not_pos is None:
                self.first_not_pos = tok.pos
            return Not(self.parse_not())
        return self.parse_primary()

    def parse_primary(self) -> Node:
        tok = self.cur
        if tok.kind == "LPAREN":
            self.advance()
            node = self.parse_or()
            if self.cur.kind != "RPAREN":
                raise QueryParseError("expected ')'", self.cur.pos)
            self.advance()
            return node
        if tok.kind == "PHRASE":
            self.advance()
            terms = tuple(tok.value.split())
            if not terms:
                raise QueryParseError("empty phrase", tok.pos)
            return Phrase(terms)
        if tok.kind == "WORD":
            self.advance()
            word = tok.value
            if word.startswith("@"):
                if not is_semantic_key(word):
                    raise QueryParseError(f"malformed semantic key {word!r}", tok.pos)
                return Entity(word)
            if word.lower().startswith("relations:"):
                return _parse_relation_word(word, tok.pos)
            if word.upper() in ("AND", "OR", "NOT"):
                raise QueryParseError(f"operator {word!r} needs an operand", tok.pos)
            return Keyword(word)
        raise QueryParseError("expected a term", tok.pos)


def _is_pure_negation(node: Node) -> bool:
    if isinstance(node, Not):
        return True
    if isinstance(node, Or):
        return all(_is_pure_negation(c) for c in node.children)
    if isinstance(node, And):
        return all(_is_pure_negation(c) for c in node.children)
    return False


def parse_query(text: str) -> Node:
    """Parse query text to an AST; raises QueryParseError/EmptyQuery."""
    if not text or not text.strip():
        raise EmptyQuery()
    parser = _Parser(_lex(text))
    node = parser.parse()
    if _is_pure_negation(node):
        raise QueryParseError(
            "negation requires a positive clause", parser.first_not_pos or 0
        )
    return node


# --- printer -----------------------------------------------------------------

_OPERATOR_WORDS = {"AND", "OR", "NOT"}
_PLAIN_WORD_RE = re.compile(r'[^\s()"]+\Z')


def canonicalize(node: Node) -> Node:
    """Normal form: flattened And/Or with children sorted by printed form,
    keywords that would re-parse as something else demoted to phrases."""
    if isinstance(node, Keyword):
        term = node.term
        needs_quoting = (
            term.upper() in _OPERATOR_WORDS
            or term.startswith("@")
            or term.lower().startswith("relations:")
            or not _PLAIN_WORD_RE.match(term)
        )
        return Phrase((term,)) if needs_quoting else node
    if isinstance(node, Phrase):
        return node
    if isinstance(node, Entity) or isinstance(node, RelationTerm):
        return node
    if isinstance(node, Not):
        return Not(canonicalize(node.child))
    flat: list[Node] = []
    for child in node.children:
        c = canonicalize(child)
        if type(c) is type(node):
            flat.extend(c.children)
        else:
            flat.append(c)
    flat.sort(key=_render)
    cls = type(node)
    return cls(tuple(flat))


def _render(node: Node) -> str:
    if isinstance(node, Keyword):
        return node.term
    if isinstance(node, Phrase):
        return '"' + " ".join(node.terms) + '"'
    if isinstance(node, Entity):
        return node.key
    if isinstance(node, RelationTerm):
        type_token = node.rtype.value.lower() if node.rtype else "ANY"
        return f"relations:{type_token}|{node.e1}|{node.e2}"
    if isinstance(node, Not):
        inner = _render(node.child)
        if isinstance(node.child, (And, Or)):
            inner = f"({inner})"
        return f"NOT {inner}"
    if isinstance(node, And):
        parts = [
            f"({_render(c)})" if isinstance(c, Or) else _render(c)
            for c in node.children
        ]
        return " AND ".join(parts)
    if isinstance(node, Or):
        return " OR ".join(_render(c) for c in node.children)
    raise TypeError(f"unknown node {node!r}")


def print_query(node: Node) -> str:
    """Canonical textual form; parsing it back gives the canonical AST."""
    return _render(canonicalize(node))


# --- autocomplete ------------------------------------------------------------


@dataclass(frozen=True)
class Suggestion:
    name: str
    semantic_key: str
    etype: str
    doc_freq: int
    matched_synonym: str


def suggest(prefix: str, snapshot: IndexSnapshot, limit: int) -> list[Suggestion]:
    """Entities whose name or synonym starts with the prefix (at a word
    boundary), ranked by document frequency."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if not prefix.strip():
        return []
    return [
        Suggestion(
            name=e.name,
            semantic_key=e.semantic_key,
            etype=e.etype,
            doc_freq=e.doc_freq,
            matched_synonym=e.synonym,
        )
        for e in snapshot.trie.lookup_prefix(prefix, limit)
    ]


def resolve_free_term(term: str, snapshot: IndexSnapshot) -> str | None:
    """Semantic key for a term exactly equal to a dictionary name/synonym."""
    entry = snapshot.trie.lookup_exact(term)
    return entry.semantic_key if entry else None
