"""Reader for normal logic programs and query directives.

Accepted syntax (UTF-8, ``%`` line comments)::

    diff(X, L, K) :- member(X, L), \\+ member(X, K).
    member(X, [X|_]).
    :- query(diff(X, Y, Z), [Y, Z]).
    :- query(name, (p(X), \\+ q(X)), [X]).

Clauses are numbered 1..n in textual order and query directives n+1..n+g.
Operators, arithmetic, cut and builtins are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

from .terms import (
    NIL, Atom, Literal, Struct, Var, cons, format_term, is_fresh_name, vars_of,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class ProgramPoint(NamedTuple):
    i: int
    j: int

    def __str__(self):
        return f"({self.i},{self.j})"


DUMMY = ProgramPoint(0, 0)

BUILTINS = frozenset({
    "call", "findall", "bagof", "setof", "is", "var", "nonvar", "atom", "atomic",
    "number", "integer", "write", "writeln", "print", "nl", "assert", "asserta",
    "assertz", "retract", "fail", "false", "true", "functor", "arg", "copy_term",
    "not", "halt",
})


@dataclass(frozen=True)
class Clause:
    index: int
    head: Atom
    body: tuple

    def expressions(self):
        return (self.head,) + self.body

    @property
    def m(self) -> int:
        return len(self.body)

    def __str__(self):
        if not self.body:
            return f"{format_term(self.head)}."
        return f"{format_term(self.head)} :- " + ", ".join(str(l) for l in self.body) + "."


@dataclass(frozen=True)
class QueryDescription:
    index: int
    body: tuple
    annotation: object
    name: Optional[str] = None

    def expressions(self):
        return self.body

    @property
    def m(self) -> int:
        return len(self.body)

    def __str__(self):
        goal = str(self.body[0]) if len(self.body) == 1 else "(" + ", ".join(str(l) for l in self.body) + ")"
        if self.name is not None:
            return f":- query({format_term(Struct(self.name))}, {goal}, {format_term(self.annotation)})."
        return f":- query({goal}, {format_term(self.annotation)})."


@dataclass(frozen=True)
class PointedProgram:
    clauses: tuple
    queries: tuple
    _by_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        table = {c.index: c for c in self.clauses}
        table.update({q.index: q for q in self.queries})
        object.__setattr__(self, "_by_index", table)

    @property
    def clause_indices(self) -> tuple:
        return tuple(c.index for c in self.clauses)

    @property
    def query_indices(self) -> tuple:
        return tuple(q.index for q in self.queries)

    def is_clause(self, i: int) -> bool:
        return i in self._by_index and isinstance(self._by_index[i], Clause)

    def is_query(self, i: int) -> bool:
        return i in self._by_index and isinstance(self._by_index[i], QueryDescription)

    def part(self, i: int):
        return self._by_index[i]

    def query(self, key) -> QueryDescription:
        """Look up a query by index or by name."""
        for q in self.queries:
            if q.index == key or (q.name is not None and q.name == key):
                return q
        raise KeyError(key)

    def m(self, i: int) -> int:
        return self._by_index[i].m

    def head(self, i: int) -> Atom:
        return self._by_index[i].head

    @cached_property
    def _vars(self) -> dict:
        return {i: vars_of(part) for i, part in self._by_index.items()}

    def variables(self, i: int) -> frozenset:
        return self._vars[i]

    @cached_property
    def points(self) -> tuple:
        pts = []
        for i in sorted(self._by_index):
            pts.extend(ProgramPoint(i, j) for j in range(1, self.m(i) + 2))
        return tuple(pts)

    def entry(self, i: int) -> ProgramPoint:
        return ProgramPoint(i, 1)

    def exit(self, i: int) -> ProgramPoint:
        return ProgramPoint(i, self.m(i) + 1)

    def is_exit(self, p: ProgramPoint) -> bool:
        return p != DUMMY and p.j == self.m(p.i) + 1

    def has_literal(self, p: ProgramPoint) -> bool:
        return p.i in self._by_index and 1 <= p.j <= self.m(p.i)

    def plus(self, p: ProgramPoint) -> ProgramPoint:
        if not self.has_literal(p):
            raise ValueError(f"{p} has no successor point")
        return ProgramPoint(p.i, p.j + 1)

    def minus(self, p: ProgramPoint) -> ProgramPoint:
        if p.i not in self._by_index or not 2 <= p.j <= self.m(p.i) + 1:
            raise ValueError(f"{p} has no predecessor point")
        return ProgramPoint(p.i, p.j - 1)

    def literal_at(self, p: ProgramPoint) -> Literal:
        if not self.has_literal(p):
            raise ValueError(f"no literal at program point {p}")
        return self._by_index[p.i].body[p.j - 1]

    def atom_at(self, p: ProgramPoint) -> Atom:
        return self.literal_at(p).atom

    def pretty(self) -> str:
        return "\n".join(str(x) for x in self.clauses + self.queries) + "\n"


# -- tokenizer -------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<naf>\\\+)
  | (?P<end>\.(?=\s|%|\Z))
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<qname>'(?:[^'\\\n]|\\.)*')
  | (?P<punct>[()\[\],|])
  | (?P<cut>!)
  | (?P<op>[-+*/\\^<>=~:.?@#&$;]+)
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, allowed_ops=frozenset()) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "cut":
            raise ParseError("unsupported feature: cut", line, col)
        if kind == "op" and tok not in allowed_ops:
            raise ParseError(f"unsupported feature: operator '{tok}'", line, col)
        if kind != "ws":
            if kind == "qname":
                tok = re.sub(r"\\(.)", r"\1", tok[1:-1])
                kind = "name"
            tokens.append(Token(kind, tok, line, col))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, allowed_ops=frozenset()):
        self.toks = tokenize(text, allowed_ops)
        self.pos = 0
        self.anon = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text, kind=None):
        t = self.tok
        if t.text != text or (kind and t.kind != kind):
            shown = t.text or "end of input"
            raise self.error(f"expected '{text}' but found '{shown}'")
        return self.advance()

    def at(self, text, kind=None) -> bool:
        return self.tok.text == text and (kind is None or self.tok.kind == kind)

    # terms

    def variable(self, t: Token) -> Var:
        if t.text == "_":
            self.anon += 1
            return Var(f"_@{self.anon}")
        if is_fresh_name(t.text):
            raise ParseError(f"variable name {t.text} is reserved", t.line, t.col)
        return Var(t.text)

    def term(self):
        t = self.tok
        if t.kind == "var":
            self.advance()
            return self.variable(t)
        if t.kind == "int":
            self.advance()
            return Struct(t.text)
        if t.kind == "name":
            self.advance()
            if self.at("(", "punct"):
                return Struct(t.text, self.arguments())
            return Struct(t.text)
        if self.at("[", "punct"):
            return self.list_term()
        raise self.error(f"expected a term but found '{t.text or 'end of input'}'")

    def arguments(self) -> tuple:
        self.expect("(")
        args = [self.term()]
        while self.at(",", "punct"):
            self.advance()
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def list_term(self):
        self.expect("[")
        if self.at("]", "punct"):
            self.advance()
            return NIL
        items = [self.term()]
        while self.at(",", "punct"):
            self.advance()
            items.append(self.term())
        tail = NIL
        if self.at("|", "punct"):
            self.advance()
            tail = self.term()
        self.expect("]")
        result = tail
        for item in reversed(items):
            result = cons(item, result)
        return result

    # atoms and literals

    def atom(self) -> Atom:
        t = self.tok
        if t.kind != "name":
            raise self.error(f"expected a predicate but found '{t.text or 'end of input'}'")
        self.advance()
        args = self.arguments() if self.at("(", "punct") else ()
        if t.text in BUILTINS:
            raise ParseError(f"unsupported feature: builtin {t.text}/{len(args)}", t.line, t.col)
        return Atom(t.text, args)

    def literal(self) -> Literal:
        if self.at("\\+"):
            self.advance()
            if self.at("(", "punct"):
                self.advance()
                a = self.atom()
                self.expect(")")
            else:
                a = self.atom()
            return Literal(a, positive=False)
        return Literal(self.atom())

    def body(self) -> tuple:
        lits = [self.literal()]
        while self.at(",", "punct"):
            self.advance()
            lits.append(self.literal())
        return tuple(lits)

    def goal(self) -> tuple:
        if self.at("(", "punct"):
            self.advance()
            lits = self.body()
            self.expect(")")
            return lits
        return (self.literal(),)

    # top level

    def program(self):
        clauses, queries = [], []
        while self.tok.kind != "eof":
            self.anon = 0
            if self.at(":-", "neck"):
                queries.append(self.directive())
            else:
                head = self.atom()
                body = ()
                if self.at(":-", "neck"):
                    self.advance()
                    body = self.body()
                self.expect(".", "end")
                clauses.append((head, body))
        return clauses, queries

    def directive(self):
        start = self.advance()
        t = self.tok
        if not (t.kind == "name" and t.text == "query"):
            raise self.error(f"unsupported directive '{t.text}'")
        self.advance()
        self.expect("(")
        name = None
        save = self.pos
        if self.tok.kind == "name" and self.toks[self.pos + 1].text == ",":
            # three-argument form: query(Name, Goal, Annotation)
            name_tok = self.advance()
            self.advance()
            if self._looks_like_goal_then_annotation():
                name = name_tok.text
            else:
                self.pos = save
        goal = self.goal()
        self.expect(",")
        annotation = self.term()
        self.expect(")")
        self.expect(".", "end")
        return (name, goal, annotation, start)

    def _looks_like_goal_then_annotation(self) -> bool:
        # After "name ," a goal must follow and then another ","; decide by
        # counting top-level commas up to the closing parenthesis.
        depth, commas = 0, 0
        for t in self.toks[self.pos:]:
            if t.kind == "punct" and t.text in "([":
                depth += 1
            elif t.kind == "punct" and t.text in ")]":
                if depth == 0:
                    break
                depth -= 1
            elif t.kind == "punct" and t.text == "," and depth == 0:
                commas += 1
            elif t.kind in ("end", "eof"):
                break
        return commas == 1


def parse_program(text: str) -> PointedProgram:
    parser = _Parser(text)
    raw_clauses, raw_queries = parser.program()
    if not raw_clauses:
        raise ParseError("no clauses")
    clauses = tuple(Clause(i, h, b) for i, (h, b) in enumerate(raw_clauses, start=1))
    queries = []
    seen = set()
    for k, (name, goal, annotation, tok) in enumerate(raw_queries, start=len(clauses) + 1):
        if name is not None:
            if name in seen:
                raise ParseError(f"duplicate query name '{name}'", tok.line, tok.col)
            seen.add(name)
        queries.append(QueryDescription(k, goal, annotation, name))
    return PointedProgram(clauses, tuple(queries))


def parse_term(text: str):
    parser = _Parser(text)
    t = parser.term()
    if parser.tok.kind != "eof":
        raise parser.error(f"unexpected '{parser.tok.text}' after term")
    return t


def parse_atom(text: str) -> Atom:
    parser = _Parser(text)
    a = parser.atom()
    if parser.tok.kind != "eof":
        raise parser.error(f"unexpected '{parser.tok.text}' after atom")
    return a


def annotation_variables(payload) -> list:
    """Variables listed in a list-shaped annotation term, in order."""
    out = []
    t = payload
    while isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
        if type(t.args[0]) is not Var:
            raise ValueError(f"annotation entries must be variables, got {format_term(t.args[0])}")
        out.append(t.args[0])
        t = t.args[1]
    if t != NIL:
        raise ValueError(f"annotation must be a list of variables, got {format_term(payload)}")
    return out


def interpret_annotation(domain, program: PointedProgram, query: QueryDescription):
    """The abstract substitution the domain assigns to a query's annotation."""
    return domain.parse_annotation(query.annotation, program.variables(query.index))
