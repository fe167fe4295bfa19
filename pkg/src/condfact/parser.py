"""Text syntax for programs, queries and strategy expressions.

Programs::

    % comment
    p(X) :- t(X,Y,Z), not p(Y), not p(Z).
    p0(c2).
    q :- not p.

Queries are ``?- p(a).`` and strategies are words over ``PSNFLMR`` with
``(e)*`` for iteration, e.g. ``((PSNF)*L)*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count

from .core import Atom, GroundProgram, LogicError, Literal, Program, Rule


class ParseError(LogicError):
    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        super().__init__(f"{msg} at line {line}, column {col}" if line else msg)
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<query>\?-)
  | (?P<if>:-)
  | (?P<ident>[a-z0-9][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = m.start() + m.group().rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0
        self._anon = count(1)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        t = self.next()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def term(self) -> str:
        t = self.next()
        if t.kind == "ident":
            return t.text
        if t.kind == "var":
            if t.text == "_":
                return f"_{next(self._anon)}"
            return t.text
        raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", t.line, t.col)

    def atom(self) -> Atom:
        t = self.next()
        if t.kind != "ident" or t.text[0].isdigit():
            raise ParseError(f"expected a predicate name, found {t.text or 'end of input'!r}", t.line, t.col)
        if t.text == "not":
            raise ParseError("'not' is a keyword, not a predicate", t.line, t.col)
        args: list[str] = []
        if self.at("punct", "("):
            self.next()
            args.append(self.term())
            while self.at("punct", ","):
                self.next()
                args.append(self.term())
            self.expect("punct", ")")
        return Atom(t.text, tuple(args))

    def literal(self) -> Literal:
        t = self.peek()
        if t.kind == "ident" and t.text == "not":
            nxt = self.toks[self.i + 1]
            # `not` followed by an atom is negation; `not.` or `not(...)` would be a predicate
            if nxt.kind == "ident":
                self.next()
                return Literal(self.atom(), False)
        return Literal(self.atom(), True)

    def clause(self) -> Rule:
        head = self.atom()
        body: list[Literal] = []
        if self.at("if"):
            self.next()
            body.append(self.literal())
            while self.at("punct", ","):
                self.next()
                body.append(self.literal())
        self.expect("punct", ".")
        return Rule(head, tuple(body))


def parse_program(text: str) -> Program:
    p = _Parser(text)
    rules = []
    while not p.at("eof"):
        start = p.peek()
        rule = p.clause()
        rules.append((rule, start))
    try:
        return Program([r for r, _ in rules])
    except LogicError as e:
        # locate the first clause that disagrees with the arity table
        seen: dict[str, int] = {}
        for r, tok in rules:
            for a in (r.head, *(l.atom for l in r.body)):
                if seen.setdefault(a.pred, len(a.args)) != len(a.args):
                    raise ParseError(str(e), tok.line, tok.col) from None
        raise


def parse_atom(text: str) -> Atom:
    p = _Parser(text)
    a = p.atom()
    if p.at("punct", "."):
        p.next()
    p.expect("eof")
    return a


@dataclass(frozen=True)
class Query:
    goal: Atom

    @property
    def pattern(self) -> str:
        from .core import is_variable

        return "".join("f" if is_variable(t) else "b" for t in self.goal.args)

    def __str__(self) -> str:
        return f"?- {self.goal}."


def parse_query(text: str, program: Program | None = None) -> Query:
    p = _Parser(text)
    if p.at("query"):
        p.next()
    goal = p.atom()
    if p.at("punct", "."):
        p.next()
    p.expect("eof")
    if program is not None:
        arity = program.arities.get(goal.pred)
        if arity is None:
            raise ParseError(f"unknown predicate {goal.pred!r} in query")
        if arity != len(goal.args):
            raise ParseError(f"query uses {goal.pred!r} with arity {len(goal.args)}, program with {arity}")
    return Query(goal)


# strategy expressions

LETTERS = frozenset("PSNFLMR")


@dataclass(frozen=True)
class Letter:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Seq:
    items: tuple

    def __str__(self) -> str:
        return "".join(map(str, self.items))


@dataclass(frozen=True)
class Star:
    body: object

    def __str__(self) -> str:
        return f"({self.body})*"


def seq(*items) -> object:
    """Build a flattened Seq; a single item stands for itself."""
    flat: list = []
    for it in items:
        if isinstance(it, Seq):
            flat.extend(it.items)
        else:
            flat.append(it)
    if not flat:
        raise ParseError("empty strategy expression")
    return flat[0] if len(flat) == 1 else Seq(tuple(flat))


def letters_of(expr) -> set[str]:
    if isinstance(expr, Letter):
        return {expr.name}
    if isinstance(expr, Star):
        return letters_of(expr.body)
    return set().union(*(letters_of(e) for e in expr.items))


def parse_strategy(text: str):
    s = re.sub(r"\s+", "", text)
    pos = 0

    def parse_seq(closing: bool):
        nonlocal pos
        items = []
        while pos < len(s) and s[pos] != ")":
            c = s[pos]
            if c == "(":
                pos += 1
                inner = parse_seq(True)
                if pos >= len(s) or s[pos] != ")":
                    raise ParseError(f"unbalanced parentheses in {text!r}")
                pos += 1
                item = inner
            elif c in LETTERS:
                pos += 1
                item = Letter(c)
            elif c == "*":
                raise ParseError(f"'*' without operand at offset {pos} in {text!r}")
            else:
                raise ParseError(f"unknown strategy letter {c!r} in {text!r}")
            while pos < len(s) and s[pos] == "*":
                pos += 1
                item = Star(item)
            items.append(item)
        if not closing and pos < len(s):
            raise ParseError(f"unbalanced parentheses in {text!r}")
        if not items:
            raise ParseError(f"empty strategy expression in {text!r}")
        return seq(*items)

    return parse_seq(False)


def serialize_program(program: GroundProgram) -> str:
    lines = [program.rule_text(r) for r in program.sorted_rules()]
    return "".join(line + "\n" for line in lines)
