"""Domain model: atoms, rules, programs, interning and interpretations.

Non-ground programs use plain strings for terms.  A term is a variable when
its first character is an uppercase letter or an underscore; anything else
(lowercase-initial identifiers, numerals) is a constant.

Ground programs are sets of :class:`GroundRule` over dense integer atom ids
handed out by an :class:`AtomTable`.  The table plays the role of the Herbrand
base: every atom a ground program (or one derived from it) mentions is
interned there, and atoms of the base that were never interned are false in
every model computed here.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence


class LogicError(Exception):
    """Base class for user-facing errors of this package."""


def is_variable(term: str) -> bool:
    return term[0].isupper() or term[0] == "_"


class Atom(NamedTuple):
    pred: str
    args: tuple[str, ...] = ()

    def variables(self) -> set[str]:
        return {t for t in self.args if is_variable(t)}

    def is_ground(self) -> bool:
        return not any(is_variable(t) for t in self.args)

    def __str__(self) -> str:
        return atom_text(self.pred, self.args)


def atom_text(pred: str, args: Sequence[str]) -> str:
    if not args:
        return pred
    return f"{pred}({','.join(args)})"


@dataclass(frozen=True)
class Literal:
    atom: object
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


def complement(lit: Literal) -> Literal:
    return Literal(lit.atom, not lit.positive)


@dataclass(frozen=True)
class Rule:
    """A (possibly non-ground) rule.

    ``body`` keeps the literals in source order with duplicates collapsed;
    order matters for join order and for left-to-right binding propagation.
    """

    head: Atom
    body: tuple[Literal, ...] = ()

    def __post_init__(self) -> None:
        seen = dict.fromkeys(self.body)
        if len(seen) != len(self.body):
            object.__setattr__(self, "body", tuple(seen))

    @property
    def pos(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.body if l.positive)

    @property
    def neg(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.body if not l.positive)

    @property
    def is_fact(self) -> bool:
        return not self.body

    def variables(self) -> set[str]:
        out = self.head.variables()
        for lit in self.body:
            out |= lit.atom.variables()
        return out

    @property
    def range_restricted(self) -> bool:
        bound: set[str] = set()
        for a in self.pos:
            bound |= a.variables()
        return self.variables() <= bound

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


class ArityError(LogicError):
    pass


@dataclass
class Program:
    """A non-ground normal program (a deduplicated list of rules)."""

    rules: list[Rule] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.rules = list(dict.fromkeys(self.rules))
        self.arities: dict[str, int] = {}
        for r in self.rules:
            for a in (r.head, *(l.atom for l in r.body)):
                self._note_arity(a)

    def _note_arity(self, a: Atom) -> None:
        known = self.arities.setdefault(a.pred, len(a.args))
        if known != len(a.args):
            raise ArityError(
                f"predicate {a.pred!r} used with arity {len(a.args)} and {known}"
            )

    def predicates(self) -> set[str]:
        return set(self.arities)

    def head_predicates(self) -> set[str]:
        return {r.head.pred for r in self.rules}

    def constants(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.rules:
            for a in (r.head, *(l.atom for l in r.body)):
                for t in a.args:
                    if not is_variable(t):
                        seen.setdefault(t)
        return list(seen)

    def non_range_restricted(self) -> list[Rule]:
        return [r for r in self.rules if not r.range_restricted]

    @property
    def range_restricted(self) -> bool:
        return not self.non_range_restricted()

    def edb_predicates(self) -> set[str]:
        """Predicates whose clauses are all ground facts (vacuously: no clauses)."""
        idb = {r.head.pred for r in self.rules if r.body or not r.head.is_ground()}
        return self.predicates() - idb

    def __str__(self) -> str:
        return "\n".join(map(str, self.rules))


class AtomTable:
    """Bijective interning of ground atoms to dense ids (first-seen order)."""

    def __init__(self) -> None:
        self._ids: dict[tuple[str, tuple[str, ...]], int] = {}
        self._atoms: list[tuple[str, tuple[str, ...]]] = []

    def intern(self, pred: str, args: tuple[str, ...] = ()) -> int:
        key = (pred, args)
        i = self._ids.get(key)
        if i is None:
            i = len(self._atoms)
            self._ids[key] = i
            self._atoms.append(key)
        return i

    def intern_atom(self, atom: Atom) -> int:
        return self.intern(atom.pred, tuple(atom.args))

    def intern_text(self, text: str) -> int:
        from .parser import parse_atom

        a = parse_atom(text)
        if not a.is_ground():
            raise LogicError(f"not a ground atom: {text!r}")
        return self.intern_atom(a)

    def lookup(self, pred: str, args: tuple[str, ...] = ()) -> int | None:
        return self._ids.get((pred, args))

    def pred(self, i: int) -> str:
        return self._atoms[i][0]

    def args(self, i: int) -> tuple[str, ...]:
        return self._atoms[i][1]

    def atom(self, i: int) -> Atom:
        p, a = self._atoms[i]
        return Atom(p, a)

    def text(self, i: int) -> str:
        return atom_text(*self._atoms[i])

    def ids(self) -> range:
        return range(len(self._atoms))

    def __len__(self) -> int:
        return len(self._atoms)

    def __contains__(self, key) -> bool:
        return key in self._ids


@dataclass(frozen=True, order=True)
class GroundRule:
    """A conditional fact ``head <- pos, not neg``; a fact when both are empty.

    ``pos`` and ``neg`` may share atoms.
    """

    head: int
    pos: frozenset[int] = frozenset()
    neg: frozenset[int] = frozenset()

    @property
    def is_fact(self) -> bool:
        return not self.pos and not self.neg

    @property
    def size(self) -> int:
        return 1 + len(self.pos) + len(self.neg)

    def sort_key(self) -> tuple:
        return (self.head, sorted(self.pos), sorted(self.neg))


@dataclass(frozen=True)
class MagicAnnotation:
    """Magic/non-magic tagging attached to a ground magic program."""

    magic_predicates: frozenset[str]
    filter_of: dict[str, str]

    def __hash__(self) -> int:
        return hash(self.magic_predicates)


class GroundProgram:
    """A set of ground rules with incrementally maintained facts/heads."""

    def __init__(
        self,
        atoms: AtomTable | None = None,
        rules: Iterable[GroundRule] = (),
        annotation: MagicAnnotation | None = None,
    ) -> None:
        self.atoms = atoms if atoms is not None else AtomTable()
        self.annotation = annotation
        self._rules: set[GroundRule] = set()
        self._facts: set[int] = set()
        self._heads: Counter[int] = Counter()
        for r in rules:
            self.add(r)

    def add(self, rule: GroundRule) -> bool:
        if rule in self._rules:
            return False
        self._rules.add(rule)
        self._heads[rule.head] += 1
        if rule.is_fact:
            self._facts.add(rule.head)
        return True

    def discard(self, rule: GroundRule) -> None:
        if rule not in self._rules:
            return
        self._rules.remove(rule)
        self._heads[rule.head] -= 1
        if not self._heads[rule.head]:
            del self._heads[rule.head]
        if rule.is_fact:
            self._facts.discard(rule.head)

    def add_fact(self, atom: int) -> bool:
        return self.add(GroundRule(atom))

    @property
    def rules(self) -> frozenset[GroundRule]:
        return frozenset(self._rules)

    def facts(self) -> frozenset[int]:
        return frozenset(self._facts)

    def heads(self) -> frozenset[int]:
        return frozenset(self._heads)

    def head_count(self, atom: int) -> int:
        return self._heads.get(atom, 0)

    def sorted_rules(self) -> list[GroundRule]:
        return sorted(self._rules, key=GroundRule.sort_key)

    def literal_count(self) -> int:
        return sum(r.size for r in self._rules)

    def copy(self) -> GroundProgram:
        return GroundProgram(self.atoms, self._rules, self.annotation)

    def with_annotation(self, annotation: MagicAnnotation | None) -> GroundProgram:
        return GroundProgram(self.atoms, self._rules, annotation)

    def check_caches(self) -> None:
        facts = {r.head for r in self._rules if r.is_fact}
        heads = Counter(r.head for r in self._rules)
        assert facts == self._facts, "cached facts out of sync"
        assert heads == self._heads, "cached heads out of sync"

    def rule_text(self, r: GroundRule) -> str:
        t = self.atoms.text
        body = [t(a) for a in sorted(r.pos)] + [f"not {t(a)}" for a in sorted(r.neg)]
        return f"{t(r.head)} :- {', '.join(body)}." if body else f"{t(r.head)}."

    def __iter__(self) -> Iterator[GroundRule]:
        return iter(self._rules)

    def __len__(self) -> int:
        return len(self._rules)

    def __contains__(self, rule: GroundRule) -> bool:
        return rule in self._rules

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroundProgram):
            return NotImplemented
        return self._rules == other._rules

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"GroundProgram({len(self._rules)} rules)"


def literal_count(program: GroundProgram) -> int:
    return program.literal_count()


@dataclass(frozen=True)
class PartialInterpretation:
    true: frozenset[int] = frozenset()
    false: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        clash = self.true & self.false
        if clash:
            raise LogicError(f"inconsistent interpretation on atoms {sorted(clash)}")

    def value(self, atom: int) -> str:
        if atom in self.true:
            return "true"
        if atom in self.false:
            return "false"
        return "undefined"

    def undefined(self, scope: Iterable[int]) -> frozenset[int]:
        return frozenset(a for a in scope if a not in self.true and a not in self.false)

    def restrict(self, scope: Iterable[int]) -> PartialInterpretation:
        s = frozenset(scope)
        return PartialInterpretation(self.true & s, self.false & s)


def known(program: GroundProgram, scope: Iterable[int] | None = None) -> PartialInterpretation:
    """Literals with an obvious truth value: facts are true, headless atoms false."""
    s = frozenset(program.atoms.ids() if scope is None else scope)
    heads = program.heads()
    return PartialInterpretation(s & program.facts(), s - heads)


def ground_rule_from(rule: Rule, atoms: AtomTable) -> GroundRule:
    return GroundRule(
        atoms.intern_atom(rule.head),
        frozenset(atoms.intern_atom(a) for a in rule.pos),
        frozenset(atoms.intern_atom(a) for a in rule.neg),
    )
