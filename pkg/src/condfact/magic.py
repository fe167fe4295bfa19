"""Adornment and magic-set rewriting with left-to-right binding propagation.

For a query ``p(a,Y)`` the rewritten program uses an adorned copy ``p_bf`` of
every reachable IDB predicate and a filter predicate ``m_p_bf`` holding the
bound arguments for which answers are wanted.  Each adorned rule gets its
filter as the first body literal, and every IDB body literal ``q`` yields a
magic rule that derives the demand for ``q`` from the head's filter and the
body literals to its left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Atom,
    GroundProgram,
    Literal,
    LogicError,
    MagicAnnotation,
    Program,
    Rule,
    is_variable,
)
from .parser import Query


class MagicError(LogicError):
    pass


@dataclass(frozen=True)
class Adornment:
    predicate: str
    pattern: str

    def bound(self, args: tuple[str, ...]) -> tuple[str, ...]:
        return tuple(t for t, c in zip(args, self.pattern) if c == "b")


def pattern_of(args: tuple[str, ...], bound: set[str]) -> str:
    return "".join("b" if not is_variable(t) or t in bound else "f" for t in args)


@dataclass
class AdornedProgram:
    """Adorned rules as (head adornment, rule) pairs, in discovery order."""

    rules: list[tuple[Adornment, Rule]] = field(default_factory=list)
    adornments: list[Adornment] = field(default_factory=list)
    edb: frozenset[str] = frozenset()


def adorn(program: Program, query: Query) -> AdornedProgram:
    edb = frozenset(program.edb_predicates())
    out = AdornedProgram(edb=edb)
    goal = query.goal
    if goal.pred in edb:
        return out
    by_head: dict[str, list[Rule]] = {}
    for r in program.rules:
        by_head.setdefault(r.head.pred, []).append(r)
    todo = [Adornment(goal.pred, query.pattern)]
    seen = set(todo)
    while todo:
        ad = todo.pop(0)
        out.adornments.append(ad)
        for r in by_head.get(ad.predicate, ()):
            out.rules.append((ad, r))
            bound = {t for t, c in zip(r.head.args, ad.pattern) if c == "b" and is_variable(t)}
            for lit in r.body:
                a = lit.atom
                if a.pred not in edb:
                    sub = Adornment(a.pred, pattern_of(a.args, bound))
                    if sub not in seen:
                        seen.add(sub)
                        todo.append(sub)
                if lit.positive:
                    bound |= a.variables()
    return out


@dataclass(frozen=True)
class MagicMeta:
    magic_predicates: frozenset[str]
    filter_of: dict[str, str]
    seed: Atom | None
    query_atom: Atom
    adorned: dict[Adornment, str]
    predicates: frozenset[str]
    original_query: Atom

    @property
    def annotation(self) -> MagicAnnotation:
        return MagicAnnotation(self.magic_predicates, dict(self.filter_of))

    def original_predicate(self, pred: str) -> str | None:
        for ad, name in self.adorned.items():
            if name == pred:
                return ad.predicate
        return None


class _Namer:
    def __init__(self, taken: set[str]) -> None:
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name, k = base, 1
        while name in self.taken:
            k += 1
            name = f"{base}{k}"
        self.taken.add(name)
        return name


def magic_transform(program: Program, query: Query) -> tuple[Program, MagicMeta]:
    goal = query.goal
    if goal.pred not in program.arities:
        raise MagicError(f"query over unknown predicate {goal.pred!r}")
    if len(goal.args) != program.arities[goal.pred]:
        raise MagicError(f"query arity does not match predicate {goal.pred!r}")

    ap = adorn(program, query)
    namer = _Namer(program.predicates())
    adorned: dict[Adornment, str] = {}
    filter_of: dict[str, str] = {}
    for ad in ap.adornments:
        name = namer.fresh(f"{ad.predicate}_{ad.pattern}" if ad.pattern else f"{ad.predicate}_")
        adorned[ad] = name
    for ad in ap.adornments:
        filter_of[adorned[ad]] = namer.fresh(f"m_{adorned[ad]}")

    def magic_atom(ad: Adornment, args: tuple[str, ...]) -> Atom:
        return Atom(filter_of[adorned[ad]], ad.bound(args))

    rules: list[Rule] = [r for r in program.rules if r.head.pred in ap.edb]
    for ad, r in ap.rules:
        head = Atom(adorned[ad], r.head.args)
        head_filter = magic_atom(ad, r.head.args)
        bound = {t for t in head_filter.args if is_variable(t)}
        body: list[Literal] = [Literal(head_filter)]
        for lit in r.body:
            a = lit.atom
            if a.pred in ap.edb:
                new = lit
            else:
                sub = Adornment(a.pred, pattern_of(a.args, bound))
                new = Literal(Atom(adorned[sub], a.args), lit.positive)
                # demand for the subgoal: head filter plus what is known to its left
                demand = [l for l in body if l.positive or l.atom.variables() <= bound]
                rules.append(Rule(magic_atom(sub, a.args), tuple(demand)))
            body.append(new)
            if lit.positive:
                bound |= a.variables()
        rules.append(Rule(head, tuple(body)))

    if goal.pred in ap.edb:
        seed = None
        query_atom = goal
    else:
        ad = Adornment(goal.pred, query.pattern)
        seed = magic_atom(ad, goal.args)
        rules.append(Rule(seed))
        query_atom = Atom(adorned[ad], goal.args)

    mp = Program(rules)
    meta = MagicMeta(
        magic_predicates=frozenset(filter_of.values()),
        filter_of=filter_of,
        seed=seed,
        query_atom=query_atom,
        adorned=adorned,
        predicates=frozenset(mp.predicates()),
        original_query=goal,
    )
    return mp, meta


def annotate(gp: GroundProgram, meta: MagicMeta) -> GroundProgram:
    if not meta.magic_predicates:
        raise MagicError("magic metadata declares no magic predicates")
    atoms = gp.atoms
    used = {atoms.pred(r.head) for r in gp} | {atoms.pred(a) for r in gp for a in r.pos | r.neg}
    unknown = used - meta.predicates
    if unknown:
        raise MagicError(f"predicates unknown to the magic metadata: {sorted(unknown)}")
    return gp.with_annotation(meta.annotation)


def query_ids(gp: GroundProgram, meta: MagicMeta) -> set[int]:
    """Atom ids of the magic program standing for instances of the query."""
    atoms = gp.atoms
    goal = meta.query_atom
    out = set()
    for i in atoms.ids():
        if atoms.pred(i) == goal.pred and _matches(goal.args, atoms.args(i)):
            out.add(i)
    return out


def _matches(pattern: tuple[str, ...], args: tuple[str, ...]) -> bool:
    s: dict[str, str] = {}
    for t, v in zip(pattern, args):
        if is_variable(t):
            if s.setdefault(t, v) != v:
                return False
        elif t != v:
            return False
    return True


def to_original(atom: Atom, meta: MagicMeta) -> Atom:
    p = meta.original_predicate(atom.pred)
    return Atom(p, atom.args) if p is not None else atom


def magic_ground(program: Program, query: Query, stats=None) -> tuple[GroundProgram, MagicMeta]:
    """Rewrite, ground intelligently and annotate.  An EDB query gets an empty annotation."""
    from .ground import intelligent_ground

    mp, meta = magic_transform(program, query)
    gp = intelligent_ground(mp, stats=stats)
    if not meta.magic_predicates:
        return gp.with_annotation(meta.annotation), meta
    return annotate(gp, meta), meta


def query_value(gp: GroundProgram, meta: MagicMeta, interp) -> str:
    """Truth value of the (ground) query in an interpretation over the magic program."""
    a = gp.atoms.lookup(meta.query_atom.pred, tuple(meta.query_atom.args))
    return "false" if a is None else interp.value(a)
