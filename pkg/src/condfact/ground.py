"""Grounding: Herbrand instantiation, intelligent grounding, SCC-oriented evaluation."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import networkx as nx

from .core import (
    AtomTable,
    GroundProgram,
    GroundRule,
    LogicError,
    Program,
    Rule,
    is_variable,
)


class GroundingError(LogicError):
    pass


DEFAULT_INSTANCE_LIMIT = 10**6


def herbrand_ground(
    program: Program,
    atoms: AtomTable | None = None,
    limit: int = DEFAULT_INSTANCE_LIMIT,
    constants: Iterable[str] | None = None,
) -> GroundProgram:
    """Every instance of every rule over the program's constants."""
    consts = sorted(program.constants() if constants is None else set(constants))
    total = sum(len(consts) ** len(r.variables()) for r in program.rules)
    if total > limit:
        raise GroundingError(f"Herbrand instantiation needs {total} instances (limit {limit})")
    gp = GroundProgram(atoms)
    table = gp.atoms
    for r in program.rules:
        vs = sorted(r.variables())
        for values in itertools.product(consts, repeat=len(vs)):
            s = dict(zip(vs, values))
            gp.add(_instantiate(r, s, table))
    return gp


def _subst_args(args: tuple[str, ...], s: dict[str, str]) -> tuple[str, ...]:
    return tuple(s.get(t, t) for t in args)


def _instantiate(r: Rule, s: dict[str, str], table: AtomTable) -> GroundRule:
    return GroundRule(
        table.intern(r.head.pred, _subst_args(r.head.args, s)),
        frozenset(table.intern(a.pred, _subst_args(a.args, s)) for a in r.pos),
        frozenset(table.intern(a.pred, _subst_args(a.args, s)) for a in r.neg),
    )


class Relation:
    """A growing set of constant tuples with lazily built hash indexes."""

    def __init__(self) -> None:
        self.tuples: set[tuple[str, ...]] = set()
        self._index: dict[tuple[int, ...], dict[tuple, list]] = {}

    def add(self, t: tuple[str, ...]) -> bool:
        if t in self.tuples:
            return False
        self.tuples.add(t)
        for positions, idx in self._index.items():
            idx.setdefault(tuple(t[i] for i in positions), []).append(t)
        return True

    def lookup(self, positions: tuple[int, ...], key: tuple) -> Iterable[tuple[str, ...]]:
        if not positions:
            return self.tuples
        idx = self._index.get(positions)
        if idx is None:
            idx = {}
            for t in self.tuples:
                idx.setdefault(tuple(t[i] for i in positions), []).append(t)
            self._index[positions] = idx
        return idx.get(key, ())

    def __len__(self) -> int:
        return len(self.tuples)


def _match(pattern: tuple[str, ...], subst: dict[str, str], rel: Relation) -> Iterator[dict[str, str]]:
    positions, key = [], []
    for i, t in enumerate(pattern):
        if not is_variable(t):
            positions.append(i)
            key.append(t)
        elif t in subst:
            positions.append(i)
            key.append(subst[t])
    for tup in list(rel.lookup(tuple(positions), tuple(key))):
        s = subst
        ok = True
        for t, v in zip(pattern, tup):
            if is_variable(t):
                cur = s.get(t)
                if cur is None:
                    if s is subst:
                        s = dict(subst)
                    s[t] = v
                elif cur != v:
                    ok = False
                    break
        if ok:
            yield s


@dataclass
class GroundingStats:
    derived: int = 0
    rounds: int = 0


def ground_scc(
    group: Iterable[Rule],
    r_prev: GroundProgram | None = None,
    *,
    atoms: AtomTable | None = None,
    simplify: bool = False,
    stats: GroundingStats | None = None,
) -> GroundProgram:
    """Least fixpoint of conditional-fact derivation for ``group`` on top of ``r_prev``.

    Positive body atoms are matched against heads of ``r_prev`` and of the
    rule instances derived so far; an instance with a negative body atom that
    is a fact of ``r_prev`` is never produced.  With ``simplify``, body
    literals already decided by ``r_prev`` are dropped on derivation.
    """
    rules = list(group)
    if atoms is None:
        atoms = r_prev.atoms if r_prev is not None else AtomTable()
    if r_prev is None:
        r_prev = GroundProgram(atoms)
    stats = stats if stats is not None else GroundingStats()
    bad = [r for r in rules if not r.range_restricted]
    if bad:
        raise GroundingError(f"rule is not range-restricted: {bad[0]}")

    out = GroundProgram(atoms)
    prev_facts = r_prev.facts()
    prev_heads = r_prev.heads()
    local_preds = {r.head.pred for r in rules}

    base: dict[str, Relation] = defaultdict(Relation)
    for a in prev_heads:
        base[atoms.pred(a)].add(atoms.args(a))
    full: dict[str, Relation] = defaultdict(Relation)
    for pred, rel in base.items():
        for t in rel.tuples:
            full[pred].add(t)

    def derive(rule: Rule, s: dict[str, str]) -> None:
        neg = []
        for a in rule.neg:
            i = atoms.intern(a.pred, _subst_args(a.args, s))
            if i in prev_facts:
                return
            if simplify and a.pred not in local_preds and i not in prev_heads:
                continue
            neg.append(i)
        pos = []
        for a in rule.pos:
            i = atoms.intern(a.pred, _subst_args(a.args, s))
            if simplify and i in prev_facts:
                continue
            pos.append(i)
        head = atoms.intern(rule.head.pred, _subst_args(rule.head.args, s))
        if out.add(GroundRule(head, frozenset(pos), frozenset(neg))):
            stats.derived += 1
            t = atoms.args(head)
            if full[rule.head.pred].add(t):
                new_delta[rule.head.pred].add(t)

    def joins(rule: Rule, delta_at: int | None, delta: dict[str, Relation]):
        pos = rule.pos

        def go(k: int, s: dict[str, str]):
            if k == len(pos):
                yield s
                return
            a = pos[k]
            rel = delta[a.pred] if k == delta_at else full[a.pred]
            for s2 in _match(a.args, s, rel):
                yield from go(k + 1, s2)

        return go(0, {})

    new_delta: dict[str, Relation] = defaultdict(Relation)
    for rule in rules:
        for s in list(joins(rule, None, {})):
            derive(rule, s)
    stats.rounds += 1
    while any(new_delta.values()):
        delta, new_delta = new_delta, defaultdict(Relation)
        for rule in rules:
            for k, a in enumerate(rule.pos):
                if a.pred in delta and delta[a.pred]:
                    for s in list(joins(rule, k, delta)):
                        derive(rule, s)
        stats.rounds += 1
    return out


def intelligent_ground(
    program: Program, atoms: AtomTable | None = None, stats: GroundingStats | None = None
) -> GroundProgram:
    """Relevant ground instances: rules whose positive bodies are derivable heads."""
    return ground_scc(program.rules, None, atoms=atoms, stats=stats)


def dependency_graph(program: Program) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(sorted(program.predicates()))
    for r in program.rules:
        for lit in r.body:
            p, q = lit.atom.pred, r.head.pred
            if g.has_edge(p, q):
                g[p][q]["negative"] |= not lit.positive
                g[p][q]["positive"] |= lit.positive
            else:
                g.add_edge(p, q, negative=not lit.positive, positive=lit.positive)
    return g


@dataclass
class SccPartition:
    groups: list[list[Rule]] = field(default_factory=list)
    predicates: list[frozenset[str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.groups)


def scc_partition(program: Program) -> SccPartition:
    """Rules grouped by the SCC of their head predicate, in dependency order."""
    g = dependency_graph(program)
    cond = nx.condensation(g)
    members = nx.get_node_attributes(cond, "members")
    order = nx.lexicographical_topological_sort(cond, key=lambda n: min(members[n]))
    by_head: dict[str, list[Rule]] = defaultdict(list)
    for r in program.rules:
        by_head[r.head.pred].append(r)
    part = SccPartition()
    for n in order:
        preds = frozenset(members[n])
        rules = [r for p in sorted(preds) for r in by_head.get(p, ())]
        if rules:
            part.groups.append(rules)
            part.predicates.append(preds)
    return part


def has_mixed_recursion(program: Program) -> bool:
    """True iff some predicate lies on a positive cycle and on a cycle through negation."""
    g = dependency_graph(program)
    pos = nx.DiGraph()
    pos.add_nodes_from(g.nodes)
    pos.add_edges_from((u, v) for u, v, d in g.edges(data=True) if d["positive"])
    on_pos_cycle = set()
    for comp in nx.strongly_connected_components(pos):
        if len(comp) > 1 or any(pos.has_edge(p, p) for p in comp):
            on_pos_cycle |= comp
    for comp in nx.strongly_connected_components(g):
        neg_inside = any(
            d["negative"] for u, v, d in g.edges(data=True) if u in comp and v in comp
        )
        if neg_inside and comp & on_pos_cycle:
            return True
    return False


@dataclass
class SccRun:
    remainder: GroundProgram
    stats: object
    grounded: list[GroundProgram]


def scc_evaluate(
    program: Program,
    simplify: bool = True,
    atoms: AtomTable | None = None,
    stats=None,
    debug: bool = False,
) -> GroundProgram:
    """Ground and reduce group by group; the result is the program remainder."""
    return scc_evaluate_run(program, simplify, atoms, stats, debug).remainder


def scc_evaluate_run(program: Program, simplify: bool = True, atoms=None, stats=None, debug=False) -> SccRun:
    from .rewrite import EvalStats, remainder

    stats = stats if stats is not None else EvalStats()
    table = atoms if atoms is not None else AtomTable()
    r = GroundProgram(table)
    grounded = []
    gstats = GroundingStats()
    for group in scc_partition(program).groups:
        before = gstats.derived
        new = ground_scc(group, r, simplify=simplify, stats=gstats)
        stats.work_units += gstats.derived - before
        stats.ground_rules += gstats.derived - before
        grounded.append(new)
        merged = r.copy()
        for rule in new:
            merged.add(rule)
        r = remainder(merged, stats=stats, debug=debug)
    return SccRun(r, stats, grounded)
