"""Reference semantics, kept naive and independent of the rewrite engine.

Nothing here is on the main evaluation path; these functions exist so that
the engine can be checked against textbook definitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .core import GroundProgram, GroundRule, PartialInterpretation


def t_pj(rules: Iterable[GroundRule], i: set[int] | frozenset[int], j: set[int] | frozenset[int]) -> set[int]:
    return {r.head for r in rules if r.pos <= i and not (r.neg & j)}


def lfp_t(rules: Iterable[GroundRule], j: set[int] | frozenset[int] = frozenset(), extra_facts: Iterable[int] = ()) -> frozenset[int]:
    """Least fixpoint of ``t_pj(rules, ., j)``, by plain iteration."""
    rules = list(rules)
    cur = set(extra_facts)
    while True:
        nxt = t_pj(rules, cur, j) | cur
        if nxt == cur:
            return frozenset(cur)
        cur = nxt


@dataclass
class AfpTrace:
    steps: list[tuple[frozenset[int], frozenset[int]]] = field(default_factory=list)
    model: PartialInterpretation = field(default_factory=PartialInterpretation)

    @property
    def iterations(self) -> int:
        return len(self.steps)


def _model(base: Iterable[int], k: frozenset[int], u: frozenset[int]) -> PartialInterpretation:
    base = frozenset(base)
    return PartialInterpretation(k & base, base - u)


def afp(program: GroundProgram, extra_facts: Iterable[int] = ()) -> AfpTrace:
    """Alternating fixpoint, with ``extra_facts`` adjoined to the program."""
    rules = list(program) + [GroundRule(a) for a in extra_facts]
    definite = [r for r in rules if not r.neg]
    k = lfp_t(definite)
    trace = AfpTrace()
    while True:
        u = lfp_t(rules, k)
        pair = (k, u)
        if trace.steps and trace.steps[-1] == pair:
            break
        trace.steps.append(pair)
        k = lfp_t(rules, u)
    k, u = trace.steps[-1]
    trace.model = _model(program.atoms.ids(), k, u)
    return trace


def fitting_lfp(program: GroundProgram) -> PartialInterpretation:
    """Least fixpoint of the three-valued Fitting operator from all-undefined."""
    by_head: dict[int, list[GroundRule]] = {}
    for r in program:
        by_head.setdefault(r.head, []).append(r)
    base = list(program.atoms.ids())
    true: set[int] = set()
    false: set[int] = set()
    while True:
        nt, nf = set(), set()
        for a in base:
            rs = by_head.get(a, [])
            if any(r.pos <= true and r.neg <= false for r in rs):
                nt.add(a)
            if all(r.pos & false or r.neg & true for r in rs):
                nf.add(a)
        if nt == true and nf == false:
            return PartialInterpretation(frozenset(true), frozenset(false))
        true, false = nt, nf


def _magic_atoms(program: GroundProgram, atoms: Iterable[int], magic_predicates) -> frozenset[int]:
    pred = program.atoms.pred
    return frozenset(a for a in atoms if pred(a) in magic_predicates)


@dataclass
class WfMagicResult:
    model: PartialInterpretation
    first: AfpTrace
    second: AfpTrace
    magic: frozenset[int]

    @property
    def iterations(self) -> int:
        return self.first.iterations + self.second.iterations


def wf_magic_ground(mp: GroundProgram, magic_predicates) -> WfMagicResult:
    """Two alternating-fixpoint phases: the second adds every true-or-undefined magic atom as a fact."""
    first = afp(mp)
    _, u = first.steps[-1]
    m = _magic_atoms(mp, u, magic_predicates)
    second = afp(mp, m)
    return WfMagicResult(second.model, first, second, m)


def wf_magic(program, query) -> WfMagicResult:
    from .ground import intelligent_ground
    from .magic import magic_transform

    mp, meta = magic_transform(program, query)
    return wf_magic_ground(intelligent_ground(mp), meta.magic_predicates)


def magic_afp(mp: GroundProgram, magic_predicates=None) -> AfpTrace:
    """Alternating fixpoint where each K step also treats the magic atoms of the previous U as facts."""
    if magic_predicates is None:
        if mp.annotation is None:
            from .rewrite import MagicMetaMissing

            raise MagicMetaMissing("program carries no magic annotation")
        magic_predicates = mp.annotation.magic_predicates
    rules = list(mp)
    k = lfp_t([r for r in rules if not r.neg])
    trace = AfpTrace()
    while True:
        u = lfp_t(rules, k)
        pair = (k, u)
        if trace.steps and trace.steps[-1] == pair:
            break
        trace.steps.append(pair)
        k = lfp_t(rules, u, _magic_atoms(mp, u, magic_predicates))
    k, u = trace.steps[-1]
    trace.model = _model(mp.atoms.ids(), k, u)
    return trace
