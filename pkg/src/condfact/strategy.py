"""Running strategy expressions over a rewrite state."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import GroundProgram, LogicError
from .parser import Letter, Seq, Star, letters_of, parse_strategy
from .rewrite import EvalStats, RewriteState

NAMED = {
    "fitting": "(PSNF)*",
    "afp": "(PSNLF)*",
    "remainder": "((PSNF)*L)*",
    "wfmst": "(PSNLF)*M(PSNLF)*",
    "wfrem": "((PSNF)*L)*M((PSNF)*L)*",
    "mafp": "(P(SR)*NLF)*",
    "mrem": "(((PSNF)*R)*L)*",
}
MAGIC_STRATEGIES = ("wfmst", "wfrem", "mafp", "mrem")


class StrategyError(LogicError):
    pass


def named(name: str):
    try:
        return parse_strategy(NAMED[name])
    except KeyError:
        raise StrategyError(f"unknown strategy {name!r}; choose from {', '.join(NAMED)}") from None


def resolve(text: str):
    """A strategy given either by name or as an expression."""
    return named(text) if text in NAMED else parse_strategy(text)


@dataclass
class StrategyRun:
    expr: object
    initial: GroundProgram
    final: GroundProgram
    stats: EvalStats
    snapshots: list = field(default_factory=list)


def run_state(expr, state: RewriteState, record: bool = False) -> None:
    """Execute ``expr`` in place.  A star stops once its body changes nothing."""
    if isinstance(expr, Letter):
        state.normal_form(expr.name)
    elif isinstance(expr, Seq):
        for e in expr.items:
            run_state(e, state, record)
    elif isinstance(expr, Star):
        top = record
        i = 0
        while True:
            before = state.changes
            run_state(expr.body, state, False)
            if top:
                state.stats.snapshot(f"{expr}#{i}", state.facts, state.heads(), keep_sets=True)
            i += 1
            if state.changes == before:
                break
    else:
        raise TypeError(f"not a strategy expression: {expr!r}")


def run(expr, program: GroundProgram, stats: EvalStats | None = None, *, debug: bool = False, record: bool = False) -> StrategyRun:
    if isinstance(expr, str):
        expr = resolve(expr)
    if letters_of(expr) & set("MR") and program.annotation is None:
        raise StrategyError(f"strategy {expr} uses M or R but the program has no magic annotation")
    state = RewriteState(program, stats, debug=debug)
    run_state(expr, state, record)
    return StrategyRun(expr, program, state.program(), state.stats, state.stats.snapshots)


def _normal_form(state: RewriteState, letters: str) -> None:
    while True:
        before = state.changes
        for c in letters:
            state.normal_form(c)
        if state.changes == before:
            return


@dataclass
class AfpSchedule:
    steps: list[tuple[frozenset[int], frozenset[int]]]
    final: GroundProgram
    stats: EvalStats


def afp_snapshots(program: GroundProgram, stats: EvalStats | None = None) -> AfpSchedule:
    """Alternate PS and NLF normal forms, recording (facts, heads) per round.

    Round 0 starts from the LF normal form followed by S.  Stops as soon as a
    round reproduces the previous pair.
    """
    s = RewriteState(program, stats)
    _normal_form(s, "LF")
    _normal_form(s, "S")
    steps = []
    while True:
        k = frozenset(s.facts)
        _normal_form(s, "NLF")
        pair = (k, frozenset(s.heads()))
        if steps and steps[-1] == pair:
            break
        steps.append(pair)
        _normal_form(s, "PS")
    return AfpSchedule(steps, s.program(), s.stats)
