"""The transformation calculus on ground programs.

Letters and what their normal-form passes do:

    P  positive reduction   drop ``not B`` when B has no rule
    S  success              drop positive B when B is a fact
    N  negative reduction   delete a rule containing ``not B`` with B a fact
    F  failure              delete a rule containing positive B when B has no rule
    L  loop detection       delete rules whose head is not a possible atom
    M  magic reduction      drop a magic filter that still has a rule
    R  restricted magic     turn ``A <- filter`` into the fact ``A``

Every application strictly shrinks the literal count (head occurrences
included), facts only grow and heads only shrink.  :class:`RewriteState`
checks these three properties on every step and raises
:class:`MonotonicityError` when one breaks.

The engine is event driven in the Dowling-Gallier style: a rule's atoms are
watched, and when an atom becomes a fact or loses its last rule the affected
(rule, atom) pairs are queued for the letters they may enable.  Queue entries
are revalidated on pop, so stale entries are harmless.
"""

from __future__ import annotations

import logging
import random
from collections import defaultdict, deque
from dataclasses import dataclass, field

from .core import (
    GroundProgram,
    GroundRule,
    LogicError,
    PartialInterpretation,
)

log = logging.getLogger(__name__)

QUEUED = "PSNFR"
ALL_LETTERS = "PSNFLMR"


class MonotonicityError(AssertionError):
    """A transformation step broke shrinkage, fact growth or head shrinkage."""


class MagicMetaMissing(LogicError):
    pass


@dataclass
class EvalStats:
    applications: dict[str, int] = field(default_factory=lambda: dict.fromkeys(ALL_LETTERS, 0))
    work_units: int = 0
    l_deleted: int = 0
    ground_rules: int = 0
    snapshots: list = field(default_factory=list)

    def count(self, letter: str, work: int = 1) -> None:
        self.applications[letter] += 1
        self.work_units += work

    def snapshot(self, label: str, facts, heads, keep_sets: bool = False) -> None:
        if keep_sets:
            self.snapshots.append((label, frozenset(facts), frozenset(heads)))
        else:
            self.snapshots.append((label, len(facts), len(heads)))


class RewriteState:
    """Mutable, indexed working copy of a ground program."""

    def __init__(
        self,
        program: GroundProgram,
        stats: EvalStats | None = None,
        *,
        debug: bool = False,
    ) -> None:
        self.atoms = program.atoms
        self.annotation = program.annotation
        self.stats = stats if stats is not None else EvalStats()
        self.debug = debug

        self.head: list[int] = []
        self.pos: list[set[int]] = []
        self.neg: list[set[int]] = []
        self.alive: list[bool] = []
        self.keys: list[GroundRule] = []
        self.by_key: dict[GroundRule, int] = {}
        self.rules_of: dict[int, set[int]] = defaultdict(set)
        self.pos_occ: dict[int, set[int]] = defaultdict(set)
        self.neg_occ: dict[int, set[int]] = defaultdict(set)
        self.facts: set[int] = set()
        self.size = 0
        self.n_heads = 0
        self.changes = 0
        self.queues: dict[str, deque] = {c: deque() for c in QUEUED}

        for r in program.sorted_rules():
            self._insert(r)
        for rid in range(len(self.head)):
            self._queue_rule(rid)

    # construction

    def _insert(self, r: GroundRule) -> None:
        rid = len(self.head)
        self.head.append(r.head)
        self.pos.append(set(r.pos))
        self.neg.append(set(r.neg))
        self.alive.append(True)
        self.keys.append(r)
        self.by_key[r] = rid
        if not self.rules_of[r.head]:
            self.n_heads += 1
        self.rules_of[r.head].add(rid)
        for a in r.pos:
            self.pos_occ[a].add(rid)
        for a in r.neg:
            self.neg_occ[a].add(rid)
        if r.is_fact:
            self.facts.add(r.head)
        self.size += r.size

    def _queue_rule(self, rid: int) -> None:
        q = self.queues
        for a in self.pos[rid]:
            if a in self.facts:
                q["S"].append((rid, a))
            if not self.rules_of.get(a):
                q["F"].append((rid, a))
        for a in self.neg[rid]:
            if a in self.facts:
                q["N"].append((rid, a))
            if not self.rules_of.get(a):
                q["P"].append((rid, a))
        if len(self.pos[rid]) + len(self.neg[rid]) == 1:
            q["R"].append((rid, None))

    # views

    def is_head(self, a: int) -> bool:
        return bool(self.rules_of.get(a))

    def heads(self) -> set[int]:
        return {a for a, rs in self.rules_of.items() if rs}

    def rule_ids(self) -> list[int]:
        return [rid for rid, ok in enumerate(self.alive) if ok]

    def program(self) -> GroundProgram:
        return GroundProgram(self.atoms, (self.keys[rid] for rid in self.rule_ids()), self.annotation)

    def known(self, scope=None) -> PartialInterpretation:
        s = frozenset(self.atoms.ids() if scope is None else scope)
        return PartialInterpretation(s & self.facts, frozenset(a for a in s if not self.is_head(a)))

    # primitive edits

    def _fact_event(self, a: int) -> None:
        self.facts.add(a)
        self.queues["S"].extend((rid, a) for rid in self.pos_occ.get(a, ()))
        self.queues["N"].extend((rid, a) for rid in self.neg_occ.get(a, ()))

    def _unhead_event(self, a: int) -> None:
        self.queues["P"].extend((rid, a) for rid in self.neg_occ.get(a, ()))
        self.queues["F"].extend((rid, a) for rid in self.pos_occ.get(a, ()))

    def _delete(self, rid: int, merged: bool = False) -> None:
        h = self.head[rid]
        pos, neg = self.pos[rid], self.neg[rid]
        if not pos and not neg and not merged:
            raise MonotonicityError(f"fact {self.atoms.text(h)} would be deleted")
        self.alive[rid] = False
        if self.by_key.get(self.keys[rid]) == rid:
            del self.by_key[self.keys[rid]]
        for a in pos:
            self.pos_occ[a].discard(rid)
        for a in neg:
            self.neg_occ[a].discard(rid)
        self.size -= 1 + len(pos) + len(neg)
        rs = self.rules_of[h]
        rs.discard(rid)
        if not rs:
            self.n_heads -= 1
            if h in self.facts:
                raise MonotonicityError(f"fact {self.atoms.text(h)} lost its last rule")
            self._unhead_event(h)

    def _shrunk(self, rid: int) -> None:
        """Re-key a rule after losing a body literal; merge duplicates."""
        old = self.keys[rid]
        if self.by_key.get(old) == rid:
            del self.by_key[old]
        new = GroundRule(self.head[rid], frozenset(self.pos[rid]), frozenset(self.neg[rid]))
        self.keys[rid] = new
        other = self.by_key.get(new)
        if other is not None:
            self._delete(rid, merged=True)
            return
        self.by_key[new] = rid
        n = len(self.pos[rid]) + len(self.neg[rid])
        if n == 0:
            if self.head[rid] not in self.facts:
                self._fact_event(self.head[rid])
        elif n == 1:
            self.queues["R"].append((rid, None))

    def _remove_pos(self, rid: int, a: int) -> None:
        self.pos[rid].discard(a)
        self.pos_occ[a].discard(rid)
        self.size -= 1
        self._shrunk(rid)

    def _remove_neg(self, rid: int, a: int) -> None:
        self.neg[rid].discard(a)
        self.neg_occ[a].discard(rid)
        self.size -= 1
        self._shrunk(rid)

    def _applied(self, letter: str, size_before: int, facts_before: int, heads_before: int | None = None) -> None:
        if self.size >= size_before:
            raise MonotonicityError(f"{letter} did not shrink the program ({size_before} -> {self.size})")
        if len(self.facts) < facts_before:
            raise MonotonicityError(f"{letter} removed a fact")
        if heads_before is not None and self.n_heads > heads_before:
            raise MonotonicityError(f"{letter} added a head")
        self.changes += 1
        self.stats.count(letter)

    # single applications; each returns True if it changed the program

    def _redex(self, letter: str, rid: int, a) -> bool:
        if not self.alive[rid]:
            return False
        if letter == "P":
            return a in self.neg[rid] and not self.is_head(a)
        if letter == "N":
            return a in self.neg[rid] and a in self.facts
        if letter == "S":
            return a in self.pos[rid] and a in self.facts
        if letter == "F":
            return a in self.pos[rid] and not self.is_head(a)
        if letter == "R":
            return self._r_redex(rid)
        raise ValueError(letter)

    def _fire(self, letter: str, rid: int, a) -> None:
        before, facts, heads = self.size, len(self.facts), self.n_heads
        if letter == "P":
            self._remove_neg(rid, a)
        elif letter == "S":
            self._remove_pos(rid, a)
        elif letter in "NF":
            self._delete(rid)
        elif letter == "R":
            (b,) = self.pos[rid]
            self._remove_pos(rid, b)
        self._applied(letter, before, facts, heads)

    def _is_filter(self, head: int, b: int) -> bool:
        ann = self.annotation
        f = ann.filter_of.get(self.atoms.pred(head))
        return f is not None and self.atoms.pred(b) == f

    def _r_redex(self, rid: int) -> bool:
        if self.annotation is None or self.neg[rid] or len(self.pos[rid]) != 1:
            return False
        (b,) = self.pos[rid]
        return self._is_filter(self.head[rid], b) and self.is_head(b)

    # normal-form passes

    def normal_form(self, letter: str) -> bool:
        """Apply ``letter`` until irreducible; True if anything changed."""
        start = self.changes
        if letter == "L":
            self.apply_L()
        elif letter == "M":
            self.apply_M()
        else:
            if letter == "R" and self.annotation is None:
                log.warning("R applied to a program without magic annotation; no-op")
                self.queues["R"].clear()
                return False
            q = self.queues[letter]
            while q:
                rid, a = q.popleft()
                if self._redex(letter, rid, a):
                    self._fire(letter, rid, a)
        if self.debug:
            self.check()
        return self.changes != start

    def possible(self) -> set[int]:
        """lfp of immediate consequences with all negative literals assumed true."""
        need = {}
        ready = []
        for rid in self.rule_ids():
            n = len(self.pos[rid])
            need[rid] = n
            if n == 0:
                ready.append(rid)
        out: set[int] = set()
        while ready:
            h = self.head[ready.pop()]
            if h in out:
                continue
            out.add(h)
            for rid in self.pos_occ.get(h, ()):
                need[rid] -= 1
                if need[rid] == 0:
                    ready.append(rid)
        return out

    def apply_L(self) -> int:
        """One loop-detection step with the greatest unfounded set; returns deletions."""
        self.stats.count("L", work=self.size)
        ok = self.possible()
        doomed = [rid for rid in self.rule_ids() if self.head[rid] not in ok]
        if not doomed:
            return 0
        before, facts, heads = self.size, len(self.facts), self.n_heads
        for rid in doomed:
            if self.alive[rid]:
                self._delete(rid)
        if self.size >= before or len(self.facts) < facts or self.n_heads > heads:
            raise MonotonicityError("L did not shrink the program")
        self.changes += 1
        self.stats.l_deleted += len(doomed)
        return len(doomed)

    def apply_M(self) -> None:
        if self.annotation is None:
            log.warning("M applied to a program without magic annotation; no-op")
            return
        magic = self.annotation.magic_predicates
        for rid in self.rule_ids():
            if self.atoms.pred(self.head[rid]) in magic:
                continue
            for b in sorted(self.pos[rid]):
                if not self.alive[rid]:
                    break
                if b in self.pos[rid] and self._is_filter(self.head[rid], b) and self.is_head(b):
                    before, facts, heads = self.size, len(self.facts), self.n_heads
                    self._remove_pos(rid, b)
                    self._applied("M", before, facts, heads)

    # random interleavings (confluence testing)

    def run_random(self, rng: random.Random, letters: str = "PSNFL") -> None:
        """Apply single random steps until no letter in ``letters`` applies."""
        l_stale = "L" not in letters
        while True:
            choices = [c for c in letters if c != "L" and self.queues[c]]
            if not l_stale:
                choices.append("L")
            if not choices:
                return
            c = rng.choice(choices)
            if c == "L":
                before = self.changes
                self.apply_L()
                l_stale = self.changes == before
                continue
            q = self.queues[c]
            i = rng.randrange(len(q))
            q[i], q[0] = q[0], q[i]
            rid, a = q.popleft()
            if self._redex(c, rid, a):
                self._fire(c, rid, a)
                if "L" in letters:
                    l_stale = False

    # consistency

    def check(self) -> None:
        """Recompute facts, heads and size from scratch and compare."""
        prog = self.program()
        prog.check_caches()
        assert prog.facts() == frozenset(self.facts), "facts out of sync"
        assert prog.heads() == frozenset(self.heads()), "heads out of sync"
        assert prog.literal_count() == self.size, "size out of sync"
        assert len(prog.heads()) == self.n_heads, "head count out of sync"
        for rid in self.rule_ids():
            assert self.by_key[self.keys[rid]] == rid
            assert self.keys[rid] == GroundRule(self.head[rid], frozenset(self.pos[rid]), frozenset(self.neg[rid]))


# functional wrappers over one-letter normal forms


def _one(program: GroundProgram, letter: str, stats=None) -> GroundProgram:
    s = RewriteState(program, stats)
    s.normal_form(letter)
    return s.program()


def normal_form_P(program: GroundProgram, stats=None) -> GroundProgram:
    return _one(program, "P", stats)


def normal_form_N(program: GroundProgram, stats=None) -> GroundProgram:
    return _one(program, "N", stats)


def normal_form_S(program: GroundProgram, stats=None) -> GroundProgram:
    return _one(program, "S", stats)


def normal_form_F(program: GroundProgram, stats=None) -> GroundProgram:
    return _one(program, "F", stats)


def apply_L(program: GroundProgram, stats=None) -> GroundProgram:
    return _one(program, "L", stats)


def _require_meta(program: GroundProgram) -> None:
    if program.annotation is None:
        raise MagicMetaMissing("program carries no magic annotation")


def apply_M(program: GroundProgram, stats=None) -> GroundProgram:
    _require_meta(program)
    return _one(program, "M", stats)


def apply_R(program: GroundProgram, stats=None) -> GroundProgram:
    _require_meta(program)
    return _one(program, "R", stats)


def possible_atoms(program: GroundProgram, stats: EvalStats | None = None) -> set[int]:
    """Atoms derivable when every negative literal is taken as true (counting algorithm)."""
    rules = program.sorted_rules()
    waiting: dict[int, list[int]] = defaultdict(list)
    need = []
    ready = []
    for i, r in enumerate(rules):
        need.append(len(r.pos))
        for a in r.pos:
            waiting[a].append(i)
        if not r.pos:
            ready.append(i)
    out: set[int] = set()
    while ready:
        h = rules[ready.pop()].head
        if h in out:
            continue
        out.add(h)
        for i in waiting.get(h, ()):
            need[i] -= 1
            if need[i] == 0:
                ready.append(i)
    if stats is not None:
        stats.work_units += program.literal_count()
    return out


def remainder(program: GroundProgram, stats: EvalStats | None = None, debug: bool = False) -> GroundProgram:
    """The unique normal form under P, S, N, F and L."""
    from .strategy import named, run_state

    s = RewriteState(program, stats, debug=debug)
    run_state(named("remainder"), s)
    return s.program()


def wred(program: GroundProgram, w: PartialInterpretation) -> GroundProgram:
    """Delete rules with a body literal false in ``w``; drop literals true in ``w``."""
    out = GroundProgram(program.atoms, annotation=program.annotation)
    for r in program:
        if r.pos & w.false or r.neg & w.true:
            continue
        out.add(GroundRule(r.head, r.pos - w.true, r.neg - w.false))
    return out
