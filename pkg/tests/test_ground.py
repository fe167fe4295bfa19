import random

import pytest

from condfact.core import AtomTable, GroundProgram, GroundRule
from condfact.families import negative_chain, random_program
from condfact.ground import (
    GroundingError,
    ground_scc,
    has_mixed_recursion,
    herbrand_ground,
    intelligent_ground,
    scc_evaluate,
    scc_evaluate_run,
    scc_partition,
)
from condfact.oracle import lfp_t
from condfact.parser import parse_program, serialize_program
from condfact.rewrite import EvalStats, remainder


def lines(gp):
    return sorted(serialize_program(gp).splitlines())


def test_herbrand_instantiation():
    gp = herbrand_ground(parse_program("p(X) :- q(X). q(a). r(b)."))
    assert {l for l in lines(gp) if l.startswith("p")} == {"p(a) :- q(a).", "p(b) :- q(b)."}


def test_herbrand_size_of_chain_rule():
    n = 2
    consts = 2 * n + 2  # a, b1..b3, c1..c2
    gp = herbrand_ground(negative_chain(n))
    first = [r for r in gp if len(r.neg) >= 1 and gp.atoms.pred(next(iter(r.pos))) == "t"]
    assert len(first) == consts**3


def test_herbrand_guard():
    with pytest.raises(GroundingError):
        herbrand_ground(negative_chain(10), limit=1000)


def test_propositional_program_grounds_to_itself():
    text = "a :- b, not c.\nb.\n"
    assert lines(herbrand_ground(parse_program(text))) == sorted(text.splitlines())


def test_intelligent_grounding_of_chain():
    n = 4
    gp = intelligent_ground(negative_chain(n))
    t = gp.atoms.text
    p_rules = {(t(r.head), frozenset(map(t, r.pos)), frozenset(map(t, r.neg)))
               for r in gp if gp.atoms.pred(r.head) == "p"}
    assert len(p_rules) == n + 2
    assert ("p(c2)", frozenset({"p0(c2)"}), frozenset()) in p_rules
    assert ("p(a)", frozenset({"t(a,a,b1)"}), frozenset({"p(a)", "p(b1)"})) in p_rules
    assert ("p(b4)", frozenset({"t(b4,c4,b5)"}), frozenset({"p(c4)", "p(b5)"})) in p_rules


def test_intelligent_grounding_drops_unreachable_rules():
    assert lines(intelligent_ground(parse_program("p(a). q(X) :- r(X)."))) == ["p(a)."]


def test_intelligent_grounding_needs_range_restriction():
    with pytest.raises(GroundingError, match="range-restricted"):
        intelligent_ground(parse_program("p(X) :- not q(X). q(a)."))


def test_definite_program_heads_are_its_least_model():
    p = parse_program("e(a,b). e(b,c). e(c,a). r(X,Y) :- e(X,Y). r(X,Z) :- r(X,Y), e(Y,Z).")
    ig = intelligent_ground(p)
    assert len({r.head for r in ig}) == 3 + 9


def test_scc_partition_groups_mutual_recursion():
    part = scc_partition(parse_program("p :- q. q :- p. r :- q."))
    assert part.predicates == [frozenset({"p", "q"}), frozenset({"r"})]


def test_scc_partition_orders_acyclic_and_self_recursive():
    part = scc_partition(parse_program("c :- b. b :- a. a :- not a."))
    assert part.predicates == [frozenset({"a"}), frozenset({"b"}), frozenset({"c"})]


def test_scc_partition_condition_on_random_programs():
    rng = random.Random(7)
    for _ in range(100):
        p = random_program(rng)
        part = scc_partition(p)
        for i, group in enumerate(part.groups):
            used = {r.head.pred for r in group} | {l.atom.pred for r in group for l in r.body}
            for later in part.groups[i + 1:]:
                assert not used & {r.head.pred for r in later}


def test_ground_scc_boundaries():
    assert len(ground_scc([], GroundProgram())) == 0
    p = negative_chain(3)
    a, b = ground_scc(p.rules, atoms=AtomTable()), intelligent_ground(p, AtomTable())
    assert lines(a) == lines(b)


def test_ground_scc_on_chain_group_matches_intelligent_grounding():
    p = negative_chain(4)
    t = AtomTable()
    part = scc_partition(p)
    r_prev = GroundProgram(t)
    for group in part.groups:
        if any(r.head.pred == "p" for r in group):
            new = ground_scc(group, remainder(r_prev))
            expect = [l for l in lines(intelligent_ground(p, t)) if l.startswith("p(")]
            assert lines(new) == expect
        else:
            for r in ground_scc(group, r_prev):
                r_prev.add(r)


def test_eager_simplification_reproduces_the_linear_chain():
    n = 6
    run = scc_evaluate_run(negative_chain(n), simplify=True)
    p_group = [g for g in run.grounded if any(g.atoms.pred(r.head) == "p" for r in g)][0]
    for r in p_group:
        assert all(p_group.atoms.pred(a) == "p" for a in r.pos | r.neg)
    assert len(p_group) == n + 2


def test_stratified_program_needs_no_conditional_facts():
    p = parse_program("e(a). e(b). f(b). q(X) :- e(X), not f(X). s(X) :- e(X), not q(X).")
    rem = scc_evaluate(p)
    assert all(r.is_fact for r in rem)
    assert "q(a)." in lines(rem) and "s(b)." in lines(rem)


def test_mixed_recursion_detection():
    assert not has_mixed_recursion(negative_chain(3))
    assert has_mixed_recursion(parse_program("p(X) :- p(X). p(X) :- t(X,Y), not p(Y)."))
    assert not has_mixed_recursion(parse_program("p :- q. q :- p. r :- not p."))


def test_program_equivalences_on_random_programs():
    rng = random.Random(11)
    for _ in range(60):
        p = random_program(rng)
        t = AtomTable()
        naive = remainder(herbrand_ground(p, t))
        smart = remainder(intelligent_ground(p, t))
        scc = scc_evaluate(p, atoms=t)
        assert naive == smart == scc
        ig = herbrand_ground(p, t)
        assert intelligent_ground(p, t).heads() == lfp_t([GroundRule(r.head, r.pos) for r in ig])


def test_no_loop_deletions_without_mixed_recursion():
    rng = random.Random(13)
    checked = 0
    for _ in range(200):
        p = random_program(rng)
        if has_mixed_recursion(p):
            continue
        st = EvalStats()
        scc_evaluate(p, stats=st)
        assert st.l_deleted == 0
        checked += 1
    assert checked > 50
