import random

import pytest
from hypothesis import given

from condfact.core import known
from condfact.families import negative_chain, negative_chain_ground, loop_program
from condfact.ground import herbrand_ground, intelligent_ground
from condfact.oracle import afp
from condfact.parser import Letter, Seq, Star, parse_program
from condfact.rewrite import EvalStats, RewriteState, remainder
from condfact.strategy import NAMED, StrategyError, afp_snapshots, named, resolve, run

from gen import ground_programs


def loop():
    return herbrand_ground(loop_program())


def test_fitting_leaves_the_positive_loop():
    gp = loop()
    out = run("fitting", gp).final
    t = gp.atoms.lookup
    assert t("p") in out.facts()
    assert {t("q"), t("r")} <= out.heads()


def test_remainder_strategy_resolves_the_loop():
    gp = loop()
    out = run("remainder", gp).final
    assert sorted(out.rule_text(r) for r in out) == ["p."]


def test_running_on_a_remainder_changes_nothing():
    rem = remainder(negative_chain_ground(6))
    r = run("remainder", rem)
    assert r.final == rem
    assert sum(r.stats.applications[c] for c in "PSNF") == 0


def test_named_expressions():
    psnf = Seq(tuple(map(Letter, "PSNF")))
    assert named("fitting") == Star(psnf)
    assert named("remainder") == Star(Seq((Star(psnf), Letter("L"))))
    assert resolve("PS") == Seq((Letter("P"), Letter("S")))
    assert set(NAMED) == {"fitting", "afp", "remainder", "wfmst", "wfrem", "mafp", "mrem"}
    with pytest.raises(StrategyError):
        named("nope")


def test_magic_letters_need_an_annotation():
    with pytest.raises(StrategyError):
        run("mrem", loop())


def test_schedule_matches_alternating_fixpoint_on_the_chain():
    gp = intelligent_ground(negative_chain(4))
    sched = afp_snapshots(gp)
    assert sched.steps == afp(gp).steps
    assert sched.final == remainder(gp)


def test_definite_program_reaches_its_fixpoint_at_once():
    gp = herbrand_ground(parse_program("a. b :- a. c :- b. d :- e. e :- d."))
    sched = afp_snapshots(gp)
    assert len(sched.steps) == 1
    k, u = sched.steps[0]
    assert k == u == {gp.atoms.lookup(x) for x in "abc"}


@given(ground_programs())
def test_random_letter_orders_reach_the_remainder(gp):
    rng = random.Random(len(gp))
    s = RewriteState(gp)
    s.run_random(rng)
    assert s.program() == remainder(gp)


def _work(strategy, n):
    st = EvalStats()
    run(strategy, negative_chain_ground(n), st)
    return st.work_units


def test_remainder_does_less_work_than_afp_and_the_gap_grows():
    ratios = []
    for n in (20, 40, 80):
        w_afp, w_rem = _work("afp", n), _work("remainder", n)
        assert w_rem <= w_afp
        ratios.append(w_afp / w_rem)
    assert ratios == sorted(ratios)


def test_known_of_fitting_result_is_the_fitting_model():
    from condfact.oracle import fitting_lfp

    gp = intelligent_ground(negative_chain(5))
    out = run("fitting", gp).final
    k = known(out, set(gp.atoms.ids()))
    assert k == fitting_lfp(gp)
