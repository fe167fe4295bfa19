import random

import pytest
from gen import ground_programs
from hypothesis import given

from condfact.core import GroundProgram, GroundRule, MagicAnnotation, PartialInterpretation, known
from condfact.families import negative_chain_ground, loop_program
from condfact.ground import herbrand_ground
from condfact.oracle import afp, lfp_t
from condfact.parser import parse_program, serialize_program
from condfact.rewrite import (
    EvalStats,
    MagicMetaMissing,
    MonotonicityError,
    RewriteState,
    apply_L,
    apply_M,
    apply_R,
    normal_form_F,
    normal_form_N,
    normal_form_P,
    normal_form_S,
    possible_atoms,
    remainder,
    wred,
)


def g(text):
    return herbrand_ground(parse_program(text))


def lines(gp):
    return sorted(serialize_program(gp).splitlines())


def test_positive_reduction():
    assert lines(normal_form_P(g("b :- not a."))) == ["b."]
    assert lines(normal_form_P(g("a. b :- not a."))) == ["a.", "b :- not a."]


def test_positive_reduction_on_chain_end():
    gp = negative_chain_ground(4)
    out = normal_form_P(gp)
    assert "p(b4)." in lines(out)


def test_negative_reduction():
    out = normal_form_N(herbrand_ground(loop_program()))
    assert lines(out) == ["p.", "q :- r.", "r :- q."]
    assert lines(normal_form_N(g("a :- not b."))) == ["a :- not b."]
    assert lines(normal_form_N(g("b. a :- not b. a :- c."))) == ["a :- c.", "b."]


def test_success():
    assert lines(normal_form_S(g("a. b :- a."))) == ["a.", "b."]
    assert lines(normal_form_S(g("a. b :- a, not c."))) == ["a.", "b :- not c."]


@given(ground_programs())
def test_success_structural_law(gp):
    out = normal_form_S(gp)
    f = out.facts()
    expect = {GroundRule(r.head, r.pos - f, r.neg) for r in gp}
    assert out.rules == expect


def test_failure():
    assert len(normal_form_F(g("b :- a."))) == 0
    assert lines(normal_form_F(g("a :- b. b :- a."))) == ["a :- b.", "b :- a."]
    assert len(normal_form_F(g("c :- b. b :- a."))) == 0


def test_possible_atoms():
    gp = g("p. q :- r. r :- q.")
    assert possible_atoms(gp) == {gp.atoms.lookup("p")}
    gp = g("a :- not b.")
    assert possible_atoms(gp) == {gp.atoms.lookup("a")}
    assert possible_atoms(GroundProgram()) == set()


def test_possible_atoms_charges_program_size():
    gp = g("p. q :- r. r :- q.")
    st = EvalStats()
    possible_atoms(gp, st)
    assert st.work_units == 5


@given(ground_programs())
def test_possible_atoms_matches_naive_lfp(gp):
    stripped = [GroundRule(r.head, r.pos) for r in gp]
    assert possible_atoms(gp) == lfp_t(stripped)


def test_loop_detection():
    assert lines(apply_L(g("p. q :- r. r :- q."))) == ["p."]
    # hand-run of the counting algorithm: nothing is derivable, so every rule goes
    assert len(apply_L(g("p :- q. q :- p. r :- q."))) == 0
    assert lines(apply_L(g("p. q :- q."))) == ["p."]


def test_loop_detection_counts_once_even_without_deletions():
    st = EvalStats()
    s = RewriteState(g("a :- not b."), st)
    s.normal_form("L")
    assert st.applications["L"] == 1 and st.l_deleted == 0


def magic(text, filters):
    gp = g(text)
    ann = MagicAnnotation(frozenset(filters.values()), filters)
    return gp.with_annotation(ann)


def test_magic_reduction():
    gp = magic("m_p(a). p(a) :- m_p(a), not q(a).", {"p": "m_p"})
    assert lines(apply_M(gp)) == ["m_p(a).", "p(a) :- not q(a)."]
    gp = magic("m_p(a) :- not x. p(a) :- m_p(a).", {"p": "m_p"})
    assert lines(apply_M(gp)) == ["m_p(a) :- not x.", "p(a)."]
    gp = magic("p(a) :- m_p(b).", {"p": "m_p"})
    assert lines(apply_M(gp)) == ["p(a) :- m_p(b)."]


def test_restricted_magic_reduction():
    gp = magic("m_p(a) :- not x. p(a) :- m_p(a).", {"p": "m_p"})
    assert lines(apply_R(gp)) == ["m_p(a) :- not x.", "p(a)."]
    gp = magic("m_p(a) :- not x. p(a) :- m_p(a), not q(a).", {"p": "m_p"})
    assert lines(apply_R(gp)) == ["m_p(a) :- not x.", "p(a) :- m_p(a), not q(a)."]
    gp = magic("p(a) :- m_p(a).", {"p": "m_p"})
    assert lines(apply_R(gp)) == ["p(a) :- m_p(a)."]


def test_magic_letters_need_annotation():
    with pytest.raises(MagicMetaMissing):
        apply_M(g("p :- q."))
    with pytest.raises(MagicMetaMissing):
        apply_R(g("p :- q."))


def test_magic_letters_are_inert_inside_the_engine_without_annotation(caplog):
    s = RewriteState(g("p :- q. q."))
    assert not s.normal_form("M")
    assert not s.normal_form("R")
    assert "without magic annotation" in caplog.text


def test_remainder_examples():
    rem = remainder(negative_chain_ground(4))
    at = rem.atoms.lookup
    assert rem.facts() == {at("p", ("b1",)), at("p", ("b4",)), at("p", ("c2",))}
    assert len(rem) == 3
    assert lines(remainder(herbrand_ground(loop_program()))) == ["p."]
    two = g("a :- not b. b :- not a.")
    assert remainder(two) == two


def test_wred():
    gp = g("a :- b.")
    assert wred(gp, PartialInterpretation()) == gp
    b = gp.atoms.lookup("b")
    assert len(wred(gp, PartialInterpretation(frozenset(), frozenset({b})))) == 0


@given(ground_programs())
def test_remainder_is_wred_by_well_founded_model(gp):
    assert remainder(gp) == wred(gp, afp(gp).model)


@given(ground_programs())
def test_known_remainder_is_well_founded_model(gp):
    assert known(remainder(gp)) == afp(gp).model


@given(ground_programs())
def test_structural_laws(gp):
    n = normal_form_N(gp)
    assert not any(r.neg & n.facts() for r in n)
    p = normal_form_P(gp)
    assert all(r.neg <= p.heads() for r in p)


@given(ground_programs())
def test_lf_fixpoint_is_its_own_grounding(gp):
    s = RewriteState(gp)
    while True:
        before = s.changes
        s.normal_form("L")
        s.normal_form("F")
        if s.changes == before:
            break
    out = s.program()
    heads = lfp_t(GroundRule(r.head, r.pos) for r in out)
    assert out.rules == {r for r in out if r.pos <= heads}
    assert out.heads() == heads


@given(ground_programs())
def test_every_application_shrinks_and_facts_grow(gp):
    seen = []

    class Watch(RewriteState):
        def _applied(self, letter, size_before, facts_before, heads_before=None):
            seen.append((size_before, self.size, facts_before, len(self.facts)))
            super()._applied(letter, size_before, facts_before, heads_before)

    s = Watch(gp, debug=True)
    s.run_random(random.Random(0))
    assert all(after < before and f1 >= f0 for before, after, f0, f1 in seen)
    assert len(seen) <= gp.literal_count()


@given(ground_programs())
def test_l_applications_bounded_by_rule_count(gp):
    st = EvalStats()
    remainder(gp, st)
    assert st.applications["L"] <= len(gp) + 1


def test_deleting_a_fact_is_refused():
    s = RewriteState(g("a."))
    with pytest.raises(MonotonicityError):
        s._delete(0)


def test_merge_on_shrink_keeps_program_a_set():
    gp = g("a. b :- a, c. b :- c. c :- not d.")
    out = normal_form_S(gp)
    assert lines(out) == ["a.", "b :- c.", "c :- not d."]
    assert out.literal_count() == 5
