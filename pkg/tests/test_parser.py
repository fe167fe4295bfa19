import pytest
from hypothesis import given
from hypothesis import strategies as st

from condfact.core import Atom, GroundProgram, GroundRule
from condfact.families import negative_chain_ground
from condfact.ground import herbrand_ground
from condfact.parser import (
    Letter,
    ParseError,
    Seq,
    Star,
    parse_program,
    parse_query,
    parse_strategy,
    serialize_program,
)
from condfact.rewrite import remainder


def test_chain_rule():
    (r,) = parse_program("p(X) :- t(X,Y,Z), not p(Y), not p(Z).").rules
    assert r.pos == (Atom("t", ("X", "Y", "Z")),)
    assert set(r.neg) == {Atom("p", ("Y",)), Atom("p", ("Z",))}


def test_fact_and_duplicates():
    (f,) = parse_program("p0(c2).").rules
    assert f.is_fact and f.head == Atom("p0", ("c2",))
    (r,) = parse_program("q :- q, q.").rules
    assert r.pos == (Atom("q"),)


def test_comments_and_propositional_atoms():
    p = parse_program("% loop\np.\nq :- not p. % trailing\n")
    assert [str(r) for r in p.rules] == ["p.", "q :- not p."]


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as e:
        parse_program("p.\nq :- r\n")
    assert e.value.line == 3


def test_arity_mismatch_names_predicate():
    with pytest.raises(ParseError, match="'p'"):
        parse_program("p(a).\nq :- p(a,b).")


def test_anonymous_variables_are_distinct():
    (r,) = parse_program("p(X) :- t(X,_,_).").rules
    assert len(r.variables()) == 3


def test_queries():
    assert parse_query("?- p(a).").goal == Atom("p", ("a",))
    assert parse_query("?- p(X).").pattern == "f"
    assert parse_query("q(a,B)").pattern == "bf"
    with pytest.raises(ParseError):
        parse_query("?- z(a).", parse_program("p(a)."))


def test_strategy_examples():
    assert parse_strategy("(PSNF)*") == Star(Seq(tuple(map(Letter, "PSNF"))))
    assert parse_strategy("((PSNF)*L)*") == Star(Seq((Star(Seq(tuple(map(Letter, "PSNF")))), Letter("L"))))
    assert parse_strategy("(P(SR)*NLF)*") == Star(
        Seq((Letter("P"), Star(Seq((Letter("S"), Letter("R")))), Letter("N"), Letter("L"), Letter("F")))
    )


@pytest.mark.parametrize("bad", ["", "PX", "((PSNF)*R)*L)*", "(PS", "*P", "()"])
def test_strategy_errors(bad):
    with pytest.raises(ParseError):
        parse_strategy(bad)


def test_strategy_whitespace_and_flattening():
    assert parse_strategy(" P S (N F) ") == parse_strategy("PSNF")


exprs = st.recursive(
    st.sampled_from("PSNFLMR").map(Letter),
    lambda inner: st.one_of(
        st.lists(inner, min_size=2, max_size=4).map(lambda xs: parse_strategy("".join(map(str, xs)))),
        inner.map(Star),
    ),
    max_leaves=10,
)


@given(exprs)
def test_strategy_print_parse_round_trip(e):
    assert parse_strategy(str(e)) == parse_strategy(str(parse_strategy(str(e))))
    assert str(parse_strategy(str(e))) == str(e)


def test_serialize_fact():
    gp = GroundProgram()
    gp.add_fact(gp.atoms.intern("p"))
    assert serialize_program(gp) == "p.\n"


def test_serialize_chain_remainder():
    text = serialize_program(remainder(negative_chain_ground(4)))
    assert sorted(text.split()) == ["p(b1).", "p(b4).", "p(c2)."]


@given(st.lists(st.tuples(st.integers(0, 4), st.frozensets(st.integers(0, 4), max_size=3),
                          st.frozensets(st.integers(0, 4), max_size=3)), max_size=12))
def test_serialize_round_trip(rules):
    gp = GroundProgram()
    names = [gp.atoms.intern("p", (f"c{i}",)) for i in range(5)]
    for h, p, n in rules:
        gp.add(GroundRule(names[h], p, n))
    back = herbrand_ground(parse_program(serialize_program(gp)))
    assert _as_text(back) == _as_text(gp)


def _as_text(gp):
    t = gp.atoms.text
    return {(t(r.head), frozenset(map(t, r.pos)), frozenset(map(t, r.neg))) for r in gp}
