"""Built-in program families for benchmarks and random generators for fuzzing."""

from __future__ import annotations

import random

from .core import Atom, GroundProgram, GroundRule, Literal, Program, Rule
from .parser import Query, parse_program

CHAIN_RULES = """
p(X) :- t(X,Y,Z), not p(Y), not p(Z).
p(X) :- p0(X).
"""

LOOP_PROGRAM = """
p.
q :- not p.
q :- r.
r :- q.
"""


def _chain_facts(n: int, p0: str, first: str) -> str:
    lines = [f"p0({p0}).", f"t(a,a,{first})."]
    lines += [f"t(b{i},c{i},b{i + 1})." for i in range(1, n + 1)]
    return "\n".join(lines)


def negative_chain(n: int) -> Program:
    """Negative chain p(b1) .. p(b_n) whose alternating fixpoint needs about n/2 rounds."""
    return parse_program(CHAIN_RULES + _chain_facts(n, "c2", "b1"))


def negative_chain_ground(n: int) -> GroundProgram:
    """The simplified ground chain: p(a), p(b1..bn) with two negative conditions each, plus p(c2)."""
    gp = GroundProgram()
    at = gp.atoms
    p = lambda c: at.intern("p", (c,))  # noqa: E731
    gp.add(GroundRule(p("a"), frozenset(), frozenset({p("a"), p("b1")})))
    for i in range(1, n + 1):
        gp.add(GroundRule(p(f"b{i}"), frozenset(), frozenset({p(f"c{i}"), p(f"b{i + 1}")})))
    gp.add_fact(p("c2"))
    return gp


def loop_program() -> Program:
    return parse_program(LOOP_PROGRAM)


def sparse_chain(n: int) -> Program:
    """Chain whose only p0 fact sits at c_{n/4}, so a query on p(a) only needs a quarter of it."""
    return parse_program(CHAIN_RULES + _chain_facts(n, f"c{max(n // 4, 1)}", "b1"))


def sparse_chain_with_loop(n: int) -> Program:
    return parse_program(CHAIN_RULES + "p(X) :- p(X).\n" + _chain_facts(n, f"c{max(n // 4, 1)}", "b1"))


QUERY_A = Query(Atom("p", ("a",)))

FAMILIES = {
    "exA5": (negative_chain, None),
    "exA71": (sparse_chain, QUERY_A),
    "exA5loop": (sparse_chain_with_loop, QUERY_A),
}


def random_ground_program(
    rng: random.Random,
    max_atoms: int = 30,
    max_rules: int = 60,
    neg_prob: float = 0.4,
    max_body: int = 4,
) -> GroundProgram:
    """Propositional program over a random pool; bodies up to ``max_body`` literals."""
    gp = GroundProgram()
    n_atoms = rng.randint(1, max_atoms)
    ids = [gp.atoms.intern(f"a{i}") for i in range(n_atoms)]
    for _ in range(rng.randint(0, max_rules)):
        head = rng.choice(ids)
        pos, neg = set(), set()
        for _ in range(rng.randint(0, max_body)):
            (neg if rng.random() < neg_prob else pos).add(rng.choice(ids))
        gp.add(GroundRule(head, frozenset(pos), frozenset(neg)))
    return gp


def random_program(
    rng: random.Random,
    n_preds: int = 4,
    n_consts: int = 3,
    max_rules: int = 9,
    max_facts: int = 12,
    neg_prob: float = 0.4,
) -> Program:
    """Small range-restricted program: EDB facts over e0/e1, IDB rules over q0.."""
    consts = [f"k{i}" for i in range(n_consts)]
    arity = {"e0": 1, "e1": 2}
    for i in range(n_preds):
        arity[f"q{i}"] = rng.randint(0, 2)
    idb = [p for p in arity if p.startswith("q")]
    rules: list[Rule] = []
    for _ in range(rng.randint(1, max_facts)):
        p = rng.choice(["e0", "e1"])
        rules.append(Rule(Atom(p, tuple(rng.choice(consts) for _ in range(arity[p])))))
    variables = ["X", "Y", "Z"]
    for _ in range(rng.randint(1, max_rules)):
        body: list[Literal] = []
        bound: list[str] = []
        for _ in range(rng.randint(1, 3)):
            p = rng.choice(["e0", "e1"] if rng.random() < 0.5 else idb)
            args = tuple(rng.choice(variables + consts[:1]) for _ in range(arity[p]))
            body.append(Literal(Atom(p, args)))
            bound += [t for t in args if t[0].isupper()]
        for _ in range(rng.randint(0, 2)):
            if rng.random() < neg_prob * 2:
                p = rng.choice(idb)
                pool = bound or consts
                body.append(Literal(Atom(p, tuple(rng.choice(pool) for _ in range(arity[p]))), False))
        head_pred = rng.choice(idb)
        pool = bound or consts
        head = Atom(head_pred, tuple(rng.choice(pool) for _ in range(arity[head_pred])))
        rng.shuffle(body)
        rules.append(Rule(head, tuple(body)))
    if rng.random() < 0.3:
        p = rng.choice(idb)
        rules.append(Rule(Atom(p, tuple(rng.choice(consts) for _ in range(arity[p])))))
    return Program(rules)


def random_query(rng: random.Random, program: Program, prefer: list | None = None) -> Query:
    """A ground query; with ``prefer`` (candidate atoms) given, usually one of those."""
    if prefer and rng.random() < 0.8:
        return Query(rng.choice(prefer))
    preds = sorted(program.predicates())
    idb = sorted(program.head_predicates() - program.edb_predicates())
    pred = rng.choice(idb or preds)
    consts = program.constants() or ["k0"]
    return Query(Atom(pred, tuple(rng.choice(consts) for _ in range(program.arities[pred]))))


def query_candidates(program: Program) -> list[Atom]:
    """Derivable-looking IDB atoms: heads of the relevant ground instances."""
    from .ground import intelligent_ground

    gp = intelligent_ground(program)
    idb = program.predicates() - program.edb_predicates()
    return sorted({gp.atoms.atom(r.head) for r in gp if gp.atoms.pred(r.head) in idb})
