"""Command-line front end: ``eval``, ``bench`` and ``fuzz``."""

from __future__ import annotations

import argparse
import csv
import itertools
import logging
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .core import AtomTable, is_variable, GroundProgram, LogicError, PartialInterpretation, known
from .families import FAMILIES, query_candidates, random_ground_program, random_program, random_query
from .ground import GroundingStats, herbrand_ground, intelligent_ground, scc_evaluate_run
from .magic import magic_ground, to_original
from .oracle import afp, fitting_lfp
from .parser import Query, letters_of, parse_program, parse_query, serialize_program
from .rewrite import EvalStats, MonotonicityError, RewriteState, remainder, wred
from .strategy import MAGIC_STRATEGIES, NAMED, resolve, run

log = logging.getLogger("condfact")

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2
CSV_HEADER = ["family", "n", "strategy", "work_units", "P", "S", "N", "F", "L", "M", "R", "true", "undef", "wall_ms"]


@dataclass
class BenchRow:
    family: str
    n: int
    strategy: str
    stats: EvalStats
    true: int
    undef: int
    wall_ms: float

    def cells(self) -> list:
        a = self.stats.applications
        return [self.family, self.n, self.strategy, self.stats.work_units, *(a[c] for c in "PSNFLMR"),
                self.true, self.undef, f"{self.wall_ms:.3f}"]


# evaluation pipeline


@dataclass
class Evaluation:
    ground: GroundProgram
    final: GroundProgram
    stats: EvalStats
    scope: list[int]
    meta: object = None


def evaluate(program, query: Query | None, strategy: str, magic: bool, ground: str, debug: bool = True) -> Evaluation:
    expr = resolve(strategy)
    if letters_of(expr) & set("MR") and not magic:
        raise LogicError(f"strategy {strategy!r} uses M or R, which needs --magic")
    stats = EvalStats()
    gstats = GroundingStats()
    if magic:
        if query is None:
            raise LogicError("--magic requires --query")
        gp, meta = magic_ground(program, query, stats=gstats)
        stats.work_units += gstats.derived
        stats.ground_rules += gstats.derived
        result = run(expr, gp, stats, debug=debug)
        q = meta.query_atom
        scope = _instances(gp, q, mp_constants(gp))
        return Evaluation(gp, result.final, result.stats, scope, meta)

    bad = program.non_range_restricted()
    if bad:
        raise LogicError(f"rule is not range-restricted (try --magic): {bad[0]}")
    table = source_atoms(program)
    if ground == "naive":
        gp = herbrand_ground(program, table)
        stats.work_units += len(gp)
        stats.ground_rules += len(gp)
    elif ground == "scc" and strategy == "remainder":
        sr = scc_evaluate_run(program, simplify=True, atoms=table, stats=stats, debug=debug)
        gp = sr.remainder
    else:
        gp = intelligent_ground(program, table, stats=gstats)
        stats.work_units += gstats.derived
        stats.ground_rules += gstats.derived
    result = run(expr, gp, stats, debug=debug)
    if query is not None:
        q = query.goal
        scope = _instances(gp, q, program.constants())
    else:
        scope = list(gp.atoms.ids())
    return Evaluation(gp, result.final, result.stats, scope)


def source_atoms(program) -> AtomTable:
    """A table pre-filled with every ground atom written in the program."""
    table = AtomTable()
    for r in program.rules:
        for a in (r.head, *(l.atom for l in r.body)):
            if a.is_ground():
                table.intern_atom(a)
    return table


def mp_constants(gp: GroundProgram) -> set[str]:
    return {c for i in gp.atoms.ids() for c in gp.atoms.args(i)}


def _instances(gp: GroundProgram, pattern, constants=None) -> list[int]:
    """Ids of the query's instances: over the program constants if given, else those already interned."""
    from .magic import _matches

    if constants is not None:
        variables = sorted({t for t in pattern.args if is_variable(t)})
        for values in itertools.product(sorted(constants), repeat=len(variables)):
            s = dict(zip(variables, values))
            gp.atoms.intern(pattern.pred, tuple(s.get(t, t) for t in pattern.args))
    return [i for i in gp.atoms.ids() if gp.atoms.pred(i) == pattern.pred and _matches(pattern.args, gp.atoms.args(i))]


def _names(gp: GroundProgram, ids, meta=None) -> list[str]:
    out = []
    for i in sorted(ids):
        a = gp.atoms.atom(i)
        out.append(str(to_original(a, meta)) if meta is not None else str(a))
    return out


def _values(gp: GroundProgram, interp: PartialInterpretation, scope, meta=None) -> dict[str, str]:
    return dict(zip(_names(gp, scope, meta), (interp.value(i) for i in sorted(scope))))


def cmd_eval(args) -> int:
    try:
        program = parse_program(Path(args.program).read_text())
        query = parse_query(args.query, program) if args.query else None
        strategy = args.strategy or ("mrem" if args.magic else "remainder")
        ev = evaluate(program, query, strategy, args.magic, args.ground)
    except (OSError, LogicError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except MonotonicityError as e:
        print(f"monotonicity violation: {e}", file=sys.stderr)
        return EXIT_MISMATCH

    model = known(ev.final, ev.scope)
    if args.output in ("model", "both"):
        print("true: " + " ".join(_names(ev.final, model.true, ev.meta)))
        print("false: " + " ".join(_names(ev.final, model.false, ev.meta)))
        print("undefined: " + " ".join(_names(ev.final, model.undefined(ev.scope), ev.meta)))
    if args.output in ("remainder", "both"):
        sys.stdout.write(serialize_program(ev.final))

    if args.stats:
        with open(args.stats, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            und = len(model.undefined(ev.scope))
            w.writerow(BenchRow(Path(args.program).stem, 0, strategy, ev.stats, len(model.true), und, 0.0).cells())

    if args.check_oracle:
        diff = oracle_diff(program, query, ev)
        if diff:
            for name, (got, want) in sorted(diff.items()):
                print(f"mismatch: {name} strategy={got} oracle={want}", file=sys.stderr)
            return EXIT_MISMATCH
        print("oracle: ok", file=sys.stderr)
    return EXIT_OK


def oracle_diff(program, query, ev: Evaluation) -> dict[str, tuple[str, str]]:
    """Atoms in scope where the strategy result and the alternating fixpoint disagree."""
    got = _values(ev.final, known(ev.final, ev.scope), ev.scope, ev.meta)
    ref_gp = intelligent_ground(program, atoms=None) if program.range_restricted else herbrand_ground(program)
    w = afp(ref_gp).model
    diff = {}
    for name, value in got.items():
        i = ref_gp.atoms.lookup(*_split(name))
        want = "false" if i is None else w.value(i)
        if value != want:
            diff[name] = (value, want)
    return diff


def _split(text: str) -> tuple[str, tuple[str, ...]]:
    from .parser import parse_atom

    a = parse_atom(text)
    return a.pred, tuple(a.args)


# bench


def bench_one(family: str, n: int, strategy: str) -> BenchRow:
    make, query = FAMILIES[family]
    program = make(n)
    stats = EvalStats()
    gstats = GroundingStats()
    t0 = time.perf_counter()
    if strategy in MAGIC_STRATEGIES:
        if query is None:
            raise LogicError(f"family {family} has no query for magic strategy {strategy}")
        gp, _ = magic_ground(program, query, stats=gstats)
    else:
        gp = intelligent_ground(program, stats=gstats)
    stats.work_units += gstats.derived
    stats.ground_rules += gstats.derived
    result = run(resolve(strategy), gp, stats)
    wall = (time.perf_counter() - t0) * 1000
    facts, heads = result.final.facts(), result.final.heads()
    return BenchRow(family, n, strategy, result.stats, len(facts), len(heads - facts), wall)


def cmd_bench(args) -> int:
    if args.family not in FAMILIES:
        print(f"error: unknown family {args.family!r}; choose from {', '.join(FAMILIES)}", file=sys.stderr)
        return EXIT_INPUT
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    try:
        ns = [int(x) for x in args.n.split(",")]
        for s in strategies:
            resolve(s)
    except (ValueError, LogicError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(CSV_HEADER)
        for n in ns:
            for s in strategies:
                try:
                    row = bench_one(args.family, n, s)
                except LogicError as e:
                    print(f"error: {e}", file=sys.stderr)
                    return EXIT_INPUT
                except MonotonicityError as e:
                    print(f"monotonicity violation: {e}", file=sys.stderr)
                    return EXIT_MISMATCH
                w.writerow(row.cells())
    finally:
        if args.out:
            out.close()
    return EXIT_OK


# fuzz


def confluence_failure(gp: GroundProgram, rng: random.Random, k: int = 5) -> str | None:
    expected = remainder(gp)
    for _ in range(k):
        s = RewriteState(gp)
        s.run_random(random.Random(rng.random()))
        if s.program() != expected:
            return "random interleaving reached a different normal form"
    return None


def oracle_failure(gp: GroundProgram, rng: random.Random | None = None) -> str | None:
    rem = remainder(gp)
    w = afp(gp).model
    if known(rem) != w:
        return "known literals of the remainder differ from the alternating fixpoint"
    if wred(gp, w) != rem:
        return "remainder differs from the reduction by the well-founded model"
    if known(run("fitting", gp).final) != fitting_lfp(gp):
        return "fitting strategy differs from the Fitting operator"
    return None


def magic_failure(program, query: Query) -> str | None:
    base = intelligent_ground(program)
    w = afp(base).model
    a = base.atoms.lookup(query.goal.pred, tuple(query.goal.args))
    want = "false" if a is None else w.value(a)
    gp, meta = magic_ground(program, query)
    qa = gp.atoms.lookup(meta.query_atom.pred, tuple(meta.query_atom.args))
    for s in MAGIC_STRATEGIES:
        got = "false" if qa is None else known(run(s, gp).final).value(qa)
        if got != want:
            return f"{s} answers {got}, alternating fixpoint answers {want}"
    return None


def minimize(items: list, fails: Callable[[list], bool]) -> list:
    """Greedy one-at-a-time deletion while the failure persists."""
    cur = list(items)
    i = 0
    while i < len(cur):
        trial = cur[:i] + cur[i + 1:]
        if fails(trial):
            cur = trial
        else:
            i += 1
    return cur


def cmd_fuzz(args) -> int:
    rng = random.Random(args.seed)
    for i in range(args.count):
        if args.mode == "magic":
            p = random_program(rng)
            q = random_query(rng, p, query_candidates(p))
            try:
                msg = magic_failure(p, q)
            except MonotonicityError as e:
                msg = f"monotonicity violation: {e}"
            if msg:
                from .core import Program

                small = minimize(p.rules, lambda rs: _safe(lambda: magic_failure(Program(rs), q)))
                print(f"counterexample #{i} ({msg}) for query {q}:")
                print(Program(small))
                return EXIT_MISMATCH
            continue
        gp = random_ground_program(rng, args.max_atoms, args.max_rules)
        sub = random.Random(rng.random())
        check = confluence_failure if args.mode == "confluence" else oracle_failure
        try:
            msg = check(gp, sub)
        except MonotonicityError as e:
            msg = f"monotonicity violation: {e}"
        if msg:
            seed = sub.random()

            def fails(rules, check=check, atoms=gp.atoms):
                return _safe(lambda: check(GroundProgram(atoms, rules), random.Random(seed)))

            small = minimize(gp.sorted_rules(), fails)
            print(f"counterexample #{i} ({msg}):")
            sys.stdout.write(serialize_program(GroundProgram(gp.atoms, small)))
            return EXIT_MISMATCH
    print("ok")
    return EXIT_OK


def _safe(f) -> bool:
    try:
        return f() is not None
    except MonotonicityError:
        return True


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="condfact", description="Well-founded evaluation by program transformation.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a program")
    e.add_argument("--program", required=True)
    e.add_argument("--query")
    e.add_argument("--strategy", help=f"one of {', '.join(NAMED)} or an expression such as '((PSNF)*L)*'")
    e.add_argument("--magic", action="store_true")
    e.add_argument("--ground", choices=["naive", "intelligent", "scc"], default="scc")
    e.add_argument("--output", choices=["model", "remainder", "both"], default="model")
    e.add_argument("--check-oracle", action="store_true")
    e.add_argument("--stats", metavar="FILE.csv")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="work-count benchmarks as CSV")
    b.add_argument("--family", required=True)
    b.add_argument("--n", default="100,200,400,800")
    b.add_argument("--strategies", default="afp,remainder")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    f = sub.add_parser("fuzz", help="differential and confluence fuzzing")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--count", type=int, default=1000)
    f.add_argument("--max-atoms", type=int, default=30)
    f.add_argument("--max-rules", type=int, default=60)
    f.add_argument("--mode", choices=["confluence", "oracle", "magic"], default="confluence")
    f.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
