"""Well-founded evaluation of normal logic programs by confluent program transformations."""

from .core import (
    Atom,
    AtomTable,
    GroundProgram,
    GroundRule,
    Literal,
    LogicError,
    PartialInterpretation,
    Program,
    Rule,
    known,
    literal_count,
)
from .parser import parse_atom, parse_program, parse_query, parse_strategy, serialize_program
from .rewrite import EvalStats, MonotonicityError, remainder, wred
from .strategy import afp_snapshots, named, run

__all__ = [
    "Atom", "AtomTable", "EvalStats", "GroundProgram", "GroundRule", "Literal", "LogicError",
    "MonotonicityError", "PartialInterpretation", "Program", "Rule", "afp_snapshots", "known",
    "literal_count", "named", "parse_atom", "parse_program", "parse_query", "parse_strategy",
    "remainder", "run", "serialize_program", "wred",
]
