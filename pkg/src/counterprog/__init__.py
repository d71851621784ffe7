"""Counter programs without zero tests: execution, gadgets and the hardness constructions."""

from .engine import Bounds, ComputedSet, Run, Valuation, computed_set, oracle_computed_set, witness_run
from .ir import CounterProgram, ParseError, ProgramError, load, lower, parse, pretty

__all__ = [
    "Bounds",
    "ComputedSet",
    "CounterProgram",
    "ParseError",
    "ProgramError",
    "Run",
    "Valuation",
    "computed_set",
    "load",
    "lower",
    "oracle_computed_set",
    "parse",
    "pretty",
    "witness_run",
]
