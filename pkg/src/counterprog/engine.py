"""Bounded exhaustive execution of counter programs.

Exploration is breadth-first over step count. Configurations
``(line, valuation, zero-test count)`` are deduplicated within one query, so a
program whose reachable configuration space is finite is explored completely
whatever its number of runs. Whenever a bound forces a configuration to be
dropped the result is marked non-exhaustive.
"""

from __future__ import annotations

import sys
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .ir import Add, CounterProgram, Dec, Goto, Inc, Nop, ProgramError, Sub, ZeroTest

HALTED = None

_ADD, _SUB, _GOTO, _ZT, _NOP = range(5)


class Valuation(Mapping):
    """An immutable, hashable valuation; iteration is in counter-name order."""

    __slots__ = ("_items",)

    def __init__(self, values: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = dict(values)
        for k, v in items.items():
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"counter {k} must be a nonnegative integer, got {v!r}")
        self._items = tuple(sorted(items.items()))

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, Valuation):
            return self._items == other._items
        if isinstance(other, Mapping):
            return dict(self._items) == dict(other)
        return NotImplemented

    def __lt__(self, other):
        return self._items < other._items

    def __repr__(self):
        return "Valuation(" + " ".join(f"{k}={v}" for k, v in self._items) + ")"

    def __str__(self):
        return " ".join(f"{k}={v}" for k, v in self._items)

    def replace(self, **values) -> "Valuation":
        d = dict(self._items)
        d.update(values)
        return Valuation(d)


@dataclass(frozen=True)
class Bounds:
    max_steps: int = 10_000
    max_counter_sum: int | None = None
    max_configs: int | None = None

    def __post_init__(self):
        for name in ("max_steps", "max_counter_sum", "max_configs"):
            v = getattr(self, name)
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ValueError(f"{name} must be a positive integer")


@dataclass(frozen=True)
class Configuration:
    line: int | None
    valuation: Valuation
    zero_tests: int = 0


@dataclass(frozen=True)
class Run:
    """A run as the sequence of configurations it passes through.

    ``lines[i]`` is the line about to execute in the i-th configuration
    (``None`` once halted); ``steps`` is the number of executed commands.
    """

    counters: tuple
    lines: tuple
    values: tuple
    zero_tests: tuple

    @property
    def steps(self) -> int:
        return len(self.lines) - 1

    @property
    def complete(self) -> bool:
        return self.lines[-1] is HALTED

    @property
    def final(self) -> Valuation:
        return self.valuation(-1)

    @property
    def initial(self) -> Valuation:
        return self.valuation(0)

    def valuation(self, i: int) -> Valuation:
        return Valuation(zip(self.counters, self.values[i]))

    def __iter__(self) -> Iterator[tuple[int | None, Valuation]]:
        for i, line in enumerate(self.lines):
            yield line, self.valuation(i)

    def __len__(self):
        return len(self.lines)

    def to_json(self) -> list:
        return [
            {"line": line, "valuation": dict(zip(self.counters, vals)), "zero_tests": zt}
            for line, vals, zt in zip(self.lines, self.values, self.zero_tests)
        ]


@dataclass(frozen=True)
class ComputedSet:
    counters: tuple
    finals: frozenset
    exhaustive: bool
    zero_counters: frozenset = frozenset()

    def __post_init__(self):
        for v in self.finals:
            for x in self.zero_counters:
                if v[x] != 0:
                    raise ValueError(f"final {v} is not {x}-zeroing")

    def __contains__(self, valuation) -> bool:
        return Valuation(valuation) in self.finals

    def __len__(self):
        return len(self.finals)

    def __iter__(self):
        return iter(self.valuations())

    def valuations(self) -> list[Valuation]:
        return sorted(self.finals)

    def to_json(self) -> dict:
        return {
            "counters": sorted(self.counters),
            "exhaustive": self.exhaustive,
            "finals": [dict(v) for v in self.valuations()],
            "zero": sorted(self.zero_counters),
        }


class Observer:
    """Per-run instrumentation threaded through an exploration.

    The observer state is part of the deduplication key, so it must be
    hashable and should carry as little as possible.
    """

    def start(self, line, values):
        return None

    def advance(self, state, line, values, new_line, new_values):
        return state


@dataclass
class Exploration:
    counters: tuple
    halt: int
    finals: set = field(default_factory=set)
    truncated: bool = False
    hit: tuple | None = None
    parents: dict | None = None
    visited: int = 0
    depth: int = 0

    def run_to(self, key) -> Run:
        chain = []
        while key is not None:
            chain.append(key)
            key = self.parents[key]
        chain.reverse()
        return Run(
            self.counters,
            tuple(HALTED if k[0] == self.halt else k[0] for k in chain),
            tuple(k[1] for k in chain),
            tuple(k[2] for k in chain),
        )


def compile_program(p: CounterProgram) -> list:
    if not p.lowered:
        raise ProgramError("execution needs a lowered program")
    index = {c: i for i, c in enumerate(p.counters)}
    ops: list = [None]
    for cmd in p.body:
        if isinstance(cmd, Inc):
            ops.append((_ADD, index[cmd.counter], 1, 0, 0))
        elif isinstance(cmd, Add):
            ops.append((_ADD, index[cmd.counter], cmd.amount, 0, 0))
        elif isinstance(cmd, Dec):
            ops.append((_SUB, index[cmd.counter], 1, 0, 0))
        elif isinstance(cmd, Sub):
            ops.append((_SUB, index[cmd.counter], cmd.amount, 0, 0))
        elif isinstance(cmd, Goto):
            ops.append((_GOTO, 0, 0, cmd.first, cmd.second))
        elif isinstance(cmd, ZeroTest):
            ops.append((_ZT, index[cmd.counter], 0, 0, 0))
        elif isinstance(cmd, Nop):
            ops.append((_NOP, 0, 0, 0, 0))
        else:
            raise ProgramError(f"cannot execute {cmd!r}")
    return ops


def _successors(ops, line, vals, zt):
    op, i, k, t1, t2 = ops[line]
    if op == _ADD:
        nv = list(vals)
        nv[i] += k
        return ((line + 1, tuple(nv), zt),)
    if op == _SUB:
        if vals[i] < k:
            return ()
        nv = list(vals)
        nv[i] -= k
        return ((line + 1, tuple(nv), zt),)
    if op == _GOTO:
        if t1 == t2:
            return ((t1, vals, zt),)
        return ((t1, vals, zt), (t2, vals, zt))
    if op == _ZT:
        if vals[i]:
            return ()
        return ((line + 1, vals, zt + 1),)
    return ((line + 1, vals, zt),)


def start_values(p: CounterProgram, start: Mapping[str, int]) -> tuple:
    unknown = set(start) - set(p.counters)
    if unknown:
        raise ProgramError(f"start valuation mentions unknown counters: {sorted(unknown)}")
    vals = tuple(start.get(c, 0) for c in p.counters)
    if any(not isinstance(v, int) or v < 0 for v in vals):
        raise ProgramError("start values must be nonnegative integers")
    return vals


def explore(
    p: CounterProgram,
    starts: Iterable[Mapping[str, int]],
    bounds: Bounds = Bounds(),
    *,
    zero_test_cap: int | None = None,
    observer: Observer | None = None,
    stop: Callable[[tuple], bool] | None = None,
    track: bool = False,
) -> Exploration:
    """Breadth-first exploration shared by every query in this module.

    Keys are ``(line, values, zero_tests, observer_state)`` with
    ``line == len(p) + 1`` meaning halted. Configurations exceeding
    ``zero_test_cap`` are discarded without counting as truncation: the
    zero-test count never decreases.
    """
    ops = compile_program(p)
    halt = len(ops)
    max_steps = bounds.max_steps
    max_sum = bounds.max_counter_sum
    max_configs = bounds.max_configs
    result = Exploration(tuple(p.counters), halt, parents={} if track else None)
    parents = result.parents
    visited: set = set()
    level = []
    for start in starts:
        vals = start_values(p, start)
        if max_sum is not None and sum(vals) > max_sum:
            result.truncated = True
            continue
        line = 1 if halt > 1 else halt
        obs = observer.start(line, vals) if observer is not None else None
        key = (line, vals, 0, obs)
        if key in visited:
            continue
        if max_configs is not None and len(visited) >= max_configs:
            result.truncated = True
            continue
        visited.add(key)
        level.append(key)
        if track:
            parents[key] = None

    finals = result.finals
    depth = 0
    while level:
        nxt = []
        for key in level:
            if stop is not None and stop(key):
                result.hit = key
                result.visited = len(visited)
                result.depth = depth
                return result
            line, vals, zt, obs = key
            if line == halt:
                finals.add((vals, zt, obs))
                continue
            succ = _successors(ops, line, vals, zt)
            if depth >= max_steps:
                for nline, nvals, nzt in succ:
                    if zero_test_cap is not None and nzt > zero_test_cap:
                        continue
                    nobs = observer.advance(obs, line, vals, nline, nvals) if observer is not None else None
                    if (nline, nvals, nzt, nobs) not in visited:
                        result.truncated = True
                        break
                continue
            for nline, nvals, nzt in succ:
                if zero_test_cap is not None and nzt > zero_test_cap:
                    continue
                if max_sum is not None and nvals is not vals and sum(nvals) > max_sum:
                    result.truncated = True
                    continue
                nobs = observer.advance(obs, line, vals, nline, nvals) if observer is not None else None
                nkey = (nline, nvals, nzt, nobs)
                if nkey in visited:
                    continue
                if max_configs is not None and len(visited) >= max_configs:
                    result.truncated = True
                    continue
                visited.add(nkey)
                nxt.append(nkey)
                if track:
                    parents[nkey] = key
        level = nxt
        depth += 1
    result.visited = len(visited)
    result.depth = depth
    return result


def step(p: CounterProgram, conf: Configuration) -> set[Configuration]:
    """Successor configurations of ``conf``; empty when the command blocks."""
    ops = compile_program(p)
    if conf.line is HALTED:
        return set()
    if not 1 <= conf.line < len(ops):
        raise ProgramError(f"line {conf.line} out of range")
    if ops[conf.line][0] == _ZT and not p.oracle:
        raise ProgramError("zero test in a program not flagged oracle")
    vals = start_values(p, conf.valuation)
    halt = len(ops)
    out = set()
    for nline, nvals, nzt in _successors(ops, conf.line, vals, conf.zero_tests):
        out.add(Configuration(HALTED if nline == halt else nline, Valuation(zip(p.counters, nvals)), nzt))
    return out


def _zero_index(p: CounterProgram, zero: Iterable[str]) -> tuple:
    zero = tuple(zero)
    unknown = set(zero) - set(p.counters)
    if unknown:
        raise ProgramError(f"zeroing set mentions unknown counters: {sorted(unknown)}")
    return tuple(p.counters.index(x) for x in zero)


def _collect(p, exp, zero, keep) -> ComputedSet:
    zidx = _zero_index(p, zero)
    finals = frozenset(
        Valuation(zip(p.counters, vals))
        for vals, zt, _ in exp.finals
        if keep(zt) and all(vals[i] == 0 for i in zidx)
    )
    return ComputedSet(tuple(p.counters), finals, not exp.truncated, frozenset(zero))


def computed_set(
    p: CounterProgram,
    starts: Iterable[Mapping[str, int]],
    zero: Iterable[str] = (),
    bounds: Bounds = Bounds(),
) -> ComputedSet:
    """Finals of all complete runs from ``starts`` that end with every ``zero`` counter at 0."""
    if p.oracle:
        raise ProgramError("program has zero tests; use oracle_computed_set")
    zero = tuple(zero)
    _zero_index(p, zero)
    exp = explore(p, starts, bounds)
    return _collect(p, exp, zero, lambda zt: True)


def oracle_computed_set(
    p: CounterProgram,
    starts: Iterable[Mapping[str, int]],
    zero: Iterable[str] = (),
    m: int = 0,
    bounds: Bounds = Bounds(),
) -> ComputedSet:
    """As :func:`computed_set`, keeping only runs doing exactly ``m`` zero tests."""
    zero = tuple(zero)
    _zero_index(p, zero)
    exp = explore(p, starts, bounds, zero_test_cap=m)
    return _collect(p, exp, zero, lambda zt: zt == m)


def witness_run(
    p: CounterProgram,
    start: Mapping[str, int],
    zero: Iterable[str] = (),
    bounds: Bounds = Bounds(),
    zero_tests: int | None = None,
    max_zero_tests: int | None = None,
) -> Run | None:
    """A shortest complete ``zero``-zeroing run from ``start``, if one exists within bounds.

    For programs with zero tests, ``zero_tests`` demands an exact count and
    ``max_zero_tests`` an upper bound.
    """
    zidx = _zero_index(p, zero)
    halt = len(p) + 1
    cap = zero_tests if zero_tests is not None else max_zero_tests

    def done(key):
        line, vals, zt, _ = key
        if line != halt or any(vals[i] for i in zidx):
            return False
        return zero_tests is None or zt == zero_tests

    exp = explore(p, [start], bounds, zero_test_cap=cap, stop=done, track=True)
    if exp.hit is None:
        return None
    return exp.run_to(exp.hit)


def search(
    p: CounterProgram,
    starts: Iterable[Mapping[str, int]],
    zero: Iterable[str] = (),
    bounds: Bounds = Bounds(),
    zero_tests: int | None = None,
    max_zero_tests: int | None = None,
) -> tuple[Run | None, bool]:
    """Witness search from several starts: ``(run or None, exhaustive)``."""
    zidx = _zero_index(p, zero)
    halt = len(p) + 1
    cap = zero_tests if zero_tests is not None else max_zero_tests

    def done(key):
        line, vals, zt, _ = key
        if line != halt or any(vals[i] for i in zidx):
            return False
        return zero_tests is None or zt == zero_tests

    exp = explore(p, starts, bounds, zero_test_cap=cap, stop=done, track=True)
    if exp.hit is None:
        return None, not exp.truncated
    return exp.run_to(exp.hit), True


def all_runs(
    p: CounterProgram,
    start: Mapping[str, int],
    zero: Iterable[str] = (),
    max_steps: int = 1_000,
    limit: int = 100_000,
) -> tuple[list[Run], bool]:
    """Enumerate every complete ``zero``-zeroing run individually (no deduplication).

    Returns the runs and whether the enumeration was exhaustive; it stops
    early on runs longer than ``max_steps`` or after ``limit`` runs.
    """
    ops = compile_program(p)
    halt = len(ops)
    zidx = _zero_index(p, zero)
    vals0 = start_values(p, start)
    runs: list[Run] = []
    exhaustive = True
    path = [(1 if halt > 1 else halt, vals0, 0)]

    def dfs():
        nonlocal exhaustive
        line, vals, zt = path[-1]
        if line == halt:
            if all(vals[i] == 0 for i in zidx):
                runs.append(
                    Run(
                        tuple(p.counters),
                        tuple(HALTED if c[0] == halt else c[0] for c in path),
                        tuple(c[1] for c in path),
                        tuple(c[2] for c in path),
                    )
                )
            return
        if len(path) > max_steps or len(runs) >= limit:
            exhaustive = False
            return
        for nxt in _successors(ops, line, vals, zt):
            path.append(nxt)
            dfs()
            path.pop()

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, max_steps + 100))
    try:
        dfs()
    finally:
        sys.setrecursionlimit(old)
    return runs, exhaustive
