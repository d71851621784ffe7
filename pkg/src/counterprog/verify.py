"""Bounded checks of the constructions' correctness properties.

Every check returns a :class:`CheckReport`. A check that relied on a
non-exhaustive exploration never reports ``pass`` for an equality; it
reports ``inconclusive`` instead, and a ``fail`` always carries a
counterexample (a run or a valuation).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from . import constructions, corpus, fastgrow
from .engine import (
    Bounds,
    ComputedSet,
    Observer,
    Run,
    Valuation,
    all_runs,
    computed_set,
    explore,
    oracle_computed_set,
    search,
    witness_run,
)
from .gadgets import (
    EXACT,
    RatioSpec,
    build_linear_amplifier,
    build_multiplier_direct,
    build_set_c_to_zero,
    build_zero_macro,
    build_zeroloop,
)
from .ir import CounterProgram, Dec, Inc, LoopSpan, ProgramError, compose, find_loops

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SliceSpec:
    """A finite slice ``{ratio.member(c0) : c0 in c0_range}`` of a ratio set."""

    ratio: RatioSpec
    c0_range: tuple = (1, 2, 3)

    def __post_init__(self):
        object.__setattr__(self, "c0_range", tuple(self.c0_range))
        if not self.c0_range:
            raise ValueError("a slice needs at least one value of c")
        if any(not isinstance(c, int) or c < 1 for c in self.c0_range):
            raise ValueError("slice values of c must be positive integers")

    def starts(self) -> list[Valuation]:
        return self.ratio.slice(self.c0_range)


@dataclass
class CheckReport:
    claim: str
    status: str
    counterexample: object = None
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def __post_init__(self):
        if self.status not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and self.counterexample is None:
            raise ValueError("a failing report needs a counterexample")

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        cex = self.counterexample
        if isinstance(cex, Run):
            cex = cex.to_json()
        elif isinstance(cex, Valuation):
            cex = dict(cex)
        return {
            "claim": self.claim,
            "status": self.status,
            "counterexample": _jsonable(cex),
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, Run):
        return x.to_json()
    if isinstance(x, bool) or x is None or isinstance(x, (int, float, str)):
        return x
    return str(x)


def combine(claim: str, reports: Sequence[CheckReport], **details) -> CheckReport:
    """Fail if any part fails, else inconclusive if any part is, else pass."""
    for r in reports:
        if r.status == FAIL:
            return CheckReport(claim, FAIL, r.counterexample, {"failed_part": r.claim, **r.details, **details})
    status = INCONCLUSIVE if any(r.status == INCONCLUSIVE for r in reports) else PASS
    parts = {r.claim: r.status for r in reports}
    return CheckReport(claim, status, None, {"parts": parts, **details})


# -- set-level checks -------------------------------------------------------------------


def check_ratio_membership(cs: ComputedSet, ratio: RatioSpec, claim: str = "ratio-membership") -> CheckReport:
    """Pass iff every final lies in ``ratio``; truncation does not matter here."""
    if set(cs.counters) != set(ratio.counters):
        raise ProgramError(f"counter sets differ: {sorted(cs.counters)} vs {sorted(ratio.counters)}")
    for v in cs.valuations():
        if v not in ratio:
            return CheckReport(claim, FAIL, v, {"B": ratio.B, "finals": len(cs)})
    return CheckReport(claim, PASS, None, {"B": ratio.B, "finals": len(cs), "exhaustive": cs.exhaustive})


def check_set_equality(lhs: ComputedSet, rhs: ComputedSet, claim: str = "set-equality") -> CheckReport:
    """Pass iff both sides are exhaustive and equal.

    A final found on a truncated side is still a genuine final, so it refutes
    equality when the other side is exhaustive and lacks it.
    """
    details = {"lhs": len(lhs), "rhs": len(rhs), "lhs_exhaustive": lhs.exhaustive, "rhs_exhaustive": rhs.exhaustive}
    only_l = sorted(lhs.finals - rhs.finals)
    only_r = sorted(rhs.finals - lhs.finals)
    if only_l and rhs.exhaustive:
        return CheckReport(claim, FAIL, only_l[0], {**details, "side": "lhs only"})
    if only_r and lhs.exhaustive:
        return CheckReport(claim, FAIL, only_r[0], {**details, "side": "rhs only"})
    if lhs.exhaustive and rhs.exhaustive:
        return CheckReport(claim, PASS, None, details)
    return CheckReport(claim, INCONCLUSIVE, None, details)


def extend_zero(cs: ComputedSet, fresh: Iterable[str]) -> ComputedSet:
    """The extension of every final by zero on ``fresh`` counters."""
    fresh = tuple(fresh)
    finals = frozenset(Valuation({**dict(v), **dict.fromkeys(fresh, 0)}) for v in cs.finals)
    return ComputedSet(tuple(cs.counters) + fresh, finals, cs.exhaustive, cs.zero_counters)


# -- invariant monitoring -----------------------------------------------------------------


@dataclass(frozen=True)
class RatioInvariant:
    """``d = b*(c + x + y)`` as a three-valued predicate.

    Returns True when it holds, False when ``d > b*s`` and None when ``b = 0``
    (where tightness carries no information). ``sound`` is ``d >= b*s``.
    """

    b: str = "b"
    c: str = "c"
    d: str = "d"
    x: str = "x"
    y: str = "y"

    @property
    def counters(self) -> tuple:
        return (self.b, self.c, self.d, self.x, self.y)

    def bind(self, order: Sequence[str]):
        ib, ic, id_, ix, iy = (order.index(n) for n in self.counters)

        def tight(vals):
            b = vals[ib]
            if b == 0:
                return None
            return vals[id_] == b * (vals[ic] + vals[ix] + vals[iy])

        def sound(vals):
            return vals[id_] >= vals[ib] * (vals[ic] + vals[ix] + vals[iy])

        return tight, sound


def checkpoints(p: CounterProgram, b: str | None = None) -> "Checkpoints":
    """Checkpoints outside every mark (optionally only the marks for ``b``)."""
    inside = set()
    regions = {}
    for m in p.marks:
        if b is not None and m.get("b") != b:
            continue
        inside.update(range(m.start + 1, m.end + 1))
        regions[m.start] = max(regions.get(m.start, m.start), m.end)
    return Checkpoints(frozenset(inside), regions)


@dataclass(frozen=True)
class Checkpoints:
    """Where an invariant is evaluated.

    A line strictly inside a marked range is never a checkpoint; the first
    line of a range is one only when entered from outside the range (a macro
    usually starts with a loop header that is revisited mid-macro).
    """

    inside: frozenset
    regions: dict

    def __contains__(self, transition) -> bool:
        line, new_line = transition
        if new_line in self.inside:
            return False
        end = self.regions.get(new_line)
        if end is not None and line is not None and new_line <= line <= end:
            return False
        return True


class _Lines:
    def __init__(self, lines):
        self.lines = frozenset(lines)

    def __contains__(self, transition) -> bool:
        return transition[1] in self.lines


class _MonitorObserver(Observer):
    # state: 0 tight so far, 1 violated, 2 failed
    def __init__(self, tight, sound, points):
        self.tight = tight
        self.sound = sound
        self.points = points

    def _at(self, state, line, new_line, vals):
        if state == 2 or (line, new_line) not in self.points:
            return state
        if not self.sound(vals):
            return 2
        t = self.tight(vals)
        if t is False:
            return 1
        if t is True and state == 1:
            return 2
        return state

    def start(self, line, values):
        return self._at(0, None, line, values)

    def advance(self, state, line, values, new_line, new_values):
        return self._at(state, line, new_line, new_values)


def monitor_invariant(
    p: CounterProgram,
    starts: Iterable[Mapping[str, int]],
    predicate: RatioInvariant | None = None,
    bounds: Bounds = Bounds(max_steps=2_000),
    points: Iterable[int] | None = None,
    claim: str = "ratio-invariant",
) -> CheckReport:
    """Explore ``p`` and look for a run on which the invariant is recovered after a violation.

    The predicate is evaluated at checkpoint lines only (by default, lines
    not inside any marked macro or coupled pair). A checkpoint where
    ``sound`` fails also counts as a violation of the discipline.
    """
    predicate = predicate or RatioInvariant()
    unknown = set(predicate.counters) - set(p.counters)
    if unknown:
        raise ProgramError(f"invariant mentions unknown counters: {sorted(unknown)}")
    tight, sound = predicate.bind(tuple(p.counters))
    pts = _Lines(points) if points is not None else checkpoints(p, predicate.b)
    obs = _MonitorObserver(tight, sound, pts)
    exp = explore(p, starts, bounds, observer=obs, stop=lambda key: key[3] == 2, track=True)
    details = {"configurations": exp.visited, "exhaustive": not exp.truncated}
    if exp.hit is not None:
        return CheckReport(claim, FAIL, exp.run_to(exp.hit), details)
    return CheckReport(claim, INCONCLUSIVE if exp.truncated else PASS, None, details)


# -- maximal iteration ------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopExecution:
    span: LoopSpan
    entry: int
    exit: int
    source: str
    target: str
    initial_target: int
    final_source: int

    @property
    def maximal(self) -> bool:
        return self.initial_target == 0 and self.final_source == 0


def flush_counters(p: CounterProgram, span: LoopSpan) -> tuple[str, str]:
    """``(f, e)`` of a flush loop whose body starts ``dec f; inc e`` and then decrements another counter."""
    body = [p.body[i - 1] for i in span.body]
    if (
        len(body) < 3
        or not isinstance(body[0], Dec)
        or not isinstance(body[1], Inc)
        or not any(isinstance(cmd, Dec) for cmd in body[2:])
        or body[0].counter == body[1].counter
    ):
        raise ProgramError(f"loop at line {span.header} is not a flush loop")
    return body[0].counter, body[1].counter


def flush_loops(p: CounterProgram) -> list[LoopSpan]:
    out = []
    for span in find_loops(p):
        try:
            flush_counters(p, span)
        except ProgramError:
            continue
        out.append(span)
    return out


def instrument_maximality(p: CounterProgram, run: Run, spans: Iterable[LoopSpan] | None = None) -> list[LoopExecution]:
    """Every execution of the given flush loops in ``run``, in order of entry.

    An execution starts when the header is reached from outside the loop and
    ends when the header jumps past the trailer. It is maximally iterated
    when the target ``e`` is 0 on entry and the source ``f`` is 0 on exit.
    """
    spans = flush_loops(p) if spans is None else list(spans)
    shapes = {s: flush_counters(p, s) for s in spans}
    out = []
    lines = run.lines
    for span, (f, e) in shapes.items():
        entry = None
        for i, line in enumerate(lines):
            if line == span.header and entry is None:
                prev = lines[i - 1] if i else None
                if prev is None or not span.header <= prev <= span.trailer:
                    entry = i
            if entry is not None and i > entry and lines[i - 1] == span.header and line != span.header + 1:
                out.append(LoopExecution(span, entry, i, f, e, run.valuation(entry)[e], run.valuation(i)[f]))
                entry = None
    return sorted(out, key=lambda x: (x.entry, x.span.header))


# -- elimination runs -------------------------------------------------------------------------


class _EliminationObserver(Observer):
    """Tracks macro executions of one zero-test elimination along a run.

    State: ``(xy_macros, all_exact, all_correct, open)`` where ``open`` holds
    the mark index and the entry values of the macro being executed.
    """

    def __init__(self, p: CounterProgram, b: str):
        order = tuple(p.counters)
        self.idx = {n: i for i, n in enumerate(order)}
        self.marks = [m for m in p.marks if m.kind == "zero" and m.get("b") == b]
        self.by_start = {m.start: k for k, m in enumerate(self.marks)}
        self.by_exit = {m.end + 1: k for k, m in enumerate(self.marks)}
        roles = self.marks[0] if self.marks else None
        self.x = roles.get("x") if roles else None
        self.y = roles.get("y") if roles else None

    def _enter(self, state, line, vals):
        k = self.by_start.get(line)
        if k is None:
            return state
        count, exact, correct, _ = state
        return (count, exact, correct, (k, vals))

    def start(self, line, values):
        return self._enter((0, True, True, None), line, values)

    def advance(self, state, line, values, new_line, new_values):
        count, exact, correct, open_ = state
        if open_ is not None:
            k, before = open_
            m = self.marks[k]
            if line == m.end and new_line == m.end + 1:
                i = self.idx
                t, pa, bu, d = (i[m.get(r)] for r in ("tested", "partner", "budget", "d"))
                s = before[t] + before[pa] + before[bu]
                exact = exact and before[d] - new_values[d] == 2 * s
                correct = correct and (
                    before[t] == 0 and new_values[t] == 0 and before[pa] == new_values[pa] and before[bu] == new_values[bu]
                )
                if m.get("tested") in (self.x, self.y):
                    count += 1
                return self._enter((count, exact, correct, None), new_line, new_values)
            return state
        return self._enter(state, new_line, new_values)


def check_elimination_runs(
    t: CounterProgram,
    slice_: SliceSpec,
    m: int,
    bounds: Bounds = Bounds(max_steps=5_000),
    claim: str = "elimination-runs",
) -> CheckReport:
    """On every ``d``-zeroing run of an eliminated program from a ratio slice:
    exactly ``m`` x/y macro executions, each decreasing ``d`` by exactly ``2s``
    and each correct, and final ``b = c = 0``."""
    b, c, d = (t.role(r) for r in ("b", "c", "d"))
    obs = _EliminationObserver(t, b)
    exp = explore(t, slice_.starts(), bounds, observer=obs, track=True)
    order = tuple(t.counters)
    ib, ic, id_ = (order.index(n) for n in (b, c, d))
    checked = 0
    halt = len(t) + 1
    for vals, zt, state in sorted(exp.finals, key=repr):
        if vals[id_] != 0:
            continue
        checked += 1
        count, exact, correct, _ = state
        problems = []
        if count != m:
            problems.append(f"{count} x/y macro executions, expected {m}")
        if not exact:
            problems.append("a macro decreased d by less than 2s")
        if not correct:
            problems.append("an incorrect macro execution")
        if vals[ib] or vals[ic]:
            problems.append("final b or c is nonzero")
        if problems:
            run = exp.run_to((halt, vals, zt, state))
            return CheckReport(claim, FAIL, run, {"problems": problems})
    status = INCONCLUSIVE if exp.truncated else PASS
    return CheckReport(claim, status, None, {"d_zeroing_finals": checked, "exhaustive": not exp.truncated})


# -- claim checks -------------------------------------------------------------------------


def check_loop_example(x: int = 10, max_steps: int = 100) -> CheckReport:
    p = constructions._lowered(corpus.loop_example())
    cs = computed_set(p, [{"x": x}], ["x"], Bounds(max_steps=max_steps))
    expected = {Valuation({"x": 0, "y": x, "z": 2 * x + 1})}
    details = {"finals": [str(v) for v in cs.valuations()], "exhaustive": cs.exhaustive}
    if set(cs.finals) != expected:
        bad = sorted(set(cs.finals) ^ expected)[0]
        return CheckReport("loop-example", FAIL, bad, details)
    return CheckReport("loop-example", PASS if cs.exhaustive else INCONCLUSIVE, None, details)


def multiplier_finals_bound(max_steps: int) -> int:
    """Largest ``c`` a run of the direct multiplier reaches within ``max_steps`` steps."""
    # 3 setup steps, the loop header, the exit, then 4 steps per extra iteration
    return 1 + max(0, (max_steps - 5) // 4) if max_steps >= 5 else 0


def check_direct_multiplier(Bs: Sequence[int] = (4, 8), max_steps: int = 200) -> CheckReport:
    reports = []
    for B in Bs:
        p = build_multiplier_direct(B)
        cs = computed_set(p, [{}], ["z"], Bounds(max_steps=max_steps))
        ratio = RatioSpec(B, "b", "c", "d", p.counters)
        r = check_ratio_membership(cs, ratio, f"multiplier-{B}")
        cs_values = {v["c"] for v in cs.finals}
        expected = set(range(1, multiplier_finals_bound(max_steps) + 1))
        if r.ok and cs_values != expected:
            missing = sorted(expected - cs_values)
            r = CheckReport(f"multiplier-{B}", FAIL, ratio.member(missing[0]) if missing else cs.valuations()[0], {"c_values": sorted(cs_values)})
        reports.append(r)
    return combine("direct-multiplier", reports, max_steps=max_steps)


def zero_macro_starts(xs=(0, 1), ys=range(4), cs=range(4), b: int = 2, extra_d: Sequence[int] = (0,)) -> list[dict]:
    out = []
    for x in xs:
        for y in ys:
            for c in cs:
                s = x + y + c
                for e in extra_d:
                    out.append({"x": x, "y": y, "c": c, "b": b, "d": 2 * s + e})
    return out


def _macro_executions(p, starts, macro_spans, sum_of, claim):
    """Enumerate all runs of a macro program and compare Δd with maximality."""
    executions = 0
    for start in starts:
        runs, exhaustive = all_runs(p, start, max_steps=10_000)
        if not exhaustive:
            return CheckReport(claim, INCONCLUSIVE, None, {"start": start}), executions
        s = sum_of(start)
        for run in runs:
            executions += 1
            delta = run.initial["d"] - run.final["d"]
            loops = instrument_maximality(p, run, macro_spans)
            maximal = len(loops) == len(macro_spans) and all(e.maximal for e in loops)
            if not 0 <= delta <= 2 * s or (delta == 2 * s) != maximal:
                return CheckReport(claim, FAIL, run, {"delta": delta, "2s": 2 * s, "maximal": maximal}), executions
    return None, executions


def check_zero_macro(starts: Sequence[Mapping] | None = None) -> CheckReport:
    """``0 <= Δd <= 2s`` for every execution, with equality exactly when all four loops are maximal."""
    starts = zero_macro_starts() if starts is None else list(starts)
    p = build_zero_macro("x", "y", "c", "d", "b")
    spans = flush_loops(p)
    bad, n = _macro_executions(p, starts, spans, lambda v: v["x"] + v["y"] + v["c"], "zero-macro")
    if bad is not None:
        return bad
    return CheckReport("zero-macro", PASS, None, {"starts": len(starts), "executions": n})


def check_set_c_to_zero(starts: Sequence[Mapping] | None = None) -> CheckReport:
    """Δd never exceeds ``2s``; equality exactly when the final macro is maximal."""
    starts = zero_macro_starts() if starts is None else list(starts)
    p = build_set_c_to_zero("x", "y", "c", "d", "b")
    spans = flush_loops(p)
    bad, n = _macro_executions(p, starts, spans, lambda v: v["x"] + v["y"] + v["c"], "set-c-to-zero")
    if bad is not None:
        return bad
    return CheckReport("set-c-to-zero", PASS, None, {"starts": len(starts), "executions": n})


def elimination_instance(
    p: CounterProgram, m: int, c0s: Sequence[int] = (1, 2, 3), bounds: Bounds = Bounds(max_steps=5_000)
) -> tuple[ComputedSet, ComputedSet, CounterProgram]:
    """Both sides of the zero-test elimination equality for one program and ``m``."""
    p = constructions._lowered(p)
    t = constructions.eliminate_zero_tests(p)
    lhs = extend_zero(oracle_computed_set(p, [{}], (), m, bounds), ("b", "c", "d"))
    ratio = RatioSpec(2 * (m + 1), "b", "c", "d", t.counters)
    rhs = computed_set(t, SliceSpec(ratio, c0s).starts(), ["d"], bounds)
    return lhs, rhs, t


def check_zero_elimination(
    programs: Mapping[str, CounterProgram] | None = None,
    ms: Sequence[int] = (0, 1, 2, 3),
    c0s: Sequence[int] = (1, 2, 3),
    bounds: Bounds = Bounds(max_steps=5_000),
) -> CheckReport:
    programs = corpus.elimination_corpus() if programs is None else programs
    reports = []
    for name, p in programs.items():
        for m in ms:
            lhs, rhs, _ = elimination_instance(p, m, c0s, bounds)
            reports.append(check_set_equality(lhs, rhs, f"{name}/m={m}"))
    return combine("zero-elimination", reports, instances=len(reports))


def check_elimination_run_properties(
    programs: Mapping[str, CounterProgram] | None = None,
    ms: Sequence[int] = (0, 1, 2, 3),
    c0s: Sequence[int] = (1, 2, 3),
) -> CheckReport:
    programs = corpus.elimination_corpus() if programs is None else programs
    reports = []
    for name, p in programs.items():
        t = constructions.eliminate_zero_tests(p)
        for m in ms:
            ratio = RatioSpec(2 * (m + 1), "b", "c", "d", t.counters)
            r = check_elimination_runs(t, SliceSpec(ratio, c0s), m, claim=f"{name}/m={m}")
            reports.append(r)
    return combine("elimination-runs", reports)


def check_ratio_invariant(
    programs: Mapping[str, CounterProgram] | None = None,
    ms: Sequence[int] = (0, 1, 2, 3),
    c0s: Sequence[int] = (1, 2, 3),
) -> CheckReport:
    programs = corpus.elimination_corpus() if programs is None else programs
    reports = []
    for name, p in programs.items():
        t = constructions.eliminate_zero_tests(p)
        for m in ms:
            ratio = RatioSpec(2 * (m + 1), "b", "c", "d", t.counters)
            reports.append(monitor_invariant(t, SliceSpec(ratio, c0s).starts(), claim=f"{name}/m={m}"))
    return combine("ratio-invariant", reports)


def check_linear_amplifier(ells: Sequence[int] = (1, 2), B: int = 4, c0s: Sequence[int] = (1, 2, 3)) -> CheckReport:
    reports = []
    for ell in ells:
        p = build_linear_amplifier(ell)
        for c0 in c0s:
            start = {"b": B, "c": c0, "d": B * c0}
            cs = computed_set(p, [start], ["d"], Bounds(max_steps=10_000))
            expected = Valuation({"b": 0, "c": 0, "d": 0, "b'": ell * B, "c'": c0, "d'": ell * B * c0})
            want = ComputedSet(cs.counters, frozenset({expected}), True, cs.zero_counters)
            reports.append(check_set_equality(cs, want, f"L{ell}/c={c0}"))
    return combine("linear-amplifier", reports)


def lifting_expected(c0: int, ell_factor: int = 8) -> set[int]:
    """Output ``c'`` values a lifted ``L_2`` can reach from input ``c = c0`` on the ratio of 4."""
    return set(range(1, c0 // ell_factor + 1))


def check_amplifier_lifting(
    c0s: Sequence[int] = (1, 2),
    bounds: Bounds = Bounds(max_steps=20_000, max_configs=3_000_000),
    restructure: bool = True,
) -> CheckReport:
    a = constructions.lift_amplifier(constructions.linear_amplifier(2), restructure=restructure)
    p = a.program
    bi, ci, di = a.inputs
    bo, co, do = a.outputs
    B_out = fastgrow.f_value(2, 4)
    out_ratio = RatioSpec(B_out, bo, co, do, p.counters)
    reports = []
    for c0 in c0s:
        start = RatioSpec(4, bi, ci, di, p.counters).member(c0)
        cs = computed_set(p, [start], [di], bounds)
        r = check_ratio_membership(cs, out_ratio, f"lift/c={c0}")
        got = {v[co] for v in cs.finals}
        want = lifting_expected(c0)
        if r.ok:
            if got - want:
                r = CheckReport(r.claim, FAIL, out_ratio.member(min(got - want)), {"c_out": sorted(got), "expected": sorted(want)})
            elif got != want:
                r = CheckReport(r.claim, INCONCLUSIVE if not cs.exhaustive else FAIL,
                                None if not cs.exhaustive else out_ratio.member(min(want - got)),
                                {"c_out": sorted(got), "expected": sorted(want)})
            else:
                r.details.update(c_out=sorted(got), expected=sorted(want))
        reports.append(r)
    return combine("amplifier-lifting", reports, counters=len(p.counters), length=len(p))


def is_affine(xs: Sequence[int], ys: Sequence[int]) -> bool:
    """Whether the points ``(xs[i], ys[i])`` lie exactly on one line."""
    pts = list(zip(xs, ys))
    if len(pts) < 3:
        return True
    (x0, y0), (x1, y1) = pts[0], pts[1]
    return all((y - y0) * (x1 - x0) == (y1 - y0) * (x - x0) for x, y in pts[2:])


def multiplier_sizes(ks=(1, 2, 3, 4), ns=(4, 8, 12, 16), k_for_n: int = 2) -> dict:
    by_k = {k: build_fk_multiplier_cached(k, 4) for k in ks}
    by_n = {n: build_fk_multiplier_cached(k_for_n, n) for n in ns}
    towers = {k: len(constructions.amplifier_tower(k).program) for k in ks}
    return {
        "counters": {k: len(p.counters) for k, p in by_k.items()},
        "length_by_k": {k: len(p) for k, p in by_k.items()},
        "length_by_n": {n: len(p) for n, p in by_n.items()},
        "amplifier_length_by_k": towers,
    }


_MULT_CACHE: dict = {}


def build_fk_multiplier_cached(k: int, n: int) -> CounterProgram:
    key = (k, n)
    if key not in _MULT_CACHE:
        _MULT_CACHE[key] = constructions.build_fk_multiplier(k, n)
    return _MULT_CACHE[key]


def check_fk_multiplier(ks=(1, 2, 3, 4), ns=(4, 8, 12, 16), max_counter_sum: int = 40) -> CheckReport:
    sizes = multiplier_sizes(ks, ns)
    reports = []
    for k, count in sizes["counters"].items():
        if count != 3 * k + 2:
            reports.append(CheckReport(f"counters/k={k}", FAIL, {"k": k, "counters": count}))
    ns_l = list(sizes["length_by_n"])
    if not is_affine(ns_l, [sizes["length_by_n"][n] for n in ns_l]):
        reports.append(CheckReport("length-affine-in-n", FAIL, sizes["length_by_n"]))
    p = build_fk_multiplier_cached(1, 4)
    z, b, c, d = (p.role(r) for r in ("z", "b", "c", "d"))
    cs = computed_set(p, [{}], [z], Bounds(max_steps=2_000, max_counter_sum=max_counter_sum))
    r = check_ratio_membership(cs, RatioSpec(8, b, c, d, p.counters), "k=1 ratio")
    reports.append(r)
    if r.ok:
        got = {v[c] for v in cs.finals}
        if not {1, 2} <= got:
            reports.append(CheckReport("k=1 outputs", INCONCLUSIVE, None, {"c_values": sorted(got)}))
    ks_l = list(sizes["length_by_k"])
    affine_k = is_affine(ks_l, [sizes["length_by_k"][k] for k in ks_l])
    return combine("fk-multiplier", reports, affine_in_k=affine_k, **sizes)


def check_rescaling(max_i: int = 3, max_n: int = 5) -> CheckReport:
    for i in range(1, max_i + 1):
        for n in range(1, max_n + 1):
            f, a = fastgrow.f_value(i, 4 * n), fastgrow.ack(i, n)
            if f != 4 * a:
                return CheckReport("rescaling", FAIL, {"i": i, "n": n}, {})
    for n in range(1, 11):
        if fastgrow.ack(2, n) != 2**n:
            return CheckReport("rescaling", FAIL, {"i": 2, "n": n}, {})
    for i in range(1, 5):
        if fastgrow.ack(i, 1) != 2:
            return CheckReport("rescaling", FAIL, {"i": i, "n": 1}, {})
    return CheckReport("rescaling", PASS, None, {"max_i": max_i, "max_n": max_n})


# -- the reduction ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HaltingVerdicts:
    """The four equivalent conditions, each True, False or None (undecided within bounds)."""

    halts: bool | None
    exactly_m: bool | None
    ratio_slice: bool | None
    reduction: bool | None
    m: int
    truncated: tuple = ()

    @property
    def values(self) -> tuple:
        return (self.halts, self.exactly_m, self.ratio_slice, self.reduction)

    @property
    def agree(self) -> bool:
        known = {v for v in self.values if v is not None}
        return len(known) <= 1

    @property
    def conclusive(self) -> bool:
        return None not in self.values


def _verdict(run, exhaustive) -> bool | None:
    if run is not None:
        return True
    return False if exhaustive else None


def halting_verdicts(
    p: CounterProgram,
    k: int = 1,
    x: str = "x",
    y: str = "y",
    bounds: Bounds = Bounds(max_steps=5_000, max_configs=2_000_000),
    reduction_bounds: Bounds = Bounds(max_steps=20_000, max_counter_sum=40, max_configs=3_000_000),
) -> HaltingVerdicts:
    out = constructions.reduce_halting(p, k, x, y)
    m = out.provenance["zero_tests"]
    truncated = []

    run1, ex1 = search(p, [{}], (), bounds, max_zero_tests=m)
    halts = _verdict(run1, ex1)
    if halts is None:
        truncated.append("halts")

    padded = compose(constructions._lowered(p), build_zeroloop(x))
    run2, ex2 = search(padded, [{}], (), bounds, zero_tests=m)
    exactly = _verdict(run2, ex2)
    if exactly is None:
        truncated.append("exactly_m")

    t = constructions.eliminate_zero_tests(padded, x, y)
    need = 3
    if run2 is not None:
        ix, iy = run2.counters.index(x), run2.counters.index(y)
        need = max(need, max(v[ix] + v[iy] for v in run2.values))
    ratio = RatioSpec(2 * (m + 1), "b", "c", "d", t.counters)
    run3, ex3 = search(t, SliceSpec(ratio, range(1, need + 1)).starts(), ["d"], bounds)
    slice_v = _verdict(run3, ex3)
    if slice_v is None:
        truncated.append("ratio_slice")

    run4, ex4 = search(out.program, [{}], out.target, reduction_bounds)
    red = _verdict(run4, ex4)
    if red is None:
        truncated.append("reduction")
    return HaltingVerdicts(halts, exactly, slice_v, red, m, tuple(truncated))


def check_halting_reduction(programs: Mapping[str, CounterProgram] | None = None, k: int = 1) -> CheckReport:
    if programs is None:
        programs = {name: p for name, (p, _) in corpus.halting_corpus().items()}
    reports = []
    for name, p in programs.items():
        v = halting_verdicts(p, k)
        details = {"verdicts": list(v.values), "m": v.m, "truncated": list(v.truncated)}
        if not v.agree:
            reports.append(CheckReport(name, FAIL, {"program": name, "verdicts": list(v.values)}, details))
        elif not v.conclusive:
            reports.append(CheckReport(name, INCONCLUSIVE, None, details))
        else:
            reports.append(CheckReport(name, PASS, None, details))
    per = {r.claim: r.details for r in reports}
    return combine("halting-reduction", reports, programs=per)


def check_composition(max_steps: int = 200) -> CheckReport:
    """``Comp_{PQ}(A, X u Y) = Comp_Q(Comp_P(A, X), Y)`` when ``Q`` leaves ``X`` alone."""
    from .ir import Dec, Inc, Loop, lower

    p = lower(CounterProgram(("x", "y", "z"), (Loop((Dec("x"), Inc("y"), Inc("z"))),)))
    q = lower(CounterProgram(("x", "y", "z"), (Loop((Dec("y"), Inc("z"))), Dec("z"))))
    starts = [{"x": i} for i in range(4)]
    bnd = Bounds(max_steps=max_steps)
    left = computed_set(compose(p, q), starts, ["x", "y"], bnd)
    mid = computed_set(p, starts, ["x"], bnd)
    right = computed_set(q, mid.valuations(), ["y"], bnd)
    r = check_set_equality(left, right, "composition")
    if not mid.exhaustive and r.status == PASS:
        r = CheckReport("composition", INCONCLUSIVE, None, r.details)
    return r


CLAIMS: dict[str, Callable[[], CheckReport]] = {
    "loop-example": check_loop_example,
    "direct-multiplier": check_direct_multiplier,
    "composition": check_composition,
    "rescaling": check_rescaling,
    "zero-macro": check_zero_macro,
    "set-c-to-zero": check_set_c_to_zero,
    "zero-elimination": check_zero_elimination,
    "elimination-runs": check_elimination_run_properties,
    "ratio-invariant": check_ratio_invariant,
    "linear-amplifier": check_linear_amplifier,
    "amplifier-lifting": check_amplifier_lifting,
    "fk-multiplier": check_fk_multiplier,
    "halting-reduction": check_halting_reduction,
}


def run_check(claim: str, **params) -> CheckReport:
    try:
        fn = CLAIMS[claim]
    except KeyError:
        raise KeyError(f"unknown claim {claim!r}; known: {', '.join(CLAIMS)}") from None
    t0 = time.perf_counter()
    report = fn(**params)
    report.seconds = time.perf_counter() - t0
    return report


def run_all(claims: Iterable[str] | None = None) -> list[CheckReport]:
    return [run_check(c) for c in (claims or CLAIMS)]
