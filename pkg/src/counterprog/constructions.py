"""Program-to-program constructions.

* :func:`eliminate_zero_tests` -- replace zero tests on two counters by
  ratio-checked macros over three fresh counters ``b, c, d``.
* :func:`lift_amplifier` -- turn an ``F``-amplifier into an amplifier for
  ``n -> F^{n/4}(4)``.
* :func:`eliminate_b` -- move a bounded counter into the control state.
* :func:`build_fk_multiplier` -- a multiplier for ``F_k(n)`` with ``3k + 2`` counters.
* :func:`reduce_halting` -- bounded halting with two zero-tested counters to
  zero-test-free reachability from the zero valuation.
* :func:`finalize_full_zero` -- reachability with a partial target to
  reachability of the all-zero valuation, without adding counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import fastgrow
from .gadgets import build_linear_amplifier, build_multiplier_direct, build_zeroloop, set_c_to_zero_body, zero_macro_body
from .ir import (
    Add,
    CounterProgram,
    Dec,
    Goto,
    Inc,
    Loop,
    Mark,
    Nop,
    ProgramError,
    Sub,
    ZeroTest,
    compose,
    counter_of,
    lower,
    relocate,
    rename,
    splice,
)


class ConstructionError(ProgramError):
    pass


def _lowered(p: CounterProgram) -> CounterProgram:
    return p if p.lowered else lower(p)


# -- zero-test elimination ----------------------------------------------------------


def eliminate_zero_tests(
    p: CounterProgram,
    x: str = "x",
    y: str = "y",
    b: str = "b",
    c: str = "c",
    d: str = "d",
) -> CounterProgram:
    """Zero-test-free version of ``p`` whose zero tests may only be on ``x`` and ``y``.

    Started from the ratio of ``2(m+1)`` on ``(b, c, d)``, the ``d``-zeroing runs
    of the result reproduce exactly the runs of ``p`` doing ``m`` zero tests
    (while ``x + y`` stays within the initial ``c``), with ``b, c, d`` ending at 0.

    Every update of ``x``/``y`` is paired with the opposite update of ``c``,
    each ``zero? x`` / ``zero? y`` becomes a flush macro, and a budget reset is
    appended. Marks record each macro (kind ``"zero"``), each coupled pair
    (``"pair"``) and the reset (``"set-c-to-zero"``).
    """
    p = _lowered(p)
    if x == y:
        raise ConstructionError("the two zero-tested counters must differ")
    for name in (x, y):
        if name not in p.counters:
            raise ConstructionError(f"zero-tested counter {name!r} is not a counter of the program")
    fresh = (b, c, d)
    if len(set(fresh)) != 3:
        raise ConstructionError("fresh counters b, c, d must be distinct")
    clash = set(fresh) & set(p.counters)
    if clash:
        raise ConstructionError(f"fresh counters collide with program counters: {sorted(clash)}")
    for i, cmd in enumerate(p.body, start=1):
        if isinstance(cmd, ZeroTest) and cmd.counter not in (x, y):
            raise ConstructionError(f"line {i}: zero test on {cmd.counter!r}, only {x!r} and {y!r} may be tested")

    info = (("b", b), ("c", c), ("d", d), ("x", x), ("y", y))

    def replace(_line, cmd):
        who = counter_of(cmd)
        if isinstance(cmd, ZeroTest):
            partner = y if who == x else x
            return _macro(who, partner, c, d, b)
        if who in (x, y):
            if isinstance(cmd, Inc):
                return [cmd, Dec(c)]
            if isinstance(cmd, Dec):
                return [cmd, Inc(c)]
            if isinstance(cmd, Add):
                return [cmd, Sub(c, cmd.amount)]
            if isinstance(cmd, Sub):
                return [cmd, Add(c, cmd.amount)]
        return None

    def marks(line, start, end):
        cmd = p.body[line - 1]
        if isinstance(cmd, ZeroTest):
            tested = cmd.counter
            yield Mark("zero", start, end, info + (("tested", tested), ("partner", y if tested == x else x), ("budget", c)))
        else:
            yield Mark("pair", start, end, info)

    body = splice(p, replace, extra_counters=fresh, marks=marks)
    reset = _lower_items(set_c_to_zero_body(x, y, c, d, b))
    offset = len(body)
    reset_marks = [
        Mark("set-c-to-zero", offset + 1, offset + len(reset), info),
        Mark("zero", offset + 1 + 4, offset + len(reset), info + (("tested", c), ("partner", y), ("budget", x))),
    ]
    out = CounterProgram(
        body.counters,
        body.body + tuple(relocate(cmd, offset) for cmd in reset),
        {"x": x, "y": y, "b": b, "c": c, "d": d},
        body.marks + tuple(reset_marks),
    )
    return out


def _lower_items(items) -> tuple:
    """Lower a loop-sugared fragment without checking counter declarations."""
    out: list = []

    def emit(seq):
        for item in seq:
            if isinstance(item, Loop):
                header = len(out) + 1
                out.append(None)
                emit(item.body)
                trailer = len(out) + 1
                out.append(Goto(header, header))
                out[header - 1] = Goto(header + 1, trailer + 1)
            else:
                out.append(item)

    emit(items)
    return tuple(out)


def _macro(tested, partner, budget, d, b) -> tuple:
    return _lower_items(zero_macro_body(tested, partner, budget, d, b))


# -- amplifiers -----------------------------------------------------------------------


@dataclass(frozen=True)
class AmplifierSpec:
    program: CounterProgram
    inputs: tuple
    outputs: tuple

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        names = self.inputs + self.outputs
        if len(names) != 6 or len(set(names)) != 6:
            raise ConstructionError(f"an amplifier needs six distinct role counters, got {names}")
        missing = set(names) - set(self.program.counters)
        if missing:
            raise ConstructionError(f"role counters missing from program: {sorted(missing)}")

    @classmethod
    def from_program(cls, p: CounterProgram) -> "AmplifierSpec":
        r = p.role_map
        try:
            return cls(p, (r["b1"], r["c1"], r["d1"]), (r["b2"], r["c2"], r["d2"]))
        except KeyError as exc:
            raise ConstructionError(f"program lacks amplifier role {exc}") from None


def linear_amplifier(ell: int, inputs=("b_0", "c_0", "d_0"), outputs=("b'", "c'", "d'")) -> AmplifierSpec:
    return AmplifierSpec.from_program(build_linear_amplifier(ell, *inputs, *outputs))


def fresh_triple(counters: Iterable[str]) -> tuple:
    taken = set(counters)
    i = 1
    while {f"b_{i}", f"c_{i}", f"d_{i}"} & taken:
        i += 1
    return (f"b_{i}", f"c_{i}", f"d_{i}")


def amplifier_driver(a: AmplifierSpec, restructure: bool = True) -> CounterProgram:
    """The zero-testing program that iterates ``a`` on a ratio of 4.

    It runs the 4-multiplier on ``a``'s inputs, then alternates ``a`` (followed
    by ``zero?`` on its input ``d``) with the identity amplifier copying the
    outputs back (followed by ``zero?`` on the output ``d``), ending after a
    run of ``a``. With ``restructure`` the program contains ``a`` only once and
    the alternation is closed with explicit gotos.
    """
    p = _lowered(a.program)
    b1, c1, d1 = a.inputs
    b2, c2, d2 = a.outputs
    mult = build_multiplier_direct(4, b1, c1, d1, z=None)
    back = build_linear_amplifier(1, b2, c2, d2, b1, c1, d1)
    counters = list(p.counters)
    body: list = list(mult.body)
    marks = []
    if restructure:
        head = len(body) + 1
        body.extend(relocate(cmd, head - 1) for cmd in p.body)
        marks.extend(m.shifted(head - 1) for m in p.marks)
        body.append(ZeroTest(d1))
        branch = len(body) + 1
        body.append(None)
        again = len(body) + 1
        body.extend(relocate(cmd, again - 1) for cmd in back.body)
        body.append(ZeroTest(d2))
        body.append(Goto(head, head))
        done = len(body) + 1
        body.append(Nop())
        body[branch - 1] = Goto(again, done)
    else:
        header = len(body) + 1
        body.append(None)
        body.extend(relocate(cmd, header) for cmd in p.body)
        marks.extend(m.shifted(header) for m in p.marks)
        body.append(ZeroTest(d1))
        offset = len(body)
        body.extend(relocate(cmd, offset) for cmd in back.body)
        body.append(ZeroTest(d2))
        trailer = len(body) + 1
        body.append(Goto(header, header))
        body[header - 1] = Goto(header + 1, trailer + 1)
        second = len(body)
        body.extend(relocate(cmd, second) for cmd in p.body)
        marks.extend(m.shifted(second) for m in p.marks)
        body.append(ZeroTest(d1))
    roles = {"b1": b1, "c1": c1, "d1": d1, "b2": b2, "c2": c2, "d2": d2}
    return CounterProgram(counters, body, roles, marks)


def lift_amplifier(a: AmplifierSpec, fresh: tuple | None = None, restructure: bool = True) -> AmplifierSpec:
    """Lift an ``F``-amplifier to an amplifier for ``n -> F^{n/4}(4)``.

    The result is the zero-test elimination of :func:`amplifier_driver`,
    testing ``a``'s input ``d`` and output ``d``, over three fresh counters
    that become the new inputs. The outputs stay those of ``a``.
    """
    counters = a.program.counters
    b, c, d = fresh if fresh is not None else fresh_triple(counters)
    clash = {b, c, d} & set(counters)
    if clash or len({b, c, d}) != 3:
        raise ConstructionError(f"fresh counters collide: {sorted(clash) or (b, c, d)}")
    driver = amplifier_driver(a, restructure=restructure)
    lifted = eliminate_zero_tests(driver, a.inputs[2], a.outputs[2], b, c, d)
    b2, c2, d2 = a.outputs
    lifted = lifted.with_roles(b1=b, c1=c, d1=d, b2=b2, c2=c2, d2=d2)
    return AmplifierSpec(lifted, (b, c, d), a.outputs)


# -- bounded counter elimination -------------------------------------------------------------


def eliminate_b(p: CounterProgram, b: str, n: int, final: int | None = None, initial: int = 0) -> CounterProgram:
    """Encode a counter bounded by ``n`` in the control state.

    The program is cloned into copies ``0..n``; copy ``i`` stands for ``b = i``.
    Updates of ``b`` become jumps between copies, and moves leaving ``[0, n]``
    lead to a dead self-loop. Runs start in copy ``initial``. Falling off the
    end of copy ``i`` halts, or with ``final`` set, only for ``i == final``.
    """
    p = _lowered(p)
    if p.oracle:
        raise ConstructionError("eliminate_b expects a program without zero tests")
    if b not in p.counters:
        raise ConstructionError(f"{b!r} is not a counter of the program")
    if not isinstance(n, int) or n < 0:
        raise ConstructionError("the bound must be a nonnegative integer")
    if not 0 <= initial <= n:
        raise ConstructionError("initial value outside [0, n]")
    length = len(p.body)
    width = length + 1
    pre = 1 if initial else 0

    def at(i, j):
        return pre + i * width + j

    dead = at(n + 1, 1)
    end = dead + 1
    body: list = []
    marks: list = []
    if pre:
        body.append(Goto(at(initial, 1), at(initial, 1)))
    for i in range(n + 1):
        for j, cmd in enumerate(p.body, start=1):
            who = counter_of(cmd)
            if who == b:
                delta = {Inc: 1, Dec: -1}.get(type(cmd))
                if delta is None:
                    delta = cmd.amount if isinstance(cmd, Add) else -cmd.amount
                k = i + delta
                target = at(k, j + 1) if 0 <= k <= n else dead
                body.append(Goto(target, target))
            elif isinstance(cmd, Goto):
                body.append(Goto(at(i, cmd.first), at(i, cmd.second)))
            else:
                body.append(cmd)
        marks.extend(m.shifted(at(i, 0)) for m in p.marks)
        exit_to = end if final is None or final == i else dead
        body.append(Goto(exit_to, exit_to))
    body.append(Goto(dead, dead))
    body.append(Nop())
    counters = tuple(x for x in p.counters if x != b)
    roles = {r: x for r, x in p.roles if x != b}
    return CounterProgram(counters, body, roles, marks)


# -- multipliers ----------------------------------------------------------------------


def amplifier_tower(k: int) -> AmplifierSpec:
    """``L_2`` lifted ``k - 1`` times: an ``F_k``-amplifier with ``3k + 3`` counters."""
    if not isinstance(k, int) or k < 1:
        raise ConstructionError(f"k must be a positive integer, got {k}")
    a = linear_amplifier(2)
    for _ in range(k - 1):
        a = lift_amplifier(a)
    return a


def build_fk_multiplier(k: int, n: int) -> CounterProgram:
    """An ``F_k(n)``-multiplier with ``3k + 2`` counters.

    ``M_n`` feeds the ratio of ``n`` into the ``F_k``-amplifier; its input
    ``b`` never exceeds ``n`` and is moved into the control state. Roles:
    ``z`` is the amplifier's input ``d``; ``b, c, d`` are its outputs.
    """
    if not isinstance(k, int) or k < 1:
        raise ConstructionError(f"k must be a positive integer, got {k}")
    if not isinstance(n, int) or n < 4 or n % 4:
        raise ConstructionError(f"n must be a positive multiple of 4, got {n}")
    a = amplifier_tower(k)
    b_in, c_in, d_in = a.inputs
    mult = build_multiplier_direct(n, b_in, c_in, d_in, z=None)
    whole = compose(mult, a.program)
    out = eliminate_b(whole, b_in, n)
    b, c, d = a.outputs
    return out.with_roles(z=d_in, b=b, c=c, d=d)


# -- the reduction --------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionOutput:
    program: CounterProgram
    target: tuple
    counter_count: int
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        missing = set(self.target) - set(self.program.counters)
        if missing:
            raise ConstructionError(f"target counters not in program: {sorted(missing)}")
        if self.program.oracle:
            raise ConstructionError("reduction output still has zero tests")


def program_size(p: CounterProgram) -> int:
    """Size rounded up to a positive multiple of 4."""
    n = len(_lowered(p))
    return max(4, -(-n // 4) * 4)


def reduce_halting(
    p: CounterProgram,
    k: int,
    x: str = "x",
    y: str = "y",
    reuse: bool = False,
    max_bits: int = fastgrow.DEFAULT_MAX_BITS,
) -> ReductionOutput:
    """Reduce "does ``p`` halt from 0 with at most ``F_k(n)/2 - 1`` zero tests"
    to "does the output have a ``{z, d}``-zeroing run from 0".

    ``n`` is the size of ``p`` rounded up to a multiple of 4. With ``reuse``
    (``k >= 3``), ``x`` and ``y`` are mapped onto two counters of the
    multiplier that are zero whenever it finishes ``z``-zeroed.
    """
    p = _lowered(p)
    if not isinstance(k, int) or k < 1:
        raise ConstructionError(f"k must be a positive integer, got {k}")
    if reuse and k < 3:
        raise ConstructionError("counter reuse needs k >= 3")
    for name in (x, y):
        if name not in p.counters:
            raise ConstructionError(f"{name!r} is not a counter of the program")
    for i, cmd in enumerate(p.body, start=1):
        if isinstance(cmd, ZeroTest) and cmd.counter not in (x, y):
            raise ConstructionError(f"line {i}: zero test on {cmd.counter!r}")
    n = program_size(p)
    try:
        B = fastgrow.f_value(k, n, max_bits)
    except fastgrow.GrowthLimitExceeded as exc:
        raise ConstructionError(f"F_{k}({n}) exceeds the emission cap: {exc}") from None
    m = B // 2 - 1

    mult = build_fk_multiplier(k, n)
    z, mb, mc, md = (mult.role(r) for r in ("z", "b", "c", "d"))
    padded = compose(p, build_zeroloop(x))
    xx, yy = x, y
    if reuse:
        spare = [u for u in mult.counters if u not in (z, mb, mc, md)]
        xx, yy = spare[0], spare[1]
        padded = rename(padded, {x: xx, y: yy})
    clash = (set(padded.counters) - {xx, yy} if reuse else set(padded.counters)) & set(mult.counters)
    if clash:
        raise ConstructionError(f"program counters collide with the multiplier: {sorted(clash)}")
    transformed = eliminate_zero_tests(padded, xx, yy, mb, mc, md)
    whole = compose(mult, transformed, roles={"z": z, "b": mb, "c": mc, "d": md, "x": xx, "y": yy})
    provenance = {
        "construction": "reduce-halting",
        "k": k,
        "n": n,
        "F_k(n)": B,
        "zero_tests": m,
        "reuse": reuse,
        "x": xx,
        "y": yy,
        "multiplier_counters": len(mult.counters),
        "multiplier_length": len(mult),
        "counters": len(whole.counters),
        "length": len(whole),
    }
    return ReductionOutput(whole, (z, md), len(whole.counters), provenance)


def finalize_full_zero(p: CounterProgram, zero: Iterable[str]) -> tuple[CounterProgram, tuple]:
    """Append a drain loop for every counter outside ``zero``.

    The all-zero runs of the result correspond to the ``zero``-zeroing runs
    of ``p``; the counter set is unchanged.
    """
    p = _lowered(p)
    if p.oracle:
        raise ConstructionError("finalize_full_zero expects a program without zero tests")
    zero = set(zero)
    unknown = zero - set(p.counters)
    if unknown:
        raise ConstructionError(f"unknown counters: {sorted(unknown)}")
    drains = tuple(Loop((Dec(u),)) for u in p.counters if u not in zero)
    if not drains:
        return p, tuple(p.counters)
    tail = lower(CounterProgram(p.counters, drains))
    out = compose(p, tail, roles=p.roles)
    return out, tuple(p.counters)
