"""Fixed program fragments: the direct multiplier, linear amplifiers, the
zero-test macros and the drain-then-test loop.

Builders take explicit counter names for every role so callers can wire
fresh counters in without renaming anything afterwards. All builders return
lowered programs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .engine import Valuation
from .ir import Add, CounterProgram, Dec, Inc, Loop, ProgramError, Sub, ZeroTest, lower

EXACT = "exact"
RELAXED = "relaxed"


def _distinct(*names):
    if len(set(names)) != len(names):
        raise ProgramError(f"counters must be pairwise distinct: {names}")


@dataclass(frozen=True)
class RatioSpec:
    """The set of valuations with ``b = B``, ``c > 0``, ``d = B*c`` and every other counter 0.

    ``mode`` records whether a caller means the exact or the relaxed ratio;
    both are checked as ``d == b*c``.
    """

    B: int
    b: str
    c: str
    d: str
    counters: tuple
    mode: str = EXACT
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "counters", tuple(self.counters))
        if not isinstance(self.B, int) or self.B < 2 or self.B % 2:
            raise ValueError(f"B must be an even integer >= 2, got {self.B}")
        if self.strict and self.B % 4:
            raise ValueError(f"B must be a positive multiple of 4, got {self.B}")
        _distinct(self.b, self.c, self.d)
        missing = {self.b, self.c, self.d} - set(self.counters)
        if missing:
            raise ValueError(f"ratio counters not in counter set: {sorted(missing)}")
        if self.mode not in (EXACT, RELAXED):
            raise ValueError(f"unknown ratio mode {self.mode!r}")

    def __contains__(self, v: Mapping[str, int]) -> bool:
        if set(v) != set(self.counters):
            return False
        if v[self.b] != self.B or v[self.c] <= 0:
            return False
        # the relaxed mode is checked with equality too
        if v[self.d] != v[self.b] * v[self.c]:
            return False
        return all(v[x] == 0 for x in self.counters if x not in (self.b, self.c, self.d))

    def member(self, c: int) -> Valuation:
        if c < 1:
            raise ValueError("ratio members need c > 0")
        vals = dict.fromkeys(self.counters, 0)
        vals.update({self.b: self.B, self.c: c, self.d: self.B * c})
        return Valuation(vals)

    def slice(self, cs: Iterable[int]) -> list[Valuation]:
        return [self.member(c) for c in cs]


def build_multiplier_direct(
    B: int,
    b: str = "b",
    c: str = "c",
    d: str = "d",
    z: str | None = "z",
    extra: Iterable[str] = (),
    strict: bool = True,
) -> CounterProgram:
    """``add b B; add d B; inc c; loop { add d B; inc c }``; ``z`` is declared but unused."""
    if not isinstance(B, int) or B < 2 or B % 2 or (strict and B % 4):
        raise ProgramError(f"B must be a positive multiple of 4, got {B}")
    names = [b, c, d] + ([z] if z is not None else [])
    _distinct(*names)
    counters = tuple(names) + tuple(x for x in extra if x not in names)
    roles = {"b": b, "c": c, "d": d}
    if z is not None:
        roles["z"] = z
    surface = CounterProgram(
        counters,
        (Add(b, B), Add(d, B), Inc(c), Loop((Add(d, B), Inc(c)))),
        roles,
    )
    return lower(surface)


def build_linear_amplifier(
    ell: int,
    b: str = "b",
    c: str = "c",
    d: str = "d",
    b2: str = "b'",
    c2: str = "c'",
    d2: str = "d'",
) -> CounterProgram:
    """Multiply a ratio by ``ell``: inputs ``(b, c, d)``, outputs ``(b2, c2, d2)``."""
    if not isinstance(ell, int) or ell < 1:
        raise ProgramError(f"amplification factor must be >= 1, got {ell}")
    _distinct(b, c, d, b2, c2, d2)
    body = (
        Loop(
            (
                Loop((Dec(c), Inc(c2), Dec(d), Add(d2, ell))),
                Loop((Dec(c2), Inc(c), Dec(d), Add(d2, ell))),
                Sub(b, 2),
                Add(b2, 2 * ell),
            )
        ),
        Loop((Sub(c, 1), Inc(c2), Sub(d, 2), Add(d2, 2 * ell))),
        Sub(b, 2),
        Add(b2, 2 * ell),
    )
    roles = {"b1": b, "c1": c, "d1": d, "b2": b2, "c2": c2, "d2": d2}
    return lower(CounterProgram((b, c, d, b2, c2, d2), body, roles))


def zero_macro_body(tested: str, partner: str, budget: str, d: str, b: str) -> tuple:
    return (
        Loop((Dec(partner), Inc(tested), Dec(d))),
        Loop((Dec(budget), Inc(partner), Dec(d))),
        Loop((Dec(partner), Inc(budget), Dec(d))),
        Loop((Dec(tested), Inc(partner), Dec(d))),
        Sub(b, 2),
    )


def build_zero_macro(tested: str, partner: str, budget: str, d: str, b: str) -> CounterProgram:
    """Four flush loops through ``tested``, ``partner`` and ``budget``, then ``sub b 2``.

    With ``tested=x, partner=y, budget=c`` this simulates ``zero? x``; the
    ``zero? y`` variant swaps ``x`` and ``y``, and the final ``zero? c`` of the
    budget reset swaps ``x`` and ``c``.
    """
    _distinct(tested, partner, budget, d, b)
    body = zero_macro_body(tested, partner, budget, d, b)
    roles = {"x": tested, "y": partner, "c": budget, "d": d, "b": b}
    return lower(CounterProgram((tested, partner, budget, d, b), body, roles))


def set_c_to_zero_body(x: str, y: str, c: str, d: str, b: str) -> tuple:
    return (Loop((Dec(c), Sub(d, 2))),) + zero_macro_body(c, y, x, d, b)


def build_set_c_to_zero(x: str = "x", y: str = "y", c: str = "c", d: str = "d", b: str = "b") -> CounterProgram:
    """Drain the budget ``c`` (two units of ``d`` each), then check ``c`` with the macro."""
    _distinct(x, y, c, d, b)
    roles = {"x": x, "y": y, "c": c, "d": d, "b": b}
    return lower(CounterProgram((x, y, c, d, b), set_c_to_zero_body(x, y, c, d, b), roles))


def build_zeroloop(x: str = "x") -> CounterProgram:
    """``loop { dec x }; loop { zero? x }`` -- pads a run with extra zero tests."""
    return lower(CounterProgram((x,), (Loop((Dec(x),)), Loop((ZeroTest(x),))), {"x": x}))
