"""A deliberately naive interpreter used as a test oracle.

It executes surface programs directly (a ``loop`` chooses between running
its body again and leaving) instead of going through goto lowering. A loop
is evaluated as the least fixpoint of its body over sets of states. Only
loop-structured programs (no gotos) are supported.
"""

from __future__ import annotations

from counterprog.ir import Add, Dec, Goto, Inc, Loop, Nop, Sub, ZeroTest


class Budget(Exception):
    pass


def _apply(cmd, vals, zt):
    v = dict(vals)
    if isinstance(cmd, Inc):
        v[cmd.counter] += 1
    elif isinstance(cmd, Add):
        v[cmd.counter] += cmd.amount
    elif isinstance(cmd, Dec):
        if v[cmd.counter] < 1:
            return None
        v[cmd.counter] -= 1
    elif isinstance(cmd, Sub):
        if v[cmd.counter] < cmd.amount:
            return None
        v[cmd.counter] -= cmd.amount
    elif isinstance(cmd, ZeroTest):
        if v[cmd.counter]:
            return None
        zt += 1
    elif isinstance(cmd, Goto):
        raise ValueError("the reference interpreter does not support goto")
    elif not isinstance(cmd, Nop):
        raise ValueError(cmd)
    return tuple(sorted(v.items())), zt


def finals(p, start: dict, max_depth: int = 60) -> set:
    """All ``(valuation items, zero tests)`` at the end of complete runs.

    Raises :class:`Budget` when some run needs more than ``max_depth`` loop
    iterations in total, so callers know the answer may be incomplete.
    """
    vals = tuple(sorted({c: start.get(c, 0) for c in p.counters}.items()))

    def run(items, state, depth):
        states = {state}
        for item in items:
            nxt = set()
            for st in states:
                nxt |= step(item, st, depth)
            states = nxt
        return states

    def step(item, state, depth):
        if isinstance(item, Loop):
            out = {state}
            frontier = {state}
            d = depth
            while frontier:
                d += 1
                if d > max_depth:
                    raise Budget()
                frontier = _iterate(item, frontier, d)
                frontier -= out
                out |= frontier
            return out
        vals, zt = state
        r = _apply(item, vals, zt)
        return {r} if r is not None else set()

    def _iterate(loop, states, d):
        out = set()
        for st in states:
            out |= run(loop.body, st, d)
        return out

    return run(p.body, (vals, 0), 0)


def valuations(p, start: dict, zero=(), zero_tests=None, max_depth: int = 60) -> set:
    out = set()
    for items, zt in finals(p, start, max_depth):
        v = dict(items)
        if any(v[x] for x in zero):
            continue
        if zero_tests is not None and zt != zero_tests:
            continue
        out.add(items)
    return out
