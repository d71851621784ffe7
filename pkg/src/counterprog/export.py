"""Plain-text VASS export of zero-test-free programs.

Format, one item per line::

    vass <dim>
    counters <name> ...
    trans <s> <t> <v1> ... <vdim>
    init <s>
    final <s> zero <i1> <i2> ...

States are program lines ``1..n`` plus the halting state ``n + 1``; zero
indices are 0-based positions in the ``counters`` line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .ir import Add, CounterProgram, Dec, Goto, Inc, Nop, ProgramError, Sub, ZeroTest, lower


@dataclass(frozen=True)
class Vass:
    counters: tuple
    transitions: tuple  # (source, target, update vector)
    initial: int
    final: int
    zero: tuple

    @property
    def dim(self) -> int:
        return len(self.counters)

    def states(self) -> range:
        return range(1, self.final + 1)


def to_vass(p: CounterProgram, zero: Iterable[str] = ()) -> Vass:
    if not p.lowered:
        p = lower(p)
    if p.oracle:
        raise ProgramError("only programs without zero tests can be exported as a VASS")
    index = {c: i for i, c in enumerate(p.counters)}
    zero = tuple(zero)
    unknown = set(zero) - set(index)
    if unknown:
        raise ProgramError(f"unknown counters: {sorted(unknown)}")
    dim = len(p.counters)
    trans = []
    for line, cmd in enumerate(p.body, start=1):
        vec = [0] * dim
        if isinstance(cmd, Goto):
            for t in dict.fromkeys((cmd.first, cmd.second)):
                trans.append((line, t, tuple(vec)))
            continue
        if isinstance(cmd, (Inc, Add)):
            vec[index[cmd.counter]] = getattr(cmd, "amount", 1)
        elif isinstance(cmd, (Dec, Sub)):
            vec[index[cmd.counter]] = -getattr(cmd, "amount", 1)
        elif not isinstance(cmd, Nop):
            raise ProgramError(f"cannot export {cmd!r}")
        trans.append((line, line + 1, tuple(vec)))
    return Vass(tuple(p.counters), tuple(trans), 1, len(p) + 1, tuple(sorted(index[z] for z in zero)))


def format_vass(v: Vass) -> str:
    out = [f"vass {v.dim}", " ".join(["counters", *v.counters])]
    for s, t, vec in v.transitions:
        out.append(" ".join(["trans", str(s), str(t), *map(str, vec)]))
    out.append(f"init {v.initial}")
    out.append(" ".join(["final", str(v.final), "zero", *map(str, v.zero)]))
    return "\n".join(out) + "\n"


def parse_vass(text: str) -> Vass:
    dim = None
    counters: tuple = ()
    trans = []
    init = final = None
    zero: tuple = ()
    for n, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks:
            continue
        head, args = toks[0], toks[1:]
        try:
            if head == "vass":
                dim = int(args[0])
            elif head == "counters":
                counters = tuple(args)
            elif head == "trans":
                vec = tuple(int(a) for a in args[2:])
                if dim is None or len(vec) != dim:
                    raise ValueError("update vector has the wrong dimension")
                trans.append((int(args[0]), int(args[1]), vec))
            elif head == "init":
                init = int(args[0])
            elif head == "final":
                if args[1] != "zero":
                    raise ValueError("expected 'zero'")
                final = int(args[0])
                zero = tuple(int(a) for a in args[2:])
            else:
                raise ValueError(f"unknown directive {head!r}")
        except (IndexError, ValueError) as exc:
            raise ProgramError(f"vass line {n}: {exc}") from None
    if dim is None or init is None or final is None or len(counters) != dim:
        raise ProgramError("incomplete vass description")
    return Vass(counters, tuple(trans), init, final, zero)


def reachable_finals(v: Vass, start: Mapping[str, int], max_steps: int = 1_000) -> set[tuple]:
    """Vectors at the final state satisfying the zero constraints, by bounded BFS."""
    vals = tuple(start.get(c, 0) for c in v.counters)
    out_edges: dict = {}
    for s, t, vec in v.transitions:
        out_edges.setdefault(s, []).append((t, vec))
    seen = {(v.initial, vals)}
    level = [(v.initial, vals)]
    found = set()
    for _ in range(max_steps + 1):
        nxt = []
        for state, vec in level:
            if state == v.final:
                if all(vec[i] == 0 for i in v.zero):
                    found.add(vec)
                continue
            for t, delta in out_edges.get(state, ()):
                new = tuple(a + b for a, b in zip(vec, delta))
                if min(new, default=0) < 0 or (t, new) in seen:
                    continue
                seen.add((t, new))
                nxt.append((t, new))
        level = nxt
        if not level:
            break
    return found
