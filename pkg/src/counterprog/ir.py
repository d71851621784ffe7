"""Counter programs: commands, the `.cp` text format, loop lowering and composition.

Lines are numbered from 1. In surface form a ``loop`` marker and its ``end``
marker each occupy one line, so the textual numbering of a surface program is
exactly the numbering of its lowered form: the ``loop`` line becomes the header
``goto`` and the ``end`` line becomes the trailer ``goto``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")

ROLE_NAMES = ("z", "b", "c", "d", "b1", "c1", "d1", "b2", "c2", "d2", "x", "y")


class ProgramError(ValueError):
    pass


class ParseError(ProgramError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Inc:
    counter: str


@dataclass(frozen=True)
class Dec:
    counter: str


@dataclass(frozen=True)
class Add:
    counter: str
    amount: int


@dataclass(frozen=True)
class Sub:
    counter: str
    amount: int


@dataclass(frozen=True)
class Goto:
    first: int
    second: int


@dataclass(frozen=True)
class ZeroTest:
    counter: str


@dataclass(frozen=True)
class Nop:
    pass


Command = Union[Inc, Dec, Add, Sub, Goto, ZeroTest, Nop]


@dataclass(frozen=True)
class Loop:
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))


Item = Union[Command, Loop]


@dataclass(frozen=True)
class Mark:
    """A named line range ``[start, end]`` used by instrumentation.

    Marks are bookkeeping attached by constructions (where a macro starts and
    ends, which commands form a coupled pair); they take no part in program
    equality and are not written by :func:`pretty`.
    """

    kind: str
    start: int
    end: int
    info: tuple = ()

    def get(self, key, default=None):
        for k, v in self.info:
            if k == key:
                return v
        return default

    def shifted(self, offset: int) -> "Mark":
        return Mark(self.kind, self.start + offset, self.end + offset, self.info)


def counter_of(cmd) -> str | None:
    return getattr(cmd, "counter", None)


def _item_lines(item) -> int:
    if isinstance(item, Loop):
        return 2 + sum(_item_lines(i) for i in item.body)
    return 1


def _walk(items, start: int = 1) -> Iterator[tuple[int, object]]:
    """Yield ``(line, item)`` for every command and loop marker in textual order."""
    line = start
    for item in items:
        if isinstance(item, Loop):
            yield line, item
            yield from _walk(item.body, line + 1)
            line += _item_lines(item)
        else:
            yield line, item
            line += 1


@dataclass(frozen=True)
class CounterProgram:
    """An immutable counter program.

    ``body`` holds commands and (in surface form) :class:`Loop` nodes. ``roles``
    designates counters by role name, e.g. ``(("b", "b"), ("z", "z"))``.
    """

    counters: tuple = ()
    body: tuple = ()
    roles: tuple = ()
    marks: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "counters", tuple(self.counters))
        object.__setattr__(self, "body", tuple(self.body))
        if isinstance(self.roles, Mapping):
            roles = tuple(self.roles.items())
        else:
            roles = tuple(tuple(r) for r in self.roles)
        order = {r: i for i, r in enumerate(ROLE_NAMES)}
        roles = tuple(sorted(roles, key=lambda r: order.get(r[0], len(order))))
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "marks", tuple(self.marks))
        self._validate()

    def _validate(self):
        seen = set()
        for name in self.counters:
            if not isinstance(name, str) or not IDENT.match(name):
                raise ProgramError(f"invalid counter name {name!r}")
            if name in seen:
                raise ProgramError(f"duplicate counter {name!r}")
            seen.add(name)
        total = len(self)
        for line, item in _walk(self.body):
            if isinstance(item, Loop):
                continue
            if not isinstance(item, (Inc, Dec, Add, Sub, Goto, ZeroTest, Nop)):
                raise ProgramError(f"line {line}: not a command: {item!r}")
            c = counter_of(item)
            if c is not None and c not in seen:
                raise ProgramError(f"line {line}: undeclared counter {c!r}")
            if isinstance(item, (Add, Sub)) and item.amount < 1:
                raise ProgramError(f"line {line}: amount must be positive")
            if isinstance(item, Goto):
                for t in (item.first, item.second):
                    if not 1 <= t <= total:
                        raise ProgramError(f"line {line}: goto target {t} out of range 1..{total}")
        role_seen = {}
        for role, name in self.roles:
            if role not in ROLE_NAMES:
                raise ProgramError(f"unknown role {role!r}")
            if name not in seen:
                raise ProgramError(f"role {role} bound to unknown counter {name!r}")
            if name in role_seen.values() or role in role_seen:
                raise ProgramError(f"roles must designate distinct counters ({role}={name})")
            role_seen[role] = name

    def __len__(self) -> int:
        return sum(_item_lines(i) for i in self.body)

    @property
    def lowered(self) -> bool:
        return not any(isinstance(i, Loop) for i in self.body)

    @property
    def oracle(self) -> bool:
        return any(isinstance(item, ZeroTest) for _, item in _walk(self.body))

    @property
    def role_map(self) -> dict[str, str]:
        return dict(self.roles)

    def role(self, name: str) -> str:
        try:
            return self.role_map[name]
        except KeyError:
            raise ProgramError(f"program has no {name!r} role") from None

    def with_roles(self, roles: Mapping[str, str] | None = None, **kw) -> "CounterProgram":
        merged = dict(roles or {})
        merged.update(kw)
        return CounterProgram(self.counters, self.body, merged, self.marks)

    def with_marks(self, marks: Iterable[Mark]) -> "CounterProgram":
        return CounterProgram(self.counters, self.body, self.roles, tuple(marks))

    def line(self, i: int):
        """The command at line ``i`` of a lowered program."""
        if not self.lowered:
            raise ProgramError("line access needs a lowered program")
        return self.body[i - 1]


def program(counters: Iterable[str], *items, roles=None) -> CounterProgram:
    return CounterProgram(tuple(counters), items, roles or ())


def relocate(cmd, offset: int):
    if isinstance(cmd, Goto):
        return Goto(cmd.first + offset, cmd.second + offset)
    if isinstance(cmd, Loop):
        return Loop(tuple(relocate(i, offset) for i in cmd.body))
    return cmd


# -- lowering ------------------------------------------------------------------


def lower(p: CounterProgram, expand_arith: bool = False) -> CounterProgram:
    """Replace every loop by its header/trailer ``goto`` pair.

    A trailing loop gets a ``nop`` appended so that its exit target exists.
    With ``expand_arith`` every ``add``/``sub`` is additionally unrolled into
    unit steps.
    """
    out: list = []

    def emit(items):
        for item in items:
            if isinstance(item, Loop):
                header = len(out) + 1
                out.append(None)
                emit(item.body)
                trailer = len(out) + 1
                out.append(Goto(header, header))
                out[header - 1] = Goto(header + 1, trailer + 1)
            else:
                out.append(item)

    emit(p.body)
    if p.body and isinstance(p.body[-1], Loop):
        out.append(Nop())
    q = CounterProgram(p.counters, out, p.roles, p.marks)
    if expand_arith:
        q = expand_arithmetic(q)
    return q


def expand_arithmetic(p: CounterProgram) -> CounterProgram:
    def unroll(_line, cmd):
        if isinstance(cmd, Add):
            return [Inc(cmd.counter)] * cmd.amount
        if isinstance(cmd, Sub):
            return [Dec(cmd.counter)] * cmd.amount
        return None

    return splice(p, unroll)


def splice(
    p: CounterProgram,
    replace: Callable[[int, object], Sequence | None],
    extra_counters: Iterable[str] = (),
    marks: Callable[[int, int, int], Iterable[Mark]] | None = None,
) -> CounterProgram:
    """Rewrite a lowered program line by line.

    ``replace(line, cmd)`` returns ``None`` to keep the command or a sequence of
    commands whose ``goto`` targets are local to that sequence (1-based; the
    value ``len + 1`` means "fall through to the next original line"). Gotos
    of kept commands are remapped to the start of their target's block.
    ``marks(line, start, end)`` may add marks for each produced block.
    """
    if not p.lowered:
        raise ProgramError("splice needs a lowered program")
    blocks = []
    for i, cmd in enumerate(p.body, start=1):
        new = replace(i, cmd)
        blocks.append(None if new is None else list(new))
    starts = [0] * (len(p.body) + 2)
    pos = 1
    for i, block in enumerate(blocks, start=1):
        starts[i] = pos
        pos += 1 if block is None else len(block)
    starts[len(p.body) + 1] = pos
    out = []
    new_marks = []
    for i, (cmd, block) in enumerate(zip(p.body, blocks), start=1):
        if block is None:
            if isinstance(cmd, Goto):
                cmd = Goto(starts[cmd.first], starts[cmd.second])
            out.append(cmd)
        else:
            out.extend(relocate(c, starts[i] - 1) for c in block)
            if marks is not None and block:
                new_marks.extend(marks(i, starts[i], starts[i] + len(block) - 1))
    for m in p.marks:
        end = starts[m.end + 1] - 1
        new_marks.append(Mark(m.kind, starts[m.start], end, m.info))
    counters = tuple(p.counters) + tuple(c for c in extra_counters if c not in p.counters)
    return CounterProgram(counters, out, p.roles, tuple(new_marks))


# -- composition and renaming -----------------------------------------------------


def compose(*programs: CounterProgram, roles=None) -> CounterProgram:
    """Concatenate lowered programs, shifting the gotos of each later part."""
    counters: list[str] = []
    body: list = []
    marks: list = []
    for q in programs:
        if not q.lowered:
            raise ProgramError("compose needs lowered programs")
        offset = len(body)
        counters.extend(c for c in q.counters if c not in counters)
        body.extend(relocate(c, offset) for c in q.body)
        marks.extend(m.shifted(offset) for m in q.marks)
    return CounterProgram(counters, body, roles or (), marks)


def rename(p: CounterProgram, mapping: Mapping[str, str]) -> CounterProgram:
    def ren(item):
        if isinstance(item, Loop):
            return Loop(tuple(ren(i) for i in item.body))
        c = counter_of(item)
        if c is None or c not in mapping:
            return item
        if isinstance(item, (Add, Sub)):
            return type(item)(mapping[c], item.amount)
        return type(item)(mapping[c])

    counters = tuple(mapping.get(c, c) for c in p.counters)
    roles = {r: mapping.get(c, c) for r, c in p.roles}
    marks = tuple(
        Mark(m.kind, m.start, m.end, tuple((k, mapping.get(v, v) if isinstance(v, str) else v) for k, v in m.info))
        for m in p.marks
    )
    return CounterProgram(counters, tuple(ren(i) for i in p.body), roles, marks)


# -- loop detection -------------------------------------------------------------------


@dataclass(frozen=True)
class LoopSpan:
    header: int
    trailer: int

    @property
    def body(self) -> range:
        return range(self.header + 1, self.trailer)


def find_loops(p: CounterProgram) -> list[LoopSpan]:
    """Loops of a lowered program, recognised by their goto shape."""
    spans = []
    for t, cmd in enumerate(p.body, start=1):
        if isinstance(cmd, Goto) and cmd.first == cmd.second and cmd.first < t:
            h = cmd.first
            head = p.body[h - 1]
            if isinstance(head, Goto) and head.first == h + 1 and head.second == t + 1:
                spans.append(LoopSpan(h, t))
    return sorted(spans, key=lambda s: s.header)


# -- text format -----------------------------------------------------------------


def _fmt(cmd) -> str:
    if isinstance(cmd, Inc):
        return f"inc {cmd.counter}"
    if isinstance(cmd, Dec):
        return f"dec {cmd.counter}"
    if isinstance(cmd, Add):
        return f"add {cmd.counter} {cmd.amount}"
    if isinstance(cmd, Sub):
        return f"sub {cmd.counter} {cmd.amount}"
    if isinstance(cmd, Goto):
        return f"goto {cmd.first} {cmd.second}"
    if isinstance(cmd, ZeroTest):
        return f"zero? {cmd.counter}"
    if isinstance(cmd, Nop):
        return "nop"
    raise ProgramError(f"not a command: {cmd!r}")


def format_command(cmd) -> str:
    return _fmt(cmd)


def pretty(p: CounterProgram, numbered: bool = False, header: Iterable[str] = ()) -> str:
    """Render ``p`` in the `.cp` format; ``parse(pretty(p)) == p``.

    ``numbered`` appends each line's number as a trailing comment.
    """
    out = [f"# {h}" for h in header]
    out.append(" ".join(["counters", *p.counters]))
    if p.roles:
        out.append(" ".join(["roles", *(f"{r}={c}" for r, c in p.roles)]))

    def emit(items, depth, line):
        pad = "  " * depth
        for item in items:
            if isinstance(item, Loop):
                out.append(pad + "loop" + (f"  # {line}" if numbered else ""))
                inner = emit(item.body, depth + 1, line + 1)
                out.append(pad + "end" + (f"  # {inner}" if numbered else ""))
                line = inner + 1
            else:
                out.append(pad + _fmt(item) + (f"  # {line}" if numbered else ""))
                line += 1
        return line

    emit(p.body, 0, 1)
    return "\n".join(out) + "\n"


_TOKEN = re.compile(r"\S+")
_LABEL = re.compile(r"([A-Za-z][A-Za-z0-9_']*):\Z")


def parse(text: str) -> CounterProgram:
    """Parse the `.cp` format into a surface program.

    Labels (``name:`` before a command, ``loop`` or ``end``, or alone on a
    line) name the next numbered line and are resolved here.
    """
    counters: list[str] | None = None
    roles: dict[str, str] = {}
    stack: list[list] = [[]]
    loop_starts: list[int] = []
    labels: dict[str, int] = {}
    pending: list[tuple[str, int, int]] = []
    gotos: list[tuple[list, int, list, int]] = []
    line_no = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        code = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(code)]
        if not toks:
            continue
        if counters is None:
            word, col = toks[0]
            if word != "counters":
                raise ParseError("expected 'counters' header", lineno, col)
            counters = []
            for name, col in toks[1:]:
                if not IDENT.match(name):
                    raise ParseError(f"invalid counter name {name!r}", lineno, col)
                if name in counters:
                    raise ParseError(f"duplicate counter {name!r}", lineno, col)
                counters.append(name)
            continue
        if toks[0][0] == "roles":
            if line_no or pending:
                raise ParseError("'roles' must precede the commands", lineno, toks[0][1])
            for tok, col in toks[1:]:
                role, eq, name = tok.partition("=")
                if not eq or role not in ROLE_NAMES:
                    raise ParseError(f"bad role binding {tok!r}", lineno, col)
                if name not in counters:
                    raise ParseError(f"undeclared counter {name!r}", lineno, col + len(role) + 1)
                roles[role] = name
            continue
        while toks and _LABEL.match(toks[0][0]):
            name = toks[0][0][:-1]
            pending.append((name, lineno, toks[0][1]))
            toks = toks[1:]
        if not toks:
            continue
        line_no += 1
        for name, ln, col in pending:
            if name in labels:
                raise ParseError(f"duplicate label {name!r}", ln, col)
            labels[name] = line_no
        pending = []
        word, col = toks[0]
        args = toks[1:]

        def need(n):
            if len(args) != n:
                raise ParseError(f"'{word}' takes {n} argument(s)", lineno, col)

        def ctr(tok):
            name, c = tok
            if name not in counters:
                raise ParseError(f"undeclared counter {name!r}", lineno, c)
            return name

        def amount(tok):
            val, c = tok
            if not val.isdigit() or int(val) < 1:
                raise ParseError(f"expected a positive amount, got {val!r}", lineno, c)
            return int(val)

        if word == "loop":
            need(0)
            loop_starts.append(lineno)
            stack.append([])
            continue
        if word == "end":
            need(0)
            if len(stack) == 1:
                raise ParseError("'end' without 'loop'", lineno, col)
            body = stack.pop()
            loop_starts.pop()
            stack[-1].append(body)
            continue
        if word == "inc":
            need(1)
            cmd = Inc(ctr(args[0]))
        elif word == "dec":
            need(1)
            cmd = Dec(ctr(args[0]))
        elif word == "add":
            need(2)
            cmd = Add(ctr(args[0]), amount(args[1]))
        elif word == "sub":
            need(2)
            cmd = Sub(ctr(args[0]), amount(args[1]))
        elif word == "zero?":
            need(1)
            cmd = ZeroTest(ctr(args[0]))
        elif word == "nop":
            need(0)
            cmd = Nop()
        elif word == "goto":
            need(2)
            cmd = None
            gotos.append((stack[-1], len(stack[-1]), args, lineno))
        else:
            raise ParseError(f"unknown command {word!r}", lineno, col)
        stack[-1].append(cmd)

    if counters is None:
        raise ParseError("missing 'counters' header", max(1, line_no), 1)
    if len(stack) > 1:
        raise ParseError("'loop' without 'end'", loop_starts[-1], 1)
    if pending:
        name, ln, col = pending[0]
        raise ParseError(f"label {name!r} does not precede any line", ln, col)

    total = line_no
    for seq, idx, args, lineno in gotos:
        targets = []
        for tok, col in args:
            if tok.isdigit():
                t = int(tok)
                if not 1 <= t <= total:
                    raise ParseError(f"goto target {t} out of range 1..{total}", lineno, col)
            elif tok in labels:
                t = labels[tok]
            else:
                raise ParseError(f"unknown label {tok!r}", lineno, col)
            targets.append(t)
        seq[idx] = Goto(*targets)

    def freeze(items):
        return tuple(Loop(freeze(i)) if isinstance(i, list) else i for i in items)

    return CounterProgram(tuple(counters), freeze(stack[0]), roles)


def load(path) -> CounterProgram:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
