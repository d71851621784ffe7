"""Small fixed programs used by the checks, the tests and the CLI.

Every entry is `.cp` source so the corpus doubles as parser test input.
"""

from __future__ import annotations

from .ir import CounterProgram, lower, parse

# Three counters; from x = n the only x-zeroing run iterates the loop n times.
LOOP_EXAMPLE = """\
counters x y z
loop
  dec x
  inc y
  add z 2
end
inc z
"""

LOOP_EXAMPLE_LOWERED = """\
counters x y z
goto 2 6
dec x
inc y
add z 2
goto 1 1
inc z
"""

# Oracle programs zero-testing only x and y. Every run keeps x + y <= 3 and
# the remaining counters bounded, so both sides of the elimination check
# have finite configuration spaces.
ELIMINATION_CORPUS: dict[str, str] = {
    "test-x": "counters x y\nzero? x\n",
    "no-tests": "counters x y\ninc x\ninc y\ndec x\n",
    "inc-dec-test": "counters x y\ninc x\ndec x\nzero? x\n",
    "blocked-test": "counters x y\ninc x\nzero? x\n",
    "repeat-test": "counters x y\nloop\n  zero? x\nend\n",
    "transfer": "counters x y z\ninc x\nloop\n  dec x\n  inc y\nend\nzero? x\ninc z\n",
    "choice": "counters x y\ngoto 2 4\ninc x\ngoto 5 5\ninc y\nzero? y\n",
    "guarded-loop": "counters x y\nloop\n  inc x\n  zero? y\n  dec x\nend\n",
    "drain-y": "counters x y\nadd y 3\nzero? x\nloop\n  dec y\nend\nzero? y\n",
    "counted": "counters x y z\ninc z\nzero? y\nloop\n  inc x\n  dec x\n  zero? x\nend\n",
}

# Oracle programs of at most six lowered commands for the end-to-end
# reduction check; ``halts`` is whether the program has a complete run from
# zero using at most F_1(n)/2 - 1 zero tests.
HALTING_CORPUS: dict[str, tuple[str, bool]] = {
    "test-x": ("counters x y\nzero? x\n", True),
    "blocked-test": ("counters x y\ninc x\nzero? x\n", False),
    "three-tests": ("counters x y\nzero? x\nzero? y\nzero? x\n", True),
    "four-tests": ("counters x y\nzero? x\nzero? x\nzero? x\nzero? x\n", False),
    "test-under-y": ("counters x y\ninc y\nzero? x\ndec y\n", True),
    "blocked-late": ("counters x y\ninc x\nzero? y\nzero? x\n", False),
    "reset-then-test": ("counters x y\ninc x\ndec x\nzero? x\nzero? y\n", True),
    "loop-test": ("counters x y\nloop\n  zero? x\nend\n", True),
    "loop-inc-test": ("counters x y\nloop\n  inc x\n  zero? x\nend\n", True),
    "drain-then-test": ("counters x y\ninc x\nloop\n  dec x\nend\nzero? x\n", True),
    "blocked-five": ("counters x y\ninc x\ninc y\nzero? x\ndec x\ndec y\n", False),
    "four-under-y": ("counters x y\ninc y\nzero? x\nzero? x\nzero? x\nzero? x\ndec y\n", True),
}


def load_source(text: str) -> CounterProgram:
    return lower(parse(text))


def loop_example() -> CounterProgram:
    return parse(LOOP_EXAMPLE)


def elimination_corpus() -> dict[str, CounterProgram]:
    return {name: load_source(src) for name, src in ELIMINATION_CORPUS.items()}


def halting_corpus() -> dict[str, tuple[CounterProgram, bool]]:
    return {name: (load_source(src), halts) for name, (src, halts) in HALTING_CORPUS.items()}
