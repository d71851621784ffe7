import pytest
from hypothesis import given

from conftest import start_valuations, surface_programs
from counterprog import corpus
from counterprog.engine import Bounds, computed_set
from counterprog.export import format_vass, parse_vass, reachable_finals, to_vass
from counterprog.gadgets import build_multiplier_direct
from counterprog.ir import ProgramError, lower, parse


def test_loop_example_export():
    v = to_vass(lower(corpus.loop_example()), ["x"])
    assert v.counters == ("x", "y", "z") and v.initial == 1 and v.final == 7 and v.zero == (0,)
    assert (1, 2, (0, 0, 0)) in v.transitions and (1, 6, (0, 0, 0)) in v.transitions
    assert (4, 5, (0, 0, 2)) in v.transitions
    # a goto with equal targets yields one transition
    assert [t for t in v.transitions if t[0] == 5] == [(5, 1, (0, 0, 0))]


def test_text_round_trip():
    v = to_vass(build_multiplier_direct(4), ["z"])
    assert parse_vass(format_vass(v)) == v


def test_export_rejects_zero_tests_and_unknown_counters():
    with pytest.raises(ProgramError):
        to_vass(parse("counters x\nzero? x\n"))
    with pytest.raises(ProgramError):
        to_vass(parse("counters x\ninc x\n"), ["q"])


@pytest.mark.parametrize(
    "text",
    ["counters x\n", "vass 1\ncounters x\ntrans 1 2 1 1\ninit 1\nfinal 2 zero\n", "vass 1\ncounters x\nfoo\n"],
)
def test_parse_vass_errors(text):
    with pytest.raises(ProgramError):
        parse_vass(text)


def test_reachable_finals_loop_example():
    v = to_vass(lower(corpus.loop_example()), ["x"])
    assert reachable_finals(v, {"x": 3}) == {(0, 3, 7)}


@given(surface_programs(), start_valuations())
def test_vass_reachability_matches_engine(p, start):
    q = lower(p)
    cs = computed_set(q, [start], ["x"], Bounds(max_steps=300))
    if not cs.exhaustive:
        return
    v = parse_vass(format_vass(to_vass(q, ["x"])))
    got = reachable_finals(v, start, max_steps=300)
    assert got == {tuple(f[c] for c in q.counters) for f in cs.finals}
