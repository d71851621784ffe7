import json

import pytest
from hypothesis import assume, given, strategies as st

import reference
from conftest import start_valuations, surface_programs
from counterprog import corpus
from counterprog.engine import (
    Bounds,
    Configuration,
    Valuation,
    all_runs,
    computed_set,
    explore,
    oracle_computed_set,
    search,
    step,
    witness_run,
)
from counterprog.gadgets import build_zeroloop
from counterprog.ir import Goto, Inc, ProgramError, ZeroTest, compose, lower, parse, program


@pytest.fixture
def example():
    return lower(corpus.loop_example())


def vals(**kw):
    return Valuation(kw)


def test_valuation_is_canonical_and_hashable():
    a, b = Valuation({"y": 1, "x": 0}), Valuation([("x", 0), ("y", 1)])
    assert a == b and hash(a) == hash(b) and str(a) == "x=0 y=1"
    with pytest.raises(ValueError):
        Valuation({"x": -1})


def test_bounds_must_be_positive():
    with pytest.raises(ValueError):
        Bounds(max_steps=0)
    with pytest.raises(ValueError):
        Bounds(max_counter_sum=-3)


def test_dec_at_zero_blocks(example):
    assert step(example, Configuration(2, vals(x=0, y=0, z=0))) == set()


def test_goto_with_equal_targets_has_one_successor(example):
    assert len(step(example, Configuration(5, vals(x=0, y=0, z=0)))) == 1


def test_zero_test_step():
    p = program("x", ZeroTest("x"))
    assert step(p, Configuration(1, vals(x=3))) == set()
    assert step(p, Configuration(1, vals(x=0), 2)) == {Configuration(None, vals(x=0), 3)}


def test_loop_example_from_ten(example):
    cs = computed_set(example, [{"x": 10}], ["x"], Bounds(max_steps=100))
    assert cs.valuations() == [vals(x=0, y=10, z=21)] and cs.exhaustive


@pytest.mark.parametrize("x, expected", [(0, (0, 0, 1)), (2, (0, 2, 5))])
def test_loop_example_small_starts(example, x, expected):
    cs = computed_set(example, [{"x": x}], ["x"])
    assert cs.valuations() == [vals(x=expected[0], y=expected[1], z=expected[2])]
    brute, exhaustive = all_runs(example, {"x": x}, ["x"], max_steps=20)
    assert exhaustive and {r.final for r in brute} == set(cs.finals)


def test_loop_example_needs_52_steps(example):
    assert not computed_set(example, [{"x": 10}], ["x"], Bounds(max_steps=50)).exhaustive
    run = witness_run(example, {"x": 10}, ["x"])
    assert run.steps == 52 and run.final == vals(x=0, y=10, z=21)


def test_unknown_start_counter_is_an_error(example):
    with pytest.raises(ProgramError):
        computed_set(example, [{"q": 1}])
    with pytest.raises(ProgramError):
        computed_set(example, [{}], ["q"])


def test_computed_set_rejects_oracle_programs():
    with pytest.raises(ProgramError):
        computed_set(program("x", ZeroTest("x")), [{}])


@pytest.mark.parametrize("x, finals", [(0, [{"x": 0}]), (1, [])])
def test_oracle_single_test(x, finals):
    cs = oracle_computed_set(program("x", ZeroTest("x")), [{"x": x}], (), 1)
    assert [dict(v) for v in cs.valuations()] == finals and cs.exhaustive


def test_oracle_zeroloop_counts_tests_exactly():
    p = build_zeroloop("x")
    assert [dict(v) for v in oracle_computed_set(p, [{"x": 3}], (), 2).valuations()] == [{"x": 0}]
    assert [dict(v) for v in oracle_computed_set(p, [{"x": 2}], (), 3).valuations()] == [{"x": 0}]
    assert [dict(v) for v in oracle_computed_set(p, [{"x": 0}], (), 0).valuations()] == [{"x": 0}]
    assert [dict(v) for v in oracle_computed_set(p, [{"x": 1}], (), 1).valuations()] == [{"x": 0}]


def test_witness_absent_and_empty(example):
    assert witness_run(example, {"x": 1}, ["x", "y"]) is None
    run = witness_run(program("x"), {}, ())
    assert run.steps == 0 and run.complete


def test_witness_respects_exact_zero_tests():
    p = build_zeroloop("x")
    run = witness_run(p, {"x": 1}, (), zero_tests=3)
    assert run.zero_tests[-1] == 3 and run.final == vals(x=0)


def test_search_reports_exhaustiveness():
    p = lower(parse("counters x\nloop\n  inc x\nend\n"))
    run, exhaustive = search(p, [{}], ["x"], Bounds(max_steps=5))
    assert run is not None
    run, exhaustive = search(p, [{"x": 1}], ["x"], Bounds(max_steps=30, max_counter_sum=5))
    assert run is None and not exhaustive


def test_max_configs_truncates():
    p = lower(parse("counters x\nloop\n  inc x\nend\n"))
    cs = computed_set(p, [{}], (), Bounds(max_steps=1000, max_configs=10))
    assert not cs.exhaustive and len(cs) >= 1


def test_computed_set_json_is_sorted(example):
    out = computed_set(example, [{"x": 1}], ["x"]).to_json()
    assert list(out) == sorted(out)
    assert json.loads(json.dumps(out, sort_keys=True)) == out


def test_explore_records_depth_and_parents(example):
    exp = explore(example, [{"x": 1}], track=True)
    assert exp.depth >= 8 and not exp.truncated
    assert len(exp.finals) == 2
    vals_, zt, obs = min(exp.finals)
    run = exp.run_to((exp.halt, vals_, zt, obs))
    assert run.lines[0] == 1 and run.lines[-1] is None


@given(surface_programs(zero_tests=True), start_valuations())
def test_engine_matches_reference_interpreter(p, start):
    try:
        expected = reference.finals(p, start)
    except reference.Budget:
        assume(False)
    q = lower(p)
    ms = {zt for _, zt in expected} | {0}
    for m in ms:
        want = {items for items, zt in expected if zt == m}
        cs = oracle_computed_set(q, [start], (), m, Bounds(max_steps=2_000))
        assume(cs.exhaustive)
        assert {tuple(sorted(dict(v).items())) for v in cs.finals} == want


@given(surface_programs(), start_valuations())
def test_nonnegativity(p, start):
    exp = explore(lower(p), [start], Bounds(max_steps=200))
    assert all(v >= 0 for vals_, _, _ in exp.finals for v in vals_)


@given(
    surface_programs(),
    start_valuations(),
    st.integers(1, 40),
    st.integers(0, 40),
    st.integers(3, 15),
    st.integers(0, 10),
)
def test_monotone_truncation(p, start, steps, more_steps, cap, more_cap):
    q = lower(p)
    small = computed_set(q, [start], (), Bounds(max_steps=steps, max_counter_sum=cap))
    large = computed_set(q, [start], (), Bounds(max_steps=steps + more_steps, max_counter_sum=cap + more_cap))
    assert small.finals <= large.finals
    if small.exhaustive:
        assert small.finals == large.finals


@given(surface_programs(depth=1), surface_programs(depth=1), st.integers(0, 3))
def test_composition_runs_concatenate(p, q, x0):
    p, q = lower(p), lower(q)
    starts = [{"x": x0}]
    both = computed_set(compose(p, q), starts, (), Bounds(max_steps=2_000))
    mid = computed_set(p, starts, (), Bounds(max_steps=2_000))
    assume(both.exhaustive and mid.exhaustive)
    after = computed_set(q, mid.valuations(), (), Bounds(max_steps=2_000)) if mid.finals else mid
    assert both.finals == after.finals


def test_composition_rule_with_zeroing_sets():
    # Q never touches x, so x-zeroing runs of P followed by y-zeroing runs of Q
    p = lower(parse("counters x y z\nloop\n  dec x\n  inc y\n  inc z\nend\n"))
    q = lower(parse("counters x y z\nloop\n  dec y\n  inc z\nend\ndec z\n"))
    starts = [{"x": i} for i in range(4)]
    left = computed_set(compose(p, q), starts, ["x", "y"])
    mid = computed_set(p, starts, ["x"])
    right = computed_set(q, mid.valuations(), ["y"])
    assert left.finals == right.finals and left.exhaustive and right.exhaustive


def test_goto_successor_order_is_deterministic():
    p = program("x", Goto(2, 3), Inc("x"), Inc("x"))
    exp1 = explore(p, [{}], track=True)
    exp2 = explore(p, [{}], track=True)
    assert list(exp1.parents) == list(exp2.parents)
