import pytest
from hypothesis import settings, strategies as st

from counterprog.ir import Add, CounterProgram, Dec, Inc, Loop, Nop, Sub, ZeroTest

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

COUNTERS = ("x", "y", "z")


def _simple(zero_tests=False):
    name = st.sampled_from(COUNTERS)
    options = [
        name.map(Inc),
        name.map(Dec),
        st.builds(Add, name, st.integers(1, 3)),
        st.builds(Sub, name, st.integers(1, 3)),
        st.just(Nop()),
    ]
    if zero_tests:
        options.append(st.sampled_from(("x", "y")).map(ZeroTest))
    return st.one_of(*options)


def _items(depth, zero_tests):
    simple = _simple(zero_tests)
    if depth == 0:
        return st.lists(simple, max_size=4)
    # every loop body decrements something, so all runs terminate
    body = st.tuples(st.sampled_from(COUNTERS), _items(depth - 1, zero_tests)).map(
        lambda t: Loop((Dec(t[0]),) + tuple(t[1]))
    )
    return st.lists(st.one_of(simple, body), max_size=4)


def surface_programs(zero_tests=False, depth=2):
    return _items(depth, zero_tests).map(lambda items: CounterProgram(COUNTERS, tuple(items)))


def start_valuations():
    return st.fixed_dictionaries({c: st.integers(0, 3) for c in COUNTERS})


# -- acceptance summary ----------------------------------------------------------------

_RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        failed = rep.failed or hasattr(rep, "wasxfail")
        entry = _RESULTS.setdefault(n, [])
        entry.append((item.name, not failed, getattr(rep, "wasxfail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        parts = _RESULTS[n]
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({', '.join(name for name, _, _ in parts)})")
        for name, passed, why in parts:
            if not passed and why:
                tr.write_line(f"              {name}: {why}")
