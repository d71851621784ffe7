import pytest
from hypothesis import given

from conftest import surface_programs
from counterprog import corpus
from counterprog.ir import (
    Add,
    CounterProgram,
    Dec,
    Goto,
    Inc,
    Loop,
    Mark,
    Nop,
    ParseError,
    ProgramError,
    ZeroTest,
    compose,
    expand_arithmetic,
    find_loops,
    lower,
    parse,
    pretty,
    program,
    rename,
)


def test_parse_lowered_loop_example():
    p = parse(corpus.LOOP_EXAMPLE_LOWERED)
    assert p.counters == ("x", "y", "z")
    assert p.body == (Goto(2, 6), Dec("x"), Inc("y"), Add("z", 2), Goto(1, 1), Inc("z"))
    assert len(p) == 6 and p.lowered and not p.oracle


def test_lowering_sugared_example_gives_the_goto_listing():
    assert lower(parse(corpus.LOOP_EXAMPLE)) == parse(corpus.LOOP_EXAMPLE_LOWERED)


def test_empty_program():
    p = parse("counters x\n")
    assert p.body == () and len(p) == 0


def test_add_is_one_command():
    assert parse("counters x\nadd x 3\n").body == (Add("x", 3),)


def test_trailing_loop_gets_a_nop():
    p = lower(program("x", Loop((Dec("x"),))))
    assert p.body == (Goto(2, 4), Dec("x"), Goto(1, 1), Nop())


def test_nested_loops_lower_to_two_goto_pairs():
    p = lower(program("xy", Loop((Loop((Inc("y"),)),))))
    assert p.body == (Goto(2, 6), Goto(3, 5), Inc("y"), Goto(2, 2), Goto(1, 1), Nop())
    assert [(s.header, s.trailer) for s in find_loops(p)] == [(1, 5), (2, 4)]


def test_surface_line_numbers_match_lowered_ones():
    src = "counters x y\ninc x\nloop\n  dec x\nend\ngoto 2 5\ninc y\n"
    p = parse(src)
    assert len(p) == 6
    assert lower(p).body[4] == Goto(2, 5)


def test_labels_resolve_to_lines():
    src = "counters x\nstart: inc x\n  goto start done\ndone:\n  nop\n"
    assert parse(src).body == (Inc("x"), Goto(1, 3), Nop())


def test_compose_with_empty_is_identity():
    p = lower(corpus.loop_example())
    assert compose(p, CounterProgram(p.counters, ())) == p


def test_compose_keeps_first_and_shifts_second():
    m = lower(parse("counters b c d z\nadd b 4\nloop\n  inc c\nend\n"))
    q = compose(m, program("z", Inc("z")))
    assert q.body[: len(m)] == m.body and q.body[-1] == Inc("z")
    g = program("x", Goto(1, 1))
    assert compose(g, g).body == (Goto(1, 1), Goto(2, 2))


def test_compose_takes_union_of_counters_and_shifts_marks():
    p = program("x", Inc("x")).with_marks([Mark("pair", 1, 1)])
    q = program("y", Goto(1, 1)).with_marks([Mark("pair", 1, 1)])
    r = compose(p, q)
    assert r.counters == ("x", "y")
    assert [(m.start, m.end) for m in r.marks] == [(1, 1), (2, 2)]


def test_pretty_shows_explicit_gotos_and_amounts():
    text = pretty(lower(parse("counters x\nloop\n  sub x 7\nend\n")))
    assert "goto 2 4" in text and "sub x 7" in text and "loop" not in text


@pytest.mark.parametrize(
    "src, line, col",
    [
        ("inc x\n", 1, 1),
        ("counters x\ninc q\n", 2, 5),
        ("counters x\ngoto 1 nowhere\n", 2, 8),
        ("counters x\nl: inc x\nl: inc x\n", 3, 1),
        ("counters x\nadd x 0\n", 2, 7),
        ("counters x\nloop\ninc x\n", 2, 1),
        ("counters x\nend\n", 2, 1),
        ("counters x\nfrob x\n", 2, 1),
        ("counters x\ngoto 1 5\n", 2, 8),
    ],
)
def test_parse_errors_carry_position(src, line, col):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert (info.value.line, info.value.column) == (line, col)


def test_validation_rejects_bad_programs():
    with pytest.raises(ProgramError):
        program("x", Inc("y"))
    with pytest.raises(ProgramError):
        program("x", Goto(1, 3))
    with pytest.raises(ProgramError):
        CounterProgram(("x", "x"), ())
    with pytest.raises(ProgramError):
        CounterProgram(("x", "y"), (), {"b": "x", "c": "x"})
    with pytest.raises(ProgramError):
        CounterProgram(("x",), (), {"q": "x"})


def test_roles_round_trip_through_text():
    p = parse("counters z b c d\nroles z=z b=b c=c d=d\ninc c\n")
    assert p.role("b") == "b" and parse(pretty(p)) == p


def test_oracle_flag_is_derived():
    assert program("x", ZeroTest("x")).oracle
    assert program("x", Loop((ZeroTest("x"),))).oracle


def test_expand_arithmetic_unrolls():
    p = expand_arithmetic(lower(parse("counters x\nadd x 3\ngoto 1 3\nsub x 2\n")))
    assert p.body == (Inc("x"), Inc("x"), Inc("x"), Goto(1, 5), Dec("x"), Dec("x"))


def test_rename_maps_counters_roles_and_marks():
    p = CounterProgram(("x", "y"), (Inc("x"),), {"x": "x"}, (Mark("pair", 1, 1, (("x", "x"),)),))
    q = rename(p, {"x": "u"})
    assert q.counters == ("u", "y") and q.body == (Inc("u"),) and q.role("x") == "u"
    assert q.marks[0].get("x") == "u"


@given(surface_programs(zero_tests=True))
def test_parse_pretty_round_trip(p):
    assert parse(pretty(p)) == p
    q = lower(p)
    assert parse(pretty(q)) == q


@given(surface_programs())
def test_lowering_is_loop_free_and_in_range(p):
    q = lower(p)
    assert q.lowered
    ends_in_loop = bool(p.body) and isinstance(p.body[-1], Loop)
    assert len(q) == len(p) + (1 if ends_in_loop else 0)
    for cmd in q.body:
        if isinstance(cmd, Goto):
            assert 1 <= cmd.first <= len(q) and 1 <= cmd.second <= len(q)
