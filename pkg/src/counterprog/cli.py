"""Command-line interface: ``counterprog <command> ...``.

Exit codes: 0 success or pass, 1 fail or counterexample, 2 usage or input
error, 3 inconclusive or truncated exploration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import constructions, export, fastgrow, gadgets, verify
from .engine import Bounds, computed_set, oracle_computed_set, witness_run
from .ir import CounterProgram, ProgramError, load, lower, pretty

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _names(text: str | None) -> tuple:
    if not text:
        return ()
    return tuple(n for n in (t.strip() for t in text.split(",")) if n)


def _start(text: str | None) -> dict:
    out = {}
    for item in _names(text):
        name, eq, value = item.partition("=")
        if not eq or not value.isdigit():
            raise UsageError(f"bad start entry {item!r}, expected name=value")
        out[name.strip()] = int(value)
    return out


def _bounds(args) -> Bounds:
    return Bounds(max_steps=args.max_steps, max_counter_sum=args.max_sum, max_configs=args.max_configs)


def _load(path: str) -> CounterProgram:
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _lowered(p: CounterProgram) -> CounterProgram:
    return p if p.lowered else lower(p)


def _emit_program(p: CounterProgram, provenance: dict, out: str | None) -> None:
    provenance = {**provenance, "counters": len(p.counters), "length": len(_lowered(p)), "roles": dict(p.roles)}
    text = pretty(p, header=["provenance: " + json.dumps(provenance, sort_keys=True)])
    if out:
        Path(out).write_text(text, encoding="utf-8")
        Path(out).with_suffix(".json").write_text(_dump(provenance) + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- command handlers --------------------------------------------------------------------


def cmd_parse(args) -> int:
    p = _load(args.file)
    if args.lowered:
        p = _lowered(p)
    sys.stdout.write(pretty(p, numbered=args.numbered))
    return EXIT_OK


def cmd_run(args) -> int:
    p = _lowered(_load(args.file))
    start, zero, bounds = _start(args.start), _names(args.zero), _bounds(args)
    if args.oracle or p.oracle:
        cs = oracle_computed_set(p, [start], zero, args.zt, bounds)
    else:
        cs = computed_set(p, [start], zero, bounds)
    if args.format == "text":
        for v in cs.valuations():
            print(v)
        print(f"exhaustive: {str(cs.exhaustive).lower()}")
    else:
        print(_dump(cs.to_json()))
    return EXIT_OK if cs.exhaustive else EXIT_INCONCLUSIVE


def cmd_witness(args) -> int:
    p = _lowered(_load(args.file))
    bounds = _bounds(args)
    zt = args.zt if (args.oracle or p.oracle) else None
    run = witness_run(p, _start(args.start), _names(args.zero), bounds, zero_tests=zt)
    if run is None:
        print("no run found within bounds", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    if args.format == "text":
        for line, v in run:
            print(f"{'halt' if line is None else line}\t{v}")
    else:
        print(_dump(run.to_json()))
    return EXIT_OK


def cmd_build(args) -> int:
    what = args.what
    if what == "multiplier":
        p = gadgets.build_multiplier_direct(args.B)
        prov = {"construction": "multiplier", "B": args.B}
    elif what == "amplifier":
        p = gadgets.build_linear_amplifier(args.l)
        prov = {"construction": "linear-amplifier", "l": args.l}
    elif what == "fk-multiplier":
        p = constructions.build_fk_multiplier(args.k, args.n)
        prov = {"construction": "fk-multiplier", "k": args.k, "n": args.n}
    elif what == "zeroloop":
        p = gadgets.build_zeroloop(args.x)
        prov = {"construction": "zeroloop", "x": args.x}
    elif what == "zero-macro":
        p = gadgets.build_zero_macro("x", "y", "c", "d", "b")
        prov = {"construction": "zero-macro"}
    else:
        p = gadgets.build_set_c_to_zero()
        prov = {"construction": "set-c-to-zero"}
    _emit_program(p, prov, args.output)
    return EXIT_OK


def cmd_transform(args) -> int:
    p = _lowered(_load(args.file))
    kind = args.kind
    if kind == "eliminate-zt":
        q = constructions.eliminate_zero_tests(p, args.x, args.y, args.b, args.c, args.d)
        prov = {"construction": "eliminate-zero-tests", "x": args.x, "y": args.y}
    elif kind == "lift":
        a = constructions.lift_amplifier(constructions.AmplifierSpec.from_program(p), restructure=not args.doubled)
        q = a.program
        prov = {"construction": "lift-amplifier", "restructured": not args.doubled}
    elif kind == "eliminate-b":
        q = constructions.eliminate_b(p, args.b, args.bound)
        prov = {"construction": "eliminate-b", "b": args.b, "bound": args.bound}
    else:
        zero = _names(args.zero)
        q, target = constructions.finalize_full_zero(p, zero)
        prov = {"construction": "finalize-full-zero", "zero": list(zero), "target": list(target)}
    _emit_program(q, prov, args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    p = _lowered(_load(args.file))
    out = constructions.reduce_halting(p, args.k, args.x, args.y, reuse=args.reuse)
    prov = {**out.provenance, "target": list(out.target)}
    _emit_program(out.program, prov, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.list:
        for name in verify.CLAIMS:
            print(name)
        return EXIT_OK
    if args.all:
        claims = list(verify.CLAIMS)
    elif args.claim:
        claims = [args.claim]
    else:
        raise UsageError("give a claim id, --all or --list")
    reports = []
    for claim in claims:
        try:
            reports.append(verify.run_check(claim))
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if args.format == "text":
        for r in reports:
            print(f"{r.claim:20s} {r.status}")
    else:
        print(_dump([r.to_json() for r in reports] if args.all else reports[0].to_json()))
    statuses = {r.status for r in reports}
    if verify.FAIL in statuses:
        return EXIT_FAIL
    if verify.INCONCLUSIVE in statuses:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_fk(args) -> int:
    print(fastgrow.f_value(args.i, args.n, args.max_bits))
    return EXIT_OK


def cmd_ack(args) -> int:
    print(fastgrow.ack(args.i, args.n, args.max_bits))
    return EXIT_OK


def cmd_export(args) -> int:
    p = _lowered(_load(args.file))
    sys.stdout.write(export.format_vass(export.to_vass(p, _names(args.zero))))
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------


def _explore_opts(sp) -> None:
    sp.add_argument("file")
    sp.add_argument("--start", default="", help="comma-separated name=value pairs; other counters start at 0")
    sp.add_argument("--zero", default="", help="comma-separated counters that must end at 0")
    sp.add_argument("--max-steps", type=int, default=10_000)
    sp.add_argument("--max-sum", type=int, default=None, help="prune configurations whose counter sum exceeds this")
    sp.add_argument("--max-configs", type=int, default=None)
    sp.add_argument("--oracle", action="store_true", help="count zero tests; keep runs doing exactly --zt of them")
    sp.add_argument("--zt", type=int, default=0)
    sp.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="counterprog", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse and pretty-print a .cp file")
    sp.add_argument("file")
    sp.add_argument("--lowered", action="store_true")
    sp.add_argument("--numbered", action="store_true")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("run", help="computed set of a program from one start valuation")
    _explore_opts(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("witness", help="one shortest zeroing run as a trace")
    _explore_opts(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("build", help="emit a gadget or multiplier")
    bsub = sp.add_subparsers(dest="what", required=True)
    b = bsub.add_parser("multiplier")
    b.add_argument("--B", type=int, required=True)
    b = bsub.add_parser("amplifier")
    b.add_argument("--l", type=int, required=True)
    b = bsub.add_parser("fk-multiplier")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b = bsub.add_parser("zeroloop")
    b.add_argument("--x", default="x")
    bsub.add_parser("zero-macro")
    bsub.add_parser("set-c-to-zero")
    for b in bsub.choices.values():
        b.add_argument("-o", "--output", help="write the .cp here and the provenance next to it as .json")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("transform", help="apply a program transformation")
    tsub = sp.add_subparsers(dest="kind", required=True)
    t = tsub.add_parser("eliminate-zt")
    t.add_argument("file")
    t.add_argument("--x", default="x")
    t.add_argument("--y", default="y")
    t.add_argument("--b", default="b")
    t.add_argument("--c", default="c")
    t.add_argument("--d", default="d")
    t = tsub.add_parser("lift")
    t.add_argument("file")
    t.add_argument("--doubled", action="store_true", help="keep two copies of the amplifier body")
    t = tsub.add_parser("eliminate-b")
    t.add_argument("file")
    t.add_argument("--b", required=True)
    t.add_argument("--bound", type=int, required=True)
    t = tsub.add_parser("finalize")
    t.add_argument("file")
    t.add_argument("--zero", default="")
    for t in tsub.choices.values():
        t.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("reduce", help="bounded halting to zero-test-free reachability")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--reuse", action="store_true")
    sp.add_argument("--x", default="x")
    sp.add_argument("--y", default="y")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("check", help="run a bounded correctness check")
    sp.add_argument("claim", nargs="?")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--format", choices=("json", "text"), default="json")
    sp.set_defaults(func=cmd_check)

    for name, func in (("fk", cmd_fk), ("ack", cmd_ack)):
        sp = sub.add_parser(name, help=f"print {name}(i, n) in decimal")
        sp.add_argument("--i", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--max-bits", type=int, default=fastgrow.DEFAULT_MAX_BITS)
        sp.set_defaults(func=func)

    sp = sub.add_parser("export", help="write a zero-test-free program as a VASS")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("vass",), default="vass")
    sp.add_argument("--zero", default="")
    sp.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"counterprog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except fastgrow.GrowthLimitExceeded as exc:
        print(f"counterprog: value too large: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ProgramError, ValueError) as exc:
        print(f"counterprog: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
