"""Command line: ``circtsim run|check|fmt``."""

from __future__ import annotations

import argparse
import sys
from contextlib import ExitStack

from .core import Simulator
from .errors import CirctSimError, StimulusError, UnknownSymbol
from .harness import run
from .mlir import parse, print_file
from .static import preprocess
from .stimulus import Stimulus, load_stimulus
from .vcd import write_vcd

EXIT_OK, EXIT_PARSE, EXIT_STATIC, EXIT_RUNTIME, EXIT_FAILED = 0, 1, 2, 3, 4


def _read(path: str) -> str:
    with open(path) as f:
        return f.read()


def _fail(e: CirctSimError) -> int:
    print(f"error: {e}", file=sys.stderr)
    return e.exit_code


def _fd_map(specs) -> dict[int, str]:
    out = {}
    for spec in specs or ():
        num, sep, path = spec.partition("=")
        try:
            out[int(num, 0)] = path
        except ValueError:
            sep = ""
        if not sep or not path:
            raise StimulusError(f"--fd expects N=PATH, got {spec!r}")
    return out


def cmd_run(args) -> int:
    try:
        state = preprocess(parse(_read(args.file)))
        stim = load_stimulus(_read(args.stim)) if args.stim else Stimulus()
        top = args.top or stim.top
        if top is None:
            raise StimulusError("no top module: pass --top or set 'top'")
        op = state.table.get(top)
        if op is None or op.name != "hw.module":
            raise StimulusError(f"top '{top}' is not an hw.module")
        fds = _fd_map(args.fd)
    except CirctSimError as e:
        return _fail(e)
    steps = args.max_eval_steps or stim.max_eval_steps
    with ExitStack() as stack:
        log = stack.enter_context(open(args.log, "w")) if args.log \
            else sys.stdout
        sinks = {n: stack.enter_context(open(p, "w")) for n, p in fds.items()}
        try:
            sim = Simulator(state, top, seed=args.seed, max_eval_steps=steps,
                            output=log, sinks=sinks)
            result = run(sim, stim, trace_all=args.trace_all)
        except CirctSimError as e:
            return _fail(e)
        if args.vcd:
            try:
                write_vcd(result.trace, args.vcd)
            except CirctSimError as e:
                return _fail(e)
    for d in sim.diagnostics:
        print(f"diagnostic: {d}", file=sys.stderr)
    failures = sum(1 for kind, _ in sim.log if kind in ("assert", "assume"))
    print(f"cycles: {result.cycles}, assertion failures: {failures}, "
          f"diagnostics: {len(sim.diagnostics)}"
          + (f", halted by {sim.halt}" if sim.halt else ""), file=sys.stderr)
    if result.error is not None:
        return _fail(result.error)
    return EXIT_FAILED if sim.failed else EXIT_OK


def cmd_check(args) -> int:
    try:
        state = preprocess(parse(_read(args.file)))
    except CirctSimError as e:
        return _fail(e)
    for sym in sorted(state.table):
        print(sym)
    return EXIT_OK


def cmd_fmt(args) -> int:
    try:
        text = print_file(parse(_read(args.file)))
    except CirctSimError as e:
        return _fail(e)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="circtsim",
                                 description="Simulate hw/comb/seq/sv MLIR.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="simulate a design")
    r.add_argument("file")
    r.add_argument("--top")
    r.add_argument("--stim", help="JSON stimulus file")
    r.add_argument("--vcd", help="write a VCD waveform here")
    r.add_argument("--max-eval-steps", type=int)
    r.add_argument("--trace-all", action="store_true",
                   help="trace every SSA value, not just ports and symbols")
    r.add_argument("--seed", type=int,
                   help="pick among ready operations at random")
    r.add_argument("--log", help="write sv task output here, not stdout")
    r.add_argument("--fd", action="append", metavar="N=PATH",
                   help="route fwrite descriptor N to a file")
    r.set_defaults(func=cmd_run)
    c = sub.add_parser("check", help="parse and list symbols")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)
    f = sub.add_parser("fmt", help="print in generic form")
    f.add_argument("file")
    f.set_defaults(func=cmd_fmt)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_STATIC


if __name__ == "__main__":
    sys.exit(main())
