"""Command-line harness: ``python3 -m simplex_fssp <command> ...``.

Exit codes: 0 success / fired, 1 not fired or failed table rows, 2 invalid
input.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from .engine import run
from .experiments import EXPECTED, TITLES, RowResult, all_rows, default_max_steps, run_row
from .fssp import build_fssp_program, check_synchronization, initial_configuration
from .topology import FAMILIES, Digraph, TopologyError, family, metrics, random_strongly_connected, validate
from .tracefile import TraceFormatError, TraceWriter, check_records, parse_granularity, read_trace, sync_dict

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2

GENERATORS = FAMILIES + ("random",)


class InputError(Exception):
    """Bad user input; reported and mapped to exit code 2."""


def _load_source(args) -> Digraph:
    """``<family> <N>`` or a digraph JSON file."""
    src, n = args.source, args.n
    if src in GENERATORS:
        if n is None:
            raise InputError(f"{src} needs a size argument")
        try:
            if src == "random":
                return random_strongly_connected(n, args.fraction, args.seed)
            return family(src, n)
        except TopologyError as exc:
            raise InputError(str(exc)) from exc
    if n is not None:
        raise InputError("a size is only accepted after a generator name")
    try:
        return Digraph.load(src)
    except OSError as exc:
        raise InputError(f"cannot read {src}: {exc.strerror or exc}") from exc
    except (TopologyError, json.JSONDecodeError) as exc:
        raise InputError(f"{src}: {exc}") from exc


def _metrics_or_none(d: Digraph):
    try:
        return metrics(d)
    except TopologyError:
        return None


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_gen(args) -> int:
    d = _load_source(args)
    try:
        d.save(args.out)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    m = metrics(d)
    _emit(args, {"path": str(args.out), "N": m.size, "e_g": m.eccentricity, "D": m.diameter},
          f"wrote {args.out}: N={m.size} e_g={m.eccentricity} D={m.diameter}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    d = _load_source(args)
    v = validate(d)
    m = _metrics_or_none(d)
    payload = {"N": len(d), "irreflexive": v.irreflexive, "simple": v.simple,
               "strongly_connected": v.strongly_connected,
               "e_g": m.eccentricity if m else None, "D": m.diameter if m else None}
    if m:
        text = f"N={m.size} e_g={m.eccentricity} D={m.diameter} strongly_connected=true"
    else:
        text = f"N={len(d)} strongly_connected=false"
    _emit(args, payload, text)
    return EXIT_OK if v.ok else EXIT_FAIL


def cmd_run(args) -> int:
    d = _load_source(args)
    report_v = validate(d)
    if not report_v.ok and not args.force:
        print(f"invalid digraph: strongly_connected={str(report_v.strongly_connected).lower()} "
              f"irreflexive={str(report_v.irreflexive).lower()}", file=sys.stderr)
        return EXIT_INVALID
    max_steps = args.max_steps or default_max_steps(len(d))
    try:
        every = parse_granularity(args.granularity)
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    config = initial_configuration(d)
    writer = None
    fh = None
    if args.trace:
        try:
            fh = open(args.trace, "w")
        except OSError as exc:
            raise InputError(f"cannot write {args.trace}: {exc.strerror or exc}") from exc
        writer = TraceWriter(fh, every)
        writer.write(config)
    try:
        trace = run(config, build_fssp_program(), d, max_steps, seed=args.seed, every=0,
                    on_step=(lambda c, _logs: writer.write(c)) if writer else None)
        report = check_synchronization(trace)
        if writer:
            writer.close(trace.halted, report)
    finally:
        if fh:
            fh.close()

    m = _metrics_or_none(d)
    payload = {"N": len(d), "e_g": m.eccentricity if m else None, "D": m.diameter if m else None,
               "steps_run": trace.steps, "halted": trace.halted, **sync_dict(report)}
    text = report.summary() + f" N={len(d)}"
    if m:
        text += f" e_g={m.eccentricity} D={m.diameter}"
    if not report.fired:
        text += f" reason={report.reason}"
        if not trace.halted:
            text += f" (budget of {max_steps} steps exhausted)"
    _emit(args, payload, text)
    return EXIT_OK if report.fired else EXIT_FAIL


def cmd_check(args) -> int:
    try:
        records = read_trace(args.trace_file)
        report = check_records(records)
    except OSError as exc:
        raise InputError(f"cannot read {args.trace_file}: {exc.strerror or exc}") from exc
    except TraceFormatError as exc:
        raise InputError(f"{args.trace_file}: {exc}") from exc
    text = report.summary() + f" reason={report.reason} simultaneous={str(report.simultaneous).lower()}"
    _emit(args, sync_dict(report), text)
    return EXIT_OK if report.fired else EXIT_FAIL


def _row(item) -> RowResult:
    name, n, seed = item
    return run_row(name, n, seed)


def cmd_tables(args) -> int:
    items = [(name, n, args.seed) for name, n in all_rows()]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_row, items))
    else:
        results = [_row(i) for i in items]
    failed = sum(not r.ok for r in results)
    if args.format == "json":
        print(json.dumps({"rows": [r.as_dict() for r in results], "failed": failed}, sort_keys=True))
    else:
        for name in EXPECTED:
            print(TITLES[name])
            print(f"  {'N':>3} {'e_g':>9} {'D':>9} {'Steps':>11}")
            for r in results:
                if r.family != name:
                    continue
                e, dd, s = r.expected
                got = "-" if r.steps is None else r.steps
                print(f"  {r.n:>3} {r.eccentricity:>4}/{e:<4} {r.diameter:>4}/{dd:<4} {got:>5}/{s:<5}"
                      f" {'PASS' if r.ok else 'FAIL'}")
        print(f"{len(results) - failed}/{len(results)} rows reproduced (observed/expected)")
    return EXIT_FAIL if failed else EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _fraction(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simplex-fssp",
                                description="Firing squad synchronization in P systems with simplex channels.")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("source", help=f"generator ({', '.join(GENERATORS)}) or digraph JSON file")
        sp.add_argument("n", nargs="?", type=_positive, help="node count for a generator")
        sp.add_argument("--seed", type=int, default=None, help="seed (random generator and rule choices)")
        sp.add_argument("--fraction", type=_fraction, default=0.05, help="extra-arc fraction for random")

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("gen", help="write a digraph file and print its metrics")
    source(sp)
    sp.add_argument("-o", "--out", required=True, help="output JSON path")
    fmt(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("metrics", help="validate a digraph and print N, e_g, D")
    source(sp)
    fmt(sp)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("run", help="simulate the synchronization program")
    source(sp)
    sp.add_argument("--max-steps", type=_positive, default=None, help="step budget (default 10*N*N)")
    sp.add_argument("--trace", default=None, help="write line-delimited JSON trace here")
    sp.add_argument("--granularity", default="full", help="full or sampled:<k>")
    sp.add_argument("--force", action="store_true", help="run even if validation fails")
    fmt(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("check", help="recompute the synchronization verdict from a trace")
    sp.add_argument("trace_file")
    fmt(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("tables", help="reproduce the four experiment tables")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    fmt(sp)
    sp.set_defaults(func=cmd_tables)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
