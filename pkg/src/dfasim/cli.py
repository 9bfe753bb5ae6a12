"""Command-line surface: run, validate, bench, emit, trace.

Machine-readable JSON goes to stdout; human diagnostics and tables go to
stderr.  Exit codes: 0 success/completed, 1 usage/parse/validation error
or benchmark mismatch, 2 simulation deadlock, 3 tick budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import BENCHMARKS, DEFAULT_SEED, run_benchmark, sweep
from .engine import (BUDGET_EXHAUSTED, COMPLETED, DEADLOCK, TraceWriter, simulate)
from .frontend import (BindError, Manifest, ManifestError, ParseError,
                       bind_manifest, parse_manifest, parse_program)
from .graph_ir import graph_stats, validate_graph
from .hdl import emit_netlist

_EXIT_FOR = {COMPLETED: 0, DEADLOCK: 2, BUDGET_EXHAUSTED: 3}


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 1


def _load_graph(path: str):
    source = Path(path).read_text()
    graph = parse_program(source)
    report = validate_graph(graph)
    if not report.ok:
        raise ValueError(f"{path}: graph failed validation:\n{report}")
    return graph


def _load_manifest(path: str, args) -> Manifest:
    manifest = parse_manifest(Path(path).read_text())
    width = args.width if args.width is not None else manifest.width
    max_ticks = args.max_ticks if args.max_ticks is not None else manifest.max_ticks
    return Manifest(manifest.bindings, manifest.results, width, max_ticks)


def _run_once(args, trace_path: str | None) -> int:
    try:
        graph = _load_graph(args.program)
        manifest = _load_manifest(args.manifest, args)
        bound = bind_manifest(graph, manifest)
    except (OSError, ParseError, ManifestError, BindError, ValueError) as exc:
        return _fail(str(exc))
    if trace_path:
        with open(trace_path, "w") as f:
            result = simulate(bound, trace=TraceWriter(f))
    else:
        result = simulate(bound)
    print(result.to_json())
    return _EXIT_FOR[result.terminated]


def _cmd_run(args) -> int:
    return _run_once(args, args.trace)


def _cmd_trace(args) -> int:
    return _run_once(args, args.out)


def _cmd_validate(args) -> int:
    try:
        source = Path(args.program).read_text()
        graph = parse_program(source)
    except (OSError, ParseError) as exc:
        return _fail(str(exc))
    report = validate_graph(graph)
    if not report.ok:
        return _fail(f"{args.program}: graph failed validation:\n{report}")
    stats = graph_stats(graph)
    print(json.dumps({
        "nodes": stats.node_count,
        "arcs": stats.arc_count,
        "kinds": stats.kind_counts,
        "inputs": list(stats.inputs),
        "outputs": list(stats.outputs),
    }, separators=(",", ":")))
    return 0


def _cmd_emit(args) -> int:
    try:
        graph = _load_graph(args.program)
    except (OSError, ParseError, ValueError) as exc:
        return _fail(str(exc))
    name = args.name or Path(args.program).stem
    text = emit_netlist(graph, width=args.width or 16, name=name)
    out = args.out or str(Path(args.program).with_suffix(".vhd"))
    Path(out).write_text(text)
    print(json.dumps({"netlist": out, "entity": name}, separators=(",", ":")))
    return 0


def _parse_vector(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _bench_input(name: str, args):
    if args.input is not None:
        parts = args.input.split(";")
        if name == "dot_prod":
            if len(parts) != 2:
                raise ValueError("dot_prod needs two ';'-separated vectors")
            return _parse_vector(parts[0]), _parse_vector(parts[1])
        return _parse_vector(parts[0])
    if args.n is not None:
        return args.n
    return None


def _cmd_bench(args) -> int:
    names = list(BENCHMARKS) if args.benchmark == "all" else [args.benchmark]
    for name in names:
        if name not in BENCHMARKS:
            return _fail(f"unknown benchmark {name!r}; choose from "
                         f"{', '.join(BENCHMARKS)} or 'all'")
    width = args.width if args.width is not None else 16
    rows = []
    reports = []
    for name in names:
        try:
            explicit = _bench_input(name, args)
        except ValueError as exc:
            return _fail(str(exc))
        if explicit is not None:
            results = [run_benchmark(name, explicit, width)]
        else:
            results = sweep(name, count=args.count, seed=args.seed, width=width)
        matches = sum(r.match for r in results)
        rows.append({
            "benchmark": name,
            "runs": len(results),
            "matches": matches,
            "mismatches": len(results) - matches,
            "avg_ticks": round(sum(r.ticks for r in results) / len(results), 1),
        })
        reports.extend(results)
    header = f"{'benchmark':12s} {'runs':>5s} {'match':>6s} {'miss':>5s} {'avg ticks':>10s}"
    print(header, file=sys.stderr)
    for row in rows:
        print(f"{row['benchmark']:12s} {row['runs']:5d} {row['matches']:6d} "
              f"{row['mismatches']:5d} {row['avg_ticks']:10.1f}", file=sys.stderr)
    for r in reports:
        if not r.match:
            print(f"  mismatch: {r.to_row()}", file=sys.stderr)
    payload = {"rows": rows, "seed": args.seed}
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2))
    print(json.dumps(payload, separators=(",", ":")))
    return 0 if all(row["mismatches"] == 0 for row in rows) else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfasim",
        description="assemble, validate, simulate and emit static dataflow graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a program with a manifest")
    run_p.add_argument("program")
    run_p.add_argument("manifest")
    run_p.add_argument("--width", type=int, default=None)
    run_p.add_argument("--max-ticks", type=int, default=None)
    run_p.add_argument("--trace", metavar="FILE", default=None,
                       help="write a JSONL event trace")
    run_p.set_defaults(func=_cmd_run)

    trace_p = sub.add_parser("trace", help="simulate and write the event trace")
    trace_p.add_argument("program")
    trace_p.add_argument("manifest")
    trace_p.add_argument("--width", type=int, default=None)
    trace_p.add_argument("--max-ticks", type=int, default=None)
    trace_p.add_argument("--out", metavar="FILE", required=True)
    trace_p.set_defaults(func=_cmd_trace)

    val_p = sub.add_parser("validate", help="parse and structurally check a program")
    val_p.add_argument("program")
    val_p.set_defaults(func=_cmd_validate)

    bench_p = sub.add_parser("bench", help="run shipped benchmarks against oracles")
    bench_p.add_argument("benchmark", help="benchmark name or 'all'")
    bench_p.add_argument("--count", type=int, default=20,
                         help="random inputs per benchmark (default 20)")
    bench_p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bench_p.add_argument("--width", type=int, default=None)
    bench_p.add_argument("--n", type=int, default=None,
                         help="explicit scalar input (fibonacci, pop_count)")
    bench_p.add_argument("--input", default=None,
                         help="explicit vector input, e.g. '3,1,2' or '1,2;3,4'")
    bench_p.add_argument("--out", metavar="FILE", default=None,
                         help="also write the JSON report to a file")
    bench_p.set_defaults(func=_cmd_bench)

    emit_p = sub.add_parser("emit", help="emit a structural VHDL netlist")
    emit_p.add_argument("program")
    emit_p.add_argument("--width", type=int, default=None)
    emit_p.add_argument("--name", default=None, help="top entity name")
    emit_p.add_argument("--out", metavar="FILE", default=None)
    emit_p.set_defaults(func=_cmd_emit)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
