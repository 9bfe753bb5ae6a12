"""Static dataflow toolchain: assemble, validate, simulate, emit."""

from .engine import (
    BUDGET_EXHAUSTED,
    COMPLETED,
    DEADLOCK,
    Machine,
    SimResult,
    TraceHasher,
    TraceWriter,
    format_event,
    simulate,
)
from .frontend import (
    BindError,
    BoundProgram,
    Manifest,
    ManifestError,
    ParseError,
    bind_manifest,
    format_program,
    parse_manifest,
    parse_program,
)
from .graph_ir import (
    Arc,
    DataflowGraph,
    Diagnostic,
    GraphStats,
    Node,
    OpKind,
    PortId,
    ValidationReport,
    graph_stats,
    in_slots,
    out_slots,
    validate_graph,
)
from .hdl import emit_netlist
from .bench import BenchReport, BENCHMARKS, oracle, run_benchmark, sweep

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "BENCHMARKS",
    "BUDGET_EXHAUSTED",
    "BenchReport",
    "BindError",
    "BoundProgram",
    "COMPLETED",
    "DEADLOCK",
    "DataflowGraph",
    "Diagnostic",
    "GraphStats",
    "Machine",
    "Manifest",
    "ManifestError",
    "Node",
    "OpKind",
    "ParseError",
    "PortId",
    "SimResult",
    "TraceHasher",
    "TraceWriter",
    "ValidationReport",
    "bind_manifest",
    "emit_netlist",
    "format_event",
    "format_program",
    "graph_stats",
    "in_slots",
    "oracle",
    "out_slots",
    "parse_manifest",
    "parse_program",
    "run_benchmark",
    "simulate",
    "sweep",
    "validate_graph",
]
