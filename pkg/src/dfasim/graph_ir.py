"""Dataflow-graph intermediate representation and structural validation.

A program is a set of operator nodes wired by labelled arcs.  Each arc is a
point-to-point channel: exactly one producer endpoint and exactly one
consumer endpoint, where either endpoint may be the outside world (a graph
input or output).  Validation reports every structural violation as data
instead of raising, so a frontend can surface all problems at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum


class OpKind(Enum):
    """Operator node types with fixed port arities."""

    COPY = "copy"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    AND = "and"
    OR = "or"
    NOT = "not"
    IF_GT = "ifgt"
    IF_GE = "ifge"
    IF_LT = "iflt"
    IF_LE = "ifle"
    IF_EQ = "ifeq"
    IF_DF = "ifdf"
    DMERGE = "dmerge"
    NDMERGE = "ndmerge"
    BRANCH = "branch"


DECIDERS = frozenset(
    {OpKind.IF_GT, OpKind.IF_GE, OpKind.IF_LT, OpKind.IF_LE, OpKind.IF_EQ, OpKind.IF_DF}
)

#: two-input primitives evaluated as a value function of (a, b)
PRIMITIVES_2IN = frozenset(
    {OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV, OpKind.AND, OpKind.OR} | DECIDERS
)

_IN_SLOTS: dict[OpKind, tuple[str, ...]] = {
    OpKind.COPY: ("a",),
    OpKind.NOT: ("a",),
    OpKind.DMERGE: ("a", "b", "ctl"),
    OpKind.NDMERGE: ("a", "b"),
    OpKind.BRANCH: ("a", "ctl"),
}
for _k in PRIMITIVES_2IN:
    _IN_SLOTS[_k] = ("a", "b")

_OUT_SLOTS: dict[OpKind, tuple[str, ...]] = {
    OpKind.COPY: ("z1", "z2"),
    OpKind.BRANCH: ("t", "f"),
}
for _k in OpKind:
    _OUT_SLOTS.setdefault(_k, ("z",))


def in_slots(kind: OpKind) -> tuple[str, ...]:
    return _IN_SLOTS[kind]


def out_slots(kind: OpKind) -> tuple[str, ...]:
    return _OUT_SLOTS[kind]


LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class PortId:
    """One endpoint of an arc: node index plus port role."""

    node: int
    slot: str


@dataclass(frozen=True)
class Node:
    """One operator instance.

    ``inputs``/``outputs`` hold arc labels in slot order for the kind
    (see :func:`in_slots`/:func:`out_slots`).  ``None`` marks a port that
    was never wired; validation flags it.
    """

    kind: OpKind
    name: str
    inputs: tuple[str | None, ...]
    outputs: tuple[str | None, ...]


@dataclass(frozen=True)
class Arc:
    """A labelled channel with its producer and consumer endpoints.

    An endpoint list is empty when that side is the outside world: arcs
    without producers are graph inputs, arcs without consumers are graph
    outputs.  Well-formed graphs have at most one endpoint per side.
    """

    label: str
    producers: tuple[PortId, ...]
    consumers: tuple[PortId, ...]

    @property
    def producer(self) -> PortId | None:
        return self.producers[0] if self.producers else None

    @property
    def consumer(self) -> PortId | None:
        return self.consumers[0] if self.consumers else None


@dataclass(frozen=True)
class DataflowGraph:
    """Immutable node list with derived arc table and I/O port lists.

    ``arcs`` preserves first-mention order (scanning nodes in order,
    inputs before outputs), which downstream consumers rely on for
    deterministic channel numbering and netlist emission.
    """

    nodes: tuple[Node, ...]
    arcs: dict[str, Arc] = field(init=False, compare=False, repr=False)
    inputs: tuple[str, ...] = field(init=False, compare=False)
    outputs: tuple[str, ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        producers: dict[str, list[PortId]] = {}
        consumers: dict[str, list[PortId]] = {}
        order: list[str] = []
        seen: set[str] = set()
        for idx, node in enumerate(self.nodes):
            for slot, label in zip(in_slots(node.kind), node.inputs):
                if label is None:
                    continue
                if label not in seen:
                    seen.add(label)
                    order.append(label)
                consumers.setdefault(label, []).append(PortId(idx, slot))
            for slot, label in zip(out_slots(node.kind), node.outputs):
                if label is None:
                    continue
                if label not in seen:
                    seen.add(label)
                    order.append(label)
                producers.setdefault(label, []).append(PortId(idx, slot))
        arcs = {
            label: Arc(
                label,
                tuple(producers.get(label, ())),
                tuple(consumers.get(label, ())),
            )
            for label in order
        }
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(
            self, "inputs", tuple(a.label for a in arcs.values() if not a.producers)
        )
        object.__setattr__(
            self, "outputs", tuple(a.label for a in arcs.values() if not a.consumers)
        )


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule} ({self.subject}): {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def __str__(self) -> str:
        return "ok" if self.ok else "\n".join(str(d) for d in self.diagnostics)


def validate_graph(graph: DataflowGraph) -> ValidationReport:
    """Check every structural invariant; never mutates, never raises.

    Rules checked per node: declared arity matches the kind, every port
    wired, labels lexically valid, instance names unique.  Per arc: at
    most one producer and one consumer.
    """
    out: list[Diagnostic] = []
    names: set[str] = set()
    for idx, node in enumerate(graph.nodes):
        if node.name in names:
            out.append(Diagnostic("duplicate-name", node.name, "instance name reused"))
        names.add(node.name)
        want_in, want_out = in_slots(node.kind), out_slots(node.kind)
        if len(node.inputs) != len(want_in) or len(node.outputs) != len(want_out):
            out.append(
                Diagnostic(
                    "bad-arity",
                    node.name,
                    f"{node.kind.value} takes {len(want_in)} input(s) and "
                    f"{len(want_out)} output(s), got {len(node.inputs)}/{len(node.outputs)}",
                )
            )
            continue
        for slot, label in zip(want_in + want_out, node.inputs + node.outputs):
            if label is None:
                out.append(
                    Diagnostic("unconnected-port", node.name, f"port {slot} is not wired")
                )
            elif not LABEL_RE.match(label):
                out.append(
                    Diagnostic("bad-label", node.name, f"port {slot}: invalid label {label!r}")
                )
    for arc in graph.arcs.values():
        if len(arc.producers) > 1:
            where = ", ".join(f"node {p.node}.{p.slot}" for p in arc.producers)
            out.append(Diagnostic("multiple-producers", arc.label, f"written by {where}"))
        if len(arc.consumers) > 1:
            where = ", ".join(f"node {p.node}.{p.slot}" for p in arc.consumers)
            out.append(Diagnostic("multiple-consumers", arc.label, f"read by {where}"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    arc_count: int
    kind_counts: dict[str, int]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


def graph_stats(graph: DataflowGraph) -> GraphStats:
    """Node/arc counts, per-kind histogram and the external port lists."""
    kinds: dict[str, int] = {}
    for node in graph.nodes:
        kinds[node.kind.value] = kinds.get(node.kind.value, 0) + 1
    return GraphStats(
        node_count=len(graph.nodes),
        arc_count=len(graph.arcs),
        kind_counts=kinds,
        inputs=graph.inputs,
        outputs=graph.outputs,
    )
