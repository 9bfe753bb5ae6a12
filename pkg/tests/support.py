"""Shared test helpers: random graph generation and trace auditing.

The auditor re-derives protocol facts purely from the event stream, so it
is an independent check on the engine rather than a restatement of it.
"""

from __future__ import annotations

from random import Random

from dfasim.frontend import BoundProgram, Manifest, bind_manifest
from dfasim.graph_ir import (DataflowGraph, Node, OpKind, in_slots, out_slots)

ALL_KINDS = list(OpKind)


def random_graph(rng: Random, max_nodes: int = 15) -> DataflowGraph:
    """A structurally valid graph with random kinds and random wiring.

    Output ports are matched to input ports at random; unmatched ports
    become external inputs/outputs.  Every such wiring satisfies the
    one-producer one-consumer rule by construction.
    """
    count = rng.randint(1, max_nodes)
    kinds = [rng.choice(ALL_KINDS) for _ in range(count)]
    producers: list[tuple[int, int]] = []  # (node, output slot index)
    consumers: list[tuple[int, int]] = []
    for idx, kind in enumerate(kinds):
        producers += [(idx, o) for o in range(len(out_slots(kind)))]
        consumers += [(idx, i) for i in range(len(in_slots(kind)))]
    rng.shuffle(producers)
    rng.shuffle(consumers)
    pairs = rng.randint(0, min(len(producers), len(consumers)))

    in_labels: list[list[str | None]] = [
        [None] * len(in_slots(k)) for k in kinds
    ]
    out_labels: list[list[str | None]] = [
        [None] * len(out_slots(k)) for k in kinds
    ]
    serial = 0
    for (pn, po), (cn, ci) in zip(producers[:pairs], consumers[:pairs]):
        serial += 1
        label = f"s{serial}"
        out_labels[pn][po] = label
        in_labels[cn][ci] = label
    ext = 0
    for pn, po in producers[pairs:]:
        ext += 1
        out_labels[pn][po] = f"out{ext}"
    for cn, ci in consumers[pairs:]:
        ext += 1
        in_labels[cn][ci] = f"in{ext}"

    nodes = tuple(
        Node(kind, f"{kind.value}_{idx + 1}", tuple(in_labels[idx]), tuple(out_labels[idx]))
        for idx, kind in enumerate(kinds)
    )
    return DataflowGraph(nodes)


def random_bound_program(rng: Random, max_nodes: int = 15,
                         max_ticks: int = 400) -> BoundProgram:
    graph = random_graph(rng, max_nodes)
    bindings = {
        label: [rng.randint(0, 1000) for _ in range(rng.randint(0, 3))]
        for label in graph.inputs
    }
    manifest = Manifest(bindings=bindings, results={}, max_ticks=max_ticks)
    return bind_manifest(graph, manifest)


#: tokens consumed and produced by one fire, per kind
CONSERVATION = {OpKind.COPY: (1, 2), OpKind.NOT: (1, 1), OpKind.NDMERGE: (1, 1),
                OpKind.DMERGE: (3, 1), OpKind.BRANCH: (2, 1)}
for _k in OpKind:
    CONSERVATION.setdefault(_k, (2, 1))


class TraceAuditor:
    """Replays a trace and checks the channel protocol invariants.

    Checked: strict send/acknowledge alternation per arc, latched values a
    duplicate-free prefix of sent values per arc, all required input
    tokens present and strictly older than each fire, and per-fire token
    conservation by kind.  Violations are collected as strings.
    """

    def __init__(self, graph: DataflowGraph):
        self.graph = graph
        self.violations: list[str] = []
        self._sent: dict[str, list[int]] = {a: [] for a in graph.arcs}
        self._latched: dict[str, list[int]] = {a: [] for a in graph.arcs}
        self._in_flight: dict[str, bool] = {a: False for a in graph.arcs}
        self._node_by_name = {n.name: (i, n) for i, n in enumerate(graph.nodes)}
        # per node: per input slot, FIFO of (latch tick, value)
        self._held: dict[str, list[list[tuple[int, int]]]] = {
            n.name: [[] for _ in in_slots(n.kind)] for n in graph.nodes
        }
        self._expect_sends: dict[str, int | None] = {n.name: None for n in graph.nodes}
        self._send_count: dict[str, int] = {n.name: 0 for n in graph.nodes}

    def __call__(self, event: tuple) -> None:
        tick, actor, kind, arc, value = event
        if kind == "send":
            if self._in_flight.get(arc):
                self.violations.append(
                    f"tick {tick}: second send on {arc} before acknowledge")
            self._in_flight[arc] = True
            self._sent[arc].append(value)
            if actor in self._send_count:
                self._send_count[actor] += 1
        elif kind == "ack":
            if not self._in_flight.get(arc):
                self.violations.append(f"tick {tick}: acknowledge on idle arc {arc}")
            self._in_flight[arc] = False
        elif kind == "latch":
            self._latched[arc].append(value)
            if actor in self._node_by_name:
                _, node = self._node_by_name[actor]
                for idx, label in enumerate(node.inputs):
                    if label == arc:
                        self._held[actor][idx].append((tick, value))
                        break
        elif kind == "fire":
            self._check_fire(tick, actor)

    def _check_fire(self, tick: int, name: str) -> None:
        _, node = self._node_by_name[name]
        held = self._held[name]
        kind = node.kind
        pending = self._expect_sends[name]
        if pending is not None and self._send_count[name] != pending:
            self.violations.append(
                f"tick {tick}: {name} fired after {self._send_count[name]} sends, "
                f"expected {pending}")
        self._send_count[name] = 0
        consumed, produced = CONSERVATION[kind]
        self._expect_sends[name] = produced

        def take(slot_idx: int):
            if not held[slot_idx]:
                self.violations.append(
                    f"tick {tick}: {name} fired without a token on input "
                    f"{in_slots(kind)[slot_idx]}")
                return
            latch_tick, _ = held[slot_idx].pop(0)
            if latch_tick >= tick:
                self.violations.append(
                    f"tick {tick}: {name} consumed a token latched at {latch_tick}")

        if kind is OpKind.NDMERGE:
            candidates = [i for i in range(2) if held[i]]
            if not candidates:
                self.violations.append(f"tick {tick}: {name} fired with no input")
                return
            # first arrival wins, port a on a tie
            take(min(candidates, key=lambda i: (held[i][0][0], i)))
        else:
            for i in range(consumed):
                take(i)

    def finish(self) -> list[str]:
        """Run end-of-trace checks and return all violations."""
        for arc in self.graph.arcs:
            sent, latched = self._sent[arc], self._latched[arc]
            if len(sent) - len(latched) not in (0, 1):
                self.violations.append(
                    f"arc {arc}: {len(sent)} sends but {len(latched)} latches")
            if sent[: len(latched)] != latched:
                self.violations.append(f"arc {arc}: latched values diverge from sent")
        return self.violations
