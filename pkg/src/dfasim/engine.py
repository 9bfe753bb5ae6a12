"""Deterministic clock-tick simulator for handshaking operator graphs.

Every operator instance runs the four-state controller

    S0 reset -> S1 collect inputs -> S2 execute and send -> S3 clear

over single-slot channels carrying a data word plus a strobe and an
acknowledge wire.  Acknowledge polarity: 0 means ready to receive, 1 means
busy.  A transfer is four-phase: the producer raises the strobe with the
data, the consumer latches and raises acknowledge, the producer drops the
strobe, the consumer drops acknowledge once the latched token is consumed.

Evaluation is two-phase per tick: every actor reads the committed pre-tick
channel state and stages its writes, which are applied after the whole
sweep.  Actor iteration order therefore cannot affect results.  Timing
contract: with inputs strobed at the end of tick t, an operator latches at
t+1, fires and strobes its output at t+2, and the consumer latches at t+3.

External inputs inject their next token whenever their channel is idle
(strobe low, acknowledge low); external outputs latch-and-acknowledge in a
single tick and stop accepting once their expected count is reached.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from . import semantics
from .frontend import BoundProgram
from .graph_ir import OpKind, in_slots, out_slots, validate_graph

S0, S1, S2, S3 = range(4)

_K_COPY, _K_NOT, _K_PRIM, _K_NDMERGE, _K_DMERGE, _K_BRANCH = range(6)

_KCLASS = {OpKind.COPY: _K_COPY, OpKind.NOT: _K_NOT, OpKind.NDMERGE: _K_NDMERGE,
           OpKind.DMERGE: _K_DMERGE, OpKind.BRANCH: _K_BRANCH}
for _k in OpKind:
    _KCLASS.setdefault(_k, _K_PRIM)

#: termination flags
COMPLETED = "completed"
DEADLOCK = "deadlock"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class SimResult:
    outputs: dict[str, list[int]]
    ticks_elapsed: int
    fire_counts: dict[str, int]
    arc_token_counts: dict[str, int]
    terminated: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "terminated": self.terminated,
                "ticks_elapsed": self.ticks_elapsed,
                "outputs": self.outputs,
                "fire_counts": self.fire_counts,
                "arc_token_counts": self.arc_token_counts,
            },
            separators=(",", ":"),
        )


def format_event(event: tuple) -> str:
    """Serialize one trace event as a JSON line.

    Events are (tick, actor, kind, arc, value) tuples; arc and value are
    None where not applicable (fire, warn_div0).
    """
    tick, actor, kind, arc, value = event
    parts = [f'{{"tick":{tick},"node":"{actor}","event":"{kind}"']
    if arc is not None:
        parts.append(f',"arc":"{arc}"')
    if value is not None:
        parts.append(f',"value":{value}')
    parts.append("}")
    return "".join(parts)


class TraceWriter:
    """Trace sink appending JSON lines to a file object."""

    def __init__(self, fileobj):
        self._f = fileobj

    def __call__(self, event: tuple) -> None:
        self._f.write(format_event(event))
        self._f.write("\n")


class TraceHasher:
    """Trace sink folding the serialized event stream into a SHA-256."""

    def __init__(self):
        self._h = hashlib.sha256()

    def __call__(self, event: tuple) -> None:
        self._h.update(format_event(event).encode())
        self._h.update(b"\n")

    def hexdigest(self) -> str:
        return self._h.hexdigest()


class _Op:
    __slots__ = ("name", "kind", "kcls", "in_ch", "out_ch", "in_arcs", "out_arcs",
                 "fsm", "stat", "vals", "arr", "pend", "sent", "fired", "consumed")

    def __init__(self, name, kind, in_ch, out_ch, in_arcs, out_arcs):
        self.name = name
        self.kind = kind
        self.kcls = _KCLASS[kind]
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.in_arcs = in_arcs
        self.out_arcs = out_arcs
        self.fsm = S0
        self.stat = [0] * len(in_ch)
        self.vals = [0] * len(in_ch)
        self.arr = [0] * len(in_ch)
        self.pend = [None] * len(out_ch)
        self.sent = [0] * len(out_ch)
        self.fired = False
        self.consumed = ()


class _Injector:
    __slots__ = ("name", "arc", "ch", "tokens", "pos", "strobed")

    def __init__(self, arc, ch, tokens):
        self.name = f"input:{arc}"
        self.arc = arc
        self.ch = ch
        self.tokens = tokens
        self.pos = 0
        self.strobed = False

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.tokens) and not self.strobed


class _Collector:
    __slots__ = ("name", "arc", "ch", "values", "held", "expected")

    def __init__(self, arc, ch, expected):
        self.name = f"output:{arc}"
        self.arc = arc
        self.ch = ch
        self.values = []
        self.held = False
        self.expected = expected


class Machine:
    """One simulation instance; single-threaded, no global state.

    ``trace`` is an optional callable receiving event tuples (counters are
    kept regardless).  ``full_scan=True`` disables the wake-list shortcut
    and evaluates every actor every tick; results are identical either way
    and the flag exists so tests can prove it.
    """

    def __init__(self, program: BoundProgram, trace=None, full_scan: bool = False):
        report = validate_graph(program.graph)
        if not report.ok:
            raise ValueError(f"graph failed validation:\n{report}")
        self.program = program
        self.width = program.width
        self.ticks = 0
        self._trace = trace
        self._full_scan = full_scan

        graph = program.graph
        labels = list(graph.arcs)
        index = {label: i for i, label in enumerate(labels)}
        n_ch = len(labels)
        self._arc_labels = labels
        self._str = [0] * n_ch
        self._ack = [0] * n_ch
        self._data = [0] * n_ch
        self._latches = [0] * n_ch

        self._injectors = []
        self._ops = []
        self._collectors = []
        prod_actor = [-1] * n_ch
        cons_actor = [-1] * n_ch
        aid = 0
        for label in graph.inputs:
            inj = _Injector(label, index[label], program.inputs[label])
            prod_actor[inj.ch] = aid
            self._injectors.append(inj)
            aid += 1
        for node in graph.nodes:
            op = _Op(
                node.name,
                node.kind,
                [index[a] for a in node.inputs],
                [index[a] for a in node.outputs],
                node.inputs,
                node.outputs,
            )
            for c in op.in_ch:
                cons_actor[c] = aid
            for c in op.out_ch:
                prod_actor[c] = aid
            self._ops.append(op)
            aid += 1
        for label in graph.outputs:
            col = _Collector(label, index[label], program.results[label])
            cons_actor[col.ch] = aid
            self._collectors.append(col)
            aid += 1
        self._n_actors = aid
        self._prod_actor = prod_actor
        self._cons_actor = cons_actor
        self._active = bytearray(b"\x01" * aid)

        self._send_commits: list[tuple[int, int]] = []
        self._drop_commits: list[int] = []
        self._ack_commits: list[tuple[int, int]] = []
        self._fires = {op.name: 0 for op in self._ops}
        self._outstanding = sum(
            1 for c in self._collectors if c.expected > 0
        )
        self._has_expectations = self._outstanding > 0

    # ---- per-actor evaluation -------------------------------------------

    def _eval_injector(self, inj, t):
        ch = inj.ch
        if inj.strobed:
            if self._ack[ch] == 1:
                self._drop_commits.append(ch)
                inj.strobed = False
                inj.pos += 1
                return True
            return False
        if inj.pos < len(inj.tokens) and self._str[ch] == 0 and self._ack[ch] == 0:
            value = inj.tokens[inj.pos]
            self._send_commits.append((ch, value))
            inj.strobed = True
            if self._trace is not None:
                self._trace((t, inj.name, "send", inj.arc, value))
            return True
        return False

    def _eval_collector(self, col, t):
        ch = col.ch
        if col.held:
            if self._str[ch] == 0:
                self._ack_commits.append((ch, 0))
                col.held = False
                return True
            return False
        if self._str[ch] == 1 and self._ack[ch] == 0:
            if col.expected > 0 and len(col.values) >= col.expected:
                return False  # quota reached; stop accepting
            value = self._data[ch]
            col.values.append(value)
            col.held = True
            self._ack_commits.append((ch, 1))
            self._latches[ch] += 1
            if self._trace is not None:
                self._trace((t, col.name, "latch", col.arc, value))
                self._trace((t, col.name, "ack", col.arc, None))
            if col.expected > 0 and len(col.values) == col.expected:
                self._outstanding -= 1
            return True
        return False

    def _fire_ready(self, op):
        stat = op.stat
        kcls = op.kcls
        if kcls == _K_PRIM or kcls == _K_BRANCH:
            return stat[0] and stat[1]
        if kcls == _K_NDMERGE:
            return stat[0] or stat[1]
        if kcls == _K_DMERGE:
            return stat[0] and stat[1] and stat[2]
        return stat[0]  # copy, not

    def _fire(self, op, t):
        vals = op.vals
        kcls = op.kcls
        if kcls == _K_PRIM:
            value = semantics.eval_primitive(op.kind, vals[0], vals[1], self.width)
            if op.kind is OpKind.DIV and vals[1] == 0 and self._trace is not None:
                self._trace((t, op.name, "warn_div0", None, None))
            op.pend[0] = value
            op.consumed = (0, 1)
        elif kcls == _K_COPY:
            op.pend[0], op.pend[1] = semantics.eval_copy(vals[0])
            op.consumed = (0,)
        elif kcls == _K_NOT:
            op.pend[0] = semantics.eval_not(vals[0], self.width)
            op.consumed = (0,)
        elif kcls == _K_NDMERGE:
            stat = op.stat
            if stat[0] and stat[1]:
                # first arrival wins; same-tick arrival prefers port a
                port = 0 if op.arr[0] <= op.arr[1] else 1
            else:
                _, _ = vals[0], vals[1]
                port = 0 if stat[0] else 1
            op.pend[0] = vals[port]
            op.consumed = (port,)
        elif kcls == _K_DMERGE:
            op.pend[0] = semantics.eval_dmerge(vals[0], vals[1], vals[2])
            op.consumed = (0, 1, 2)
        else:  # branch
            slot, value = semantics.eval_branch(vals[0], vals[1])
            op.pend[0 if slot == "t" else 1] = value
            op.consumed = (0, 1)
        op.fired = True
        self._fires[op.name] += 1
        if self._trace is not None:
            self._trace((t, op.name, "fire", None, None))

    def _eval_op(self, op, t):
        acted = False
        ch_str = self._str
        ch_ack = self._ack
        stat = op.stat
        # acknowledge release is plain register logic, independent of state
        for i, c in enumerate(op.in_ch):
            if stat[i] == 0 and ch_ack[c] == 1 and ch_str[c] == 0:
                self._ack_commits.append((c, 0))
                acted = True
        fsm = op.fsm
        if fsm == S1:
            for i, c in enumerate(op.in_ch):
                if stat[i] == 0 and ch_str[c] == 1 and ch_ack[c] == 0:
                    value = self._data[c]
                    op.vals[i] = value
                    stat[i] = 1
                    op.arr[i] = t
                    self._ack_commits.append((c, 1))
                    self._latches[c] += 1
                    if self._trace is not None:
                        arc = op.in_arcs[i]
                        self._trace((t, op.name, "latch", arc, value))
                        self._trace((t, op.name, "ack", arc, None))
                    acted = True
            if self._fire_ready(op):
                op.fsm = S2
                acted = True
        elif fsm == S2:
            if not op.fired:
                self._fire(op, t)
                acted = True
            all_sent = True
            for o, c in enumerate(op.out_ch):
                if op.pend[o] is None or op.sent[o]:
                    continue
                if ch_str[c] == 0 and ch_ack[c] == 0:
                    value = op.pend[o]
                    self._send_commits.append((c, value))
                    op.sent[o] = 1
                    if self._trace is not None:
                        self._trace((t, op.name, "send", op.out_arcs[o], value))
                    acted = True
                else:
                    all_sent = False
            if all_sent:
                for i in op.consumed:
                    stat[i] = 0
                op.fsm = S3
                acted = True
        elif fsm == S3:
            all_clear = True
            for o, c in enumerate(op.out_ch):
                if op.sent[o]:
                    if ch_ack[c] == 1:
                        self._drop_commits.append(c)
                        op.sent[o] = 0
                        op.pend[o] = None
                        acted = True
                    else:
                        all_clear = False
            if all_clear:
                op.fsm = S1
                op.fired = False
                acted = True
        else:  # S0: one-tick reset
            op.fsm = S1
            acted = True
        return acted

    # ---- tick and run ----------------------------------------------------

    def tick(self) -> bool:
        """Advance one synchronous step; returns whether anything changed."""
        t = self.ticks + 1
        self.ticks = t
        changed = False
        active = self._active
        nxt = bytearray(self._n_actors)
        full = self._full_scan
        aid = 0
        for inj in self._injectors:
            if (full or active[aid]) and self._eval_injector(inj, t):
                nxt[aid] = 1
                changed = True
            aid += 1
        for op in self._ops:
            if (full or active[aid]) and self._eval_op(op, t):
                nxt[aid] = 1
                changed = True
            aid += 1
        for col in self._collectors:
            if (full or active[aid]) and self._eval_collector(col, t):
                nxt[aid] = 1
                changed = True
            aid += 1
        sends = self._send_commits
        if sends:
            ch_str, ch_data, cons = self._str, self._data, self._cons_actor
            for c, v in sends:
                ch_str[c] = 1
                ch_data[c] = v
                nxt[cons[c]] = 1
            sends.clear()
        drops = self._drop_commits
        if drops:
            ch_str, cons = self._str, self._cons_actor
            for c in drops:
                ch_str[c] = 0
                nxt[cons[c]] = 1
            drops.clear()
        acks = self._ack_commits
        if acks:
            ch_ack, prod = self._ack, self._prod_actor
            for c, v in acks:
                ch_ack[c] = v
                if prod[c] >= 0:
                    nxt[prod[c]] = 1
            acks.clear()
        self._active = nxt
        return changed

    def run(self) -> SimResult:
        """Tick until completion, quiescence, or the tick budget."""
        max_ticks = self.program.max_ticks
        while True:
            if self._has_expectations and self._outstanding == 0:
                terminated = COMPLETED
                break
            if self.ticks >= max_ticks:
                terminated = BUDGET_EXHAUSTED
                break
            if not self.tick():
                # Nothing changed, so nothing can ever change again.
                if all(inj.exhausted for inj in self._injectors):
                    terminated = DEADLOCK
                else:
                    # tokens remain but can never be injected; the budget
                    # would be burned in further no-op ticks
                    self.ticks = max_ticks
                    terminated = BUDGET_EXHAUSTED
                break
        outputs = {col.arc: list(col.values) for col in self._collectors}
        labels = self._arc_labels
        return SimResult(
            outputs=outputs,
            ticks_elapsed=self.ticks,
            fire_counts=dict(self._fires),
            arc_token_counts={labels[i]: n for i, n in enumerate(self._latches)},
            terminated=terminated,
        )


def simulate(program: BoundProgram, trace=None, full_scan: bool = False) -> SimResult:
    """Build a machine for the program and run it to termination."""
    return Machine(program, trace=trace, full_scan=full_scan).run()
