"""Engine behavior: timing contract, handshake protocol, termination."""

from random import Random

import pytest

from dfasim.engine import (BUDGET_EXHAUSTED, COMPLETED, DEADLOCK, Machine,
                           TraceHasher, simulate)
from dfasim.frontend import Manifest, bind_manifest, parse_program

from support import TraceAuditor, random_bound_program


def _bind(source: str, bindings: dict, results: dict, max_ticks: int = 10_000,
          width: int = 16):
    graph = parse_program(source)
    manifest = Manifest(bindings=bindings, results=results, width=width,
                        max_ticks=max_ticks)
    return bind_manifest(graph, manifest)


def _run_traced(bound):
    events = []
    result = simulate(bound, trace=events.append)
    return result, events


def test_lone_add_timing_contract():
    # strobes committed at tick 1 -> latch at 2, fire+send at 3, delivery at 4
    bound = _bind("add s1,s2,z;", {"s1": [5], "s2": [7]}, {"z": 1})
    result, events = _run_traced(bound)
    assert result.terminated == COMPLETED
    assert result.outputs["z"] == [12]
    by_kind = {}
    for tick, actor, kind, arc, value in events:
        by_kind.setdefault((actor, kind, arc), []).append((tick, value))
    assert by_kind[("add_1", "latch", "s1")] == [(2, 5)]
    assert by_kind[("add_1", "latch", "s2")] == [(2, 7)]
    assert by_kind[("add_1", "fire", None)] == [(3, None)]
    assert by_kind[("add_1", "send", "z")] == [(3, 12)]
    assert by_kind[("output:z", "latch", "z")] == [(4, 12)]


def test_single_strobe_waits_for_partner():
    bound = _bind("add s1,s2,z;", {"s1": [5], "s2": []}, {"z": 1})
    result, events = _run_traced(bound)
    assert result.terminated == DEADLOCK
    assert result.outputs["z"] == []
    assert any(k == "latch" and a == "s1" for _, _, k, a, _ in events)
    assert not any(k == "fire" for _, _, k, _, _ in events)


def test_budget_exhausted_with_one_tick():
    bound = _bind("add s1,s2,z;", {"s1": [5], "s2": [7]}, {"z": 1}, max_ticks=1)
    result = simulate(bound)
    assert result.terminated == BUDGET_EXHAUSTED
    assert result.ticks_elapsed == 1


def test_quiescence_with_pending_inputs_fast_forwards_budget():
    # second token on s1 can never be injected: the adder starves on s2
    bound = _bind("add s1,s2,z;", {"s1": [5, 6], "s2": []}, {"z": 1},
                  max_ticks=50_000)
    result = simulate(bound)
    assert result.terminated == BUDGET_EXHAUSTED
    assert result.ticks_elapsed == 50_000


def test_copy_conservation():
    bound = _bind("copy s1,z1,z2;", {"s1": [3, 4]}, {"z1": 2, "z2": 2})
    result = simulate(bound)
    assert result.terminated == COMPLETED
    assert result.outputs == {"z1": [3, 4], "z2": [3, 4]}
    assert result.fire_counts["copy_1"] == 2


def test_dmerge_consumes_all_three_inputs():
    bound = _bind("dmerge a,b,c,z;", {"a": [4], "b": [9], "c": [1]}, {"z": 1})
    result = simulate(bound)
    assert result.terminated == COMPLETED
    assert result.outputs["z"] == [4]
    # the unselected token was consumed, not left pending
    assert result.arc_token_counts["b"] == 1

    bound = _bind("dmerge a,b,c,z;", {"a": [4], "b": [9], "c": [0]}, {"z": 1})
    assert simulate(bound).outputs["z"] == [9]


def test_dmerge_stalls_until_all_present():
    bound = _bind("dmerge a,b,c,z;", {"a": [4], "b": [], "c": [1]}, {"z": 1})
    result = simulate(bound)
    assert result.terminated == DEADLOCK
    assert result.outputs["z"] == []


def test_branch_routes_and_emits_once():
    bound = _bind("branch a,c,t,f;", {"a": [42], "c": [1]}, {"t": 1})
    result = simulate(bound)
    assert result.outputs["t"] == [42]
    assert result.outputs["f"] == []

    bound = _bind("branch a,c,t,f;", {"a": [42], "c": [0]}, {"f": 1})
    result = simulate(bound)
    assert result.outputs["f"] == [42]
    assert result.outputs["t"] == []


def test_ndmerge_first_arrival_then_tie_break():
    # b goes through two copies, so a's token arrives first even though
    # both are injected at the same tick
    source = "copy pre,mid,sink; copy mid,late,sink2; ndmerge direct,late,z;"
    bound = _bind(source, {"pre": [9], "direct": [3]},
                  {"z": 2, "sink": 1, "sink2": 1})
    result = simulate(bound)
    assert result.terminated == COMPLETED
    assert result.outputs["z"] == [3, 9]

    # simultaneous arrival: port a wins
    bound = _bind("ndmerge a,b,z;", {"a": [1], "b": [2]}, {"z": 2})
    assert simulate(bound).outputs["z"] == [1, 2]


def test_ndmerge_interleaves_streams_without_loss():
    bound = _bind("ndmerge a,b,z;", {"a": [1, 2, 3], "b": [10, 20]}, {"z": 5})
    result = simulate(bound)
    assert result.terminated == COMPLETED
    assert sorted(result.outputs["z"]) == [1, 2, 3, 10, 20]


def test_div_by_zero_warns_and_yields_zero():
    bound = _bind("div a,b,z;", {"a": [9], "b": [0]}, {"z": 1})
    result, events = _run_traced(bound)
    assert result.outputs["z"] == [0]
    assert any(kind == "warn_div0" for _, _, kind, _, _ in events)


def test_collector_stops_at_expected_count():
    bound = _bind("copy s1,z1,z2;", {"s1": [1, 2, 3]}, {"z1": 2, "z2": 0},
                  max_ticks=500)
    result = simulate(bound)
    # z1 capped at its quota; the machine then jams and never completes z2
    assert result.outputs["z1"] == [1, 2]


def test_determinism_same_trace_and_result():
    rng = Random(77)
    for _ in range(20):
        bound = random_bound_program(rng)
        h1, h2 = TraceHasher(), TraceHasher()
        r1 = simulate(bound, trace=h1)
        r2 = simulate(bound, trace=h2)
        assert h1.hexdigest() == h2.hexdigest()
        assert r1.to_json() == r2.to_json()


def test_wake_list_equals_full_scan():
    rng = Random(4444)
    for _ in range(40):
        bound = random_bound_program(rng)
        ev_fast, ev_full = [], []
        r_fast = simulate(bound, trace=ev_fast.append)
        r_full = simulate(bound, trace=ev_full.append, full_scan=True)
        assert ev_fast == ev_full
        assert r_fast.to_json() == r_full.to_json()


def test_trace_protocol_invariants_on_random_graphs():
    rng = Random(31337)
    for _ in range(100):
        bound = random_bound_program(rng)
        auditor = TraceAuditor(bound.graph)
        simulate(bound, trace=auditor)
        assert auditor.finish() == []


def test_machine_rejects_invalid_graph():
    from dfasim.graph_ir import DataflowGraph, Node, OpKind

    graph = DataflowGraph((Node(OpKind.ADD, "add_1", ("a", None), ("z",)),))
    manifest = Manifest()
    with pytest.raises(ValueError):
        Machine(bind_manifest(graph, manifest))


def test_fire_counts_and_arc_counts_consistent():
    bound = _bind("copy s1,z1,z2;", {"s1": [3]}, {"z1": 1, "z2": 1})
    result = simulate(bound)
    assert result.fire_counts == {"copy_1": 1}
    assert result.arc_token_counts == {"s1": 1, "z1": 1, "z2": 1}
