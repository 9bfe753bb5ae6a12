"""Shipped benchmark programs, reference oracles and the comparison harness.

Each benchmark couples an assembler program with a manifest builder that
turns one problem input into token streams, a pure scalar oracle computing
the expected answer, and an extractor reading the answer back out of the
simulator outputs.  The defining contract is oracle equivalence; the
harness never passes silently on a mismatch or an abnormal termination.

Conventions:

* vectors are streamed one token per element on a data port, with the
  loop-control ports sized to the element count;
* the loop-control block counts an index against a bound and emits one
  boolean gate token per element (true = keep accumulating, false = emit);
* ``bubble_sort`` instead pushes the stream through a 16-cell insertion
  chain primed with low sentinels and flushed with high sentinels, so its
  admissible element range is [-32767, 32766];
* results are decoded two's-complement where the quantity is signed.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from random import Random
from typing import Any, Callable

from .engine import COMPLETED, SimResult, simulate
from .frontend import Manifest, bind_manifest, parse_program
from .graph_ir import DataflowGraph
from .semantics import to_signed, to_unsigned

DEFAULT_SEED = 20260809
_BENCH_MAX_TICKS = 1_000_000

_SENT_LOW = -32768
_SENT_HIGH = 32767
_CHAIN_CELLS = 16


def _program_text(name: str) -> str:
    return (resources.files(__package__) / "programs" / f"{name}.dfasm").read_text()


def _control_bindings(count: int) -> dict[str, list[int]]:
    """Streams for the shared loop-control block running ``count`` passes."""
    return {
        "ctru": [1],
        "cdum": [0] * count,
        "cinit": [0],
        "cnt": [count - 1] * count,
        "cone": [1] * (count - 1),
    }


# ---- manifest builders -------------------------------------------------


def fibonacci_manifest(n: int) -> Manifest:
    m = max(n, 0)
    return Manifest(
        bindings={
            "dadoa": [n] * (m + 1),
            "dadob": [1],
            "dadoc": [0] * (m + 1),
            "dadod": [0],
            "dadoe": [1] * m,
            "dadof": [0],
            "dadog": [1],
            "dadoh": [0] * m,
            "dadoi": [1],
            "dadoj": [0],
        },
        results={"fibo": m + 1, "pf": 1},
        max_ticks=_BENCH_MAX_TICKS,
    )


def max_vector_manifest(v: list[int]) -> Manifest:
    k = len(v)
    bindings = _control_bindings(k)
    bindings.update({"hinit": [_SENT_LOW], "vdata": list(v)})
    return Manifest(bindings=bindings, results={"maxout": 1, "cfinal": 1},
                    max_ticks=_BENCH_MAX_TICKS)


def vector_sum_manifest(v: list[int]) -> Manifest:
    k = len(v)
    bindings = _control_bindings(k)
    bindings.update({"ainit": [0], "vdata": list(v)})
    return Manifest(bindings=bindings, results={"sumout": 1, "cfinal": 1},
                    max_ticks=_BENCH_MAX_TICKS)


def dot_prod_manifest(ab: tuple[list[int], list[int]]) -> Manifest:
    a, b = ab
    if len(a) != len(b):
        raise ValueError("dot_prod vectors must have equal length")
    bindings = _control_bindings(len(a))
    bindings.update({"adata": list(a), "bdata": list(b), "ainit": [0]})
    return Manifest(bindings=bindings, results={"dotout": 1, "cfinal": 1},
                    max_ticks=_BENCH_MAX_TICKS)


def pop_count_manifest(x: int) -> Manifest:
    bindings = _control_bindings(16)
    bindings.update({
        "xdata": [x] * 16,
        "mword": [1 << i for i in range(16)],
        "zz": [0] * 16,
        "ainit": [0],
    })
    return Manifest(bindings=bindings, results={"pcout": 1, "cfinal": 1},
                    max_ticks=_BENCH_MAX_TICKS)


def bubble_sort_manifest(v: list[int]) -> Manifest:
    if any(not (_SENT_LOW < x < _SENT_HIGH) for x in v):
        raise ValueError("bubble_sort elements must avoid the sentinel extremes")
    if len(v) > _CHAIN_CELLS:
        raise ValueError(f"bubble_sort handles at most {_CHAIN_CELLS} elements")
    return Manifest(
        bindings={
            "ini": [_SENT_LOW],
            "vstream": list(v) + [_SENT_HIGH] * _CHAIN_CELLS,
        },
        results={"sorted": _CHAIN_CELLS + len(v)},
        max_ticks=_BENCH_MAX_TICKS,
    )


# ---- oracles ------------------------------------------------------------


def fibonacci_oracle(n: int, width: int = 16) -> int:
    """Iterative pair recurrence, bound inclusive, wrapping at the width."""
    mask = (1 << width) - 1
    first, second = 0, 1
    for _ in range(0, max(n, 0) + 1):
        tmp = (first + second) & mask
        first = second
        second = tmp
    return second


def max_vector_oracle(v: list[int], width: int = 16) -> int:
    return max(v)


def vector_sum_oracle(v: list[int], width: int = 16) -> int:
    return to_signed(to_unsigned(sum(v), width), width)


def dot_prod_oracle(ab: tuple[list[int], list[int]], width: int = 16) -> int:
    a, b = ab
    total = sum(x * y for x, y in zip(a, b))
    return to_signed(to_unsigned(total, width), width)


def pop_count_oracle(x: int, width: int = 16) -> int:
    return bin(to_unsigned(x, width)).count("1")


def bubble_sort_oracle(v: list[int], width: int = 16) -> list[int]:
    return sorted(v)


# ---- result extraction ---------------------------------------------------


def _last_raw(label: str):
    def extract(result: SimResult, value: Any, width: int):
        return result.outputs[label][-1]

    return extract


def _single_signed(label: str):
    def extract(result: SimResult, value: Any, width: int):
        return to_signed(result.outputs[label][-1], width)

    return extract


def _sorted_tail(result: SimResult, value: Any, width: int):
    k = len(value)
    return [to_signed(x, width) for x in result.outputs["sorted"][-k:]]


# ---- input samplers -------------------------------------------------------


def _scalar_sampler(rng: Random):
    return rng.randint(-100, 100)


def _vector_sampler(rng: Random):
    return [rng.randint(-100, 100) for _ in range(rng.randint(1, 16))]


def _pair_sampler(rng: Random):
    k = rng.randint(1, 16)
    return (
        [rng.randint(-100, 100) for _ in range(k)],
        [rng.randint(-100, 100) for _ in range(k)],
    )


@dataclass(frozen=True)
class Benchmark:
    """One shipped benchmark: program, manifest template, oracle, decoding."""

    name: str
    program: str
    build_manifest: Callable[[Any], Manifest]
    oracle: Callable[..., Any]
    extract: Callable[[SimResult, Any, int], Any]
    sample_input: Callable[[Random], Any]

    def graph(self) -> DataflowGraph:
        cached = _GRAPH_CACHE.get(self.name)
        if cached is None:
            cached = parse_program(self.program)
            _GRAPH_CACHE[self.name] = cached
        return cached


_GRAPH_CACHE: dict[str, DataflowGraph] = {}

BENCHMARKS: dict[str, Benchmark] = {
    b.name: b
    for b in (
        Benchmark("fibonacci", _program_text("fibonacci"), fibonacci_manifest,
                  fibonacci_oracle, _last_raw("fibo"), _scalar_sampler),
        Benchmark("max_vector", _program_text("max_vector"), max_vector_manifest,
                  max_vector_oracle, _single_signed("maxout"), _vector_sampler),
        Benchmark("dot_prod", _program_text("dot_prod"), dot_prod_manifest,
                  dot_prod_oracle, _single_signed("dotout"), _pair_sampler),
        Benchmark("vector_sum", _program_text("vector_sum"), vector_sum_manifest,
                  vector_sum_oracle, _single_signed("sumout"), _vector_sampler),
        Benchmark("bubble_sort", _program_text("bubble_sort"), bubble_sort_manifest,
                  bubble_sort_oracle, _sorted_tail, _vector_sampler),
        Benchmark("pop_count", _program_text("pop_count"), pop_count_manifest,
                  pop_count_oracle, _last_raw("pcout"), _scalar_sampler),
    )
}


@dataclass
class BenchReport:
    name: str
    input: Any
    result: Any
    expected: Any
    match: bool
    ticks: int
    terminated: str
    fire_counts: dict[str, int]

    def to_row(self) -> str:
        return (f"{self.name:12s} input={self.input!r} result={self.result!r} "
                f"expected={self.expected!r} ticks={self.ticks} "
                f"{self.terminated} {'MATCH' if self.match else 'MISMATCH'}")


def oracle(name: str, value: Any, width: int = 16) -> Any:
    """Reference answer for a benchmark input, independent of the simulator."""
    return BENCHMARKS[name].oracle(value, width)


def run_benchmark(name: str, value: Any, width: int = 16, trace=None) -> BenchReport:
    """Simulate one benchmark input and compare against its oracle."""
    bench = BENCHMARKS[name]
    manifest = bench.build_manifest(value)
    if width != manifest.width:
        manifest = Manifest(manifest.bindings, manifest.results, width, manifest.max_ticks)
    bound = bind_manifest(bench.graph(), manifest)
    result = simulate(bound, trace=trace)
    expected = bench.oracle(value, width)
    if result.terminated == COMPLETED:
        got = bench.extract(result, value, width)
    else:
        got = None
    return BenchReport(
        name=name,
        input=value,
        result=got,
        expected=expected,
        match=result.terminated == COMPLETED and got == expected,
        ticks=result.ticks_elapsed,
        terminated=result.terminated,
        fire_counts=result.fire_counts,
    )


def sample_input(name: str, rng: Random) -> Any:
    return BENCHMARKS[name].sample_input(rng)


def sweep(name: str, count: int = 200, seed: int = DEFAULT_SEED,
          width: int = 16) -> list[BenchReport]:
    """Run ``count`` seeded random inputs through one benchmark."""
    rng = Random(f"{seed}:{name}")
    bench = BENCHMARKS[name]
    return [run_benchmark(name, bench.sample_input(rng), width) for _ in range(count)]
