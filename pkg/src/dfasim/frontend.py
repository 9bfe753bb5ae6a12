"""Assembler-language frontend and run-manifest loading.

Grammar, one operator per statement::

    statement := [ INT '.' ] MNEMONIC label ( ',' label )* ';'

``--`` starts a comment running to end of line; whitespace is free-form;
a numeric ``N.`` statement prefix is accepted and ignored.  Argument
order per mnemonic (inputs first, then outputs):

    copy a,z1,z2
    add|sub|mul|div|and|or a,b,z
    not a,z
    ndmerge a,b,z
    dmerge a,b,ctl,z
    branch a,ctl,t,f
    gt|ge|lt|le|eq|df decider a,b,z

Labels that no statement produces become graph inputs; labels no statement
consumes become graph outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph_ir import DataflowGraph, Node, OpKind, in_slots, out_slots

DEFAULT_WIDTH = 16
DEFAULT_MAX_TICKS = 1_000_000


class ParseError(Exception):
    """Syntax or arity error with source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ManifestError(Exception):
    """Malformed or out-of-range manifest document."""


class BindError(Exception):
    """Manifest refers to a label the graph does not expose."""


_MNEMONICS: dict[str, OpKind] = {
    "copy": OpKind.COPY,
    "add": OpKind.ADD,
    "sub": OpKind.SUB,
    "mul": OpKind.MUL,
    "div": OpKind.DIV,
    "and": OpKind.AND,
    "or": OpKind.OR,
    "not": OpKind.NOT,
    "ndmerge": OpKind.NDMERGE,
    "dmerge": OpKind.DMERGE,
    "branch": OpKind.BRANCH,
    "gtdecider": OpKind.IF_GT,
    "gedecider": OpKind.IF_GE,
    "ltdecider": OpKind.IF_LT,
    "ledecider": OpKind.IF_LE,
    "eqdecider": OpKind.IF_EQ,
    "dfdecider": OpKind.IF_DF,
}

_KIND_TO_MNEMONIC = {kind: name for name, kind in _MNEMONICS.items()}


def _tokenize(source: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
        elif ch.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            tokens.append(("int", source[start:i], line, col))
            col += i - start
        elif ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(("ident", source[start:i], line, col))
            col += i - start
        elif ch in ".,;":
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


def parse_program(source: str) -> DataflowGraph:
    """Parse assembler text into a graph, one node per statement.

    Instance names are ``<mnemonic>_<ordinal>`` with 1-based statement
    ordinals.  Raises :class:`ParseError` on the first syntax, unknown
    mnemonic, or arity problem.
    """
    tokens = _tokenize(source)
    nodes: list[Node] = []
    pos = 0
    ordinal = 0
    while pos < len(tokens):
        kind_tok, text, line, col = tokens[pos]
        if kind_tok == "int":
            if pos + 1 >= len(tokens) or tokens[pos + 1][0] != ".":
                raise ParseError("expected '.' after statement number", line, col)
            pos += 2
            if pos >= len(tokens):
                raise ParseError("expected mnemonic after statement number", line, col)
            kind_tok, text, line, col = tokens[pos]
        if kind_tok != "ident":
            raise ParseError(f"expected mnemonic, got {text!r}", line, col)
        mnemonic = text
        kind = _MNEMONICS.get(mnemonic)
        if kind is None:
            raise ParseError(f"unknown mnemonic {mnemonic!r}", line, col)
        pos += 1
        args: list[str] = []
        while True:
            if pos >= len(tokens):
                raise ParseError("unterminated statement, expected ';'", line, col)
            tk, tx, ln, cl = tokens[pos]
            if tk != "ident":
                raise ParseError(f"expected label, got {tx!r}", ln, cl)
            args.append(tx)
            pos += 1
            if pos >= len(tokens):
                raise ParseError("unterminated statement, expected ';'", ln, cl)
            tk, tx, ln, cl = tokens[pos]
            if tk == ",":
                pos += 1
                continue
            if tk == ";":
                pos += 1
                break
            raise ParseError(f"expected ',' or ';', got {tx!r}", ln, cl)
        n_in = len(in_slots(kind))
        n_out = len(out_slots(kind))
        if len(args) != n_in + n_out:
            raise ParseError(
                f"{mnemonic} expects {n_in + n_out} arguments, got {len(args)}",
                line,
                col,
            )
        ordinal += 1
        nodes.append(
            Node(
                kind=kind,
                name=f"{mnemonic}_{ordinal}",
                inputs=tuple(args[:n_in]),
                outputs=tuple(args[n_in:]),
            )
        )
    return DataflowGraph(tuple(nodes))


def format_program(graph: DataflowGraph) -> str:
    """Render a graph back to assembler text, one statement per node."""
    lines = []
    for node in graph.nodes:
        args = ",".join(str(a) for a in node.inputs + node.outputs)
        lines.append(f"{_KIND_TO_MNEMONIC[node.kind]} {args};")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Manifest:
    """Run parameters: input token streams and expected output counts.

    ``results`` maps an output label to the number of tokens to collect;
    0 means collect whatever arrives until the tick budget runs out.
    """

    bindings: dict[str, list[int]] = field(default_factory=dict)
    results: dict[str, int] = field(default_factory=dict)
    width: int = DEFAULT_WIDTH
    max_ticks: int = DEFAULT_MAX_TICKS


def parse_manifest(source: str) -> Manifest:
    """Load a JSON manifest document.

    Schema: ``{"width": 16, "max_ticks": 1000000,
    "inputs": {label: [int, ...]}, "results": {label: int}}``.
    Missing width/max_ticks take the defaults.
    """
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a JSON object")
    width = doc.get("width", DEFAULT_WIDTH)
    if not isinstance(width, int) or isinstance(width, bool) or width < 1:
        raise ManifestError(f"width must be an integer >= 1, got {width!r}")
    max_ticks = doc.get("max_ticks", DEFAULT_MAX_TICKS)
    if not isinstance(max_ticks, int) or isinstance(max_ticks, bool) or max_ticks < 1:
        raise ManifestError(f"max_ticks must be an integer >= 1, got {max_ticks!r}")
    bindings: dict[str, list[int]] = {}
    raw_inputs = doc.get("inputs", {})
    if not isinstance(raw_inputs, dict):
        raise ManifestError("inputs must be an object")
    for label, values in raw_inputs.items():
        if not isinstance(values, list) or any(
            not isinstance(v, int) or isinstance(v, bool) for v in values
        ):
            raise ManifestError(f"input {label!r} must be a list of integers")
        bindings[label] = list(values)
    results: dict[str, int] = {}
    raw_results = doc.get("results", {})
    if not isinstance(raw_results, dict):
        raise ManifestError("results must be an object")
    for label, count in raw_results.items():
        if not isinstance(count, int) or isinstance(count, bool) or count < 0:
            raise ManifestError(f"result {label!r} must be a non-negative integer")
        results[label] = count
    return Manifest(bindings=bindings, results=results, width=width, max_ticks=max_ticks)


@dataclass(frozen=True)
class BoundProgram:
    """Simulation-ready bundle: graph plus normalized streams and budgets.

    Every graph input has a (possibly empty) token tuple, values reduced
    modulo 2**width; every graph output has an expected token count.
    """

    graph: DataflowGraph
    inputs: dict[str, tuple[int, ...]]
    results: dict[str, int]
    width: int
    max_ticks: int


def bind_manifest(graph: DataflowGraph, manifest: Manifest) -> BoundProgram:
    """Attach a manifest to a graph, checking every label exists."""
    for label in manifest.bindings:
        if label not in graph.inputs:
            raise BindError(f"manifest binds {label!r}, which is not a graph input")
    for label in manifest.results:
        if label not in graph.outputs:
            raise BindError(f"manifest expects {label!r}, which is not a graph output")
    mask = (1 << manifest.width) - 1
    inputs = {
        label: tuple(v & mask for v in manifest.bindings.get(label, ()))
        for label in graph.inputs
    }
    results = {label: manifest.results.get(label, 0) for label in graph.outputs}
    return BoundProgram(
        graph=graph,
        inputs=inputs,
        results=results,
        width=manifest.width,
        max_ticks=manifest.max_ticks,
    )
