"""Value-level semantics of each operator kind.

All functions are pure and width-parametric.  Words are stored as unsigned
residues in [0, 2**width); comparisons and division interpret them as
two's-complement signed integers, matching conventional HDL integer
handling.  Add/sub/mul wrap modulo 2**width.
"""

from __future__ import annotations

from .graph_ir import OpKind


def word_mask(width: int) -> int:
    return (1 << width) - 1


def to_signed(value: int, width: int) -> int:
    """Decode an unsigned residue as a two's-complement integer."""
    if value & (1 << (width - 1)):
        return value - (1 << width)
    return value


def to_unsigned(value: int, width: int) -> int:
    """Encode any integer into its residue modulo 2**width."""
    return value & word_mask(width)


def eval_primitive(kind: OpKind, a: int, b: int, width: int) -> int:
    """Apply a two-input primitive; deciders return a 0/1 token.

    Division truncates toward zero on the signed views; a zero divisor
    yields 0 (the engine tags the event with a warning).
    """
    mask = word_mask(width)
    if kind is OpKind.ADD:
        return (a + b) & mask
    if kind is OpKind.SUB:
        return (a - b) & mask
    if kind is OpKind.MUL:
        return (a * b) & mask
    if kind is OpKind.DIV:
        if b == 0:
            return 0
        sa, sb = to_signed(a, width), to_signed(b, width)
        q = abs(sa) // abs(sb)
        if (sa < 0) != (sb < 0):
            q = -q
        return q & mask
    if kind is OpKind.AND:
        return a & b
    if kind is OpKind.OR:
        return a | b
    sa, sb = to_signed(a, width), to_signed(b, width)
    if kind is OpKind.IF_GT:
        return int(sa > sb)
    if kind is OpKind.IF_GE:
        return int(sa >= sb)
    if kind is OpKind.IF_LT:
        return int(sa < sb)
    if kind is OpKind.IF_LE:
        return int(sa <= sb)
    if kind is OpKind.IF_EQ:
        return int(sa == sb)
    if kind is OpKind.IF_DF:
        return int(sa != sb)
    raise ValueError(f"{kind} is not a two-input primitive")


def eval_not(a: int, width: int) -> int:
    """Bitwise complement."""
    return ~a & word_mask(width)


def eval_copy(a: int) -> tuple[int, int]:
    """Duplicate one token onto both outputs."""
    return a, a


def eval_dmerge(a: int, b: int, ctl: int) -> int:
    """Controlled merge: a true control token selects input a, false selects b.

    The operator fires only with all three inputs present and consumes all
    three; the unselected data token is discarded.  Any nonzero control
    value reads as true.
    """
    return a if ctl != 0 else b


def eval_ndmerge(a: int | None, b: int | None) -> tuple[str, int]:
    """Uncontrolled merge: pass the first-arriving token through.

    At the value level only simultaneous arrival is observable; port a wins
    the tie.  The engine resolves distinct arrival times before calling.
    Returns the chosen (slot, value).
    """
    if a is not None:
        return "a", a
    if b is not None:
        return "b", b
    raise ValueError("ndmerge requires at least one input token")


def eval_branch(a: int, ctl: int) -> tuple[str, int]:
    """Route the data token to output t on a true control, else to f."""
    return ("t", a) if ctl != 0 else ("f", a)
