"""Value-level operator semantics against independent arithmetic oracles."""

from random import Random

import pytest

from dfasim.graph_ir import OpKind
from dfasim.semantics import (eval_branch, eval_copy, eval_dmerge, eval_ndmerge,
                              eval_not, eval_primitive, to_signed, to_unsigned,
                              word_mask)


def _signed4(x: int) -> int:
    # independent sign decode via explicit bit test
    return x - 16 if (x & 0x8) else x


def _oracle4(kind: OpKind, a: int, b: int) -> int:
    sa, sb = _signed4(a), _signed4(b)
    if kind is OpKind.ADD:
        return (a + b) % 16
    if kind is OpKind.SUB:
        return (a - b) % 16
    if kind is OpKind.MUL:
        return (a * b) % 16
    if kind is OpKind.DIV:
        if b == 0:
            return 0
        q = abs(sa) // abs(sb)
        if (sa < 0) != (sb < 0):
            q = -q
        return q % 16
    if kind is OpKind.AND:
        return a & b
    if kind is OpKind.OR:
        return a | b
    table = {
        OpKind.IF_GT: sa > sb,
        OpKind.IF_GE: sa >= sb,
        OpKind.IF_LT: sa < sb,
        OpKind.IF_LE: sa <= sb,
        OpKind.IF_EQ: sa == sb,
        OpKind.IF_DF: sa != sb,
    }
    return int(table[kind])


ALL_PRIMS = [OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV, OpKind.AND,
             OpKind.OR, OpKind.IF_GT, OpKind.IF_GE, OpKind.IF_LT, OpKind.IF_LE,
             OpKind.IF_EQ, OpKind.IF_DF]


@pytest.mark.parametrize("kind", ALL_PRIMS, ids=lambda k: k.value)
def test_exhaustive_width4(kind):
    for a in range(16):
        for b in range(16):
            assert eval_primitive(kind, a, b, 4) == _oracle4(kind, a, b), (a, b)


def test_add_identity_and_wrap():
    for x in (0, 1, 500, 0xFFFF):
        assert eval_primitive(OpKind.ADD, 0, x, 16) == x
    assert eval_primitive(OpKind.ADD, 0xFFFF, 1, 16) == 0


def test_div_by_zero_defined():
    assert eval_primitive(OpKind.DIV, 7, 0, 16) == 0


def test_div_truncates_toward_zero():
    minus7 = to_unsigned(-7, 16)
    assert to_signed(eval_primitive(OpKind.DIV, minus7, 2, 16), 16) == -3
    assert to_signed(eval_primitive(OpKind.DIV, 7, to_unsigned(-2, 16), 16), 16) == -3


def test_deciders_width8_sampled():
    rng = Random(4242)
    relations = {
        OpKind.IF_GT: lambda x, y: x > y,
        OpKind.IF_GE: lambda x, y: x >= y,
        OpKind.IF_LT: lambda x, y: x < y,
        OpKind.IF_LE: lambda x, y: x <= y,
        OpKind.IF_EQ: lambda x, y: x == y,
        OpKind.IF_DF: lambda x, y: x != y,
    }
    for _ in range(10_000):
        a, b = rng.randrange(256), rng.randrange(256)
        sa = a - 256 if a >= 128 else a
        sb = b - 256 if b >= 128 else b
        for kind, rel in relations.items():
            assert eval_primitive(kind, a, b, 8) == int(rel(sa, sb))


def test_not_is_bitwise_complement():
    assert eval_not(0, 16) == 0xFFFF
    assert eval_not(0b1010, 4) == 0b0101


def test_copy_duplicates():
    assert eval_copy(7) == (7, 7)
    assert eval_copy(0) == (0, 0)
    rng = Random(7)
    for _ in range(100):
        x = rng.randrange(1 << 16)
        assert eval_copy(x) == (x, x)


def test_dmerge_selects_by_control():
    assert eval_dmerge(4, 9, 1) == 4
    assert eval_dmerge(4, 9, 0) == 9
    assert eval_dmerge(4, 9, 55) == 4  # any nonzero control reads true


def test_ndmerge_priority():
    assert eval_ndmerge(3, None) == ("a", 3)
    assert eval_ndmerge(None, 8) == ("b", 8)
    assert eval_ndmerge(3, 8) == ("a", 3)  # tie goes to port a
    with pytest.raises(ValueError):
        eval_ndmerge(None, None)


def test_branch_routes():
    assert eval_branch(42, 1) == ("t", 42)
    assert eval_branch(42, 0) == ("f", 42)


def test_outputs_stay_in_width():
    rng = Random(11)
    mask = word_mask(4)
    for _ in range(500):
        a, b = rng.randrange(16), rng.randrange(16)
        for kind in ALL_PRIMS:
            assert 0 <= eval_primitive(kind, a, b, 4) <= mask
        assert 0 <= eval_not(a, 4) <= mask


def test_signed_round_trip():
    for x in range(-32768, 32768, 997):
        assert to_signed(to_unsigned(x, 16), 16) == x
