from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from circtsim.bits import BitVec4
from circtsim.dialects.comb import (
    BINARY, ICMP_PREDICATES, VARIADIC, divides_by_zero, eval_binary,
    eval_extract, eval_icmp, eval_mux, eval_parity, eval_replicate,
    eval_truth_table, eval_variadic,
)
from circtsim.errors import (
    ArityMismatch, EmptyOperandList, OutOfRange, WidthMismatch,
)
from helpers import simulate


def bv(v, w):
    return BitVec4.from_int(v, w)


def s(text):
    return BitVec4.from_string(text)


def val(b: BitVec4):
    return None if b.bval else b.aval


u16 = st.integers(0, 0xFFFF)


# -- worked examples ---------------------------------------------------------

def test_add_examples():
    assert val(eval_variadic("add", [bv(5, 8), bv(1, 8)], 8)) == 6
    assert val(eval_variadic("add", [bv(255, 8), bv(1, 8)], 8)) == 0
    assert eval_variadic("add", [bv(9, 8)], 8) == bv(9, 8)


def test_concat_msb_first():
    assert eval_variadic("concat", [s("10"), s("1")], 3) == s("101")
    assert eval_variadic("concat", [s("1x"), s("0")], 3).to_string() == "1x0"


def test_binary_examples():
    assert val(eval_binary("sub", bv(0, 8), bv(1, 8), 8)) == 255
    assert eval_binary("shl", bv(77, 8), bv(0, 8), 8) == bv(77, 8)
    assert eval_binary("divs", s("1001"), s("0010"), 4) == s("1101")
    assert val(eval_binary("mods", s("1001"), s("0010"), 4)) == 0b1111


def test_shift_past_width():
    assert val(eval_binary("shl", bv(1, 4), bv(9, 4), 4)) == 0
    assert val(eval_binary("shru", bv(8, 4), bv(4, 4), 4)) == 0
    assert val(eval_binary("shrs", bv(8, 4), bv(7, 4), 4)) == 0b1111
    assert val(eval_binary("shrs", bv(7, 4), bv(7, 4), 4)) == 0


def test_division_by_zero():
    for name in ("divs", "divu", "mods", "modu"):
        assert eval_binary(name, bv(3, 4), bv(0, 4), 4) == BitVec4.x(4)
        assert divides_by_zero(name, bv(0, 4))
    assert not divides_by_zero("divu", s("x000"))
    assert not divides_by_zero("sub", bv(0, 4))


def test_division_by_zero_is_a_diagnostic():
    text = ("hw.module @D(in %a : i4, in %b : i4, out o : i4) {\n"
            "  %q = comb.divu %a, %b : i4\n  hw.output %q : i4\n}\n")
    sim, outs = simulate(text, "D", [{"a": 3, "b": 0}, {"a": 6, "b": 2}])
    assert [o["o"] for o in outs] == ["xxxx", 3]
    assert len(sim.diagnostics) == 1
    assert "DivisionByZero" in sim.diagnostics[0]
    assert not sim.failed


def test_icmp_examples():
    assert val(eval_icmp("eq", bv(1, 1), bv(1, 1))) == 1
    assert val(eval_icmp("slt", s("1000"), s("0111"))) == 1
    assert val(eval_icmp("ult", s("1000"), s("0111"))) == 0
    assert val(eval_icmp("eq", s("x000"), s("0000"))) is None


def test_extract_examples():
    assert eval_extract(s("10110010"), 4, 4) == s("1011")
    v = s("1z0x")
    assert eval_extract(v, 0, 4) == v
    assert eval_extract(s("x1"), 1, 1).to_string() == "x"
    assert eval_extract(s("x1"), 0, 1).to_string() == "1"
    with pytest.raises(OutOfRange):
        eval_extract(s("1010"), 2, 3)


def test_small_ops():
    assert val(eval_parity(s("1011"))) == 1
    assert val(eval_parity(s("1z11"))) is None
    a, b = bv(3, 4), bv(12, 4)
    assert eval_mux(bv(1, 1), a, b) == a
    assert eval_mux(bv(0, 1), a, b) == b
    assert eval_mux(s("x"), a, b) == BitVec4.x(4)
    assert eval_replicate(s("10"), 3) == s("101010")
    assert eval_replicate(s("1x"), 2) == BitVec4.x(4)
    xor = [False, True, True, False]
    assert val(eval_truth_table([bv(1, 1), bv(0, 1)], xor)) == 1
    # first input is the high index bit
    rows = [False, False, True, False]
    assert val(eval_truth_table([bv(1, 1), bv(0, 1)], rows)) == 1
    assert val(eval_truth_table([bv(0, 1), bv(1, 1)], rows)) == 0


def test_errors():
    with pytest.raises(EmptyOperandList):
        eval_variadic("add", [], 8)
    with pytest.raises(WidthMismatch):
        eval_variadic("add", [bv(1, 8), bv(1, 4)], 8)
    with pytest.raises(WidthMismatch):
        eval_variadic("concat", [bv(1, 2)], 3)
    with pytest.raises(WidthMismatch):
        eval_binary("sub", bv(1, 8), bv(1, 4), 8)
    with pytest.raises(WidthMismatch):
        eval_icmp("eq", bv(1, 8), bv(1, 4))
    with pytest.raises(WidthMismatch):
        eval_mux(bv(1, 2), bv(1, 4), bv(1, 4))
    with pytest.raises(WidthMismatch):
        eval_mux(bv(1, 1), bv(1, 4), bv(1, 3))
    with pytest.raises(ArityMismatch):
        eval_truth_table([bv(1, 1)], [True])
    with pytest.raises(WidthMismatch):
        eval_truth_table([bv(1, 2)], [True, False])
    with pytest.raises(WidthMismatch):
        eval_replicate(bv(1, 2), 0)


# -- exhaustive i4 oracle equivalence ----------------------------------------

PAIRS = list(itertools.product(range(16), repeat=2))


@pytest.mark.parametrize("name", VARIADIC)
def test_variadic_oracle(name):
    for a, b in PAIRS:
        got = eval_variadic(name, [bv(a, 4), bv(b, 4)], 4)
        assert val(got) == oracles.variadic(name, [a, b], 4), (a, b)


@pytest.mark.parametrize("name", BINARY)
def test_binary_oracle(name):
    for a, b in PAIRS:
        got = eval_binary(name, bv(a, 4), bv(b, 4), 4)
        assert val(got) == oracles.binary(name, a, b, 4), (a, b)


@pytest.mark.parametrize("pred", ICMP_PREDICATES)
def test_icmp_oracle(pred):
    for a, b in PAIRS:
        got = eval_icmp(pred, bv(a, 4), bv(b, 4))
        assert val(got) == oracles.icmp(pred, a, b, 4), (a, b)


def test_concat_extract_replicate_parity_oracles():
    for a, b in PAIRS:
        got = eval_variadic("concat", [bv(a, 4), bv(b, 4)], 8)
        assert val(got) == oracles.concat([(a, 4), (b, 4)])
        for low in range(8):
            for n in range(1, 9 - low):
                ab = (a << 4) | b
                assert val(eval_extract(bv(ab, 8), low, n)) == \
                    oracles.extract(ab, 8, low, n)
    for a in range(16):
        assert val(eval_parity(bv(a, 4))) == oracles.parity(a, 4)
        for c in range(1, 4):
            assert val(eval_replicate(bv(a, 4), c)) == oracles.replicate(a, 4, c)


# -- algebra -----------------------------------------------------------------

@given(st.sampled_from(VARIADIC), u16, u16, u16)
def test_folds_commute_and_associate(name, a, b, c):
    f = lambda *xs: eval_variadic(name, [bv(x, 16) for x in xs], 16)
    assert f(a, b) == f(b, a)
    left = eval_variadic(name, [f(a, b), bv(c, 16)], 16)
    right = eval_variadic(name, [bv(a, 16), f(b, c)], 16)
    assert left == right == f(a, b, c)


@given(u16)
def test_idempotence_and_identity(a):
    v = bv(a, 16)
    assert val(eval_variadic("xor", [v, v], 16)) == 0
    assert eval_variadic("and", [v, v], 16) == v
    assert eval_variadic("or", [v, bv(0, 16)], 16) == v


@given(u16, st.integers(0, 16))
def test_concat_of_extracts_is_identity(a, k):
    v = bv(a, 16)
    parts = [p for p in (eval_extract(v, k, 16 - k) if k < 16 else None,
                         eval_extract(v, 0, k) if k else None) if p]
    assert eval_variadic("concat", parts, 16) == v


@given(u16, u16)
def test_icmp_trichotomy(a, b):
    x, y = bv(a, 16), bv(b, 16)
    hits = [val(eval_icmp(p, x, y)) for p in ("slt", "eq", "sgt")]
    assert sorted(hits) == [0, 0, 1]
    assert val(eval_icmp("ult", x, y)) == 1 - val(eval_icmp("uge", x, y))


@given(st.sampled_from(VARIADIC + BINARY), u16, st.integers(0, 15))
def test_x_pessimism(name, a, pos):
    v = bv(a, 16)
    xv = BitVec4(16, v.aval | (1 << pos), 1 << pos)
    if name in VARIADIC:
        got = eval_variadic(name, [v, xv], 16)
    else:
        got = eval_binary(name, xv, v, 16)
    assert got == BitVec4.x(16)
