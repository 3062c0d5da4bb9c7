from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circtsim import Simulator, load
from circtsim.dialects.hw import index_width
from circtsim.errors import DuplicateSymbol, PortMismatch, UnknownSymbol
from helpers import COUNTER, simulate, trace


def module(ports: str, body: str, name: str = "T") -> str:
    lines = "".join(f"  {b}\n" for b in body.strip().splitlines())
    return f"hw.module @{name}({ports}) {{\n{lines}}}\n"


def test_constants():
    text = module("out a : i8, out b : i1", """
        %a = hw.constant 1 : i8
        %b = hw.constant 0 : i1
        hw.output %a, %b : i8, i1""")
    assert simulate(text, "T", [{}])[1] == [{"a": 1, "b": 0}]


def test_aggregate_constant_layout():
    # element 0 sits at the low end of the flat bits
    text = module("out o : i16", """
        %c = hw.aggregate_constant [1 : i8, 2 : i8] : !hw.array<2xi8>
        %b = hw.bitcast %c : (!hw.array<2xi8>) -> i16
        hw.output %b : i16""")
    assert trace(text, "T", [{}], "o") == [0x0102]


def test_array_orientation():
    text = module("in %a : i4, in %b : i4, in %i : i1, out o : i4", """
        %arr = hw.array_create %a, %b : i4
        %g = hw.array_get %arr[%i] : !hw.array<2xi4>, i1
        hw.output %g : i4""")
    cyc = [{"a": 7, "b": 2, "i": 1}, {"a": 7, "b": 2, "i": 0},
           {"a": 7, "b": 2, "i": "x"}]
    assert trace(text, "T", cyc, "o") == [7, 2, "xxxx"]


def test_singleton_array_and_full_slice():
    text = module("in %a : i4, out o : i4, out p : i8", """
        %z = hw.constant 0 : i1
        %arr = hw.array_create %a : i4
        %g = hw.array_get %arr[%z] : !hw.array<1xi4>, i1
        %c0 = hw.constant 0 : i1
        %two = hw.array_create %a, %g : i4
        %sl = hw.array_slice %two[%c0] : (!hw.array<2xi4>) -> !hw.array<2xi4>
        %p = hw.bitcast %sl : (!hw.array<2xi4>) -> i8
        hw.output %g, %p : i4, i8""")
    assert simulate(text, "T", [{"a": 9}])[1] == [{"o": 9, "p": 0x99}]


def test_bitcast_to_array():
    text = module("in %v : i8, out lo : i4, out hi : i4", """
        %arr = hw.bitcast %v : (i8) -> !hw.array<2xi4>
        %f = hw.constant false
        %t = hw.constant true
        %lo = hw.array_get %arr[%f] : !hw.array<2xi4>, i1
        %hi = hw.array_get %arr[%t] : !hw.array<2xi4>, i1
        hw.output %lo, %hi : i4, i4""")
    assert simulate(text, "T", [{"v": 0b10110010}])[1] == \
        [{"lo": 0b0010, "hi": 0b1011}]


@given(st.integers(0, 0xFFF))
def test_bitcast_round_trip(v):
    text = module("in %v : i12, out o : i12", """
        %s = hw.bitcast %v : (i12) -> !hw.struct<a: i8, b: i4>
        %a = hw.bitcast %s : (!hw.struct<a: i8, b: i4>) -> !hw.array<3xi4>
        %o = hw.bitcast %a : (!hw.array<3xi4>) -> i12
        hw.output %o : i12""")
    assert trace(text, "T", [{"v": v}], "o") == [v]


STRUCT = module("in %a : i4, in %b : i4, in %n : i4, "
                "out ea : i4, eb : i4, xa : i4, xb : i4, ib : i4", """
    %s = hw.struct_create (%a, %b) : !hw.struct<a: i4, b: i4>
    %ea = hw.struct_extract %s["a"] : !hw.struct<a: i4, b: i4>
    %eb = hw.struct_extract %s["b"] : !hw.struct<a: i4, b: i4>
    %xa, %xb = hw.struct_explode %s : !hw.struct<a: i4, b: i4>
    %i = hw.struct_inject %s["b"], %n : !hw.struct<a: i4, b: i4>
    %ib = hw.struct_extract %i["b"] : !hw.struct<a: i4, b: i4>
    hw.output %ea, %eb, %xa, %xb, %ib : i4, i4, i4, i4, i4""").replace(
    "eb : i4", "out eb : i4").replace(", xa", ", out xa").replace(
    ", xb", ", out xb").replace(", ib", ", out ib")


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
def test_struct_access(a, b, n):
    (o,) = simulate(STRUCT, "T", [{"a": a, "b": b, "n": n}])[1]
    assert (o["ea"], o["eb"]) == (o["xa"], o["xb"]) == (a, b)
    assert o["ib"] == n


def test_union_and_enum():
    text = module("in %v : i4, out p : i8, out eq : i1, out ne : i1", """
        %u = hw.union_create "q", %v : !hw.union<p: i8, q: i4>
        %p = hw.union_extract %u["p"] : !hw.union<p: i8, q: i4>
        %x = hw.enum.constant B : !hw.enum<A, B, C>
        %y = hw.enum.constant C : !hw.enum<A, B, C>
        %eq = hw.enum.cmp %x, %x : !hw.enum<A, B, C>, !hw.enum<A, B, C>
        %ne = hw.enum.cmp %x, %y : !hw.enum<A, B, C>, !hw.enum<A, B, C>
        hw.output %p, %eq, %ne : i8, i1, i1""")
    (o,) = simulate(text, "T", [{"v": 9}])[1]
    assert o == {"p": 9, "eq": 1, "ne": 0}


def test_named_wire():
    text = module("in %a : i4, out o : i4", """
        %w = hw.wire %a sym @w : i4
        hw.output %w : i4""")
    sim, outs = simulate(text, "T", [{"a": 3}])
    assert outs == [{"o": 3}]
    assert sim.read_wire(sim.root, "w") is not None


def test_index_width():
    # zero-width integers are not representable, so a singleton takes i1
    assert [index_width(n) for n in (1, 2, 3, 4, 5, 8, 9)] == \
        [1, 1, 2, 2, 3, 3, 4]


def test_zero_port_module():
    assert simulate(module("", "hw.output"), "T", [{}, {}])[1] == [{}, {}]


def test_instance_port_mismatch():
    text = COUNTER + module("in %clk : !seq.clock, out o : i8", """
        %o = hw.instance "c" @Counter(clk: %clk : !seq.clock) -> (out: i8)
        hw.output %o : i8""")
    with pytest.raises(PortMismatch):
        simulate(text, "T", [{"clk": 0}])


def test_unknown_instance():
    text = module("", """
        hw.instance "u" @Missing() -> ()
        hw.output""")
    with pytest.raises(UnknownSymbol):
        simulate(text, "T", [{}])


WRAP = """\
hw.module @Wrap(in %clk : !seq.clock, in %rst : i1, out out : i8) {
  %o = hw.instance "inner" @Counter(clk: %clk : !seq.clock, rst: %rst : i1) -> (out: i8)
  hw.output %o : i8
}
"""


def test_wrapper_matches_direct_run():
    rng = random.Random(7)
    cyc = [{"clk": k % 2, "rst": int(rng.random() < 0.15)} for k in range(60)]
    direct = trace(COUNTER, "Counter", cyc, "out")
    wrapped = trace(COUNTER + WRAP, "Wrap", cyc, "out")
    assert direct == wrapped


def test_children_persist():
    cyc = [{"clk": k % 2, "rst": int(k < 2)} for k in range(8)]
    sim, _ = simulate(COUNTER + WRAP, "Wrap", cyc)
    (child,) = sim.root.children.values()
    # the edge at cycle 7 has committed, so the stored value runs one ahead
    # of the last sampled output
    assert child.last["count"].bits.aval == 3


def test_comb_child_acts_inlined():
    adder = module("in %a : i8, in %b : i8, out s : i8", """
        %s = comb.add %a, %b : i8
        hw.output %s : i8""", "Adder")
    top = module("in %a : i8, in %b : i8, out s : i8", """
        %s = hw.instance "u" @Adder(a: %a : i8, b: %b : i8) -> (s: i8)
        hw.output %s : i8""")
    cyc = [{"a": a, "b": b} for a in (0, 100, 255) for b in (1, 200)]
    assert trace(adder + top, "T", cyc, "s") == \
        trace(adder, "Adder", cyc, "s")


def test_hierpath_records():
    text = module("", "hw.output", "Top") + \
        "hw.hierpath @p [@Top::@c1]\nhw.hierpath @e []\n"
    sim = Simulator(load(text), "Top")
    sim.run_cycle({})
    hier = sim.dialect("hw").hier
    assert "p" in hier and list(hier["e"]) == []
    with pytest.raises(DuplicateSymbol):
        load(text + "hw.hierpath @p []\n")
