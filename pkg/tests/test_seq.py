from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import COUNTER, simulate, trace

REG = """\
hw.module @R(in %clk : !seq.clock, in %rst : i1, in %d : i8, out q : i8) {
  %c0 = hw.constant 0 : i8
  %q = seq.firreg %d clock %clk reset RESET %rst, %c0 : i8
  hw.output %q : i8
}
"""
PLAIN = """\
hw.module @R(in %clk : !seq.clock, in %d : i8, out q : i8) {
  %q = seq.firreg %d clock %clk : i8
  hw.output %q : i8
}
"""
MEM = """\
hw.module @M(in %clk : !seq.clock, in %wa : i2, in %wd : i8, in %wen : i1, in %ra : i2, out rd : i8) {
  %mem = seq.firmem 0, 1, undefined, undefined : <4 x 8>
  %rd = seq.firmem.read_port %mem[%ra], clock %clk : <4 x 8>
  seq.firmem.write_port %mem[%wa] = %wd, clock %clk enable %wen : <4 x 8>
  hw.output %rd : i8
}
"""


def register_model(cycles, reset=None):
    """Output per cycle of a register with optional sync/async reset to 0.

    The stored value changes at the end of an edge cycle; a reset is visible
    in the cycle that applies it."""
    stored, prev_clk, out = None, None, []
    for c in cycles:
        edge = c["clk"] == 1 and prev_clk != 1
        prev_clk = c["clk"]
        rst = reset is not None and c["rst"] == 1
        if rst and (reset == "async" or edge):
            stored = 0
            out.append(0)
            continue
        out.append(stored)
        if edge:
            stored = c["d"]
    return ["x" * 8 if v is None else v for v in out]


bit = st.integers(0, 1)
cycle = st.fixed_dictionaries({"clk": bit, "rst": bit, "d": st.integers(0, 255)})


def test_counter_counts_from_reset():
    cyc = [{"clk": k % 2 ^ 1, "rst": int(k < 2)} for k in range(9)]
    assert trace(COUNTER, "Counter", cyc, "out") == [0, 0, 0, 1, 1, 2, 2, 3, 3]


def test_no_edge_no_change():
    cyc = [{"clk": 1, "d": 4}, {"clk": 0, "d": 5}, {"clk": 0, "d": 6},
           {"clk": 0, "d": 7}]
    assert trace(PLAIN, "R", cyc, "q") == ["x" * 8, 4, 4, 4]


def test_edge_commits_next_cycle():
    cyc = [{"clk": 0, "d": 1}, {"clk": 1, "d": 5}, {"clk": 1, "d": 9}]
    assert trace(PLAIN, "R", cyc, "q") == ["x" * 8, "x" * 8, 5]


@settings(max_examples=60, deadline=None)
@given(st.lists(cycle, min_size=1, max_size=25))
def test_plain_register_matches_model(cyc):
    drive = [{"clk": c["clk"], "d": c["d"]} for c in cyc]
    assert trace(PLAIN, "R", drive, "q") == register_model(cyc)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["sync", "async"]), st.lists(cycle, min_size=1, max_size=25))
def test_reset_register_matches_model(kind, cyc):
    got = trace(REG.replace("RESET", kind), "R", cyc, "q")
    assert got == register_model(cyc, kind)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fixed_dictionaries({"clk": bit, "d": st.integers(0, 255)}),
                min_size=1, max_size=20))
def test_async_reset_dominates(cyc):
    for c in cyc:
        c["rst"] = 1
    assert trace(REG.replace("RESET", "async"), "R", cyc, "q") == [0] * len(cyc)


def test_preset_is_initial_value():
    text = PLAIN.replace("clock %clk :", "clock %clk preset 3 :")
    cyc = [{"clk": 0, "d": 9}, {"clk": 1, "d": 9}, {"clk": 0, "d": 1}]
    assert trace(text, "R", cyc, "q") == [3, 3, 9]


def test_memory_write_then_read():
    cyc = [{"clk": 1, "wa": 3, "wd": 0xAB, "wen": 1, "ra": 3},
           {"clk": 0, "wa": 0, "wd": 0, "wen": 0, "ra": 3},
           {"clk": 1, "wa": 3, "wd": 0x11, "wen": 0, "ra": 3},
           {"clk": 0, "wa": 0, "wd": 0, "wen": 0, "ra": 2}]
    assert trace(MEM, "M", cyc, "rd") == ["x" * 8, 0xAB, 0xAB, "x" * 8]


def test_out_of_range_write_dropped():
    text = MEM.replace("<4 x 8>", "<3 x 8>")
    cyc = [{"clk": 1, "wa": 3, "wd": 1, "wen": 1, "ra": 0},
           {"clk": 0, "wa": 0, "wd": 0, "wen": 0, "ra": 3}]
    sim, outs = simulate(text, "M", cyc)
    assert [o["rd"] for o in outs] == ["x" * 8] * 2
    assert any("WriteDropped" in d for d in sim.diagnostics)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fixed_dictionaries({
    "clk": bit, "wa": st.integers(0, 3), "wd": st.integers(0, 255),
    "wen": bit, "ra": st.integers(0, 3)}), min_size=1, max_size=30))
def test_memory_is_a_fold_of_writes(cyc):
    cells: dict[int, int] = {}
    expect, prev = [], None
    for c in cyc:
        v = cells.get(c["ra"])
        expect.append("x" * 8 if v is None else v)
        if c["clk"] == 1 and prev != 1 and c["wen"]:
            cells[c["wa"]] = c["wd"]
        prev = c["clk"]
    assert trace(MEM, "M", cyc, "rd") == expect


RW = """\
hw.module @M(in %clk : !seq.clock, in %a : i2, in %wd : i8, in %mode : i1, in %en : i1, out q : i8) {
  %m = seq.firmem 0, 1, undefined, undefined : <4 x 8>
  %q = seq.firmem.read_write_port %m[%a] = %wd if %mode, clock %clk enable %en : <4 x 8>
  hw.output %q : i8
}
"""


def test_read_write_port():
    cyc = [{"clk": 1, "a": 1, "wd": 42, "mode": 1, "en": 1},
           {"clk": 0, "a": 1, "wd": 0, "mode": 0, "en": 1},
           {"clk": 1, "a": 1, "wd": 7, "mode": 1, "en": 0},
           {"clk": 0, "a": 1, "wd": 0, "mode": 0, "en": 1},
           {"clk": 1, "a": 1, "wd": 9, "mode": "x", "en": 1},
           {"clk": 0, "a": 1, "wd": 0, "mode": 0, "en": 1}]
    sim, outs = simulate(RW, "M", cyc)
    assert [o["q"] for o in outs] == ["x" * 8, 42, "x" * 8, 42, "x" * 8, 42]
    assert any("WriteDropped" in d for d in sim.diagnostics)


def test_latency_one_disabled_read_is_x():
    text = MEM.replace("seq.firmem 0, 1", "seq.firmem 1, 1").replace(
        "clock %clk : <4 x 8>", "clock %clk enable %wen : <4 x 8>", 1)
    cyc = [{"clk": 1, "wa": 0, "wd": 5, "wen": 1, "ra": 0},
           {"clk": 0, "wa": 0, "wd": 0, "wen": 0, "ra": 0},
           {"clk": 1, "wa": 0, "wd": 0, "wen": 1, "ra": 0},
           {"clk": 0, "wa": 0, "wd": 0, "wen": 0, "ra": 0},
           {"clk": 1, "wa": 0, "wd": 0, "wen": 0, "ra": 0},
           {"clk": 0, "wa": 0, "wd": 0, "wen": 0, "ra": 0}]
    got = trace(text, "M", cyc, "rd")
    assert got[3] == 5 and got[5] == "x" * 8
