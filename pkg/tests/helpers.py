from __future__ import annotations

from circtsim import Simulator, load
from circtsim.harness import run
from circtsim.stimulus import Stimulus


def value(v):
    """Int for a defined vector, else its bit string."""
    return v.to_string() if v.has_unknown else v.aval


def simulate(text: str, top: str, cycles, **kw):
    sim = Simulator(load(text), top, **kw)
    result = run(sim, Stimulus(top, list(cycles)))
    if result.error is not None:
        raise result.error
    return sim, [{k: value(v) for k, v in o.items()} for o in result.outputs]


def trace(text: str, top: str, cycles, port: str, **kw):
    return [o[port] for o in simulate(text, top, cycles, **kw)[1]]


COUNTER = """\
hw.module @Counter(in %clk : !seq.clock, in %rst : i1, out out : i8) {
  %c0_i8 = hw.constant 0 : i8
  %c1_i8 = hw.constant 1 : i8
  %count = seq.firreg %next clock %clk reset sync %rst, %c0_i8 : i8
  %next = comb.add %count, %c1_i8 : i8
  hw.output %count : i8
}
"""
