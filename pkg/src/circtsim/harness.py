"""Drive a simulator from a stimulus and collect a waveform trace."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bits import BitVec4
from .core import Simulator, module_type
from .errors import CirctSimError
from .mlir.syntax import bit_width
from .stimulus import Stimulus, cycle_inputs
from .vcd import VcdTrace


@dataclass
class RunResult:
    trace: VcdTrace
    cycles: int = 0
    outputs: list[dict[str, BitVec4]] = field(default_factory=list)
    error: CirctSimError | None = None


def input_ports(sim: Simulator) -> list[tuple[str, int]]:
    mt = module_type(sim.fetch_module(sim.top))
    return [(p.name, bit_width(p.type)) for p in mt.inputs]


def sample(sim: Simulator, inputs: dict[str, BitVec4], *,
           trace_all: bool = False) -> dict[tuple, BitVec4]:
    """Signals visible after the cycle just run, in a stable order."""
    top = (sim.top,)
    values: dict[tuple, BitVec4] = {}
    for name, v in inputs.items():
        values[(top, name)] = v
    for name, v in sim.outputs.items():
        if isinstance(v.val, BitVec4):
            values[(top, name)] = v.val
    insts = sorted((i for i in sim.root.walk() if i.cid in sim.snapshot),
                   key=lambda i: i.cid)
    for inst in insts:
        snap = sim.snapshot[inst.cid]
        named = {**inst.wire, **inst.reg}
        for sym in sorted(named):
            v = snap.get(named[sym])
            if v is not None and isinstance(v.val, BitVec4):
                values[(inst.cid, sym)] = v.val
        if trace_all:
            for vid in sorted(snap):
                v = snap[vid]
                if isinstance(v.val, BitVec4):
                    values.setdefault((inst.cid, "%" + vid), v.val)
    return values


def _selected(key, record) -> bool:
    scope, name = key
    full = ".".join(scope + (name,))
    short = ".".join(scope[1:] + (name,))
    return full in record or short in record


def run(sim: Simulator, stim: Stimulus, *, trace_all: bool = False,
        on_cycle=None) -> RunResult:
    """Run every stimulus cycle, stopping early on an error or a halt task."""
    result = RunResult(VcdTrace())
    try:
        cycles = cycle_inputs(stim, input_ports(sim))
    except CirctSimError as e:
        result.error = e
        return result
    for inputs in cycles:
        try:
            outs = sim.run_cycle(inputs)
        except CirctSimError as e:
            result.error = e
            break
        values = sample(sim, inputs, trace_all=trace_all)
        if stim.record is not None:
            values = {k: v for k, v in values.items()
                      if _selected(k, stim.record)}
        result.trace.add_cycle(values)
        result.outputs.append({k: v.val for k, v in outs.items()})
        result.cycles += 1
        if on_cycle is not None:
            on_cycle(sim, result)
        if sim.halt:
            break
    return result
