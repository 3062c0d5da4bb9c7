"""seq: registers and memories.

Registers keep their state in the instance's ``last`` map under the op's
result id.  On a clock edge the handler returns the previous value and defers
the commit of the next value to the end of the cycle, so every reader in the
cycle sees the pre-edge value.  Memories keep their cells in
:class:`SeqState`, keyed by instance path and the declaring op's result id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bits import BitVec4
from ..core import posedge, register, register_state
from ..errors import (
    ArityMismatch, MalformedAttribute, MissingClock, TypeMismatch,
    UnsupportedFeature,
)
from ..mlir.syntax import (
    ArrayAttr, FirMemType, IntegerAttr, IntegerType, bit_width,
)
from ..values import TypedValue, type_str, x_of
from .hw import inner_sym_name


@dataclass(frozen=True)
class MemHandle:
    key: tuple
    depth: int
    width: int
    read_latency: int


@dataclass
class Memory:
    depth: int
    width: int
    cells: dict[int, BitVec4] = field(default_factory=dict)

    def read(self, addr) -> BitVec4:
        if not isinstance(addr, int) or addr >= self.depth:
            return BitVec4.x(self.width)
        return self.cells.get(addr, BitVec4.x(self.width))


@dataclass
class SeqState:
    mems: dict[tuple, Memory] = field(default_factory=dict)
    # latency-1 read pipelines: (instance path, port result id) -> value
    pipes: dict[tuple, BitVec4] = field(default_factory=dict)


register_state("seq", SeqState)


# ---------------------------------------------------------------------------
# registers
# ---------------------------------------------------------------------------


def _firreg_deps(sim, inst, op):
    # the next value is only needed at the end of the cycle
    return op.operands[1:]


def register_value(prev: TypedValue, clk_edge: bool, reset, reset_value,
                   is_async: bool) -> tuple[TypedValue, bool]:
    """Value a register shows this cycle and whether to commit ``next``.

    ``reset`` is the reset bit (a BitVec4 of width 1) or None.
    """
    if reset is not None:
        level = reset.to_uint()
        if is_async or clk_edge:
            if not isinstance(level, int):
                return x_of(prev.ty), False
            if level == 1:
                return reset_value, False
    return prev, clk_edge


@register("seq.firreg", attrs=("name", "inner_sym", "isAsync", "preset"),
          errors=("MissingClock", "ArityMismatch", "MalformedAttribute"),
          deps=_firreg_deps)
def _firreg(sim, env, op):
    inst = env.inst
    n = len(op.operands)
    if n < 2:
        raise MissingClock("seq.firreg needs a clock operand")
    if n not in (2, 4):
        raise ArityMismatch(f"seq.firreg takes 2 or 4 operands, got {n}")
    rid = op.result_ids[0]
    ty = op.result_types[0]
    if rid in inst.last:
        prev = inst.last[rid]
    else:
        preset = op.attr("preset")
        if preset is None:
            prev = x_of(ty)
        elif isinstance(preset, IntegerAttr):
            prev = TypedValue(ty, BitVec4.from_int(preset.value, bit_width(ty)))
        else:
            raise MalformedAttribute("preset must be an integer")
    vals = [env.read(i) for i in op.operands[1:]]
    clk_edge = posedge(*sim.edge(inst, op.operands[1]))
    reset = reset_value = None
    if n == 4:
        reset, reset_value = vals[1].bits, vals[2]
        if reset_value.ty != ty:
            raise TypeMismatch(f"reset value is {type_str(reset_value.ty)}, "
                               f"register is {type_str(ty)}")
    out, commit = register_value(prev, clk_edge, reset, reset_value,
                                 op.attr("isAsync") is not None)
    sym = op.attr("inner_sym")
    if sym is not None:
        sim.write_reg(inst, inner_sym_name(sym), rid)
    if commit:
        nxt = op.operands[0]

        def sample():
            v = inst.curr[nxt]

            def apply():
                inst.curr[rid] = TypedValue(ty, v.bits)
            return apply
        sim.defer(sample)
    return [out]


# ---------------------------------------------------------------------------
# memories
# ---------------------------------------------------------------------------


def _int_attr(op, key, default=None) -> int:
    a = op.attr(key)
    if a is None and default is not None:
        return default
    if not isinstance(a, IntegerAttr):
        raise MalformedAttribute(f"missing integer attribute '{key}'")
    return a.value


def _validate_firmem(op):
    ty = op.result_types[0] if op.result_types else None
    if not isinstance(ty, FirMemType):
        raise UnsupportedFeature("seq.firmem must produce a !seq.firmem value")
    if ty.mask_width is not None:
        raise UnsupportedFeature("memory write masks are not supported")
    if _int_attr(op, "writeLatency", 1) != 1:
        raise UnsupportedFeature("only write latency 1 is supported")
    if _int_attr(op, "readLatency", 0) not in (0, 1):
        raise UnsupportedFeature("only read latency 0 or 1 is supported")


@register("seq.firmem",
          attrs=("readLatency", "writeLatency", "ruw", "wuw", "name",
                 "inner_sym"),
          errors=("UnsupportedFeature",), validate=_validate_firmem)
def _firmem(sim, env, op):
    ty = op.result_types[0]
    key = (env.inst.cid, op.result_ids[0])
    mems = sim.dialect("seq").mems
    if key not in mems:
        mems[key] = Memory(ty.depth, ty.width)
    sym = op.attr("inner_sym")
    if sym is not None:
        sim.write_reg(env.inst, inner_sym_name(sym), op.result_ids[0])
    return [TypedValue(ty, MemHandle(key, ty.depth, ty.width,
                                     _int_attr(op, "readLatency", 0)))]


def port_operands(op, names) -> dict[str, str | None]:
    """Split a port's operands using ``operandSegmentSizes``."""
    seg = op.attr("operandSegmentSizes")
    if not isinstance(seg, ArrayAttr) or len(seg.items) != len(names):
        raise MalformedAttribute(f"{op.name} needs {len(names)} operand "
                                 "segment sizes")
    sizes = [s.value if isinstance(s, IntegerAttr) else -1 for s in seg.items]
    if any(s not in (0, 1) for s in sizes) or sum(sizes) != len(op.operands):
        raise MalformedAttribute(f"bad operand segment sizes {sizes}")
    out, i = {}, 0
    for name, s in zip(names, sizes):
        out[name] = op.operands[i] if s else None
        i += s
    for required in ("mem", "addr", "clk"):
        if out[required] is None:
            raise MalformedAttribute(f"{op.name} is missing its {required}")
    return out


READ_SEGMENTS = ("mem", "addr", "clk", "en")
WRITE_SEGMENTS = ("mem", "addr", "clk", "en", "data", "mask")
RW_SEGMENTS = ("mem", "addr", "clk", "en", "wdata", "mode", "mask")


def _handle(env, vid) -> MemHandle:
    h = env.read(vid).val
    if not isinstance(h, MemHandle):
        raise TypeMismatch("memory port needs a !seq.firmem operand")
    return h


def _flag(env, vid):
    """Enable-style operand: absent means 1; returns 0, 1 or UNKNOWN."""
    if vid is None:
        return 1
    return env.read(vid).bits.to_uint()


def _addr(env, vid):
    return env.read(vid).bits.to_uint()


def _port_deps(names):
    def deps(sim, inst, op):
        try:
            ops = port_operands(op, names)
        except MalformedAttribute:
            return op.operands  # the handler reports it
        mem = inst.curr.get(ops["mem"])
        if mem is not None and isinstance(mem.val, MemHandle) \
                and mem.val.read_latency == 1:
            return (ops["mem"], ops["clk"])
        return tuple(v for v in ops.values() if v is not None)
    return deps


def _validate_mask(op):
    names = WRITE_SEGMENTS if op.name.endswith("write_port") \
        and "read" not in op.name else RW_SEGMENTS
    if port_operands(op, names)["mask"] is not None:
        raise UnsupportedFeature("memory write masks are not supported")


def _pipe_read(sim, env, op, ops, mem: Memory, *, is_rw: bool):
    """Latency-1 read: return the captured value, sample at a clock edge."""
    inst = env.inst
    key = (inst.cid, op.result_ids[0])
    pipes = sim.dialect("seq").pipes
    out = pipes.get(key, BitVec4.x(mem.width))
    if posedge(*sim.edge(inst, ops["clk"])):
        def sample():
            en = _flag(env, ops["en"])
            mode = _flag(env, ops["mode"]) if is_rw else 0
            v = mem.read(_addr(env, ops["addr"])) if en == 1 and mode == 0 \
                else BitVec4.x(mem.width)

            def apply():
                pipes[key] = v
            return apply
        sim.defer(sample)
    return out


@register("seq.firmem.read_port", attrs=("operandSegmentSizes",),
          errors=("MalformedAttribute",), deps=_port_deps(READ_SEGMENTS))
def _read_port(sim, env, op):
    ops = port_operands(op, READ_SEGMENTS)
    h = _handle(env, ops["mem"])
    mem = sim.dialect("seq").mems[h.key]
    ty = IntegerType(mem.width)
    if h.read_latency == 1:
        return [TypedValue(ty, _pipe_read(sim, env, op, ops, mem, is_rw=False))]
    if _flag(env, ops["en"]) != 1:
        return [x_of(ty)]
    return [TypedValue(ty, mem.read(_addr(env, ops["addr"])))]


def _schedule_write(sim, env, op, mem: Memory, addr_id, data_id, en) -> None:
    inst = env.inst
    if en == 0:
        return
    addr = _addr(env, addr_id)
    if en != 1:
        sim.diag(op, "WriteDropped", "write enable is X", inst)
        return
    if not isinstance(addr, int) or addr >= mem.depth:
        sim.diag(op, "WriteDropped", f"address {addr!r} outside a memory of "
                 f"depth {mem.depth}", inst)
        return
    data = env.read(data_id).bits
    if data.width != mem.width:
        raise TypeMismatch(f"write data is i{data.width}, memory is "
                           f"i{mem.width}")

    def sample():
        def apply():
            mem.cells[addr] = data
        return apply
    sim.defer(sample)


@register("seq.firmem.write_port", attrs=("operandSegmentSizes",),
          errors=("MalformedAttribute", "UnsupportedFeature", "WriteDropped"),
          validate=_validate_mask)
def _write_port(sim, env, op):
    ops = port_operands(op, WRITE_SEGMENTS)
    h = _handle(env, ops["mem"])
    mem = sim.dialect("seq").mems[h.key]
    if posedge(*sim.edge(env.inst, ops["clk"])):
        _schedule_write(sim, env, op, mem, ops["addr"], ops["data"],
                        _flag(env, ops["en"]))
    return []


@register("seq.firmem.read_write_port", attrs=("operandSegmentSizes",),
          errors=("MalformedAttribute", "UnsupportedFeature", "WriteDropped"),
          deps=_port_deps(RW_SEGMENTS), validate=_validate_mask)
def _read_write_port(sim, env, op):
    ops = port_operands(op, RW_SEGMENTS)
    h = _handle(env, ops["mem"])
    mem = sim.dialect("seq").mems[h.key]
    ty = IntegerType(mem.width)
    inst = env.inst
    edge = posedge(*sim.edge(inst, ops["clk"]))
    if h.read_latency == 1:
        # the write half needs every operand; wait for them in the sample
        out = _pipe_read(sim, env, op, ops, mem, is_rw=True)
        if edge:
            sim.defer(lambda: _rw_write(sim, env, op, mem, ops))
        return [TypedValue(ty, out)]
    en = _flag(env, ops["en"])
    mode = _flag(env, ops["mode"])
    if en != 1:
        if edge and en != 0:
            sim.diag(op, "WriteDropped", "enable is X", inst)
        return [x_of(ty)]
    if mode == 0:
        return [TypedValue(ty, mem.read(_addr(env, ops["addr"])))]
    if mode != 1:
        if edge:
            sim.diag(op, "WriteDropped", "write mode is X", inst)
        return [x_of(ty)]
    if edge:
        _schedule_write(sim, env, op, mem, ops["addr"], ops["wdata"], 1)
    return [x_of(ty)]


def _rw_write(sim, env, op, mem, ops) -> None:
    """Write half of a latency-1 read/write port; returns the apply step."""
    en = _flag(env, ops["en"])
    mode = _flag(env, ops["mode"])
    if en == 0 or mode == 0:
        return None
    if en != 1 or mode != 1:
        sim.diag(op, "WriteDropped", "enable or write mode is X", env.inst)
        return None
    addr = _addr(env, ops["addr"])
    if not isinstance(addr, int) or addr >= mem.depth:
        sim.diag(op, "WriteDropped", f"address {addr!r} outside a memory of "
                 f"depth {mem.depth}", env.inst)
        return None
    data = env.read(ops["wdata"]).bits
    return lambda: mem.cells.__setitem__(addr, data)
