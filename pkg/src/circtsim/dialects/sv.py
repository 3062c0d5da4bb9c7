"""sv: storage cells, procedural blocks and system tasks."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from ..bits import BitVec4
from ..core import (
    EDGE_FUNCS, REGISTRY, Frame, register, register_finish_hook, register_state,
)
from ..errors import (
    BadFormat, DanglingRef, DuplicateDriver, DuplicateSymbol, LoopBound,
    MalformedAttribute, MissingEvent, OutOfRange, TypeMismatch,
    UndefinedMacro,
)
from ..mlir.syntax import (
    ArrayAttr, ArrayType, InOutType, IntegerAttr, StringAttr, SymbolRefAttr,
    UnitAttr, bit_width,
)
from ..values import Ref, TypedValue, check_type, type_str, x_of, z_of
from .hw import inner_sym_name

LOOP_LIMIT = 1 << 20
STDOUT_FD = 0x80000001
STDERR_FD = 0x80000002


@dataclass
class SvDialectState:
    cells: dict[tuple, TypedValue] = field(default_factory=dict)
    # forced bits per cell: (mask, value)
    force: dict[tuple, tuple[int, BitVec4]] = field(default_factory=dict)
    macro: dict[str, str | None] = field(default_factory=dict)
    inited: set = field(default_factory=set)
    fd: dict[int, str] = field(default_factory=dict)
    nba: list = field(default_factory=list)
    cover: Counter = field(default_factory=Counter)
    drivers: dict[tuple, int] = field(default_factory=dict)

    # -- cells -------------------------------------------------------------------

    def cell(self, ref: Ref) -> TypedValue:
        try:
            return self.cells[(ref.path, ref.slot)]
        except KeyError:
            raise DanglingRef(f"no storage cell {ref.slot} in "
                              f"{'.'.join(ref.path)}") from None

    def visible(self, key) -> BitVec4:
        stored = self.cells[key].bits
        forced = self.force.get(key)
        if forced is None:
            return stored
        mask, fv = forced
        return BitVec4(stored.width, (stored.aval & ~mask) | (fv.aval & mask),
                       (stored.bval & ~mask) | (fv.bval & mask))

    def read(self, ref: Ref, ty) -> TypedValue:
        self.cell(ref)
        if not ref.valid:
            return x_of(ty)
        v = self.visible((ref.path, ref.slot))
        if ref.width is not None:
            v = v.slice(ref.offset, ref.width)
        return TypedValue(ty, v)

    def read_ref(self, tv: TypedValue) -> TypedValue:
        return self.read(tv.val, tv.ty.element)

    def write(self, ref: Ref, v: BitVec4) -> None:
        cell = self.cell(ref)
        if not ref.valid:
            return
        key = (ref.path, ref.slot)
        self.cells[key] = TypedValue(cell.ty, _splice(cell.bits, ref, v))

    def set_force(self, ref: Ref, v: BitVec4) -> None:
        cell = self.cell(ref)
        if not ref.valid:
            return
        key = (ref.path, ref.slot)
        mask, fv = self.force.get(key, (0, BitVec4.x(cell.bits.width)))
        self.force[key] = (mask | _ref_mask(ref, cell.bits.width),
                           _splice(fv, ref, v))

    def release(self, ref: Ref) -> bool:
        cell = self.cell(ref)
        key = (ref.path, ref.slot)
        if not ref.valid or key not in self.force:
            return False
        mask, fv = self.force[key]
        rm = _ref_mask(ref, cell.bits.width)
        if not mask & rm:
            return False
        mask &= ~rm
        if mask:
            self.force[key] = (mask, fv)
        else:
            del self.force[key]
        return True


def _ref_mask(ref: Ref, width: int) -> int:
    if ref.width is None:
        return (1 << width) - 1
    return ((1 << ref.width) - 1) << ref.offset


def _splice(old: BitVec4, ref: Ref, v: BitVec4) -> BitVec4:
    if ref.width is None:
        return v
    m = _ref_mask(ref, old.width)
    return BitVec4(old.width, (old.aval & ~m) | (v.aval << ref.offset),
                   (old.bval & ~m) | (v.bval << ref.offset))


register_state("sv", SvDialectState)


def _state(sim) -> SvDialectState:
    return sim.dialect("sv")


def _apply_nba(sim) -> None:
    st = _state(sim)
    pending, st.nba = st.nba, []
    for ref, v in pending:
        st.write(ref, v)


register_finish_hook(_apply_nba)


def _ref_of(tv: TypedValue) -> Ref:
    if not isinstance(tv.val, Ref):
        raise DanglingRef(f"value of type {type_str(tv.ty)} does not refer "
                          "to a storage cell")
    return tv.val


# ---------------------------------------------------------------------------
# storage
# ---------------------------------------------------------------------------


def _decl_handler(kind: str):
    def handler(sim, env, op):
        ty = op.result_types[0]
        if not isinstance(ty, InOutType):
            raise TypeMismatch(f"{op.name} must produce an inout type")
        inst = env.inst
        rid = op.result_ids[0]
        key = (inst.cid, rid)
        st = _state(sim)
        if key not in st.cells:
            st.cells[key] = x_of(ty.element)
        sym = op.attr("inner_sym")
        if sym is not None:
            name = inner_sym_name(sym)
            if kind == "reg":
                sim.write_reg(inst, name, rid)
            else:
                sim.write_wire(inst, name, rid)
        return [TypedValue(ty, Ref(inst.cid, rid))]
    return handler


for _kind in ("reg", "logic", "wire"):
    register(f"sv.{_kind}", attrs=("name", "inner_sym"),
             errors=("DuplicateName", "TypeMismatch"))(_decl_handler(_kind))


@register("sv.read_inout", attrs=(), errors=())
def _read_inout(sim, env, op):
    (tv,) = env.operands(op)
    return [_state(sim).read(_ref_of(tv), op.result_types[0])]


@register("sv.array_index_inout", attrs=(),
          errors=("OutOfRange", "UnknownIndex", "TypeMismatch"))
def _array_index_inout(sim, env, op):
    base, idx = env.operands(op)
    ref = _ref_of(base)
    aty = base.ty.element
    if not isinstance(aty, ArrayType):
        raise TypeMismatch(f"cannot index {type_str(base.ty)}")
    ew = bit_width(aty.element)
    rty = op.result_types[0]
    i = idx.bits.to_uint()
    if not isinstance(i, int):
        sim.diag(op, "UnknownIndex", "index is X; reads give X, writes are "
                 "dropped", env.inst)
        return [TypedValue(rty, Ref(ref.path, ref.slot, ref.offset, ew,
                                    valid=False))]
    if i >= aty.size:
        raise OutOfRange(f"index {i} into an array of {aty.size}")
    return [TypedValue(rty, Ref(ref.path, ref.slot, ref.offset + i * ew, ew,
                                ref.valid))]


# ---------------------------------------------------------------------------
# assignments
# ---------------------------------------------------------------------------


def _target(env, op) -> tuple[Ref, BitVec4]:
    dest, v = env.operands(op)
    ref = _ref_of(dest)
    check_type(inout_element(dest.ty), v, f"{op.name} value")
    return ref, v.bits


def inout_element(ty):
    if not isinstance(ty, InOutType):
        raise TypeMismatch(f"expected an inout type, got {type_str(ty)}")
    return ty.element


@register("sv.assign", attrs=(), errors=("WidthMismatch", "DuplicateDriver"))
def _assign(sim, env, op):
    ref, v = _target(env, op)
    st = _state(sim)
    key = (ref.path, ref.slot, ref.offset, ref.width)
    have = st.drivers.setdefault(key, id(op))
    if have != id(op):
        raise DuplicateDriver(f"storage {ref.slot} has two continuous drivers")
    st.write(ref, v)
    return []


@register("sv.bpassign", attrs=(), errors=("WidthMismatch",))
def _bpassign(sim, env, op):
    ref, v = _target(env, op)
    _state(sim).write(ref, v)
    return []


@register("sv.passign", attrs=(), errors=("WidthMismatch",))
def _passign(sim, env, op):
    ref, v = _target(env, op)
    _state(sim).nba.append((ref, v))
    return []


@register("sv.force", attrs=(), errors=("WidthMismatch",))
def _force(sim, env, op):
    ref, v = _target(env, op)
    _state(sim).set_force(ref, v)
    return []


@register("sv.release", attrs=(), errors=("ReleaseWithoutForce",))
def _release(sim, env, op):
    (dest,) = env.operands(op)
    if not _state(sim).release(_ref_of(dest)):
        sim.diag(op, "ReleaseWithoutForce", "release of a cell that is not "
                 "forced", env.inst)
    return []


# ---------------------------------------------------------------------------
# procedural blocks
# ---------------------------------------------------------------------------


def _body(op, i=0):
    if i >= len(op.regions):
        raise MissingEvent(f"{op.name} has no region #{i}")
    return op.regions[i]


@register("sv.initial", attrs=(), errors=())
def _initial(sim, env, op):
    key = (env.inst.cid, env.seq)
    st = _state(sim)
    if key in st.inited:
        return []
    st.inited.add(key)
    sim.run_procedural(env.inst, _body(op))
    return []


def _event_kinds(op) -> list[int]:
    ev = op.attr("events")
    if ev is None:
        return []
    if not isinstance(ev, ArrayAttr) or not all(
            isinstance(e, IntegerAttr) and 0 <= e.value < 3 for e in ev.items):
        raise MalformedAttribute("events must be a list of edge kinds 0..2")
    return [e.value for e in ev.items]


@register("sv.always", attrs=("events",),
          errors=("MissingEvent", "MalformedAttribute"))
def _always(sim, env, op):
    kinds = _event_kinds(op)
    if len(kinds) != len(op.operands):
        raise MissingEvent(f"{len(kinds)} edge kinds for {len(op.operands)} "
                           "event operands")
    fire = not kinds or any(EDGE_FUNCS[k](*sim.edge(env.inst, vid))
                            for k, vid in zip(kinds, op.operands))
    if fire:
        sim.run_procedural(env.inst, _body(op))
    return []


@register("sv.alwayscomb", attrs=(), errors=())
def _alwayscomb(sim, env, op):
    sim.run_procedural(env.inst, _body(op))
    return []


def _int(op, key, default):
    a = op.attr(key)
    if a is None:
        return default
    if not isinstance(a, IntegerAttr):
        raise MalformedAttribute(f"'{key}' must be an integer")
    return a.value


def _reset_active(level, edge_kind: int):
    """1 if the reset is asserted, 0 if not, None if its level is unknown."""
    if not isinstance(level, int):
        return None
    return int(level == (0 if edge_kind == 1 else 1))


@register("sv.alwaysff", attrs=("clockEdge", "resetStyle", "resetEdge"),
          errors=("MissingEvent", "MalformedAttribute", "UnknownCondition"))
def _alwaysff(sim, env, op):
    inst = env.inst
    style = _int(op, "resetStyle", 0)
    clock_edge = _int(op, "clockEdge", 0)
    if style not in (0, 1, 2) or not 0 <= clock_edge < 3:
        raise MalformedAttribute("bad clockEdge or resetStyle")
    want = 1 if style == 0 else 2
    if len(op.operands) != want or len(op.regions) != want:
        raise MissingEvent(f"sv.alwaysff with reset style {style} needs "
                           f"{want} event operands and {want} regions")
    fired = EDGE_FUNCS[clock_edge](*sim.edge(inst, op.operands[0]))
    if style == 0:
        if fired:
            sim.run_procedural(inst, _body(op))
        return []
    active = _reset_active(env.read(op.operands[1]).bits.to_uint(),
                           _int(op, "resetEdge", 0))
    if style == 1 and not fired:
        return []
    if active is None:
        sim.diag(op, "UnknownCondition", "reset is X; no region runs", inst)
    elif active:
        sim.run_procedural(inst, _body(op, 1))
    elif fired:
        sim.run_procedural(inst, _body(op))
    return []


# ---------------------------------------------------------------------------
# control flow
# ---------------------------------------------------------------------------


@register("sv.if", attrs=(), errors=("UnknownCondition",))
def _if(sim, env, op):
    (cond,) = env.operands(op)
    c = cond.bits.to_uint()
    if not isinstance(c, int):
        sim.diag(op, "UnknownCondition", "condition is X; no branch runs",
                 env.inst)
    elif c:
        sim.expand(env, op.regions[0])
    elif len(op.regions) > 1:
        sim.expand(env, op.regions[1])
    return []


@register("sv.case", attrs=("casePatterns", "caseStyle"),
          errors=("UnknownCondition", "MalformedAttribute"))
def _case(sim, env, op):
    (scrut,) = env.operands(op)
    pats = op.attr("casePatterns")
    if not isinstance(pats, ArrayAttr) or len(pats.items) != len(op.regions):
        raise MalformedAttribute("need one case pattern per region")
    default = next((i for i, p in enumerate(pats.items)
                    if isinstance(p, UnitAttr)), None)
    v = scrut.bits.to_uint()
    chosen = default
    if not isinstance(v, int):
        sim.diag(op, "UnknownCondition", "case selector is X; taking the "
                 "default", env.inst)
    else:
        mask = (1 << scrut.width) - 1
        for i, p in enumerate(pats.items):
            if isinstance(p, IntegerAttr) and p.value & mask == v:
                chosen = i
                break
            if not isinstance(p, (IntegerAttr, UnitAttr)):
                raise MalformedAttribute(f"bad case pattern {p!r}")
    if chosen is not None:
        sim.expand(env, op.regions[chosen])
    return []


@register("sv.for", attrs=("inductionVarName",),
          errors=("LoopBound", "UnknownCondition"))
def _for(sim, env, op):
    lb, ub, step = env.operands(op)
    region = op.regions[0]
    args = region.blocks[0].args if region.blocks else ()
    bounds = [v.bits.to_uint() for v in (lb, ub, step)]
    if not all(isinstance(b, int) for b in bounds):
        sim.diag(op, "UnknownCondition", "loop bound is X; loop skipped",
                 env.inst)
        return []
    i, hi, st = bounds
    w = lb.width
    frame = env if isinstance(env, Frame) else Frame(sim, env.inst)
    count = 0
    while i < hi:
        count += 1
        if count > LOOP_LIMIT:
            raise LoopBound(f"more than {LOOP_LIMIT} iterations")
        if args:
            frame.write(args[0][0], TypedValue(lb.ty, BitVec4.from_int(i, w)))
        sim.run_procedural(env.inst, region, frame)
        nxt = (i + st) & ((1 << w) - 1)
        if nxt <= i:
            break
        i = nxt
    return []


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


@register("sv.constantX", attrs=(), errors=())
def _constant_x(sim, env, op):
    return [x_of(op.result_types[0])]


@register("sv.constantZ", attrs=(), errors=())
def _constant_z(sim, env, op):
    return [z_of(op.result_types[0])]


# ---------------------------------------------------------------------------
# formatting, assertions and tasks
# ---------------------------------------------------------------------------

_FMT_RE = re.compile(r"%(\d*)([a-zA-Z%])?")


def _hex(v: BitVec4) -> str:
    digits = []
    for lo in range(0, v.width, 4):
        n = v.slice(lo, min(4, v.width - lo))
        m = (1 << n.width) - 1
        if n.bval == m and n.aval == 0:
            digits.append("z")
        elif n.bval:
            digits.append("x")
        else:
            digits.append(format(n.aval, "x"))
    return "".join(reversed(digits))


def _pad(digits: str, width: str) -> str:
    if not width:
        return digits.lstrip("0") or "0"
    return digits[-int(width):].rjust(int(width), "0")


def format_message(fmt: str, args) -> str:
    """Render ``%d``, ``%x``, ``%b`` and ``%%`` with an optional width."""
    out = []
    it = iter(args)
    pos = 0
    for m in _FMT_RE.finditer(fmt):
        out.append(fmt[pos:m.start()])
        pos = m.end()
        width, conv = m.group(1), m.group(2)
        if conv == "%" and not width:
            out.append("%")
            continue
        if conv is None or conv.lower() not in "dxb":
            raise BadFormat(f"unsupported format directive "
                            f"'{m.group(0)}' in {fmt!r}")
        try:
            v = next(it).bits
        except StopIteration:
            raise BadFormat(f"too few arguments for {fmt!r}") from None
        conv = conv.lower()
        if conv == "d":
            n = v.to_uint()
            text = str(n) if isinstance(n, int) else (
                "z" if v.bval == v.mask and not v.aval else "x")
            text = text.rjust(int(width or 0))
        else:
            digits = _hex(v) if conv == "x" else v.to_string()
            text = _pad(digits, width)
        out.append(text)
    out.append(fmt[pos:])
    if next(it, None) is not None:
        raise BadFormat(f"too many arguments for {fmt!r}")
    return "".join(out)


def _emit(sim, text: str) -> None:
    if sim.output is not None:
        sim.output.write(text)


def _message(op, args) -> str | None:
    msg = op.attr("message")
    if msg is None:
        return None
    if not isinstance(msg, StringAttr):
        raise MalformedAttribute("message must be a string")
    return format_message(msg.value, args)


def _str(op, key) -> str | None:
    a = op.attr(key)
    return a.value if isinstance(a, StringAttr) else None


def _assert_like(kind: str):
    def handler(sim, env, op):
        vals = env.operands(op)
        if not vals:
            raise MissingEvent(f"sv.{kind} needs a condition")
        c = vals[0].bits.to_uint()
        label = _str(op, "label")
        if kind == "cover":
            if c == 1:
                _state(sim).cover[label or f"{op.pos}"] += 1
            return []
        if c != 1:
            text = _message(op, vals[1:]) or f"{kind} failed"
            if label:
                text = f"{label}: {text}"
            sim.log.append((kind, text))
            sim.failed = True
            sim.diag(op, "AssertionFailed", text, env.inst)
            _emit(sim, f"{kind} failed: {text}\n")
        return []
    return handler


for _kind in ("assert", "assume"):
    register(f"sv.{_kind}", attrs=("defer", "label", "message"),
             errors=("AssertionFailed", "BadFormat"))(_assert_like(_kind))
register("sv.cover", attrs=("defer", "label", "message"),
         errors=())(_assert_like("cover"))


def _severity(kind: str):
    def handler(sim, env, op):
        text = _message(op, env.operands(op)) or ""
        sim.log.append((kind, text))
        _emit(sim, f"{kind}: {text}\n")
        if kind == "fatal":
            sim.failed = True
            sim.halt = "fatal"
        return []
    return handler


for _kind in ("error", "warning", "info"):
    register(f"sv.{_kind}", attrs=("message",),
             errors=("BadFormat",))(_severity(_kind))
register("sv.fatal", attrs=("verbosity", "message"),
         errors=("BadFormat",))(_severity("fatal"))


def _halt(kind: str):
    def handler(sim, env, op):
        sim.log.append((kind, ""))
        sim.halt = sim.halt or kind
        return []
    return handler


for _kind in ("finish", "stop", "exit"):
    register(f"sv.{_kind}", attrs=("verbosity",), errors=())(_halt(_kind))


@register("sv.fwrite", attrs=("format_string",), errors=("BadFormat",))
def _fwrite(sim, env, op):
    vals = env.operands(op)
    fmt = _str(op, "format_string")
    if fmt is None or not vals:
        raise BadFormat("sv.fwrite needs a descriptor and a format string")
    text = format_message(fmt, vals[1:])
    fd = vals[0].bits.to_uint()
    sink = sim.sinks.get(fd) if isinstance(fd, int) else None
    sim.log.append(("fwrite", text))
    if sink is not None:
        sink.write(text)
    else:
        _emit(sim, text)
    return []


# ---------------------------------------------------------------------------
# macros and ifdef
# ---------------------------------------------------------------------------


def _symbol(a) -> str:
    if isinstance(a, SymbolRefAttr):
        return a.root
    if isinstance(a, StringAttr):
        return a.value
    raise MalformedAttribute(f"expected a macro name, got {a!r}")


def _macro_decl(sim, op):
    _state(sim).macro.setdefault(_symbol(op.attr("sym_name")), None)


def _macro_def(sim, op):
    body = _str(op, "format_string")
    _state(sim).macro[_symbol(op.attr("macroName"))] = body


register("sv.macro.decl", attrs=("sym_name",), errors=(),
         preprocess=_macro_decl)(None)
register("sv.macro.def", attrs=("macroName", "format_string"),
         errors=("MalformedAttribute",), preprocess=_macro_def)(None)


def _macro_ref(sim, env, op):
    name = _symbol(op.attr("macroName"))
    macros = _state(sim).macro
    if name not in macros:
        raise UndefinedMacro(f"macro '{name}' is not defined")
    body = (macros[name] or "").strip()
    try:
        value = int(body, 0)
    except ValueError:
        raise MalformedAttribute(f"macro '{name}' has no integer value "
                                 f"({body!r})") from None
    ty = op.result_types[0]
    return [TypedValue(ty, BitVec4.from_int(value, bit_width(ty)))]


for _n in ("sv.macro.ref", "sv.macro.ref.se"):
    register(_n, attrs=("macroName",),
             errors=("UndefinedMacro", "MalformedAttribute"))(_macro_ref)


def _ifdef_region(sim, op):
    name = _symbol(op.attr("cond"))
    if name in _state(sim).macro:
        return op.regions[0] if op.regions else None
    return op.regions[1] if len(op.regions) > 1 else None


def _ifdef(sim, env, op):
    region = _ifdef_region(sim, op)
    if region is not None:
        sim.expand(env, region)
    return []


def _ifdef_top(sim, op):
    """Top level: symboled ops join the symbol table, the rest are queued."""
    region = _ifdef_region(sim, op)
    if region is None:
        return
    for inner in sim.split_region(None, region):
        sym = inner.symbol
        if sym is not None:
            if sym in sim.mlir.table:
                raise DuplicateSymbol(f"symbol '{sym}' defined twice")
            sim.mlir.table[sym] = inner
        d = REGISTRY.get(inner.name)
        if sym is None or (d is not None and d.preprocess is not None):
            sim.move_op(inner)


register("sv.ifdef", attrs=("cond",),
         errors=("MalformedAttribute", "DuplicateSymbol"),
         preprocess=_ifdef_top)(_ifdef)
register("sv.ifdef.procedural", attrs=("cond",),
         errors=("MalformedAttribute",))(_ifdef)
