"""Custom assembly formats for the in-scope hw/comb/seq/sv operations.

Every sub-grammar returns the keyword arguments of a generic
:class:`~circtsim.mlir.syntax.Operation` (operands, attributes, regions and
function type), so a custom-form op and its printed generic form are the same
tree.  Where upstream CIRCT elides attributes (e.g. ``name`` derived from the
SSA result) they are re-materialised here.
"""

from __future__ import annotations

from typing import Callable

from . import lexer as L
from .syntax import (
    ArrayAttr, ArrayType, Block, BlockArg, BoolAttr, ClockType, DialectAttr,
    DictAttr, EnumType, FirMemType, FunctionType, InOutType, IntegerAttr,
    IntegerType, ModulePort, ModuleType, Region, StringAttr, StructType,
    SymbolRefAttr, TypeAttr, UnionType, UnitAttr, clog2,
)

CUSTOM_PARSERS: dict[str, Callable] = {}

I1 = IntegerType(1)
I32 = IntegerType(32)
I64 = IntegerType(64)

ICMP_PREDICATES = ("eq", "ne", "slt", "sle", "sgt", "sge",
                   "ult", "ule", "ugt", "uge")
EVENT_KINDS = ("posedge", "negedge", "edge")
RESET_STYLES = ("noreset", "syncreset", "asyncreset")
DEFER_KINDS = ("immediate", "observed", "final")


def custom(*names: str):
    def deco(fn):
        for n in names:
            CUSTOM_PARSERS[n] = fn
        return fn
    return deco


def _attrs(**entries) -> DictAttr | None:
    items = tuple((k, v) for k, v in entries.items() if v is not None)
    return DictAttr(items) if items else None


def _merge(d: DictAttr | None, extra: DictAttr | None) -> DictAttr | None:
    if extra is None:
        return d
    if d is None:
        return extra
    keys = set(d.keys())
    return DictAttr(d.entries + tuple(e for e in extra.entries
                                      if e[0] not in keys))


def _optional_attr_dict(p) -> DictAttr | None:
    if p.at_punct("{"):
        return p.parse_attr_dict()
    return None


def _ssa_name(results) -> StringAttr | None:
    if results and results[0].count is None and not results[0].name[0].isdigit():
        return StringAttr(results[0].name)
    return None


def _inner_sym(p) -> DialectAttr | None:
    if p.accept_bare("sym"):
        return DialectAttr("hw.innerSym", "@" + p.expect_symbol())
    return None


def _uses(p, n: int | None = None) -> tuple:
    uses = [p.parse_value_use()]
    while p.accept_punct(","):
        uses.append(p.parse_value_use())
    if n is not None and len(uses) != n:
        raise p.error(f"expected {n} operands, got {len(uses)}")
    return tuple(uses)


def _types_list(p) -> tuple:
    types = [p.parse_type()]
    while p.accept_punct(","):
        types.append(p.parse_type())
    return tuple(types)


def _custom_type(p):
    """Types written after ``:`` in seq.firmem ops may drop ``!seq.firmem``."""
    if p.at_punct("<"):
        p.next()
        depth = p.expect_int()
        p.expect_dim_x()
        width = p.expect_int()
        mask = None
        if p.accept_punct(","):
            p.expect_bare("mask")
            mask = p.expect_int()
        p.expect_punct(">")
        return FirMemType(depth, width, mask)
    return p.parse_type()


def _region_body(p, args=()) -> Region:
    region = p.parse_region()
    if args:
        if len(region.blocks) > 1 or (region.blocks
                                      and region.blocks[0].label is not None):
            raise p.error("custom region with arguments must be one block")
        ops = region.blocks[0].ops if region.blocks else ()
        return Region((Block("bb0", tuple(args), ops),))
    return region


def _fn(inputs, results) -> FunctionType:
    return FunctionType(tuple(inputs), tuple(results))


# ---------------------------------------------------------------------------
# builtin / hw
# ---------------------------------------------------------------------------


@custom("module", "builtin.module")
def _builtin_module(p, results):
    sym = None
    if p.peek().kind == L.SYMBOL:
        sym = StringAttr(p.expect_symbol())
    extra = None
    if p.accept_bare("attributes"):
        extra = p.parse_attr_dict()
    region = p.parse_region()
    return dict(name="builtin.module", regions=(region,),
                attributes=_merge(_attrs(sym_name=sym), extra),
                func_type=_fn((), ()))


@custom("hw.module")
def _hw_module(p, results):
    sym = p.expect_symbol()
    p.expect_punct("(")
    ports: list[ModulePort] = []
    args: list[BlockArg] = []

    def port():
        direction = p.expect_bare()
        if direction in ("in", "inout"):
            name = p.expect_kind(L.VALUE_ID, "port value").text
            p.expect_punct(":")
            ty = p.parse_type()
            ports.append(ModulePort("input" if direction == "in" else "inout",
                                    name, ty))
            args.append(BlockArg(name, ty))
        elif direction == "out":
            tok = p.peek()
            name = p.next().text if tok.kind == L.STRING else p.expect_bare()
            p.expect_punct(":")
            ports.append(ModulePort("output", name, p.parse_type()))
        else:
            raise p.error(f"bad port direction '{direction}'")

    p.comma_list(port, ")")
    p.expect_punct(")")
    extra = None
    if p.accept_bare("attributes"):
        extra = p.parse_attr_dict()
    region = _region_body(p, args)
    attrs = _merge(_attrs(module_type=TypeAttr(ModuleType(tuple(ports))),
                          sym_name=StringAttr(sym)), extra)
    return dict(regions=(region,), attributes=attrs, func_type=_fn((), ()))


@custom("hw.output")
def _hw_output(p, results):
    operands: tuple = ()
    types: tuple = ()
    if p.peek().kind == L.VALUE_ID:
        operands = _uses(p)
        p.expect_punct(":")
        types = _types_list(p)
    return dict(operands=operands, func_type=_fn(types, ()))


@custom("hw.constant")
def _hw_constant(p, results):
    if p.at_bare("true") or p.at_bare("false"):
        value = BoolAttr(p.next().text == "true")
        ty = I1
    else:
        v = p.expect_int()
        p.expect_punct(":")
        ty = p.parse_type()
        value = IntegerAttr(v, ty)
    return dict(attributes=_merge(_attrs(value=value), _optional_attr_dict(p)),
                func_type=_fn((), (ty,)))


@custom("hw.instance")
def _hw_instance(p, results):
    inst_name = p.expect_string()
    sym = _inner_sym(p)
    module = p.expect_symbol()
    p.expect_punct("(")
    arg_names, operands, in_types = [], [], []

    def arg():
        tok = p.peek()
        arg_names.append(StringAttr(p.next().text if tok.kind == L.STRING
                                    else p.expect_bare()))
        p.expect_punct(":")
        operands.append(p.parse_value_use())
        p.expect_punct(":")
        in_types.append(p.parse_type())

    p.comma_list(arg, ")")
    p.expect_punct(")")
    p.expect_punct("->")
    p.expect_punct("(")
    res_names, out_types = [], []

    def res():
        tok = p.peek()
        res_names.append(StringAttr(p.next().text if tok.kind == L.STRING
                                    else p.expect_bare()))
        p.expect_punct(":")
        out_types.append(p.parse_type())

    p.comma_list(res, ")")
    p.expect_punct(")")
    attrs = _attrs(instanceName=StringAttr(inst_name),
                   moduleName=SymbolRefAttr(module),
                   argNames=ArrayAttr(tuple(arg_names)),
                   resultNames=ArrayAttr(tuple(res_names)),
                   inner_sym=sym)
    return dict(operands=tuple(operands),
                attributes=_merge(attrs, _optional_attr_dict(p)),
                func_type=_fn(in_types, out_types))


@custom("hw.bitcast")
def _hw_bitcast(p, results):
    operands = _uses(p, 1)
    p.expect_punct(":")
    ft = p.parse_function_type()
    return dict(operands=operands, func_type=ft)


@custom("hw.wire")
def _hw_wire(p, results):
    operands = _uses(p, 1)
    sym = _inner_sym(p)
    extra = _optional_attr_dict(p)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=operands,
                attributes=_merge(_attrs(name=_ssa_name(results),
                                         inner_sym=sym), extra),
                func_type=_fn((ty,), (ty,)))


@custom("hw.aggregate_constant")
def _hw_aggregate_constant(p, results):
    fields = p.parse_attr()
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(attributes=_attrs(fields=fields), func_type=_fn((), (ty,)))


def _index_type(size: int) -> IntegerType:
    return IntegerType(max(1, clog2(size)))


@custom("hw.array_create")
def _hw_array_create(p, results):
    operands = _uses(p)
    p.expect_punct(":")
    elem = p.parse_type()
    return dict(operands=operands,
                func_type=_fn((elem,) * len(operands),
                              (ArrayType(len(operands), elem),)))


@custom("hw.array_get")
def _hw_array_get(p, results):
    arr = p.parse_value_use()
    p.expect_punct("[")
    idx = p.parse_value_use()
    p.expect_punct("]")
    p.expect_punct(":")
    aty = p.parse_type()
    p.expect_punct(",")
    ity = p.parse_type()
    if not isinstance(aty, ArrayType):
        raise p.error("hw.array_get expects an array type")
    return dict(operands=(arr, idx), func_type=_fn((aty, ity), (aty.element,)))


@custom("hw.array_slice")
def _hw_array_slice(p, results):
    arr = p.parse_value_use()
    p.expect_punct("[")
    idx = p.parse_value_use()
    p.expect_punct("]")
    p.expect_punct(":")
    ft = p.parse_function_type()
    aty = ft.inputs[0]
    if not isinstance(aty, ArrayType):
        raise p.error("hw.array_slice expects an array type")
    return dict(operands=(arr, idx),
                func_type=_fn((aty, _index_type(aty.size)), ft.results))


@custom("hw.array_concat")
def _hw_array_concat(p, results):
    operands = _uses(p)
    p.expect_punct(":")
    types = _types_list(p)
    if len(types) != len(operands) or not all(isinstance(t, ArrayType)
                                              for t in types):
        raise p.error("hw.array_concat needs one array type per operand")
    size = sum(t.size for t in types)
    return dict(operands=operands,
                func_type=_fn(types, (ArrayType(size, types[0].element),)))


@custom("hw.struct_create")
def _hw_struct_create(p, results):
    p.expect_punct("(")
    operands = p.parse_value_uses(")")
    p.expect_punct(")")
    p.expect_punct(":")
    ty = p.parse_type()
    if not isinstance(ty, StructType):
        raise p.error("hw.struct_create expects a struct type")
    return dict(operands=operands,
                func_type=_fn(tuple(t for _, t in ty.fields), (ty,)))


def _field_ref(p) -> tuple:
    v = p.parse_value_use()
    p.expect_punct("[")
    field = p.expect_string()
    p.expect_punct("]")
    return v, field


def _field_type(p, ty, field):
    if not isinstance(ty, (StructType, UnionType)):
        raise p.error("expected a struct or union type")
    i = ty.index_of(field)
    if i < 0:
        raise p.error(f"no field '{field}' in type")
    return ty.fields[i][1]


@custom("hw.struct_extract", "hw.union_extract")
def _hw_field_extract(p, results):
    v, field = _field_ref(p)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=(v,), attributes=_attrs(field=StringAttr(field)),
                func_type=_fn((ty,), (_field_type(p, ty, field),)))


@custom("hw.struct_inject")
def _hw_struct_inject(p, results):
    v, field = _field_ref(p)
    p.expect_punct(",")
    new = p.parse_value_use()
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=(v, new), attributes=_attrs(field=StringAttr(field)),
                func_type=_fn((ty, _field_type(p, ty, field)), (ty,)))


@custom("hw.struct_explode")
def _hw_struct_explode(p, results):
    operands = _uses(p, 1)
    p.expect_punct(":")
    ty = p.parse_type()
    if not isinstance(ty, StructType):
        raise p.error("hw.struct_explode expects a struct type")
    return dict(operands=operands,
                func_type=_fn((ty,), tuple(t for _, t in ty.fields)))


@custom("hw.union_create")
def _hw_union_create(p, results):
    field = p.expect_string()
    p.expect_punct(",")
    v = p.parse_value_use()
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=(v,), attributes=_attrs(field=StringAttr(field)),
                func_type=_fn((_field_type(p, ty, field),), (ty,)))


def enum_field_attr(field: str, ty: EnumType) -> DialectAttr:
    return DialectAttr("hw.enum.field",
                       f"{field}, !hw.enum<{', '.join(ty.fields)}>")


@custom("hw.enum.constant")
def _hw_enum_constant(p, results):
    field = p.expect_bare()
    p.expect_punct(":")
    ty = p.parse_type()
    if not isinstance(ty, EnumType):
        raise p.error("hw.enum.constant expects an enum type")
    return dict(attributes=_attrs(field=enum_field_attr(field, ty)),
                func_type=_fn((), (ty,)))


@custom("hw.enum.cmp")
def _hw_enum_cmp(p, results):
    operands = _uses(p, 2)
    p.expect_punct(":")
    types = _types_list(p)
    return dict(operands=operands, func_type=_fn(types, (I1,)))


@custom("hw.hierpath")
def _hw_hierpath(p, results):
    sym = p.expect_symbol()
    p.expect_punct("[")
    path = p.comma_list(p.parse_symbol_ref, "]")
    p.expect_punct("]")
    return dict(attributes=_attrs(namepath=ArrayAttr(tuple(path)),
                                  sym_name=StringAttr(sym)),
                func_type=_fn((), ()))


# ---------------------------------------------------------------------------
# comb
# ---------------------------------------------------------------------------

_COMB_SAME_TYPE = ("comb.add", "comb.mul", "comb.and", "comb.or", "comb.xor",
                   "comb.sub", "comb.divs", "comb.divu", "comb.mods",
                   "comb.modu", "comb.shl", "comb.shrs", "comb.shru")


def _two_state(p) -> UnitAttr | None:
    return UnitAttr() if p.accept_bare("bin") else None


@custom(*_COMB_SAME_TYPE)
def _comb_same_type(p, results):
    two = _two_state(p)
    operands = _uses(p)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=operands,
                attributes=_merge(_attrs(twoState=two), _optional_attr_dict(p)),
                func_type=_fn((ty,) * len(operands), (ty,)))


@custom("comb.icmp")
def _comb_icmp(p, results):
    two = _two_state(p)
    pred = p.expect_bare()
    if pred not in ICMP_PREDICATES:
        raise p.error(f"unknown icmp predicate '{pred}'")
    operands = _uses(p, 2)
    p.expect_punct(":")
    ty = p.parse_type()
    attrs = _attrs(predicate=IntegerAttr(ICMP_PREDICATES.index(pred), I64),
                   twoState=two)
    return dict(operands=operands, attributes=attrs,
                func_type=_fn((ty, ty), (I1,)))


@custom("comb.extract")
def _comb_extract(p, results):
    operands = _uses(p, 1)
    p.expect_bare("from")
    low = p.expect_int()
    p.expect_punct(":")
    ft = p.parse_function_type()
    return dict(operands=operands,
                attributes=_attrs(lowBit=IntegerAttr(low, I32)),
                func_type=ft)


@custom("comb.concat")
def _comb_concat(p, results):
    operands = _uses(p)
    p.expect_punct(":")
    types = _types_list(p)
    if len(types) != len(operands):
        raise p.error("comb.concat needs one type per operand")
    width = sum(t.width for t in types if isinstance(t, IntegerType))
    return dict(operands=operands, func_type=_fn(types, (IntegerType(width),)))


@custom("comb.replicate")
def _comb_replicate(p, results):
    operands = _uses(p, 1)
    p.expect_punct(":")
    return dict(operands=operands, func_type=p.parse_function_type())


@custom("comb.parity")
def _comb_parity(p, results):
    two = _two_state(p)
    operands = _uses(p, 1)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=operands, attributes=_attrs(twoState=two),
                func_type=_fn((ty,), (I1,)))


@custom("comb.mux")
def _comb_mux(p, results):
    two = _two_state(p)
    operands = _uses(p, 3)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=operands, attributes=_attrs(twoState=two),
                func_type=_fn((I1, ty, ty), (ty,)))


@custom("comb.truth_table")
def _comb_truth_table(p, results):
    operands = _uses(p)
    p.expect_punct("->")
    table = p.parse_attr()
    return dict(operands=operands, attributes=_attrs(lookupTable=table),
                func_type=_fn((I1,) * len(operands), (I1,)))


# ---------------------------------------------------------------------------
# seq
# ---------------------------------------------------------------------------


@custom("seq.firreg")
def _seq_firreg(p, results):
    nxt = p.parse_value_use()
    p.expect_bare("clock")
    clk = p.parse_value_use()
    sym = _inner_sym(p)
    operands = [nxt, clk]
    is_async = None
    has_reset = False
    if p.accept_bare("reset"):
        style = p.expect_bare()
        if style not in ("sync", "async"):
            raise p.error("expected 'sync' or 'async'")
        is_async = UnitAttr() if style == "async" else None
        operands.append(p.parse_value_use())
        p.expect_punct(",")
        operands.append(p.parse_value_use())
        has_reset = True
    preset = None
    if p.accept_bare("preset"):
        preset = p.expect_int()
    extra = _optional_attr_dict(p)
    p.expect_punct(":")
    ty = p.parse_type()
    in_types = [ty, ClockType()] + ([I1, ty] if has_reset else [])
    attrs = _attrs(name=_ssa_name(results), inner_sym=sym, isAsync=is_async,
                   preset=IntegerAttr(preset, ty) if preset is not None
                   else None)
    return dict(operands=tuple(operands), attributes=_merge(attrs, extra),
                func_type=_fn(in_types, (ty,)))


@custom("seq.firmem")
def _seq_firmem(p, results):
    rlat = p.expect_int()
    p.expect_punct(",")
    wlat = p.expect_int()
    p.expect_punct(",")
    ruw = p.expect_bare()
    p.expect_punct(",")
    wuw = p.expect_bare()
    sym = _inner_sym(p)
    extra = _optional_attr_dict(p)
    p.expect_punct(":")
    ty = _custom_type(p)
    attrs = _attrs(readLatency=IntegerAttr(rlat, I32),
                   writeLatency=IntegerAttr(wlat, I32),
                   ruw=DialectAttr("seq", f"ruw {ruw}"),
                   wuw=DialectAttr("seq", f"wuw {wuw}"),
                   name=_ssa_name(results), inner_sym=sym)
    return dict(attributes=_merge(attrs, extra), func_type=_fn((), (ty,)))


def _segments(*sizes: int) -> ArrayAttr:
    return ArrayAttr(tuple(IntegerAttr(s, I32) for s in sizes))


def _mem_port_prefix(p):
    mem = p.parse_value_use()
    p.expect_punct("[")
    addr = p.parse_value_use()
    p.expect_punct("]")
    return mem, addr


def _mem_port_tail(p):
    """Parses ``clock %c (enable %e)? (mask %m)? : <D x W> (, mask-type)?``."""
    p.expect_bare("clock")
    clk = p.parse_value_use()
    en = mask = None
    if p.accept_bare("enable"):
        en = p.parse_value_use()
    if p.accept_bare("mask"):
        mask = p.parse_value_use()
    p.expect_punct(":")
    mty = _custom_type(p)
    mask_ty = None
    if p.accept_punct(","):
        mask_ty = p.parse_type()
    if not isinstance(mty, FirMemType):
        raise p.error("expected a firmem type")
    return clk, en, mask, mty, mask_ty


@custom("seq.firmem.read_port")
def _seq_read_port(p, results):
    mem, addr = _mem_port_prefix(p)
    p.expect_punct(",")
    clk, en, mask, mty, _ = _mem_port_tail(p)
    if mask is not None:
        raise p.error("read ports take no mask")
    operands = [mem, addr, clk] + ([en] if en else [])
    types = [mty, _index_type(mty.depth), ClockType()] + ([I1] if en else [])
    return dict(operands=tuple(operands),
                attributes=_attrs(operandSegmentSizes=_segments(
                    1, 1, 1, 1 if en else 0)),
                func_type=_fn(types, (IntegerType(mty.width),)))


@custom("seq.firmem.write_port")
def _seq_write_port(p, results):
    mem, addr = _mem_port_prefix(p)
    p.expect_punct("=")
    data = p.parse_value_use()
    p.expect_punct(",")
    clk, en, mask, mty, mask_ty = _mem_port_tail(p)
    operands = [mem, addr, clk] + ([en] if en else []) + [data] + (
        [mask] if mask else [])
    types = [mty, _index_type(mty.depth), ClockType()] + (
        [I1] if en else []) + [IntegerType(mty.width)] + (
        [mask_ty or IntegerType(1)] if mask else [])
    return dict(operands=tuple(operands),
                attributes=_attrs(operandSegmentSizes=_segments(
                    1, 1, 1, 1 if en else 0, 1, 1 if mask else 0)),
                func_type=_fn(types, ()))


@custom("seq.firmem.read_write_port")
def _seq_rw_port(p, results):
    mem, addr = _mem_port_prefix(p)
    p.expect_punct("=")
    wdata = p.parse_value_use()
    p.expect_bare("if")
    mode = p.parse_value_use()
    p.expect_punct(",")
    clk, en, mask, mty, mask_ty = _mem_port_tail(p)
    operands = [mem, addr, clk] + ([en] if en else []) + [wdata, mode] + (
        [mask] if mask else [])
    types = [mty, _index_type(mty.depth), ClockType()] + (
        [I1] if en else []) + [IntegerType(mty.width), I1] + (
        [mask_ty or IntegerType(1)] if mask else [])
    return dict(operands=tuple(operands),
                attributes=_attrs(operandSegmentSizes=_segments(
                    1, 1, 1, 1 if en else 0, 1, 1, 1 if mask else 0)),
                func_type=_fn(types, (IntegerType(mty.width),)))


# ---------------------------------------------------------------------------
# sv
# ---------------------------------------------------------------------------


@custom("sv.reg", "sv.logic", "sv.wire")
def _sv_decl(p, results):
    name = _ssa_name(results)
    if p.accept_bare("name"):
        name = StringAttr(p.expect_string())
    sym = _inner_sym(p)
    extra = _optional_attr_dict(p)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(attributes=_merge(_attrs(name=name, inner_sym=sym), extra),
                func_type=_fn((), (ty,)))


@custom("sv.read_inout")
def _sv_read_inout(p, results):
    operands = _uses(p, 1)
    p.expect_punct(":")
    ty = p.parse_type()
    if not isinstance(ty, InOutType):
        raise p.error("sv.read_inout expects an inout type")
    return dict(operands=operands, func_type=_fn((ty,), (ty.element,)))


@custom("sv.array_index_inout")
def _sv_array_index_inout(p, results):
    arr = p.parse_value_use()
    p.expect_punct("[")
    idx = p.parse_value_use()
    p.expect_punct("]")
    p.expect_punct(":")
    ty = p.parse_type()
    p.expect_punct(",")
    ity = p.parse_type()
    if not (isinstance(ty, InOutType) and isinstance(ty.element, ArrayType)):
        raise p.error("sv.array_index_inout expects an inout array type")
    return dict(operands=(arr, idx),
                func_type=_fn((ty, ity), (InOutType(ty.element.element),)))


@custom("sv.assign", "sv.bpassign", "sv.passign", "sv.force")
def _sv_assign(p, results):
    operands = _uses(p, 2)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=operands, func_type=_fn((InOutType(ty), ty), ()))


@custom("sv.release")
def _sv_release(p, results):
    operands = _uses(p, 1)
    p.expect_punct(":")
    ty = p.parse_type()
    return dict(operands=operands, func_type=_fn((ty,), ()))


@custom("sv.initial", "sv.alwayscomb")
def _sv_block(p, results):
    return dict(regions=(_region_body(p),), func_type=_fn((), ()))


def _event(p):
    kind = p.expect_bare()
    if kind not in EVENT_KINDS:
        raise p.error(f"unknown event '{kind}'", expected=set(EVENT_KINDS))
    return EVENT_KINDS.index(kind), p.parse_value_use()


@custom("sv.always")
def _sv_always(p, results):
    events = []
    if p.peek().kind == L.BARE:
        events.append(_event(p))
        while p.accept_punct(","):
            events.append(_event(p))
    region = _region_body(p)
    return dict(operands=tuple(v for _, v in events), regions=(region,),
                attributes=_attrs(events=ArrayAttr(tuple(
                    IntegerAttr(k, I32) for k, _ in events))),
                func_type=_fn((I1,) * len(events), ()))


@custom("sv.alwaysff")
def _sv_alwaysff(p, results):
    p.expect_punct("(")
    clock_edge, clk = _event(p)
    p.expect_punct(")")
    body = _region_body(p)
    operands = [clk]
    regions = [body]
    style = 0
    reset_edge = None
    if p.accept_punct("("):
        sname = p.expect_bare()
        if sname not in RESET_STYLES[1:]:
            raise p.error("expected 'syncreset' or 'asyncreset'")
        style = RESET_STYLES.index(sname)
        p.expect_punct(":")
        reset_edge, rst = _event(p)
        p.expect_punct(")")
        operands.append(rst)
        regions.append(_region_body(p))
    attrs = _attrs(clockEdge=IntegerAttr(clock_edge, I32),
                   resetStyle=IntegerAttr(style, I32),
                   resetEdge=IntegerAttr(reset_edge, I32)
                   if reset_edge is not None else None)
    return dict(operands=tuple(operands), regions=tuple(regions),
                attributes=attrs, func_type=_fn((I1,) * len(operands), ()))


@custom("sv.if")
def _sv_if(p, results):
    cond = p.parse_value_use()
    regions = [_region_body(p)]
    if p.accept_bare("else"):
        regions.append(_region_body(p))
    return dict(operands=(cond,), regions=tuple(regions),
                func_type=_fn((I1,), ()))


def _case_label(p, width: int):
    tok = p.peek()
    if tok.kind == L.BARE and tok.text.startswith("b"):
        p.next()
        digits = tok.text[1:]
        if not digits or any(c not in "01" for c in digits):
            raise p.error("bad binary case label", tok)
        return IntegerAttr(int(digits, 2), IntegerType(width))
    return IntegerAttr(p.expect_int(), IntegerType(width))


@custom("sv.case")
def _sv_case(p, results):
    style = None
    if p.at_bare("casez") or p.at_bare("casex"):
        style = StringAttr(p.next().text)
    cond = p.parse_value_use()
    p.expect_punct(":")
    ty = p.parse_type()
    width = ty.width if isinstance(ty, IntegerType) else 1
    patterns, regions = [], []
    while True:
        if p.accept_bare("case"):
            patterns.append(_case_label(p, width))
        elif p.accept_bare("default"):
            patterns.append(UnitAttr())
        else:
            break
        p.expect_punct(":")
        regions.append(_region_body(p))
    return dict(operands=(cond,), regions=tuple(regions),
                attributes=_attrs(casePatterns=ArrayAttr(tuple(patterns)),
                                  caseStyle=style),
                func_type=_fn((ty,), ()))


@custom("sv.for")
def _sv_for(p, results):
    var = p.expect_kind(L.VALUE_ID, "induction variable").text
    p.expect_punct("=")
    lb = p.parse_value_use()
    p.expect_bare("to")
    ub = p.parse_value_use()
    p.expect_bare("step")
    step = p.parse_value_use()
    p.expect_punct(":")
    ty = p.parse_type()
    region = _region_body(p, [BlockArg(var, ty)])
    return dict(operands=(lb, ub, step), regions=(region,),
                attributes=_attrs(inductionVarName=StringAttr(var)),
                func_type=_fn((ty, ty, ty), ()))


@custom("sv.constantX", "sv.constantZ")
def _sv_constant_xz(p, results):
    p.expect_punct(":")
    return dict(func_type=_fn((), (p.parse_type(),)))


def _message(p):
    """``"fmt" ( '(' uses ')' ':' types )?``"""
    msg = StringAttr(p.expect_string())
    operands: tuple = ()
    types: tuple = ()
    if p.accept_punct("("):
        operands = p.parse_value_uses(")")
        p.expect_punct(")")
        if operands:
            p.expect_punct(":")
            types = _types_list(p)
    return msg, operands, types


@custom("sv.assert", "sv.assume", "sv.cover")
def _sv_assert(p, results):
    cond = p.parse_value_use()
    p.expect_punct(",")
    defer = p.expect_bare()
    if defer not in DEFER_KINDS:
        raise p.error(f"unknown defer kind '{defer}'")
    label = message = None
    operands: tuple = ()
    types: tuple = ()
    if p.accept_bare("label"):
        label = StringAttr(p.expect_string())
    if p.accept_bare("message"):
        message, operands, types = _message(p)
    attrs = _attrs(defer=IntegerAttr(DEFER_KINDS.index(defer), I32),
                   label=label, message=message)
    return dict(operands=(cond,) + operands, attributes=attrs,
                func_type=_fn((I1,) + types, ()))


@custom("sv.error", "sv.warning", "sv.info")
def _sv_severity(p, results):
    message = None
    operands: tuple = ()
    types: tuple = ()
    if p.peek().kind == L.STRING:
        message, operands, types = _message(p)
    return dict(operands=operands, attributes=_attrs(message=message),
                func_type=_fn(types, ()))


@custom("sv.fatal")
def _sv_fatal(p, results):
    verbosity = None
    if p.peek().kind == L.INT:
        verbosity = IntegerAttr(p.expect_int(), IntegerType(8))
    message = None
    operands: tuple = ()
    types: tuple = ()
    if p.peek().kind == L.STRING:
        message, operands, types = _message(p)
    return dict(operands=operands,
                attributes=_attrs(verbosity=verbosity, message=message),
                func_type=_fn(types, ()))


@custom("sv.finish", "sv.stop")
def _sv_finish(p, results):
    verbosity = None
    if p.peek().kind == L.INT:
        verbosity = IntegerAttr(p.expect_int(), IntegerType(8))
    return dict(attributes=_attrs(verbosity=verbosity), func_type=_fn((), ()))


@custom("sv.exit")
def _sv_exit(p, results):
    return dict(func_type=_fn((), ()))


@custom("sv.fwrite")
def _sv_fwrite(p, results):
    fd = p.parse_value_use()
    p.expect_punct(",")
    fmt = StringAttr(p.expect_string())
    args: tuple = ()
    types: tuple = ()
    if p.accept_punct("("):
        args = p.parse_value_uses(")")
        p.expect_punct(")")
    p.expect_punct(":")
    types = _types_list(p)
    return dict(operands=(fd,) + args, attributes=_attrs(format_string=fmt),
                func_type=_fn(types, ()))


@custom("sv.macro.decl")
def _sv_macro_decl(p, results):
    sym = p.expect_symbol()
    return dict(attributes=_attrs(sym_name=StringAttr(sym)),
                func_type=_fn((), ()))


@custom("sv.macro.def")
def _sv_macro_def(p, results):
    sym = p.expect_symbol()
    body = StringAttr(p.expect_string()) if p.peek().kind == L.STRING else None
    return dict(attributes=_attrs(macroName=SymbolRefAttr(sym),
                                  format_string=body),
                func_type=_fn((), ()))


@custom("sv.macro.ref", "sv.macro.ref.se")
def _sv_macro_ref(p, results):
    sym = p.expect_symbol()
    p.expect_punct("(")
    p.expect_punct(")")
    p.expect_punct(":")
    ft = p.parse_function_type()
    return dict(attributes=_attrs(macroName=SymbolRefAttr(sym)), func_type=ft)


@custom("sv.ifdef", "sv.ifdef.procedural")
def _sv_ifdef(p, results):
    tok = p.peek()
    if tok.kind == L.STRING:
        cond = StringAttr(p.next().text)
    else:
        cond = SymbolRefAttr(p.expect_symbol())
    regions = [_region_body(p)]
    if p.accept_bare("else"):
        regions.append(_region_body(p))
    return dict(regions=tuple(regions), attributes=_attrs(cond=cond),
                func_type=_fn((), ()))
