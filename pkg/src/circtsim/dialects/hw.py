"""hw: modules, instances, constants, wires and aggregates."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..bits import BitVec4
from ..core import (
    RECURSION_LIMIT, InstanceState, module_type, register, register_state,
)
from ..errors import (
    ArityMismatch, MalformedAttribute, PortMismatch, RecursionLimit,
    TypeMismatch, UnknownSymbol, WidthMismatch,
)
from ..mlir.syntax import (
    ArrayAttr, ArrayType, BoolAttr, DialectAttr, EnumType, IntegerAttr,
    StringAttr, StructType, SymbolRefAttr, UnionType, bit_width, clog2,
)
from ..values import (
    TypedValue, array_element, array_of, check_type, enum_of, field_index,
    struct_field, struct_of, type_str, types_compatible, union_member,
    union_of, width_of, x_of,
)


@dataclass
class HwDialectState:
    hier: dict[str, tuple] = field(default_factory=dict)
    h2inst: dict[tuple, tuple[str, ...]] = field(default_factory=dict)


register_state("hw", HwDialectState)

_SYM_RE = re.compile(r'@"?([^">,\s]+)')


def inner_sym_name(attr) -> str | None:
    if attr is None:
        return None
    if isinstance(attr, StringAttr):
        return attr.value
    if isinstance(attr, SymbolRefAttr):
        return attr.root
    if isinstance(attr, DialectAttr) and attr.body:
        m = _SYM_RE.search(attr.body)
        if m:
            return m.group(1)
    raise MalformedAttribute(f"cannot read inner symbol from {attr!r}")


def index_width(size: int) -> int:
    return max(1, clog2(size))


# ---------------------------------------------------------------------------
# modules and hierarchy
# ---------------------------------------------------------------------------


@register("hw.module", attrs=("module_type", "sym_name"),
          errors=("PortMismatch", "MultiBlockRegion"))
def _module(sim, env, op):
    inst = env.inst
    ports = module_type(op).inputs
    region = op.regions[0]
    args = region.blocks[0].args if region.blocks else ()
    if len(args) != len(ports) or len(inst.inputs) != len(ports):
        raise PortMismatch(f"module '{op.symbol}' declares {len(ports)} inputs, "
                           f"body has {len(args)} arguments, "
                           f"{len(inst.inputs)} values supplied")
    sim.write_args(inst, args, inst.inputs)
    sim.parallelize(inst, sim.split_region(inst, region))
    return []


@register("hw.output", attrs=(), errors=("ArityMismatch",))
def _output(sim, env, op):
    inst = env.inst
    ports = module_type(inst.module).outputs
    if len(op.operands) != len(ports):
        raise ArityMismatch(f"hw.output has {len(op.operands)} operands for "
                            f"{len(ports)} output ports")
    for p, vid, v in zip(ports, op.operands, env.operands(op)):
        check_type(p.type, v, f"output '{p.name}'")
        sim.write_out(inst, p.name, vid)
    return []


def _str_attr(op, key) -> str:
    a = op.attr(key)
    if isinstance(a, StringAttr):
        return a.value
    if isinstance(a, SymbolRefAttr):
        return a.root
    raise MalformedAttribute(f"missing string attribute '{key}'")


@register("hw.instance",
          attrs=("instanceName", "moduleName", "argNames", "resultNames",
                 "inner_sym"),
          errors=("UnknownSymbol", "PortMismatch", "RecursionLimit"))
def _instance(sim, env, op):
    inst: InstanceState = env.inst
    name = _str_attr(op, "instanceName")
    target = _str_attr(op, "moduleName")
    module = sim.fetch_module(target)
    mt = module_type(module)
    if len(op.operands) != len(mt.inputs) or len(op.result_ids) != len(mt.outputs):
        raise PortMismatch(f"instance '{name}' of '{target}' has "
                           f"{len(op.operands)} inputs/{len(op.result_ids)} "
                           f"outputs, module has {len(mt.inputs)}/"
                           f"{len(mt.outputs)}")
    vals = env.operands(op)
    for p, v in zip(mt.inputs, vals):
        if not types_compatible(p.type, v.ty):
            raise PortMismatch(f"port '{p.name}' of '{target}' expects "
                               f"{type_str(p.type)}, got {type_str(v.ty)}")
    child = inst.children.get(name)
    if child is None:
        if len(inst.cid) >= RECURSION_LIMIT:
            raise RecursionLimit(f"instance nesting deeper than "
                                 f"{RECURSION_LIMIT}")
        child = InstanceState(cid=inst.cid + (name,), mod=target, pa=inst.cid)
        inst.children[name] = child
        sym = op.attr("inner_sym")
        if sym is not None:
            sim.dialect("hw").h2inst[(inst.mod, inner_sym_name(sym))] = child.cid
    sim.stimulate(child, vals)
    sim.settle(child)
    return [child.curr[child.out[p.name]] for p in mt.outputs]


def _hierpath(sim, op):
    path = op.attr("namepath")
    items = path.items if isinstance(path, ArrayAttr) else ()
    sim.dialect("hw").hier[op.symbol] = tuple(items)


register("hw.hierpath", attrs=("namepath", "sym_name"), errors=(),
         preprocess=_hierpath)(None)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------


def _const_bits(attr, ty) -> BitVec4:
    w = width_of(ty)
    if isinstance(attr, BoolAttr):
        return BitVec4.from_int(int(attr.value), w)
    if isinstance(attr, IntegerAttr):
        return BitVec4.from_int(attr.value, w)
    raise MalformedAttribute(f"expected an integer constant, got {attr!r}")


def constant_value(attr, ty) -> TypedValue:
    """Build a value of type ``ty`` from a (possibly nested) constant attr."""
    if isinstance(ty, ArrayType):
        if not isinstance(attr, ArrayAttr) or len(attr.items) != ty.size:
            raise MalformedAttribute(f"need {ty.size} elements for "
                                     f"{type_str(ty)}")
        elems = [constant_value(a, ty.element) for a in attr.items]
        return array_of(ty.element, reversed(elems))
    if isinstance(ty, StructType):
        if not isinstance(attr, ArrayAttr) or len(attr.items) != len(ty.fields):
            raise MalformedAttribute(f"need {len(ty.fields)} fields for "
                                     f"{type_str(ty)}")
        return struct_of(ty, [constant_value(a, ft)
                              for a, (_, ft) in zip(attr.items, ty.fields)])
    if isinstance(ty, EnumType) and isinstance(attr, DialectAttr):
        return enum_of(ty, _enum_field_name(attr))
    return TypedValue(ty, _const_bits(attr, ty))


@register("hw.constant", attrs=("value",), errors=("MalformedAttribute",))
def _constant(sim, env, op):
    attr = op.attr("value")
    ty = op.result_types[0]
    if isinstance(attr, IntegerAttr) and attr.type is not None \
            and not types_compatible(attr.type, ty):
        raise MalformedAttribute(f"constant of type {type_str(attr.type)} "
                                 f"for result {type_str(ty)}")
    if not isinstance(attr, (IntegerAttr, BoolAttr)):
        raise MalformedAttribute("hw.constant needs an integer value")
    return [TypedValue(ty, _const_bits(attr, ty))]


@register("hw.aggregate_constant", attrs=("fields",),
          errors=("MalformedAttribute",))
def _aggregate_constant(sim, env, op):
    return [constant_value(op.attr("fields"), op.result_types[0])]


def _enum_field_name(attr) -> str:
    if isinstance(attr, DialectAttr) and attr.body:
        return attr.body.split(",")[0].strip()
    if isinstance(attr, StringAttr):
        return attr.value
    raise MalformedAttribute(f"bad enum field attribute {attr!r}")


@register("hw.enum.constant", attrs=("field",),
          errors=("MalformedAttribute", "UnknownField"))
def _enum_constant(sim, env, op):
    ty = op.result_types[0]
    if not isinstance(ty, EnumType):
        raise MalformedAttribute("hw.enum.constant needs an enum result")
    return [enum_of(ty, _enum_field_name(op.attr("field")))]


@register("hw.enum.cmp", attrs=(), errors=("TypeMismatch",))
def _enum_cmp(sim, env, op):
    a, b = env.operands(op)
    if a.ty != b.ty or not isinstance(a.ty, EnumType):
        raise TypeMismatch("hw.enum.cmp needs two values of one enum type")
    x, y = a.bits, b.bits
    if x.bval or y.bval:
        return [TypedValue(op.result_types[0], BitVec4.x(1))]
    return [TypedValue(op.result_types[0], BitVec4.from_int(int(x.aval == y.aval), 1))]


# ---------------------------------------------------------------------------
# wires and casts
# ---------------------------------------------------------------------------


@register("hw.wire", attrs=("name", "inner_sym"), errors=("DuplicateName",))
def _wire(sim, env, op):
    (v,) = env.operands(op)
    sym = op.attr("inner_sym")
    if sym is not None:
        sim.write_wire(env.inst, inner_sym_name(sym), op.result_ids[0])
    return [v]


@register("hw.bitcast", attrs=(), errors=("WidthMismatch",))
def _bitcast(sim, env, op):
    (v,) = env.operands(op)
    ty = op.result_types[0]
    if width_of(ty) != v.width:
        raise WidthMismatch(f"cannot bitcast {v.width} bits to {type_str(ty)}")
    return [TypedValue(ty, v.bits)]


# ---------------------------------------------------------------------------
# arrays
# ---------------------------------------------------------------------------


def _array_type(ty) -> ArrayType:
    if not isinstance(ty, ArrayType):
        raise TypeMismatch(f"expected an array, got {type_str(ty)}")
    return ty


def _index(v: TypedValue, size: int):
    if v.width != index_width(size):
        raise TypeMismatch(f"index of an array of {size} must be "
                           f"i{index_width(size)}, got i{v.width}")
    return v.bits.to_uint()


@register("hw.array_create", attrs=(), errors=("TypeMismatch",))
def _array_create(sim, env, op):
    vals = env.operands(op)
    ty = _array_type(op.result_types[0])
    if len(vals) != ty.size or any(v.ty != ty.element for v in vals):
        raise TypeMismatch(f"array_create operands do not match "
                           f"{type_str(ty)}")
    return [array_of(ty.element, reversed(vals))]


@register("hw.array_get", attrs=(), errors=("TypeMismatch",))
def _array_get(sim, env, op):
    arr, idx = env.operands(op)
    ty = _array_type(arr.ty)
    i = _index(idx, ty.size)
    if not isinstance(i, int) or i >= ty.size:
        return [x_of(ty.element)]
    return [array_element(arr, i)]


@register("hw.array_slice", attrs=(), errors=("TypeMismatch",))
def _array_slice(sim, env, op):
    arr, idx = env.operands(op)
    ty = _array_type(arr.ty)
    rty = _array_type(op.result_types[0])
    if rty.element != ty.element or rty.size > ty.size:
        raise TypeMismatch(f"cannot slice {type_str(rty)} from {type_str(ty)}")
    low = _index(idx, ty.size)
    if not isinstance(low, int) or low + rty.size > ty.size:
        return [x_of(rty)]
    ew = bit_width(ty.element)
    return [TypedValue(rty, arr.bits.slice(low * ew, rty.size * ew))]


@register("hw.array_concat", attrs=(), errors=("TypeMismatch",))
def _array_concat(sim, env, op):
    from ..bits import concat
    vals = env.operands(op)
    rty = _array_type(op.result_types[0])
    if any(_array_type(v.ty).element != rty.element for v in vals) or \
            sum(v.ty.size for v in vals) != rty.size:
        raise TypeMismatch("array_concat operands do not match the result")
    return [TypedValue(rty, concat(v.bits for v in vals))]


# ---------------------------------------------------------------------------
# structs, unions
# ---------------------------------------------------------------------------


def _struct_type(ty) -> StructType:
    if not isinstance(ty, StructType):
        raise TypeMismatch(f"expected a struct, got {type_str(ty)}")
    return ty


def _field_name(op) -> str:
    f = op.attr("field")
    if isinstance(f, StringAttr):
        return f.value
    if isinstance(f, IntegerAttr):
        return f.value
    raise MalformedAttribute("missing field attribute")


def _resolve_field(ty, f) -> str:
    if isinstance(f, int):
        if not 0 <= f < len(ty.fields):
            raise MalformedAttribute(f"field index {f} out of range")
        return ty.fields[f][0]
    field_index(ty, f)
    return f


@register("hw.struct_create", attrs=(), errors=("TypeMismatch",))
def _struct_create(sim, env, op):
    ty = _struct_type(op.result_types[0])
    vals = env.operands(op)
    if len(vals) != len(ty.fields) or any(
            v.ty != ft for v, (_, ft) in zip(vals, ty.fields)):
        raise TypeMismatch(f"struct_create operands do not match "
                           f"{type_str(ty)}")
    return [struct_of(ty, vals)]


@register("hw.struct_extract", attrs=("field",),
          errors=("UnknownField", "TypeMismatch"))
def _struct_extract(sim, env, op):
    (s,) = env.operands(op)
    ty = _struct_type(s.ty)
    return [struct_field(s, _resolve_field(ty, _field_name(op)))]


@register("hw.struct_inject", attrs=("field",),
          errors=("UnknownField", "TypeMismatch"))
def _struct_inject(sim, env, op):
    s, new = env.operands(op)
    ty = _struct_type(s.ty)
    name = _resolve_field(ty, _field_name(op))
    fields = [new if n == name else struct_field(s, n) for n, _ in ty.fields]
    ft = ty.fields[field_index(ty, name)][1]
    if new.ty != ft:
        raise TypeMismatch(f"field '{name}' is {type_str(ft)}, got "
                           f"{type_str(new.ty)}")
    return [struct_of(ty, fields)]


@register("hw.struct_explode", attrs=(), errors=("TypeMismatch",))
def _struct_explode(sim, env, op):
    (s,) = env.operands(op)
    ty = _struct_type(s.ty)
    return [struct_field(s, n) for n, _ in ty.fields]


def _union_type(ty) -> UnionType:
    if not isinstance(ty, UnionType):
        raise TypeMismatch(f"expected a union, got {type_str(ty)}")
    return ty


@register("hw.union_create", attrs=("field",),
          errors=("UnknownField", "TypeMismatch"))
def _union_create(sim, env, op):
    (v,) = env.operands(op)
    ty = _union_type(op.result_types[0])
    name = _resolve_field(ty, _field_name(op))
    ft = ty.fields[field_index(ty, name)][1]
    if v.ty != ft:
        raise TypeMismatch(f"member '{name}' is {type_str(ft)}, got "
                           f"{type_str(v.ty)}")
    return [union_of(ty, v)]


@register("hw.union_extract", attrs=("field",),
          errors=("UnknownField", "TypeMismatch"))
def _union_extract(sim, env, op):
    (u,) = env.operands(op)
    ty = _union_type(u.ty)
    return [union_member(u, _resolve_field(ty, _field_name(op)))]
