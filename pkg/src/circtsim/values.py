"""Typed signal values.

Every value is stored as one flat :class:`BitVec4` together with its IR type.
Aggregates are views over that flat vector:

* struct field 0 occupies the most significant bits,
* array element ``i`` occupies bits ``[i*w, (i+1)*w)`` so element ``N-1`` is
  most significant,
* a union member lives in the low bits, upper bits zero,
* an enum is the index of its field.

``inout`` values carry a :class:`Ref` and memories a handle object instead of
bits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import BitVec4, concat
from .errors import TypeMismatch, UnknownField, WidthMismatch
from .mlir.syntax import (
    ArrayType, ClockType, EnumType, InOutType, IntegerType, StructType,
    UnionType, bit_width,
)


@dataclass(frozen=True)
class Ref:
    """Reference to (a slice of) a persistent storage cell."""

    path: tuple[str, ...]
    slot: str
    offset: int = 0
    width: int | None = None   # None = whole cell
    valid: bool = True         # False for an X / out-of-range index


@dataclass(frozen=True)
class TypedValue:
    ty: object
    val: object  # BitVec4 | Ref | memory handle

    @property
    def bits(self) -> BitVec4:
        if not isinstance(self.val, BitVec4):
            raise TypeMismatch(f"value of type {type_str(self.ty)} has no bits")
        return self.val

    @property
    def width(self) -> int:
        return self.bits.width

    def aggregate(self):
        """Nested Python view: BitVec4 leaves in lists (arrays, index order)
        and dicts (structs)."""
        return _view(self.ty, self.bits)

    def __str__(self) -> str:
        if isinstance(self.val, BitVec4):
            return f"{self.val.to_string()} : {type_str(self.ty)}"
        return f"{self.val!r} : {type_str(self.ty)}"


def _view(ty, v: BitVec4):
    if isinstance(ty, ArrayType):
        ew = bit_width(ty.element)
        return [_view(ty.element, v.slice(i * ew, ew)) for i in range(ty.size)]
    if isinstance(ty, StructType):
        return {n: _view(ft, v.slice(struct_offset(ty, i), bit_width(ft)))
                for i, (n, ft) in enumerate(ty.fields)}
    return v


def type_str(ty) -> str:
    from .mlir.printer import print_type
    try:
        return print_type(ty)
    except TypeError:
        return repr(ty)


def is_bits_type(ty) -> bool:
    return isinstance(ty, (IntegerType, ClockType, ArrayType, StructType,
                           UnionType, EnumType))


def types_compatible(declared, actual) -> bool:
    """Clocks and ``i1`` are interchangeable; everything else is exact."""
    one = (ClockType(), IntegerType(1))
    if declared in one and actual in one:
        return True
    return declared == actual


def check_type(declared, value: TypedValue, what: str = "value") -> None:
    if types_compatible(declared, value.ty):
        return
    if isinstance(declared, IntegerType) and isinstance(value.ty, IntegerType):
        raise WidthMismatch(f"{what} has width {value.ty.width}, "
                            f"expected {declared.width}")
    raise TypeMismatch(f"{what} has type {type_str(value.ty)}, "
                       f"expected {type_str(declared)}")


# -- construction --------------------------------------------------------------


def width_of(ty) -> int:
    """Bit width of a value type; TypeMismatch for inout, memories, etc."""
    if not is_bits_type(ty):
        raise TypeMismatch(f"type {type_str(ty)} has no bit representation")
    return bit_width(ty)


def x_of(ty) -> TypedValue:
    return TypedValue(ty, BitVec4.x(width_of(ty)))


def z_of(ty) -> TypedValue:
    return TypedValue(ty, BitVec4.z(width_of(ty)))


def int_of(ty, value: int) -> TypedValue:
    return TypedValue(ty, BitVec4.from_int(value, width_of(ty)))


def bits_of(ty, v: BitVec4) -> TypedValue:
    if v.width != bit_width(ty):
        raise WidthMismatch(f"{v.width} bits cannot hold {type_str(ty)}")
    return TypedValue(ty, v)


# -- aggregates ------------------------------------------------------------------


def struct_offset(ty: StructType, index: int) -> int:
    return sum(bit_width(t) for _, t in ty.fields[index + 1:])


def field_index(ty, name: str) -> int:
    i = ty.index_of(name)
    if i < 0:
        raise UnknownField(f"no field '{name}' in {type_str(ty)}")
    return i


def array_of(elem_ty, elems_low_first) -> TypedValue:
    """Array whose element ``i`` is ``elems_low_first[i]``."""
    elems = list(elems_low_first)
    v = concat(e.bits for e in reversed(elems))
    return TypedValue(ArrayType(len(elems), elem_ty), v)


def array_element(arr: TypedValue, index: int) -> TypedValue:
    ty = arr.ty
    ew = bit_width(ty.element)
    return TypedValue(ty.element, arr.bits.slice(index * ew, ew))


def struct_of(ty: StructType, fields) -> TypedValue:
    return TypedValue(ty, concat(f.bits for f in fields))


def struct_field(s: TypedValue, name: str) -> TypedValue:
    i = field_index(s.ty, name)
    ft = s.ty.fields[i][1]
    return TypedValue(ft, s.bits.slice(struct_offset(s.ty, i), bit_width(ft)))


def union_of(ty: UnionType, member: TypedValue) -> TypedValue:
    total = bit_width(ty)
    v = member.bits
    if v.width < total:
        v = concat([BitVec4.from_int(0, total - v.width), v])
    return TypedValue(ty, v)


def union_member(u: TypedValue, name: str) -> TypedValue:
    i = field_index(u.ty, name)
    ft = u.ty.fields[i][1]
    return TypedValue(ft, u.bits.slice(0, bit_width(ft)))


def enum_of(ty: EnumType, name: str) -> TypedValue:
    if name not in ty.fields:
        raise UnknownField(f"no enumerator '{name}' in {type_str(ty)}")
    return int_of(ty, ty.fields.index(name))


def inout_element(ty) -> object:
    if not isinstance(ty, InOutType):
        raise TypeMismatch(f"expected an inout type, got {type_str(ty)}")
    return ty.element
