"""Syntax tree for generic MLIR plus the hw/seq dialect types and attributes.

All nodes are frozen dataclasses so two trees compare structurally with
``==``.  Source positions are carried with ``compare=False``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegerType:
    width: int


@dataclass(frozen=True)
class NamedBuiltinType:
    """Builtin types without parameters that we only carry around (``index``,
    ``none``, ``f32`` ...)."""

    name: str


@dataclass(frozen=True)
class FunctionType:
    inputs: tuple[Type, ...]
    results: tuple[Type, ...]


@dataclass(frozen=True)
class TypeAliasRef:
    name: str  # without the leading '!'


@dataclass(frozen=True)
class ClockType:
    pass


@dataclass(frozen=True)
class ArrayType:
    size: int
    element: Type


@dataclass(frozen=True)
class StructType:
    fields: tuple[tuple[str, Type], ...]

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.fields):
            if n == name:
                return i
        return -1


@dataclass(frozen=True)
class UnionType:
    fields: tuple[tuple[str, Type], ...]

    def index_of(self, name: str) -> int:
        for i, (n, _) in enumerate(self.fields):
            if n == name:
                return i
        return -1


@dataclass(frozen=True)
class EnumType:
    fields: tuple[str, ...]


@dataclass(frozen=True)
class InOutType:
    element: Type


@dataclass(frozen=True)
class ModulePort:
    direction: str  # "input" | "output" | "inout"
    name: str
    type: Type


@dataclass(frozen=True)
class ModuleType:
    ports: tuple[ModulePort, ...]

    @property
    def inputs(self) -> tuple[ModulePort, ...]:
        return tuple(p for p in self.ports if p.direction != "output")

    @property
    def outputs(self) -> tuple[ModulePort, ...]:
        return tuple(p for p in self.ports if p.direction == "output")


@dataclass(frozen=True)
class FirMemType:
    depth: int
    width: int
    mask_width: int | None = None


@dataclass(frozen=True)
class OpaqueType:
    """A dialect type we do not model, kept verbatim: ``!name<body>``."""

    name: str
    body: str | None = None


Type = Union[IntegerType, NamedBuiltinType, FunctionType, TypeAliasRef,
             ClockType, ArrayType, StructType, UnionType, EnumType, InOutType,
             ModuleType, FirMemType, OpaqueType]

# ---------------------------------------------------------------------------
# attributes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegerAttr:
    value: int
    type: Type | None = None


@dataclass(frozen=True)
class FloatAttr:
    text: str
    type: Type | None = None


@dataclass(frozen=True)
class BoolAttr:
    value: bool


@dataclass(frozen=True)
class StringAttr:
    value: str


@dataclass(frozen=True)
class ArrayAttr:
    items: tuple[Attr, ...]


@dataclass(frozen=True)
class DictAttr:
    entries: tuple[tuple[str, Attr], ...]

    def get(self, key: str, default=None):
        for k, v in self.entries:
            if k == key:
                return v
        return default

    def keys(self) -> list[str]:
        return [k for k, _ in self.entries]


@dataclass(frozen=True)
class SymbolRefAttr:
    root: str
    nested: tuple[str, ...] = ()


@dataclass(frozen=True)
class UnitAttr:
    pass


@dataclass(frozen=True)
class TypeAttr:
    type: Type


@dataclass(frozen=True)
class AttrAliasRef:
    name: str  # without the leading '#'


@dataclass(frozen=True)
class DialectAttr:
    """``#dialect<body>`` or ``#dialect.name<body>`` kept as raw body text."""

    name: str
    body: str | None = None


@dataclass(frozen=True)
class LocAttr:
    body: str


Attr = Union[IntegerAttr, FloatAttr, BoolAttr, StringAttr, ArrayAttr,
             DictAttr, SymbolRefAttr, UnitAttr, TypeAttr, AttrAliasRef,
             DialectAttr, LocAttr]

# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpResult:
    name: str  # without '%'
    count: int | None = None


@dataclass(frozen=True)
class ValueUse:
    name: str
    index: int | None = None

    @property
    def id(self) -> str:
        return self.name if self.index is None else f"{self.name}#{self.index}"


@dataclass(frozen=True)
class BlockArg:
    name: str
    type: Type


@dataclass(frozen=True)
class Successor:
    label: str
    args: tuple[BlockArg, ...] | None = None


@dataclass(frozen=True)
class Block:
    label: str | None
    args: tuple[BlockArg, ...]
    ops: tuple[Operation, ...]


@dataclass(frozen=True)
class Region:
    blocks: tuple[Block, ...]

    @property
    def entry_ops(self) -> tuple[Operation, ...]:
        return self.blocks[0].ops if self.blocks else ()


@dataclass(frozen=True)
class Operation:
    name: str
    results: tuple[OpResult, ...] = ()
    operands: tuple[ValueUse, ...] = ()
    successors: tuple[Successor, ...] = ()
    properties: DictAttr | None = None
    regions: tuple[Region, ...] = ()
    attributes: DictAttr | None = None
    func_type: FunctionType = FunctionType((), ())
    loc: LocAttr | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False)

    @property
    def result_ids(self) -> tuple[str, ...]:
        ids: list[str] = []
        for r in self.results:
            if r.count is None:
                ids.append(r.name)
            else:
                ids.extend(f"{r.name}#{i}" for i in range(r.count))
        return tuple(ids)


@dataclass(frozen=True)
class TypeAliasDef:
    name: str
    type: Type


@dataclass(frozen=True)
class AttrAliasDef:
    name: str
    value: Attr


TopItem = Union[Operation, TypeAliasDef, AttrAliasDef]


@dataclass(frozen=True)
class SourceFile:
    items: tuple[TopItem, ...] = ()


# ---------------------------------------------------------------------------
# helpers shared by later layers
# ---------------------------------------------------------------------------


def clog2(n: int) -> int:
    return max(0, (n - 1).bit_length())


def bit_width(ty: Type) -> int:
    """Flattened bit width of a value type."""
    if isinstance(ty, IntegerType):
        return ty.width
    if isinstance(ty, ClockType):
        return 1
    if isinstance(ty, ArrayType):
        return ty.size * bit_width(ty.element)
    if isinstance(ty, StructType):
        return sum(bit_width(t) for _, t in ty.fields)
    if isinstance(ty, UnionType):
        return max((bit_width(t) for _, t in ty.fields), default=0)
    if isinstance(ty, EnumType):
        return max(1, clog2(len(ty.fields)))
    raise TypeError(f"type {ty!r} has no bit width")


def is_scalar(ty: Type) -> bool:
    return isinstance(ty, (IntegerType, ClockType, EnumType))
