"""Preprocessing: alias maps, canonical operations and the symbol table."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .bits import MAX_WIDTH
from .errors import (
    AliasCycle, DuplicateAlias, DuplicateKey, DuplicateSymbol,
    SignatureMismatch, StaticError, UnknownAlias, UnknownSymbol, UnresolvedAlias, WidthLimit,
)
from .mlir.syntax import (
    ArrayAttr, ArrayType, AttrAliasDef, AttrAliasRef, DictAttr, EnumType,
    FunctionType, InOutType, IntegerAttr, IntegerType, LocAttr, ModulePort,
    ModuleType, Operation, Region, SourceFile, StringAttr, StructType,
    TypeAliasDef, TypeAliasRef, TypeAttr, UnionType, FloatAttr, bit_width,
)


class Phase(enum.Enum):
    PREPROCESS = "preprocess"
    SIMULATION = "simulation"
    DEBUG = "debug"


@dataclass(frozen=True)
class CanonBlock:
    label: str | None
    args: tuple[tuple[str, object], ...]
    ops: tuple[CanonOp, ...]


@dataclass(frozen=True)
class CanonRegion:
    blocks: tuple[CanonBlock, ...]

    @property
    def entry(self) -> CanonBlock | None:
        return self.blocks[0] if self.blocks else None


@dataclass(frozen=True)
class CanonOp:
    name: str
    operands: tuple[str, ...] = ()
    attrs: DictAttr = DictAttr(())
    regions: tuple[CanonRegion, ...] = ()
    result_ids: tuple[str, ...] = ()
    operand_types: tuple = ()
    result_types: tuple = ()
    pos: tuple[int, int] | None = field(default=None, compare=False)

    def attr(self, key: str, default=None):
        return self.attrs.get(key, default)

    @property
    def symbol(self) -> str | None:
        s = self.attrs.get("sym_name")
        return s.value if isinstance(s, StringAttr) else None


@dataclass
class MlirState:
    prog: list = field(default_factory=list)
    phase: Phase = Phase.PREPROCESS
    types: dict[str, object] = field(default_factory=dict)
    attrs: dict[str, object] = field(default_factory=dict)
    table: dict[str, CanonOp] = field(default_factory=dict)
    # unsymboled top-level ops, handed to the hardware layer as commands
    moved: list[CanonOp] = field(default_factory=list)


def _key(sigil: str, name: str) -> str:
    return name if name.startswith(sigil) else sigil + name


# ---------------------------------------------------------------------------
# alias resolution
# ---------------------------------------------------------------------------


class _Resolver:
    def __init__(self, type_defs: dict, attr_defs: dict):
        self.type_defs = type_defs
        self.attr_defs = attr_defs
        self.types: dict[str, object] = {}
        self.attrs: dict[str, object] = {}
        self._active: list[str] = []

    def _enter(self, key: str):
        if key in self._active:
            chain = " -> ".join(self._active[self._active.index(key):] + [key])
            raise AliasCycle(f"alias cycle {chain}")
        self._active.append(key)

    def type_alias(self, name: str):
        key = _key("!", name)
        if key in self.types:
            return self.types[key]
        if key not in self.type_defs:
            raise UnresolvedAlias(f"type alias {key} is not defined")
        self._enter(key)
        try:
            ty = self.type(self.type_defs[key])
        finally:
            self._active.pop()
        self.types[key] = ty
        return ty

    def attr_alias(self, name: str):
        key = _key("#", name)
        if key in self.attrs:
            return self.attrs[key]
        if key not in self.attr_defs:
            raise UnresolvedAlias(f"attribute alias {key} is not defined")
        self._enter(key)
        try:
            a = self.attr(self.attr_defs[key])
        finally:
            self._active.pop()
        self.attrs[key] = a
        return a

    def type(self, t):
        if isinstance(t, TypeAliasRef):
            return self.type_alias(t.name)
        if isinstance(t, IntegerType):
            if not 1 <= t.width <= MAX_WIDTH:
                raise WidthLimit(f"integer width {t.width} outside 1..{MAX_WIDTH}")
            return t
        if isinstance(t, FunctionType):
            return FunctionType(tuple(map(self.type, t.inputs)),
                                tuple(map(self.type, t.results)))
        if isinstance(t, ArrayType):
            out = ArrayType(t.size, self.type(t.element))
        elif isinstance(t, StructType):
            out = StructType(tuple((n, self.type(ft)) for n, ft in t.fields))
        elif isinstance(t, UnionType):
            out = UnionType(tuple((n, self.type(ft)) for n, ft in t.fields))
        elif isinstance(t, InOutType):
            return InOutType(self.type(t.element))
        elif isinstance(t, ModuleType):
            return ModuleType(tuple(ModulePort(p.direction, p.name,
                                               self.type(p.type))
                                    for p in t.ports))
        else:
            return t
        if not isinstance(out, EnumType) and bit_width(out) > MAX_WIDTH:
            raise WidthLimit(f"aggregate width {bit_width(out)} exceeds {MAX_WIDTH}")
        return out

    def attr(self, a):
        if isinstance(a, AttrAliasRef):
            return self.attr_alias(a.name)
        if isinstance(a, (IntegerAttr, FloatAttr)) and a.type is not None:
            return replace(a, type=self.type(a.type))
        if isinstance(a, TypeAttr):
            return TypeAttr(self.type(a.type))
        if isinstance(a, ArrayAttr):
            return ArrayAttr(tuple(self.attr(x) for x in a.items
                                   if not isinstance(x, LocAttr)))
        if isinstance(a, DictAttr):
            return DictAttr(tuple((k, self.attr(v)) for k, v in a.entries
                                  if not isinstance(v, LocAttr)))
        return a


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def _merge_attrs(op: Operation, r: _Resolver) -> DictAttr:
    entries: list[tuple[str, object]] = []
    seen: set[str] = set()
    for d in (op.properties, op.attributes):
        if d is None:
            continue
        for k, v in d.entries:
            if k in seen:
                raise DuplicateKey(f"attribute '{k}' given both as property "
                                   "and attribute", op=op.name, pos=op.pos)
            seen.add(k)
            if isinstance(v, LocAttr):
                continue
            entries.append((k, r.attr(v)))
    return DictAttr(tuple(entries))


def _normalize_region(region: Region, r: _Resolver) -> CanonRegion:
    blocks = tuple(
        CanonBlock(b.label, tuple((a.name, r.type(a.type)) for a in b.args),
                   tuple(_normalize(o, r) for o in b.ops))
        for b in region.blocks)
    return CanonRegion(blocks)


def _normalize(op: Operation, r: _Resolver) -> CanonOp:
    try:
        ft = r.type(op.func_type)
        attrs = _merge_attrs(op, r)
        regions = tuple(_normalize_region(reg, r) for reg in op.regions)
    except StaticError as e:
        raise e.located(op=op.name, pos=op.pos)
    result_ids = op.result_ids
    if len(result_ids) != len(ft.results):
        raise SignatureMismatch(f"{len(result_ids)} result ids but function type "
                            f"has {len(ft.results)} results", op=op.name,
                            pos=op.pos)
    if len(op.operands) != len(ft.inputs):
        raise SignatureMismatch(f"{len(op.operands)} operands but function type "
                            f"has {len(ft.inputs)} inputs", op=op.name,
                            pos=op.pos)
    return CanonOp(name=op.name, operands=tuple(u.id for u in op.operands),
                   attrs=attrs, regions=regions, result_ids=result_ids,
                   operand_types=ft.inputs, result_types=ft.results,
                   pos=op.pos)


def normalize(op: Operation, state: MlirState | None = None) -> CanonOp:
    """Canonical form of a single operation against ``state``'s aliases."""
    r = _Resolver({}, {})
    if state is not None:
        r.types = dict(state.types)
        r.attrs = dict(state.attrs)
    return _normalize(op, r)


def canonicalize(op: CanonOp) -> CanonOp:
    """Re-normalize a canonical op; the identity on canonical input."""
    entries = tuple((k, v) for k, v in op.attrs.entries
                    if not isinstance(v, LocAttr))
    regions = tuple(CanonRegion(tuple(CanonBlock(b.label, b.args,
                                                 tuple(map(canonicalize, b.ops)))
                                      for b in reg.blocks))
                    for reg in op.regions)
    return replace(op, attrs=DictAttr(entries), regions=regions)


# ---------------------------------------------------------------------------
# preprocessing
# ---------------------------------------------------------------------------


def preprocess(file: SourceFile) -> MlirState:
    state = MlirState(prog=list(file.items))
    type_defs: dict[str, object] = {}
    attr_defs: dict[str, object] = {}
    ops: list[Operation] = []
    # Assign Aliases
    while state.prog:
        item = state.prog.pop(0)
        if isinstance(item, TypeAliasDef):
            key = _key("!", item.name)
            if key in type_defs:
                raise DuplicateAlias(f"type alias {key} defined twice")
            type_defs[key] = item.type
        elif isinstance(item, AttrAliasDef):
            key = _key("#", item.name)
            if key in attr_defs:
                raise DuplicateAlias(f"attribute alias {key} defined twice")
            attr_defs[key] = item.value
        else:
            ops.append(item)
    r = _Resolver(type_defs, attr_defs)
    for k in type_defs:
        r.type_alias(k)
    for k in attr_defs:
        r.attr_alias(k)
    state.types = dict(r.types)
    state.attrs = dict(r.attrs)
    # Normalize Operations, then Construct Symbol Table
    _collect(state, [_normalize(op, r) for op in ops])
    state.phase = Phase.SIMULATION
    return state


def _collect(state: MlirState, ops) -> None:
    for op in ops:
        sym = op.symbol
        if sym is not None:
            if sym in state.table:
                raise DuplicateSymbol(f"symbol '{sym}' defined twice",
                                      op=op.name, pos=op.pos)
            state.table[sym] = op
        elif op.name == "builtin.module":
            for reg in op.regions:
                for block in reg.blocks:
                    _collect(state, block.ops)
        else:
            state.moved.append(op)


def rta(state: MlirState, alias: str):
    """Resolve a type alias such as ``!word``."""
    key = _key("!", alias)
    if key not in state.types:
        raise UnknownAlias(f"unknown type alias {key}")
    return state.types[key]


def raa(state: MlirState, alias: str):
    """Resolve an attribute alias such as ``#one``."""
    key = _key("#", alias)
    if key not in state.attrs:
        raise UnknownAlias(f"unknown attribute alias {key}")
    return state.attrs[key]


def rop(state: MlirState, symbol: str) -> CanonOp:
    """Look up a top-level operation by symbol, with or without ``@``."""
    sym = symbol[1:] if symbol.startswith("@") else symbol
    if sym not in state.table:
        raise UnknownSymbol(f"no operation with symbol '{sym}'")
    return state.table[sym]
