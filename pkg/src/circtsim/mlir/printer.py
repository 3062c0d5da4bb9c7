"""Generic-form printer.  ``parse(print_file(f)) == f`` for any parsed file."""

from __future__ import annotations

import re

from .syntax import (
    ArrayAttr, ArrayType, AttrAliasDef, AttrAliasRef, Block, BoolAttr,
    ClockType, DialectAttr, DictAttr, EnumType, FirMemType, FloatAttr,
    FunctionType, InOutType, IntegerAttr, IntegerType, LocAttr, ModuleType,
    NamedBuiltinType, OpaqueType, Operation, Region, SourceFile, StringAttr,
    StructType, SymbolRefAttr, TypeAliasDef, TypeAliasRef, TypeAttr,
    UnionType, UnitAttr,
)

_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_$.]*")
_SUFFIX = re.compile(r"[A-Za-z0-9_$.\-]+")
_KEYWORDS = {"true", "false", "unit", "loc"}


def quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\{ord(ch):02X}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _name(s: str) -> str:
    return s if _BARE.fullmatch(s) and s not in _KEYWORDS else quote(s)


def _symbol(s: str) -> str:
    return "@" + s if _SUFFIX.fullmatch(s) else "@" + quote(s)


def print_type(t) -> str:
    if isinstance(t, IntegerType):
        return f"i{t.width}"
    if isinstance(t, NamedBuiltinType):
        return t.name
    if isinstance(t, FunctionType):
        return print_function_type(t)
    if isinstance(t, TypeAliasRef):
        return "!" + t.name
    if isinstance(t, ClockType):
        return "!seq.clock"
    if isinstance(t, ArrayType):
        return f"!hw.array<{t.size}x{print_type(t.element)}>"
    if isinstance(t, (StructType, UnionType)):
        kind = "struct" if isinstance(t, StructType) else "union"
        body = ", ".join(f"{_name(n)}: {print_type(ft)}" for n, ft in t.fields)
        return f"!hw.{kind}<{body}>"
    if isinstance(t, EnumType):
        return f"!hw.enum<{', '.join(t.fields)}>"
    if isinstance(t, InOutType):
        return f"!hw.inout<{print_type(t.element)}>"
    if isinstance(t, ModuleType):
        body = ", ".join(f"{p.direction} {_name(p.name)} : {print_type(p.type)}"
                         for p in t.ports)
        return f"!hw.modty<{body}>"
    if isinstance(t, FirMemType):
        mask = f", mask {t.mask_width}" if t.mask_width is not None else ""
        return f"!seq.firmem<{t.depth} x {t.width}{mask}>"
    if isinstance(t, OpaqueType):
        return f"!{t.name}" + (f"<{t.body}>" if t.body is not None else "")
    raise TypeError(f"cannot print type {t!r}")


def print_function_type(ft: FunctionType) -> str:
    ins = ", ".join(print_type(t) for t in ft.inputs)
    res = ft.results
    if len(res) == 1 and not isinstance(res[0], FunctionType):
        out = print_type(res[0])
    else:
        out = "(" + ", ".join(print_type(t) for t in res) + ")"
    return f"({ins}) -> {out}"


def print_attr(a) -> str:
    if isinstance(a, IntegerAttr):
        return str(a.value) + (f" : {print_type(a.type)}" if a.type else "")
    if isinstance(a, FloatAttr):
        return a.text + (f" : {print_type(a.type)}" if a.type else "")
    if isinstance(a, BoolAttr):
        return "true" if a.value else "false"
    if isinstance(a, StringAttr):
        return quote(a.value)
    if isinstance(a, ArrayAttr):
        return "[" + ", ".join(print_attr(x) for x in a.items) + "]"
    if isinstance(a, DictAttr):
        return print_attr_dict(a)
    if isinstance(a, SymbolRefAttr):
        return "::".join(_symbol(s) for s in (a.root,) + a.nested)
    if isinstance(a, UnitAttr):
        return "unit"
    if isinstance(a, TypeAttr):
        return print_type(a.type)
    if isinstance(a, AttrAliasRef):
        return "#" + a.name
    if isinstance(a, DialectAttr):
        return f"#{a.name}<{a.body or ''}>"
    if isinstance(a, LocAttr):
        return f"loc({a.body})"
    raise TypeError(f"cannot print attribute {a!r}")


def _entries(d: DictAttr) -> str:
    parts = []
    for k, v in d.entries:
        key = _name(k)
        parts.append(key if isinstance(v, UnitAttr) else f"{key} = {print_attr(v)}")
    return ", ".join(parts)


def print_attr_dict(d: DictAttr) -> str:
    return "{" + _entries(d) + "}"


def _block_args(args) -> str:
    return ", ".join(f"%{a.name}: {print_type(a.type)}" for a in args)


class _Printer:
    def __init__(self, indent: str = "  "):
        self.lines: list[str] = []
        self.unit = indent

    def op(self, op: Operation, depth: int) -> None:
        pad = self.unit * depth
        head = ""
        if op.results:
            head = ", ".join(f"%{r.name}" + (f":{r.count}" if r.count is not None
                                              else "") for r in op.results)
            head += " = "
        text = f"{pad}{head}{quote(op.name)}("
        text += ", ".join("%" + u.id for u in op.operands) + ")"
        if op.successors:
            succ = []
            for s in op.successors:
                item = "^" + s.label
                if s.args is not None:
                    item += f":({_block_args(s.args)})"
                succ.append(item)
            text += " [" + ", ".join(succ) + "]"
        if op.properties is not None:
            text += " <" + print_attr_dict(op.properties) + ">"
        tail = ""
        if op.attributes is not None:
            tail += " " + print_attr_dict(op.attributes)
        tail += " : " + print_function_type(op.func_type)
        if op.loc is not None:
            tail += " " + print_attr(op.loc)
        if not op.regions:
            self.lines.append(text + tail)
            return
        text += " ("
        for i, region in enumerate(op.regions):
            text += "{"
            self.lines.append(text)
            self.region(region, depth + 1)
            text = pad + "}" + (", " if i + 1 < len(op.regions) else "")
        self.lines.append(text + ")" + tail)

    def region(self, region: Region, depth: int) -> None:
        for block in region.blocks:
            self.block(block, depth)

    def block(self, block: Block, depth: int) -> None:
        if block.label is not None:
            label = "^" + block.label
            if block.args:
                label += f"({_block_args(block.args)})"
            self.lines.append(self.unit * (depth - 1) + label + ":")
        for op in block.ops:
            self.op(op, depth)


def print_op(op: Operation, indent: int = 0) -> str:
    p = _Printer()
    p.op(op, indent)
    return "\n".join(p.lines)


def print_file(f: SourceFile) -> str:
    p = _Printer()
    for item in f.items:
        if isinstance(item, TypeAliasDef):
            p.lines.append(f"!{item.name} = {print_type(item.type)}")
        elif isinstance(item, AttrAliasDef):
            p.lines.append(f"#{item.name} = {print_attr(item.value)}")
        else:
            p.op(item, 0)
    return "\n".join(p.lines) + ("\n" if p.lines else "")
