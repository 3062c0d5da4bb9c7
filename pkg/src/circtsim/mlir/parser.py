"""Recursive-descent parser for generic MLIR.

The grammar is the generic operation form::

    toplevel   ::= (operation | type-alias-def | attr-alias-def)*
    operation  ::= (op-results '=')? str '(' value-uses? ')' ('[' successors ']')?
                   ('<' dict-prop '>')? ('(' regions ')')? ('{' dict-attr? '}')?
                   ':' func-type loc-attr?

Operations written in a dialect's custom assembly (``hw.module @M(...)``,
``%0 = comb.add %a, %b : i8``) are handed to the sub-grammars in
:mod:`circtsim.mlir.custom`, which lower them straight to the generic shape.
Builtin attributes follow upstream MLIR where the generic grammar is silent.
"""

from __future__ import annotations

import re

from ..errors import ParseError
from . import lexer as L
from .syntax import (
    ArrayAttr, ArrayType, AttrAliasDef, AttrAliasRef, Block, BlockArg,
    BoolAttr, ClockType, DialectAttr, DictAttr, EnumType, FirMemType,
    FloatAttr, FunctionType, InOutType, IntegerAttr, IntegerType, LocAttr,
    ModulePort, ModuleType, NamedBuiltinType, OpaqueType, Operation, OpResult,
    Region, SourceFile, StringAttr, StructType, Successor, SymbolRefAttr,
    TypeAliasDef, TypeAliasRef, TypeAttr, UnionType, UnitAttr, ValueUse,
)

PRODUCTIONS = frozenset({
    "toplevel", "operation", "op-results", "op-result-count", "value-uses",
    "value-use-index", "successors", "successor-args", "dict-prop", "regions",
    "region", "block", "block-label-args", "block-args", "type-alias-def",
    "attr-alias-def", "func-type-single", "func-type-list", "types",
    "type-alias", "dialect-type", "builtin-type", "attr-alias",
    "dialect-attr", "builtin-attr", "dict-attr", "attr-entry-id",
    "attr-entry-str", "loc-attr",
})

_INT_TYPE = re.compile(r"i([0-9]+)")
_NAMED_BUILTINS = {"index", "none", "f16", "f32", "f64", "bf16"}
_HW_SHORTHAND = {"array", "struct", "union", "enum", "inout", "uarray"}


class Parser:
    def __init__(self, text: str, trace: set[str] | None = None):
        self.lex = L.Lexer(text)
        self.trace = trace

    # -- small helpers ---------------------------------------------------------

    def hit(self, production: str) -> None:
        if self.trace is not None:
            self.trace.add(production)

    def peek(self) -> L.Token:
        return self.lex.peek()

    def next(self) -> L.Token:
        return self.lex.next()

    def error(self, message: str, tok: L.Token | None = None,
              expected=()) -> ParseError:
        tok = tok or self.peek()
        return self.lex.error(message, tok.start, expected)

    def at_punct(self, p: str) -> bool:
        return self.peek().is_punct(p)

    def accept_punct(self, p: str) -> bool:
        if self.at_punct(p):
            self.next()
            return True
        return False

    def expect_punct(self, p: str) -> L.Token:
        tok = self.peek()
        if not tok.is_punct(p):
            raise self.error(f"expected '{p}'", tok, {f"'{p}'"})
        return self.next()

    def at_bare(self, word: str) -> bool:
        return self.peek().is_bare(word)

    def accept_bare(self, word: str) -> bool:
        if self.at_bare(word):
            self.next()
            return True
        return False

    def expect_bare(self, word: str | None = None) -> str:
        tok = self.peek()
        if tok.kind != L.BARE or (word is not None and tok.text != word):
            want = f"'{word}'" if word else "identifier"
            raise self.error(f"expected {want}", tok, {want})
        return self.next().text

    def expect_kind(self, kind: str, what: str) -> L.Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.error(f"expected {what}", tok, {what})
        return self.next()

    def expect_int(self) -> int:
        neg = self.accept_punct("-")
        tok = self.expect_kind(L.INT, "integer")
        value = int(tok.text, 0)
        return -value if neg else value

    def expect_string(self) -> str:
        return self.expect_kind(L.STRING, "string literal").text

    def expect_symbol(self) -> str:
        return self.expect_kind(L.SYMBOL, "symbol").text

    def comma_list(self, item, close: str) -> list:
        """Parse ``item (',' item)*`` up to (not including) ``close``; empty
        lists are allowed."""
        out = []
        if self.at_punct(close):
            return out
        out.append(item())
        while self.accept_punct(","):
            out.append(item())
        return out

    def expect_dim_x(self) -> None:
        """Consume the ``x`` separating dimensions in ``4xi8`` / ``4 x 8``."""
        tok = self.peek()
        if tok.kind == L.BARE and tok.text.startswith("x"):
            if tok.text == "x":
                self.next()
            else:
                self.lex.reset(tok.start + 1)
            return
        raise self.error("expected 'x' in dimension list", tok, {"'x'"})

    # -- top level -------------------------------------------------------------

    def parse_file(self) -> SourceFile:
        self.hit("toplevel")
        items = []
        while self.peek().kind != L.EOF:
            tok = self.peek()
            if tok.kind == L.BANG_ID:
                items.append(self.parse_type_alias_def())
            elif tok.kind == L.HASH_ID:
                items.append(self.parse_attr_alias_def())
            else:
                items.append(self.parse_operation())
        return SourceFile(tuple(items))

    def parse_type_alias_def(self) -> TypeAliasDef:
        self.hit("type-alias-def")
        name = self.next().text
        self.expect_punct("=")
        return TypeAliasDef(name, self.parse_type())

    def parse_attr_alias_def(self) -> AttrAliasDef:
        self.hit("attr-alias-def")
        name = self.next().text
        self.expect_punct("=")
        return AttrAliasDef(name, self.parse_attr())

    # -- operations ------------------------------------------------------------

    def parse_op_results(self) -> tuple[OpResult, ...]:
        results = []
        while True:
            tok = self.expect_kind(L.VALUE_ID, "result name")
            if "#" in tok.text:
                raise self.error("result names may not carry '#'", tok)
            count = None
            if self.accept_punct(":"):
                self.hit("op-result-count")
                count = self.expect_int()
            results.append(OpResult(tok.text, count))
            if not self.accept_punct(","):
                break
        self.hit("op-results")
        self.expect_punct("=")
        return tuple(results)

    def parse_operation(self) -> Operation:
        self.hit("operation")
        start = self.peek()
        pos = self.lex.line_col(start.start)
        results: tuple[OpResult, ...] = ()
        if start.kind == L.VALUE_ID:
            results = self.parse_op_results()
        tok = self.peek()
        if tok.kind == L.STRING:
            self.next()
            return self.parse_generic_body(tok.text, results, pos)
        if tok.kind == L.BARE:
            from .custom import CUSTOM_PARSERS
            name = tok.text
            fn = CUSTOM_PARSERS.get(name)
            if fn is None:
                raise self.error(f"unknown custom operation '{name}'", tok)
            self.next()
            fields = fn(self, results)
            loc = self.parse_optional_loc()
            fields.setdefault("name", name)
            return Operation(results=results, loc=loc, pos=pos, **fields)
        raise self.error("expected operation", tok,
                         {"operation name", "result list"})

    def parse_generic_body(self, name: str, results, pos) -> Operation:
        if not name:
            raise self.error("empty operation name")
        self.expect_punct("(")
        operands = self.parse_value_uses(")")
        self.expect_punct(")")
        successors: tuple[Successor, ...] = ()
        if self.accept_punct("["):
            self.hit("successors")
            successors = tuple(self.comma_list(self.parse_successor, "]"))
            self.expect_punct("]")
        properties = None
        if self.accept_punct("<"):
            self.hit("dict-prop")
            if self.at_punct("{"):
                properties = self.parse_attr_dict()
            else:
                properties = self.parse_attr_entries(">")
            self.expect_punct(">")
        regions: tuple[Region, ...] = ()
        if self.accept_punct("("):
            self.hit("regions")
            regions = tuple(self.comma_list(self.parse_region, ")"))
            self.expect_punct(")")
        attributes = None
        if self.at_punct("{"):
            attributes = self.parse_attr_dict()
        self.expect_punct(":")
        func_type = self.parse_function_type()
        loc = self.parse_optional_loc()
        return Operation(name=name, results=results, operands=operands,
                         successors=successors, properties=properties,
                         regions=regions, attributes=attributes,
                         func_type=func_type, loc=loc, pos=pos)

    def parse_value_use(self) -> ValueUse:
        tok = self.expect_kind(L.VALUE_ID, "value use")
        name, sep, idx = tok.text.partition("#")
        if sep:
            self.hit("value-use-index")
            return ValueUse(name, int(idx))
        return ValueUse(name)

    def parse_value_uses(self, close: str) -> tuple[ValueUse, ...]:
        uses = self.comma_list(self.parse_value_use, close)
        if uses:
            self.hit("value-uses")
        return tuple(uses)

    def parse_successor(self) -> Successor:
        label = self.expect_kind(L.BLOCK_ID, "block label").text
        args = None
        if self.accept_punct(":"):
            self.hit("successor-args")
            self.expect_punct("(")
            args = self.parse_block_args()
            self.expect_punct(")")
        return Successor(label, args)

    def parse_optional_loc(self) -> LocAttr | None:
        if self.at_bare("loc"):
            return self.parse_loc()
        return None

    def parse_loc(self) -> LocAttr:
        self.hit("loc-attr")
        self.expect_bare("loc")
        self.expect_punct("(")
        return LocAttr(self.lex.raw_balanced("(", ")"))

    # -- regions ---------------------------------------------------------------

    def parse_region(self) -> Region:
        self.hit("region")
        self.expect_punct("{")
        blocks = []
        if not self.at_punct("}") and self.peek().kind != L.BLOCK_ID:
            ops = self.parse_block_ops()
            blocks.append(Block(None, (), ops))
        while self.peek().kind == L.BLOCK_ID:
            blocks.append(self.parse_block())
        self.expect_punct("}")
        return Region(tuple(blocks))

    def parse_block(self) -> Block:
        self.hit("block")
        label = self.next().text
        args: tuple[BlockArg, ...] = ()
        if self.accept_punct("("):
            self.hit("block-label-args")
            args = self.parse_block_args()
            self.expect_punct(")")
        self.expect_punct(":")
        return Block(label, args, self.parse_block_ops())

    def parse_block_ops(self) -> tuple[Operation, ...]:
        ops = []
        while not self.at_punct("}") and self.peek().kind not in (
                L.BLOCK_ID, L.EOF):
            ops.append(self.parse_operation())
        return tuple(ops)

    def parse_block_args(self) -> tuple[BlockArg, ...]:
        def arg():
            name = self.expect_kind(L.VALUE_ID, "block argument").text
            self.expect_punct(":")
            ty = self.parse_type()
            self.parse_optional_loc()
            return BlockArg(name, ty)

        args = tuple(self.comma_list(arg, ")"))
        if args:
            self.hit("block-args")
        return args

    # -- types -----------------------------------------------------------------

    def parse_function_type(self) -> FunctionType:
        if self.at_punct("("):
            self.hit("func-type-list")
            self.next()
            inputs = self.parse_types(")")
            self.expect_punct(")")
        else:
            self.hit("func-type-single")
            inputs = (self.parse_type(),)
        self.expect_punct("->")
        return FunctionType(tuple(inputs), self.parse_result_types())

    def parse_result_types(self) -> tuple:
        if self.at_punct("("):
            # `(i8) -> i8` as a single function-typed result is not used by
            # any in-scope op; parenthesised means a result list.
            self.next()
            res = self.parse_types(")")
            self.expect_punct(")")
            if self.at_punct("->"):
                self.next()
                return (FunctionType(tuple(res), self.parse_result_types()),)
            return tuple(res)
        return (self.parse_type(),)

    def parse_types(self, close: str) -> tuple:
        types = self.comma_list(self.parse_type, close)
        if types:
            self.hit("types")
        return tuple(types)

    def parse_type(self):
        tok = self.peek()
        if tok.kind == L.BARE:
            m = _INT_TYPE.fullmatch(tok.text)
            if m:
                self.hit("builtin-type")
                self.next()
                return IntegerType(int(m.group(1)))
            if tok.text in _NAMED_BUILTINS or re.fullmatch(r"[su]i[0-9]+",
                                                           tok.text):
                self.hit("builtin-type")
                self.next()
                return NamedBuiltinType(tok.text)
            if tok.text in _HW_SHORTHAND:
                self.next()
                return self.parse_hw_type("hw." + tok.text, tok)
            raise self.error(f"unknown type '{tok.text}'", tok)
        if tok.is_punct("("):
            self.hit("builtin-type")
            self.next()
            inputs = self.parse_types(")")
            self.expect_punct(")")
            self.expect_punct("->")
            return FunctionType(inputs, self.parse_result_types())
        if tok.kind == L.BANG_ID:
            self.next()
            name = tok.text
            if name.startswith(("hw.", "seq.")):
                return self.parse_hw_type(name, tok)
            followed = self.lex.text[tok.end:tok.end + 1] == "<"
            if "." in name or followed:
                self.hit("dialect-type")
                body = None
                if followed:
                    self.expect_punct("<")
                    body = self.lex.raw_balanced("<", ">")
                return OpaqueType(name, body)
            self.hit("type-alias")
            return TypeAliasRef(name)
        raise self.error("expected type", tok, {"type"})

    def parse_hw_type(self, name: str, tok: L.Token):
        self.hit("dialect-type")
        if name == "seq.clock":
            return ClockType()
        self.expect_punct("<")
        if name == "hw.array":
            size = self.expect_int()
            self.expect_dim_x()
            elem = self.parse_type()
            self.expect_punct(">")
            return ArrayType(size, elem)
        if name in ("hw.struct", "hw.union"):
            fields = self.comma_list(self.parse_named_field, ">")
            self.expect_punct(">")
            cls = StructType if name == "hw.struct" else UnionType
            return cls(tuple(fields))
        if name == "hw.enum":
            fields = self.comma_list(lambda: self.expect_bare(), ">")
            self.expect_punct(">")
            return EnumType(tuple(fields))
        if name == "hw.inout":
            elem = self.parse_type()
            self.expect_punct(">")
            return InOutType(elem)
        if name == "hw.modty":
            ports = self.comma_list(self.parse_module_port, ">")
            self.expect_punct(">")
            return ModuleType(tuple(ports))
        if name == "seq.firmem":
            depth = self.expect_int()
            self.expect_dim_x()
            width = self.expect_int()
            mask = None
            if self.accept_punct(","):
                self.expect_bare("mask")
                mask = self.expect_int()
            self.expect_punct(">")
            return FirMemType(depth, width, mask)
        body = self.lex.raw_balanced("<", ">")
        return OpaqueType(name, body)

    def parse_named_field(self) -> tuple[str, object]:
        tok = self.peek()
        if tok.kind == L.STRING:
            fname = self.next().text
        else:
            fname = self.expect_bare()
        self.expect_punct(":")
        return fname, self.parse_type()

    def parse_module_port(self) -> ModulePort:
        direction = self.expect_bare()
        if direction not in ("input", "output", "inout"):
            raise self.error(f"bad port direction '{direction}'")
        tok = self.peek()
        pname = self.next().text if tok.kind == L.STRING else self.expect_bare()
        self.expect_punct(":")
        return ModulePort(direction, pname, self.parse_type())

    # -- attributes ------------------------------------------------------------

    def parse_attr_dict(self) -> DictAttr:
        self.expect_punct("{")
        d = self.parse_attr_entries("}")
        self.expect_punct("}")
        return d

    def parse_attr_entries(self, close: str) -> DictAttr:
        entries: list[tuple[str, object]] = []
        seen: set[str] = set()

        def entry():
            tok = self.peek()
            if tok.kind == L.STRING:
                self.hit("attr-entry-str")
            elif tok.kind == L.BARE:
                self.hit("attr-entry-id")
            else:
                raise self.error("expected attribute name", tok,
                                 {"identifier", "string"})
            self.next()
            if tok.text in seen:
                raise self.error(f"duplicate attribute key '{tok.text}'", tok)
            seen.add(tok.text)
            value = UnitAttr()
            if self.accept_punct("="):
                value = self.parse_attr()
            entries.append((tok.text, value))

        self.comma_list(entry, close)
        if entries:
            self.hit("dict-attr")
        return DictAttr(tuple(entries))

    def parse_attr(self):
        tok = self.peek()
        if tok.kind == L.HASH_ID:
            self.next()
            if self.lex.text[tok.end:tok.end + 1] == "<":
                self.hit("dialect-attr")
                self.expect_punct("<")
                return DialectAttr(tok.text, self.lex.raw_balanced("<", ">"))
            self.hit("attr-alias")
            return AttrAliasRef(tok.text)
        if tok.kind in (L.INT, L.FLOAT) or tok.is_punct("-"):
            self.hit("builtin-attr")
            neg = self.accept_punct("-")
            num = self.next()
            if num.kind == L.FLOAT:
                text = ("-" if neg else "") + num.text
                return FloatAttr(text, self.parse_optional_attr_type())
            if num.kind != L.INT:
                raise self.error("expected number", num)
            value = int(num.text, 0)
            return IntegerAttr(-value if neg else value,
                               self.parse_optional_attr_type())
        if tok.kind == L.STRING:
            self.hit("builtin-attr")
            self.next()
            return StringAttr(tok.text)
        if tok.kind == L.SYMBOL:
            self.hit("builtin-attr")
            return self.parse_symbol_ref()
        if tok.is_punct("["):
            self.hit("builtin-attr")
            self.next()
            items = self.comma_list(self.parse_attr, "]")
            self.expect_punct("]")
            return ArrayAttr(tuple(items))
        if tok.is_punct("{"):
            self.hit("builtin-attr")
            return self.parse_attr_dict()
        if tok.kind == L.BARE:
            if tok.text in ("true", "false"):
                self.hit("builtin-attr")
                self.next()
                return BoolAttr(tok.text == "true")
            if tok.text == "unit":
                self.hit("builtin-attr")
                self.next()
                return UnitAttr()
            if tok.text == "loc":
                return self.parse_loc()
        self.hit("builtin-attr")
        return TypeAttr(self.parse_type())

    def parse_optional_attr_type(self):
        if self.accept_punct(":"):
            return self.parse_type()
        return None

    def parse_symbol_ref(self) -> SymbolRefAttr:
        root = self.expect_symbol()
        nested = []
        while self.accept_punct("::"):
            nested.append(self.expect_symbol())
        return SymbolRefAttr(root, tuple(nested))


def parse(text: str, trace: set[str] | None = None) -> SourceFile:
    """Parse MLIR source text into a :class:`SourceFile`."""
    return Parser(text, trace).parse_file()
