from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circtsim.errors import ParseError
from circtsim.mlir import parse, print_file
from circtsim.mlir.syntax import (
    FunctionType, IntegerAttr, IntegerType, Operation, SourceFile, StringAttr,
    ValueUse,
)
from circtsim.static import preprocess
from helpers import COUNTER

CORPUS = Path(__file__).parent / "corpus"


def test_counter_listing():
    f = parse(COUNTER)
    assert len(f.items) == 1
    mod = f.items[0]
    assert isinstance(mod, Operation) and mod.name == "hw.module"
    assert len(mod.regions) == 1
    # two constants, the register, the add and the output
    assert len(mod.regions[0].entry_ops) == 5


def test_empty_file():
    assert parse("") == SourceFile(())
    assert print_file(SourceFile(())) == ""


def test_generic_add():
    (op,) = parse('%0 = "comb.add"(%a, %b) : (i8, i8) -> i8').items
    assert op.name == "comb.add"
    assert op.operands == (ValueUse("a"), ValueUse("b"))
    assert op.result_ids == ("0",)
    assert op.func_type == FunctionType((IntegerType(8),) * 2,
                                        (IntegerType(8),))


def test_custom_add_lowers_to_generic_shape():
    custom = parse("%0 = comb.add %a, %b : i8").items[0]
    generic = parse('%0 = "comb.add"(%a, %b) : (i8, i8) -> i8').items[0]
    assert (custom.name, custom.operands, custom.func_type) == \
        (generic.name, generic.operands, generic.func_type)


def test_result_groups_and_indices():
    (op,) = parse('%r:2 = "t.op"(%x#1) : (i1) -> (i1, i1)').items
    assert op.result_ids == ("r#0", "r#1")
    assert op.operands[0].id == "x#1"


def test_comments_are_whitespace():
    f = parse("// leading\n%c = hw.constant 1 : i2 // trailing\n")
    assert f.items[0].attributes.get("value") == IntegerAttr(1, IntegerType(2))


def test_hex_and_negative_integers():
    f = parse('"t.op"() {a = 0x1F : i8, b = -3 : i8} : () -> ()')
    attrs = f.items[0].attributes
    assert attrs.get("a").value == 31 and attrs.get("b").value == -3


def test_string_escapes_round_trip():
    f = parse(r'"t.op"() {s = "a\"b\\c\n"} : () -> ()')
    assert f.items[0].attributes.get("s") == StringAttr('a"b\\c\n')
    assert parse(print_file(f)) == f


def test_locations_do_not_change_structure_after_preprocess():
    a = preprocess(parse(COUNTER))
    b = preprocess(parse(COUNTER.replace(": i8\n", ': i8 loc("c.mlir":1:2)\n')))
    assert a.table == b.table


@pytest.mark.parametrize("text,line", [
    ("hw.module @T( {", 1),
    ('"t.op"() : () -> ()\n"t.op"(%a : () -> ()', 2),
    ("%x = \n\n  foo.bar", 3),
    ('"t.op"() {a = 1, a = 2} : () -> ()', 1),
])
def test_parse_errors_carry_positions(text, line):
    with pytest.raises(ParseError) as ei:
        parse(text)
    assert ei.value.line == line
    assert ei.value.column >= 1


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as ei:
        parse('"t.op"(')
    assert ei.value.expected


def _corpus_texts():
    out = []
    for f in sorted(CORPUS.glob("*.mlir")):
        try:
            parse(f.read_text())
        except ParseError:
            continue
        out.append(f)
    return out


@pytest.mark.parametrize("path", _corpus_texts(), ids=lambda p: p.stem)
def test_print_is_idempotent(path):
    once = print_file(parse(path.read_text()))
    assert print_file(parse(once)) == once


_ident = st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True)
_attr = st.recursive(
    st.one_of(st.integers(-1000, 1000).map(lambda v: f"{v} : i32"),
              st.text("abc xyz\"\\", max_size=6).map(
                  lambda s: '"' + s.replace("\\", "\\\\").replace('"', '\\"')
                  + '"'),
              st.just("unit"), st.sampled_from(["true", "false"]),
              _ident.map(lambda s: "@" + s)),
    lambda inner: st.one_of(
        st.lists(inner, max_size=3).map(lambda xs: "[" + ", ".join(xs) + "]"),
        st.dictionaries(_ident, inner, max_size=3).map(
            lambda d: "{" + ", ".join(f"{k} = {v}" for k, v in d.items())
            + "}")),
    max_leaves=6)


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(_ident, _attr, max_size=4),
       st.lists(_ident, max_size=3, unique=True))
def test_generated_ops_round_trip(attrs, operands):
    body = ", ".join(f"{k} = {v}" for k, v in attrs.items())
    uses = ", ".join("%" + o for o in operands)
    types = ", ".join("i4" for _ in operands)
    text = f'%r = "gen.op"({uses}) {{{body}}} : ({types}) -> i4\n'
    f = parse(text)
    assert parse(print_file(f)) == f
