from __future__ import annotations

import pytest

from circtsim.errors import (
    AliasCycle, DuplicateAlias, DuplicateKey, DuplicateSymbol, UnknownAlias,
    UnknownSymbol, UnresolvedAlias,
)
from circtsim.mlir import parse
from circtsim.mlir.syntax import FunctionType, IntegerAttr, IntegerType
from circtsim.static import (
    Phase, canonicalize, preprocess, raa, rop, rta,
)
from helpers import COUNTER


def pre(text):
    return preprocess(parse(text))


def test_counter_state():
    st = pre(COUNTER)
    assert st.types == {} and st.attrs == {}
    assert list(st.table) == ["Counter"]
    assert st.table["Counter"].name == "hw.module"
    assert st.phase is Phase.SIMULATION and st.prog == []
    assert rop(st, "Counter") is st.table["Counter"]


def test_type_alias_only():
    st = pre("!word = i32")
    assert st.types == {"!word": IntegerType(32)} and st.table == {}
    assert rta(st, "!word") == IntegerType(32)


def test_alias_substituted_into_function_type():
    st = pre('!a = i8\n%r = "t.op"(%x) {sym_name = "f"} : (!a) -> !a')
    assert st.table["f"].operand_types == (IntegerType(8),)
    assert st.table["f"].result_types == (IntegerType(8),)


def test_chained_aliases_resolve_transitively():
    st = pre("!a = i8\n!b = !a\n#z = 0 : i8\n#w = #z")
    assert rta(st, "!b") == IntegerType(8)
    assert raa(st, "#w") == IntegerAttr(0, IntegerType(8))


@pytest.mark.parametrize("fn,name", [(rta, "!missing"), (raa, "#missing")])
def test_missing_alias_lookup(fn, name):
    with pytest.raises(UnknownAlias):
        fn(pre(""), name)


def test_rop_unknown():
    with pytest.raises(UnknownSymbol):
        rop(pre(COUNTER), "")


def test_rop_independent_of_order():
    a = 'hw.module @A() {\n  hw.output\n}\n'
    b = 'hw.module @B(out o : i1) {\n  %t = hw.constant true\n  hw.output %t : i1\n}\n'
    assert rop(pre(a + b), "B") == rop(pre(b + a), "B")


@pytest.mark.parametrize("text,err", [
    ("!a = i1\n!a = i2", DuplicateAlias),
    ("#a = 1\n#a = 2", DuplicateAlias),
    ('"t.op"() : () -> !nope', UnresolvedAlias),
    ("!a = !b\n!b = !a", AliasCycle),
    ('"t.a"() {sym_name = "s"} : () -> ()\n"t.b"() {sym_name = "s"} : () -> ()',
     DuplicateSymbol),
    ('"t.op"() <{k = 1}> {k = 2} : () -> ()', DuplicateKey),
])
def test_static_errors(text, err):
    with pytest.raises(err):
        pre(text)


def test_properties_merge_into_attributes():
    st = pre('"t.op"() <{p = 1 : i8}> {sym_name = "x", q = 2 : i8} '
             ': () -> ()')
    assert sorted(st.table["x"].attrs.keys()) == ["p", "q", "sym_name"]


def test_alias_transparency():
    with_alias = ("!w = i8\n#one = 1 : i8\n"
                  'hw.module @M(in %a : !w, out o : !w) {\n'
                  '  %c = "hw.constant"() {value = #one} : () -> !w\n'
                  '  %s = comb.add %a, %c : !w\n  hw.output %s : !w\n}\n')
    inlined = ('hw.module @M(in %a : i8, out o : i8) {\n'
               '  %c = "hw.constant"() {value = 1 : i8} : () -> i8\n'
               '  %s = comb.add %a, %c : i8\n  hw.output %s : i8\n}\n')
    assert pre(with_alias).table == pre(inlined).table


def test_symbols_collected_up_to_the_next_symboled_op():
    inner = '"t.op"() {sym_name = "inner"} : () -> ()'
    assert set(pre(f"module @outer {{\n  {inner}\n}}").table) == {"outer"}
    assert set(pre(f"module {{\n  {inner}\n}}").table) == {"inner"}


def test_locations_removed_and_canonical_idempotent():
    st = pre(COUNTER)
    op = st.table["Counter"]
    assert canonicalize(op) == op


def test_unsymboled_top_level_ops_are_moved():
    st = pre('sv.macro.def @X "1"\n' + COUNTER)
    assert [op.name for op in st.moved] == ["sv.macro.def"]


def test_function_type_on_canonical_op():
    st = pre(COUNTER)
    add = [o for o in st.table["Counter"].regions[0].entry.ops
           if o.name == "comb.add"][0]
    assert add.operand_types == (IntegerType(8), IntegerType(8))
    assert FunctionType(add.operand_types, add.result_types) == \
        FunctionType((IntegerType(8),) * 2, (IntegerType(8),))
