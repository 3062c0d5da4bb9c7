from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circtsim.bits import BitVec4
from circtsim.errors import StimulusError
from circtsim.stimulus import Stimulus, cycle_inputs, load_stimulus, parse_literal


@pytest.mark.parametrize("lit,width,expect", [
    ("0", 1, "0"), ("1", 1, "1"), (5, 4, "0101"), ("12", 4, "1100"),
    ("0x1f", 8, "00011111"), ("0b101", 3, "101"), ("x", 3, "xxx"),
    ("Z", 2, "zz"), ("1_000", 12, format(1000, "012b")), (-1, 4, "1111"),
])
def test_literals(lit, width, expect):
    assert parse_literal(lit, width).to_string() == expect


@pytest.mark.parametrize("lit,width", [
    ("16", 4), (True, 1), ("abc", 4), (1.5, 4), (-9, 4), ("0x", 4)])
def test_bad_literals(lit, width):
    with pytest.raises(StimulusError):
        parse_literal(lit, width)


@given(st.integers(1, 64).flatmap(
    lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1))))
def test_literal_forms_agree(wv):
    w, v = wv
    a = parse_literal(v, w)
    assert a == parse_literal(str(v), w) == parse_literal(hex(v), w) \
        == parse_literal(bin(v), w) == BitVec4.from_int(v, w)


def test_load_stimulus():
    doc = {"top": "T", "cycles": [{"a": 1}], "record": ["a"], "maxEvalSteps": 9}
    s = load_stimulus(json.dumps(doc))
    assert s == Stimulus("T", [{"a": 1}], ["a"], 9)
    assert load_stimulus("{}") == Stimulus()


@pytest.mark.parametrize("text", [
    "[", "[]", '{"bogus": 1}', '{"top": 3}', '{"cycles": [1]}',
    '{"record": [1]}', '{"maxEvalSteps": 0}'])
def test_load_rejects(text):
    with pytest.raises(StimulusError):
        load_stimulus(text)


def test_hold_rule():
    stim = Stimulus("T", [{"a": 1}, {"b": 2}, {}, {"a": "x"}])
    rows = cycle_inputs(stim, [("a", 1), ("b", 4)])
    assert [(r["a"].to_string(), r["b"].to_string()) for r in rows] == [
        ("1", "xxxx"), ("1", "0010"), ("1", "0010"), ("x", "0010")]


def test_unknown_port():
    with pytest.raises(StimulusError):
        cycle_inputs(Stimulus("T", [{"c": 1}]), [("a", 1)])


@given(st.lists(st.dictionaries(st.sampled_from("ab"), st.integers(0, 15)),
                max_size=10))
def test_hold_property(cycles):
    rows = cycle_inputs(Stimulus("T", cycles), [("a", 4), ("b", 4)])
    for k, rec in enumerate(cycles):
        for port in "ab":
            if port in rec:
                assert rows[k][port].aval == rec[port]
            elif k:
                assert rows[k][port] == rows[k - 1][port]
            else:
                assert rows[k][port] == BitVec4.x(4)
