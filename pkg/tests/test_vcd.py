from __future__ import annotations

import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from circtsim.bits import BitVec4
from circtsim.errors import SinkError
from circtsim.vcd import VcdFormatError, VcdTrace, check_vcd, id_code, render, write_vcd


def reconstruct(text: str) -> dict[str, list[str]]:
    """Small independent reader: scopes, vars, then value changes."""
    names, scope, widths = {}, [], {}
    values, rows, started = {}, [], False
    for line in text.splitlines():
        w = line.split()
        if w[0] == "$scope":
            scope.append(w[2])
        elif w[0] == "$upscope":
            scope.pop()
        elif w[0] == "$var":
            names[w[3]] = ".".join(scope + [w[4]])
            widths[w[3]] = int(w[2])
        elif w[0].startswith("#"):
            if started:
                rows.append(dict(values))
            started = True
        elif w[0].startswith("b"):
            values[w[1]] = w[0][1:]
        elif w[0][0] in "01xz" and not w[0].startswith("$"):
            values[w[0][1:]] = w[0][0]
    if started:
        rows.append(dict(values))
    return {names[c]: [r[c] for r in rows] for c in names}


def test_id_codes_unique_and_printable():
    codes = [id_code(n) for n in range(20000)]
    assert len(set(codes)) == len(codes)
    assert all(33 <= ord(ch) <= 126 for c in codes for ch in c)
    assert codes[0] == "!"


def test_scalar_toggle():
    t = VcdTrace()
    for b in (0, 1):
        t.add_cycle({((), "clk"): BitVec4.from_int(b, 1)})
    text = render(t)
    body = text.split("$enddefinitions $end\n")[1].splitlines()
    assert body == ["#0", "$dumpvars", "0!", "$end", "#1", "1!"]
    assert text.startswith("$timescale 1ns $end\n")


def test_empty_trace():
    assert render(VcdTrace()) == "$timescale 1ns $end\n$enddefinitions $end\n"


def test_vector_x():
    t = VcdTrace()
    t.add_cycle({((), "v"): BitVec4.x(4)})
    assert "bxxxx !" in render(t).splitlines()


def test_only_changes_after_first():
    t = VcdTrace()
    for v in (3, 3, 4):
        t.add_cycle({(("top",), "a"): BitVec4.from_int(v, 4),
                     (("top",), "b"): BitVec4.from_int(1, 1)})
    lines = render(t).splitlines()
    i1, i2 = lines.index("#1"), lines.index("#2")
    assert lines[i1 + 1:i2] == []
    assert lines[i2 + 1:] == ["b0100 !"]


vals = st.integers(1, 9).flatmap(lambda w: st.lists(
    st.text("01xz", min_size=w, max_size=w), min_size=0, max_size=6))
scopes = st.lists(st.sampled_from(["top", "u0", "u1", "core"]), max_size=3)


@given(st.lists(st.tuples(scopes, st.sampled_from("abcde"), vals),
                max_size=6))
def test_reconstruction_matches(signals):
    t = VcdTrace()
    seen, n = set(), max((len(v) for *_, v in signals), default=0)
    rows = [dict() for _ in range(n)]
    for scope, name, series in signals:
        key = (tuple(scope), name)
        if key in seen or not series:
            continue
        seen.add(key)
        for k, s in enumerate(series):
            rows[k][key] = BitVec4.from_string(s)
        width = len(series[0])
        for k in range(len(series), n):
            rows[k][key] = BitVec4.x(width)
    for r in rows:
        t.add_cycle(r)
    text = render(t)
    assert check_vcd(text) == t.signals()
    if t.samples:
        assert reconstruct(text) == t.signals()


@pytest.mark.parametrize("bad", [
    "$timescale 1ns $end\n$scope module a $end\n$enddefinitions $end\n",
    "$timescale 1ns $end\n$enddefinitions $end\n#0\n$dumpvars\n0! \n$end\n",
    "$timescale 1ns $end\n$var wire 1 ! a $end\n$enddefinitions $end\n"
    "#1\n$dumpvars\n0!\n$end\n#0\n1!\n",
])
def test_checker_rejects(bad):
    with pytest.raises(VcdFormatError):
        check_vcd(bad)


def test_write_vcd_sinks(tmp_path):
    t = VcdTrace()
    t.add_cycle({((), "a"): BitVec4.from_int(1, 1)})
    buf = io.StringIO()
    write_vcd(t, buf)
    path = tmp_path / "w.vcd"
    write_vcd(t, str(path))
    assert path.read_text() == buf.getvalue() == render(t)
    with pytest.raises(SinkError):
        write_vcd(t, str(tmp_path / "missing" / "w.vcd"))
