"""Value Change Dump output, plus a checker that reads it back.

One timestamp per simulated cycle.  The first timestamp carries a full
``$dumpvars`` section; later ones list only the signals that changed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .bits import BitVec4
from .errors import SinkError

_FIRST_CODE, _LAST_CODE = 33, 126


def id_code(n: int) -> str:
    """Short identifier ``n`` over the printable range ``!`` .. ``~``."""
    base = _LAST_CODE - _FIRST_CODE + 1
    chars = []
    while True:
        chars.append(chr(_FIRST_CODE + n % base))
        n //= base
        if n == 0:
            break
        n -= 1
    return "".join(chars)


@dataclass
class VcdVar:
    scope: tuple[str, ...]
    name: str
    width: int
    code: str = ""


@dataclass
class VcdTrace:
    timescale: str = "1ns"
    vars: list[VcdVar] = field(default_factory=list)
    # one entry per cycle: var index -> value
    samples: list[dict[int, BitVec4]] = field(default_factory=list)
    _index: dict[tuple, int] = field(default_factory=dict, repr=False)

    def var(self, scope: tuple[str, ...], name: str, width: int) -> int:
        key = (scope, name)
        i = self._index.get(key)
        if i is None:
            i = len(self.vars)
            self.vars.append(VcdVar(scope, name, width, id_code(i)))
            self._index[key] = i
        elif self.vars[i].width != width:
            raise ValueError(f"signal {'.'.join(scope + (name,))} changed "
                             "width")
        return i

    def add_cycle(self, values: dict[tuple[tuple[str, ...], str], BitVec4]):
        sample = {}
        for (scope, name), v in values.items():
            sample[self.var(scope, name, v.width)] = v
        self.samples.append(sample)

    def value(self, i: int, t: int) -> BitVec4:
        v = self.samples[t].get(i)
        return v if v is not None else BitVec4.x(self.vars[i].width)

    def signals(self) -> dict[str, list[str]]:
        """Per-signal value strings per cycle, keyed by dotted path."""
        return {".".join(v.scope + (v.name,)):
                [self.value(i, t).to_string() for t in range(len(self.samples))]
                for i, v in enumerate(self.vars)}


def _change(v: BitVec4, code: str) -> str:
    if v.width == 1:
        return f"{v.to_string()}{code}"
    return f"b{v.to_string()} {code}"


def render(trace: VcdTrace) -> str:
    lines = [f"$timescale {trace.timescale} $end"]
    order = sorted(range(len(trace.vars)), key=lambda i: trace.vars[i].scope)
    current: tuple[str, ...] = ()
    for i in order:
        v = trace.vars[i]
        common = 0
        while (common < len(current) and common < len(v.scope)
               and current[common] == v.scope[common]):
            common += 1
        lines += ["$upscope $end"] * (len(current) - common)
        lines += [f"$scope module {s} $end" for s in v.scope[common:]]
        current = v.scope
        lines.append(f"$var wire {v.width} {v.code} {v.name} $end")
    lines += ["$upscope $end"] * len(current)
    lines.append("$enddefinitions $end")
    prev: dict[int, str] = {}
    for t in range(len(trace.samples)):
        lines.append(f"#{t}")
        changes = []
        for i, var in enumerate(trace.vars):
            s = trace.value(i, t).to_string()
            if prev.get(i) != s:
                changes.append(_change(trace.value(i, t), var.code))
                prev[i] = s
        if t == 0:
            lines += ["$dumpvars"] + changes + ["$end"]
        else:
            lines += changes
    return "\n".join(lines) + "\n"


def write_vcd(trace: VcdTrace, sink) -> None:
    text = render(trace)
    try:
        if isinstance(sink, str):
            with open(sink, "w") as f:
                f.write(text)
        else:
            sink.write(text)
    except OSError as e:
        raise SinkError(f"cannot write VCD: {e}") from None


# ---------------------------------------------------------------------------
# reading back
# ---------------------------------------------------------------------------

_VALUE_RE = re.compile(r"^([01xz])(\S+)$")
_VECTOR_RE = re.compile(r"^b([01xz]+)$")


class VcdFormatError(ValueError):
    pass


def check_vcd(text: str) -> dict[str, list[str]]:
    """Validate the emitted subset and rebuild every signal's per-timestamp
    values (MSB-first strings), keyed by dotted scope path."""
    toks = text.split()
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(toks):
            raise VcdFormatError("unexpected end of file")
        pos += 1
        return toks[pos - 1]

    def expect(word: str) -> None:
        got = take()
        if got != word:
            raise VcdFormatError(f"expected {word!r}, got {got!r}")

    expect("$timescale")
    take()
    expect("$end")
    scope: list[str] = []
    codes: dict[str, tuple[str, int]] = {}
    while True:
        tok = take()
        if tok == "$scope":
            expect("module")
            scope.append(take())
            expect("$end")
        elif tok == "$upscope":
            expect("$end")
            if not scope:
                raise VcdFormatError("unbalanced $upscope")
            scope.pop()
        elif tok == "$var":
            expect("wire")
            width = int(take())
            code = take()
            name = take()
            expect("$end")
            if code in codes:
                raise VcdFormatError(f"duplicate id {code!r}")
            if width < 1:
                raise VcdFormatError(f"bad width for {name}")
            codes[code] = (".".join(scope + [name]), width)
        elif tok == "$enddefinitions":
            expect("$end")
            break
        else:
            raise VcdFormatError(f"unexpected {tok!r} in header")
    if scope:
        raise VcdFormatError("unclosed $scope")
    current: dict[str, str] = {}
    series: dict[str, list[str]] = {name: [] for name, _ in codes.values()}
    t = -1
    in_dump = False

    def close_step():
        if t < 0:
            return
        if t == 0 and set(current) != set(codes):
            raise VcdFormatError("initial dump does not cover every signal")
        for code, (name, _) in codes.items():
            series[name].append(current.get(code, ""))

    while pos < len(toks):
        tok = take()
        if tok.startswith("#"):
            if in_dump:
                raise VcdFormatError("timestamp inside $dumpvars")
            nt = int(tok[1:])
            if nt <= t:
                raise VcdFormatError(f"timestamp {nt} is not increasing")
            close_step()
            for _ in range(t + 1, nt):
                for code, (name, _) in codes.items():
                    series[name].append(current.get(code, ""))
            t = nt
            continue
        if t < 0:
            raise VcdFormatError(f"value change {tok!r} before a timestamp")
        if tok == "$dumpvars":
            if t != 0:
                raise VcdFormatError("$dumpvars after #0")
            in_dump = True
            continue
        if tok == "$end" and in_dump:
            in_dump = False
            continue
        m = _VECTOR_RE.match(tok)
        if m:
            code = take()
            if code not in codes:
                raise VcdFormatError(f"undeclared id {code!r}")
            if len(m.group(1)) != codes[code][1]:
                raise VcdFormatError(f"width mismatch for {code!r}")
            current[code] = m.group(1)
            continue
        m = _VALUE_RE.match(tok)
        if m:
            code = m.group(2)
            if code not in codes:
                raise VcdFormatError(f"undeclared id {code!r}")
            if codes[code][1] != 1:
                raise VcdFormatError(f"scalar change for vector {code!r}")
            current[code] = m.group(1)
            continue
        raise VcdFormatError(f"unexpected token {tok!r}")
    if in_dump:
        raise VcdFormatError("unterminated $dumpvars")
    close_step()
    return series
