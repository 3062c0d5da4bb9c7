"""JSON stimulus documents.

A stimulus names the top module, lists one record per cycle mapping input
ports to literals, and optionally lists the signals to trace::

    {"top": "Counter",
     "cycles": [{"clk": 1, "rst": 1}, {"clk": 0, "rst": "0"}, {"clk": "1"}],
     "record": ["out"],
     "maxEvalSteps": 10000}

An input missing from a record keeps its previous value (X before the first
assignment).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bits import BitVec4
from .errors import StimulusError

_KEYS = {"top", "cycles", "record", "maxEvalSteps"}


@dataclass
class Stimulus:
    top: str | None = None
    cycles: list[dict[str, object]] = field(default_factory=list)
    record: list[str] | None = None
    max_eval_steps: int | None = None


def parse_literal(text, width: int) -> BitVec4:
    """``0``/``1``, decimal, ``0x``/``0b`` prefixed, or all-``x``/``z``."""
    if isinstance(text, bool):
        raise StimulusError(f"booleans are not stimulus literals: {text!r}")
    if isinstance(text, int):
        return _fit(text, width, repr(text))
    if not isinstance(text, str):
        raise StimulusError(f"bad stimulus literal {text!r}")
    t = text.strip().lower().replace("_", "")
    if t in ("x", "z"):
        return BitVec4.x(width) if t == "x" else BitVec4.z(width)
    try:
        value = int(t, 0) if t[:2] in ("0x", "0b") else int(t, 10)
    except ValueError:
        raise StimulusError(f"bad stimulus literal {text!r}") from None
    return _fit(value, width, text)


def _fit(value: int, width: int, text: str) -> BitVec4:
    if value < 0:
        if value < -(1 << (width - 1)):
            raise StimulusError(f"{text} does not fit in {width} bits")
    elif value >> width:
        raise StimulusError(f"{text} does not fit in {width} bits")
    return BitVec4.from_int(value, width)


def load_stimulus(text: str) -> Stimulus:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StimulusError(f"stimulus is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise StimulusError("stimulus must be a JSON object")
    extra = set(doc) - _KEYS
    if extra:
        raise StimulusError(f"unknown stimulus keys {sorted(extra)}")
    top = doc.get("top")
    if top is not None and not isinstance(top, str):
        raise StimulusError("'top' must be a string")
    cycles = doc.get("cycles", [])
    if not isinstance(cycles, list) or not all(isinstance(c, dict)
                                               for c in cycles):
        raise StimulusError("'cycles' must be a list of objects")
    record = doc.get("record")
    if record is not None and (not isinstance(record, list) or not all(
            isinstance(r, str) for r in record)):
        raise StimulusError("'record' must be a list of signal names")
    steps = doc.get("maxEvalSteps")
    if steps is not None and (not isinstance(steps, int) or steps <= 0):
        raise StimulusError("'maxEvalSteps' must be a positive integer")
    return Stimulus(top, cycles, record, steps)


def cycle_inputs(stim: Stimulus, ports) -> list[dict[str, BitVec4]]:
    """Resolve every cycle to a full input map, applying the hold rule.

    ``ports`` is a sequence of ``(name, width)`` pairs.
    """
    widths = dict(ports)
    held = {name: BitVec4.x(w) for name, w in ports}
    out = []
    for k, rec in enumerate(stim.cycles):
        unknown = set(rec) - set(widths)
        if unknown:
            raise StimulusError(f"cycle {k}: unknown input port(s) "
                                f"{sorted(unknown)}")
        for name, lit in rec.items():
            held[name] = parse_literal(lit, widths[name])
        out.append(dict(held))
    return out
