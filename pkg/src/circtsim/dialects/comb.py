"""comb: combinational operations.

The ``eval_*`` functions work on raw :class:`BitVec4` values and are what the
handlers call after unwrapping operands.  Arithmetic is pessimistic: one X or
Z bit anywhere in the inputs gives an all-X result.  ``concat`` and
``extract`` only move bits, so unknowns stay in place (``replicate`` does
not get that exemption).
"""

from __future__ import annotations

from ..bits import BitVec4, concat
from ..core import register
from ..errors import (
    ArityMismatch, EmptyOperandList, MalformedAttribute, OutOfRange,
    WidthMismatch,
)
from ..mlir.syntax import ArrayAttr, BoolAttr, IntegerAttr, bit_width
from ..values import TypedValue

ICMP_PREDICATES = ("eq", "ne", "slt", "sle", "sgt", "sge",
                   "ult", "ule", "ugt", "uge")
VARIADIC = ("add", "mul", "and", "or", "xor")
BINARY = ("sub", "divs", "divu", "mods", "modu", "shl", "shrs", "shru")
DIVISIONS = ("divs", "divu", "mods", "modu")


def _any_unknown(vs) -> bool:
    return any(v.bval for v in vs)


def _signed(v: int, width: int) -> int:
    return v - (1 << width) if v >> (width - 1) else v


def _check_widths(vs, width: int) -> None:
    for v in vs:
        if v.width != width:
            raise WidthMismatch(f"operand width {v.width}, expected {width}")


def eval_variadic(name: str, operands, width: int) -> BitVec4:
    if not operands:
        raise EmptyOperandList(f"comb.{name} needs at least one operand")
    if name == "concat":
        out = concat(operands)
        if out.width != width:
            raise WidthMismatch(f"concat of {out.width} bits into i{width}")
        return out
    _check_widths(operands, width)
    if _any_unknown(operands):
        return BitVec4.x(width)
    vals = [v.aval for v in operands]
    acc = vals[0]
    for v in vals[1:]:
        if name == "add":
            acc += v
        elif name == "mul":
            acc *= v
        elif name == "and":
            acc &= v
        elif name == "or":
            acc |= v
        elif name == "xor":
            acc ^= v
        else:
            raise ValueError(f"unknown variadic op {name}")
    return BitVec4.from_int(acc, width)


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def eval_binary(name: str, a: BitVec4, b: BitVec4, width: int) -> BitVec4:
    _check_widths((a, b), width)
    if a.bval or b.bval:
        return BitVec4.x(width)
    ua, ub = a.aval, b.aval
    if name == "sub":
        return BitVec4.from_int(ua - ub, width)
    if name in DIVISIONS:
        if ub == 0:
            return BitVec4.x(width)
        if name == "divu":
            return BitVec4.from_int(ua // ub, width)
        if name == "modu":
            return BitVec4.from_int(ua % ub, width)
        sa, sb = _signed(ua, width), _signed(ub, width)
        q = _trunc_div(sa, sb)
        if name == "divs":
            return BitVec4.from_int(q, width)
        return BitVec4.from_int(sa - q * sb, width)
    if name == "shl":
        return BitVec4.from_int(ua << ub if ub < width else 0, width)
    if name == "shru":
        return BitVec4.from_int(ua >> ub if ub < width else 0, width)
    if name == "shrs":
        sa = _signed(ua, width)
        return BitVec4.from_int(sa >> min(ub, width), width)
    raise ValueError(f"unknown binary op {name}")


def divides_by_zero(name: str, b: BitVec4) -> bool:
    return name in DIVISIONS and b.is_defined and b.aval == 0


def eval_icmp(pred: str, a: BitVec4, b: BitVec4) -> BitVec4:
    if a.width != b.width:
        raise WidthMismatch(f"icmp of i{a.width} and i{b.width}")
    if a.bval or b.bval:
        return BitVec4.x(1)
    w = a.width
    if pred in ("slt", "sle", "sgt", "sge"):
        x, y = _signed(a.aval, w), _signed(b.aval, w)
    else:
        x, y = a.aval, b.aval
    r = {"eq": x == y, "ne": x != y,
         "slt": x < y, "sle": x <= y, "sgt": x > y, "sge": x >= y,
         "ult": x < y, "ule": x <= y, "ugt": x > y, "uge": x >= y}[pred]
    return BitVec4.from_int(int(r), 1)


def eval_extract(v: BitVec4, low: int, width: int) -> BitVec4:
    if low < 0 or low + width > v.width:
        raise OutOfRange(f"bits [{low}, {low + width}) of an i{v.width}")
    return v.slice(low, width)


def eval_replicate(v: BitVec4, count: int) -> BitVec4:
    if count < 1:
        raise WidthMismatch("replicate count must be positive")
    if v.bval:
        return BitVec4.x(v.width * count)
    return concat([v] * count)


def eval_parity(v: BitVec4) -> BitVec4:
    if v.bval:
        return BitVec4.x(1)
    return BitVec4.from_int(bin(v.aval).count("1") & 1, 1)


def eval_mux(sel: BitVec4, a: BitVec4, b: BitVec4) -> BitVec4:
    if sel.width != 1:
        raise WidthMismatch(f"mux selector is i{sel.width}")
    if a.width != b.width:
        raise WidthMismatch(f"mux arms are i{a.width} and i{b.width}")
    if sel.bval or a.bval or b.bval:
        return BitVec4.x(a.width)
    return a if sel.aval else b


def eval_truth_table(inputs, table) -> BitVec4:
    """``table[i]`` is the output for the row whose index has the first input
    as its most significant bit."""
    if len(table) != 1 << len(inputs):
        raise ArityMismatch(f"{len(inputs)} inputs need {1 << len(inputs)} "
                            f"table rows, got {len(table)}")
    index = 0
    for v in inputs:
        if v.width != 1:
            raise WidthMismatch(f"truth_table input is i{v.width}")
        if v.bval:
            return BitVec4.x(1)
        index = (index << 1) | v.aval
    return BitVec4.from_int(int(bool(table[index])), 1)


# ---------------------------------------------------------------------------
# handlers
# ---------------------------------------------------------------------------


def _result_width(op) -> int:
    return bit_width(op.result_types[0])


def _out(op, v: BitVec4) -> list[TypedValue]:
    return [TypedValue(op.result_types[0], v)]


def _variadic_handler(short: str):
    def handler(sim, env, op):
        vals = [v.bits for v in env.operands(op)]
        return _out(op, eval_variadic(short, vals, _result_width(op)))
    return handler


def _binary_handler(short: str):
    def handler(sim, env, op):
        if len(op.operands) != 2:
            raise ArityMismatch(f"comb.{short} takes 2 operands, "
                                f"got {len(op.operands)}")
        a, b = (v.bits for v in env.operands(op))
        if divides_by_zero(short, b):
            sim.diag(op, "DivisionByZero", "division by zero yields X",
                     env.inst)
        return _out(op, eval_binary(short, a, b, _result_width(op)))
    return handler


for _n in VARIADIC:
    register(f"comb.{_n}", attrs=("twoState",),
             errors=("WidthMismatch", "EmptyOperandList"))(_variadic_handler(_n))
for _n in BINARY:
    _errs = ("WidthMismatch", "ArityMismatch")
    if _n in DIVISIONS:
        _errs += ("DivisionByZero",)
    register(f"comb.{_n}", attrs=("twoState",), errors=_errs)(_binary_handler(_n))

register("comb.concat", attrs=(), errors=("WidthMismatch", "EmptyOperandList"))(
    _variadic_handler("concat"))


@register("comb.icmp", attrs=("predicate", "twoState"),
          errors=("MalformedAttribute", "WidthMismatch"))
def _icmp(sim, env, op):
    pred = op.attr("predicate")
    if not isinstance(pred, IntegerAttr) or not 0 <= pred.value < 10:
        raise MalformedAttribute("icmp predicate must be an integer 0..9")
    a, b = (v.bits for v in env.operands(op))
    return _out(op, eval_icmp(ICMP_PREDICATES[pred.value], a, b))


@register("comb.extract", attrs=("lowBit",),
          errors=("MalformedAttribute", "OutOfRange"))
def _extract(sim, env, op):
    low = op.attr("lowBit")
    if not isinstance(low, IntegerAttr):
        raise MalformedAttribute("comb.extract needs an integer lowBit")
    (v,) = env.operands(op)
    return _out(op, eval_extract(v.bits, low.value, _result_width(op)))


@register("comb.replicate", attrs=(), errors=("WidthMismatch",))
def _replicate(sim, env, op):
    (v,) = env.operands(op)
    w = _result_width(op)
    if w % v.width:
        raise WidthMismatch(f"i{w} is not a multiple of i{v.width}")
    return _out(op, eval_replicate(v.bits, w // v.width))


@register("comb.parity", attrs=("twoState",), errors=())
def _parity(sim, env, op):
    (v,) = env.operands(op)
    return _out(op, eval_parity(v.bits))


@register("comb.mux", attrs=("twoState",), errors=("WidthMismatch",))
def _mux(sim, env, op):
    sel, a, b = env.operands(op)
    return _out(op, eval_mux(sel.bits, a.bits, b.bits))


@register("comb.truth_table", attrs=("lookupTable",),
          errors=("MalformedAttribute", "ArityMismatch"))
def _truth_table(sim, env, op):
    table = op.attr("lookupTable")
    if not isinstance(table, ArrayAttr):
        raise MalformedAttribute("comb.truth_table needs a lookupTable array")
    rows = []
    for item in table.items:
        if isinstance(item, BoolAttr):
            rows.append(item.value)
        elif isinstance(item, IntegerAttr):
            rows.append(bool(item.value))
        else:
            raise MalformedAttribute("lookupTable entries must be booleans")
    return _out(op, eval_truth_table([v.bits for v in env.operands(op)], rows))
