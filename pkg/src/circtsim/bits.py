"""Four-state bit vectors.

A :class:`BitVec4` stores a vector of ``0/1/X/Z`` bits as two integers using
the Verilog VPI ``aval``/``bval`` encoding::

    bit   aval bval
     0     0    0
     1     1    0
     Z     0    1
     X     1    1

Bit 0 is the least significant bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import WidthLimit

MAX_WIDTH = 65536


class Bit4(enum.Enum):
    B0 = "0"
    B1 = "1"
    BX = "x"
    BZ = "z"

    @property
    def known(self) -> bool:
        return self in (Bit4.B0, Bit4.B1)


class _Unknown:
    """Marker returned by :func:`bit2int` for vectors holding X or Z bits."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self) -> bool:
        return False


UNKNOWN = _Unknown()

_CHAR_TO_BIT = {"0": Bit4.B0, "1": Bit4.B1, "x": Bit4.BX, "X": Bit4.BX,
                "z": Bit4.BZ, "Z": Bit4.BZ, "?": Bit4.BZ}


def check_width(width: int) -> int:
    if not 1 <= width <= MAX_WIDTH:
        raise WidthLimit(f"bit width {width} outside 1..{MAX_WIDTH}")
    return width


@dataclass(frozen=True)
class BitVec4:
    width: int
    aval: int = 0
    bval: int = 0

    def __post_init__(self):
        check_width(self.width)
        mask = (1 << self.width) - 1
        if self.aval & ~mask or self.bval & ~mask:
            object.__setattr__(self, "aval", self.aval & mask)
            object.__setattr__(self, "bval", self.bval & mask)

    # -- construction --------------------------------------------------------

    @classmethod
    def from_int(cls, value: int, width: int) -> BitVec4:
        """Two-state vector holding ``value mod 2**width``."""
        return cls(width, value & ((1 << width) - 1), 0)

    @classmethod
    def x(cls, width: int) -> BitVec4:
        mask = (1 << width) - 1
        return cls(width, mask, mask)

    @classmethod
    def z(cls, width: int) -> BitVec4:
        return cls(width, 0, (1 << width) - 1)

    @classmethod
    def from_bits(cls, bits: Iterable[Bit4]) -> BitVec4:
        aval = bval = 0
        n = 0
        for i, b in enumerate(bits):
            n = i + 1
            if b is Bit4.B1 or b is Bit4.BX:
                aval |= 1 << i
            if b is Bit4.BX or b is Bit4.BZ:
                bval |= 1 << i
        return cls(n, aval, bval)

    @classmethod
    def from_string(cls, text: str) -> BitVec4:
        """Parse an MSB-first string such as ``"10xz"``."""
        text = text.replace("_", "")
        try:
            return cls.from_bits(_CHAR_TO_BIT[c] for c in reversed(text))
        except KeyError as exc:
            raise ValueError(f"bad four-state digit {exc.args[0]!r}") from None

    # -- inspection ----------------------------------------------------------

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1

    @property
    def is_defined(self) -> bool:
        return self.bval == 0

    @property
    def has_unknown(self) -> bool:
        return self.bval != 0

    def __len__(self) -> int:
        return self.width

    def __getitem__(self, i: int) -> Bit4:
        if i < 0:
            i += self.width
        if not 0 <= i < self.width:
            raise IndexError(i)
        a = (self.aval >> i) & 1
        b = (self.bval >> i) & 1
        if not b:
            return Bit4.B1 if a else Bit4.B0
        return Bit4.BX if a else Bit4.BZ

    def __iter__(self) -> Iterator[Bit4]:
        return (self[i] for i in range(self.width))

    def to_uint(self) -> int | _Unknown:
        return UNKNOWN if self.bval else self.aval

    def to_sint(self) -> int | _Unknown:
        if self.bval:
            return UNKNOWN
        v = self.aval
        if v >> (self.width - 1):
            v -= 1 << self.width
        return v

    def to_string(self) -> str:
        """MSB-first rendering using ``0 1 x z``."""
        return "".join(self[i].value for i in reversed(range(self.width)))

    def __str__(self) -> str:
        return f"{self.width}'b{self.to_string()}"

    # -- structural operations (per-bit X/Z preserving) ----------------------

    def slice(self, low: int, width: int) -> BitVec4:
        m = (1 << width) - 1
        return BitVec4(width, (self.aval >> low) & m, (self.bval >> low) & m)

    def unknown_to_x(self) -> BitVec4:
        """Read Z as X (the rule for every consumer except inout plumbing)."""
        return BitVec4(self.width, self.aval | self.bval, self.bval)


def concat(parts: Iterable[BitVec4]) -> BitVec4:
    """Concatenate with the first part in the most significant position."""
    aval = bval = width = 0
    for p in parts:
        aval = (aval << p.width) | p.aval
        bval = (bval << p.width) | p.bval
        width += p.width
    return BitVec4(width, aval, bval)


def bit2int(v: BitVec4) -> int | _Unknown:
    """Unsigned integer view; :data:`UNKNOWN` when any bit is X or Z."""
    return v.to_uint()


def bits_equal_known(a: BitVec4, b: BitVec4) -> bool:
    return a.is_defined and b.is_defined and a.aval == b.aval
