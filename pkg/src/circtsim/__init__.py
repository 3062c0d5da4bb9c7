"""Cycle-accurate interpreter for hw, comb, seq and sv MLIR designs."""

from .bits import Bit4, BitVec4
from .core import Simulator
from .mlir import parse, print_file
from .static import preprocess

__version__ = "0.1.0"


def load(text: str):
    """Parse and preprocess MLIR source text."""
    return preprocess(parse(text))


__all__ = ["Bit4", "BitVec4", "Simulator", "load", "parse", "preprocess",
           "print_file"]
