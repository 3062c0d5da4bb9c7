"""MLIR text: lexer, parser (generic and custom forms) and printer."""

from .parser import parse
from .printer import print_file, print_op

__all__ = ["parse", "print_file", "print_op"]
