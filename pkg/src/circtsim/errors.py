"""Exception hierarchy.

Errors fall in three families that map onto CLI exit codes:
``ParseError`` (1), ``StaticError`` (2) and ``SimulationError`` (3).
"""

from __future__ import annotations


class CirctSimError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3

    def __init__(self, message: str = "", *, op: str | None = None,
                 path: tuple[str, ...] | None = None,
                 pos: tuple[int, int] | None = None):
        self.message = message
        self.op = op
        self.path = path
        self.pos = pos
        super().__init__(self.describe())

    def describe(self) -> str:
        parts = [f"{type(self).__name__}: {self.message}"]
        if self.op:
            parts.append(f"op '{self.op}'")
        if self.path:
            parts.append(f"instance {'.'.join(self.path)}")
        if self.pos:
            parts.append(f"at {self.pos[0]}:{self.pos[1]}")
        return ", ".join(parts)

    def located(self, *, op=None, path=None, pos=None) -> CirctSimError:
        """Fill in missing location data and return self."""
        self.op = self.op or op
        self.path = self.path or path
        self.pos = self.pos or pos
        self.args = (self.describe(),)
        return self


class ParseError(CirctSimError):
    exit_code = 1

    def __init__(self, message: str, line: int, column: int,
                 expected: frozenset[str] | set[str] = frozenset()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        super().__init__(message, pos=(line, column))

    def describe(self) -> str:
        text = f"ParseError: {self.line}:{self.column}: {self.message}"
        if self.expected:
            text += f" (expected one of: {', '.join(sorted(self.expected))})"
        return text


# -- static (preprocessing) errors -------------------------------------------

class StaticError(CirctSimError):
    exit_code = 2


class DuplicateAlias(StaticError):
    pass


class UnresolvedAlias(StaticError):
    pass


class UnknownAlias(StaticError):
    pass


class AliasCycle(StaticError):
    pass


class DuplicateSymbol(StaticError):
    pass


class DuplicateKey(StaticError):
    pass


class WidthLimit(StaticError):
    pass


class UnsupportedFeature(StaticError):
    pass


class SignatureMismatch(StaticError):
    """Operand or result count disagrees with the function type."""


# -- simulation errors ---------------------------------------------------------

class SimulationError(CirctSimError):
    exit_code = 3


class UnknownSymbol(SimulationError):
    pass


class UnknownOperation(SimulationError):
    pass


class Deadlock(SimulationError):
    pass


class WidthMismatch(SimulationError):
    pass


class TypeMismatch(SimulationError):
    pass


class ArityMismatch(SimulationError):
    pass


class PortMismatch(SimulationError):
    pass


class EmptyOperandList(SimulationError):
    pass


class DoubleWrite(SimulationError):
    pass


class UnknownName(SimulationError):
    pass


class DuplicateName(SimulationError):
    pass


class DuplicateDriver(SimulationError):
    pass


class PrematureFinish(SimulationError):
    pass


class MultiBlockRegion(SimulationError):
    pass


class RecursionLimit(SimulationError):
    pass


class OutOfRange(SimulationError):
    pass


class UnknownField(SimulationError):
    pass


class MalformedAttribute(SimulationError):
    pass


class MissingClock(SimulationError):
    pass


class MissingEvent(SimulationError):
    pass


class LoopBound(SimulationError):
    pass


class UndefinedMacro(SimulationError):
    pass


class BadFormat(SimulationError):
    pass


class DanglingRef(SimulationError):
    pass


class EvalStepLimit(SimulationError):
    pass


class SimulationHalted(SimulationError):
    pass


class SinkError(SimulationError):
    pass


class StimulusError(CirctSimError):
    """Malformed stimulus document; reported like a static error."""

    exit_code = 2
