"""Pull lexer for MLIR text.

The lexer is driven by the parser one token at a time and can be rewound to
any offset; the parser relies on that to split dimension lists such as
``4xi8`` that MLIR lexes context-sensitively.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from ..errors import ParseError

EOF = "eof"
INT = "int"
FLOAT = "float"
STRING = "string"
BARE = "bare"
VALUE_ID = "value_id"    # %foo, %0, %foo#1
BLOCK_ID = "block_id"    # ^bb0
SYMBOL = "symbol"        # @foo, @"foo"
BANG_ID = "bang_id"      # !foo, !hw.array
HASH_ID = "hash_id"      # #foo, #hw.innerSym
PUNCT = "punct"

_SUFFIX_ID = r"(?:[A-Za-z0-9_$.\-]+)"
_BARE_ID = r"(?:[A-Za-z_][A-Za-z0-9_$.]*)"

_TOKEN_RES = [
    (VALUE_ID, re.compile(r"%(" + _SUFFIX_ID + r"(?:#[0-9]+)?)")),
    (BLOCK_ID, re.compile(r"\^(" + _SUFFIX_ID + r")")),
    (BANG_ID, re.compile(r"!(" + _SUFFIX_ID + r")")),
    (HASH_ID, re.compile(r"#(" + _SUFFIX_ID + r")")),
    (FLOAT, re.compile(r"([0-9]+\.[0-9]*(?:[eE][+-]?[0-9]+)?)")),
    (INT, re.compile(r"(0x[0-9A-Fa-f]+|[0-9]+)")),
    (BARE, re.compile(r"(" + _BARE_ID + r")")),
]

_PUNCT = ["->", "::", "(", ")", "[", "]", "{", "}", "<", ">", ",", ":", "=",
          "?", "*", "+", "-"]

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str       # the token's payload (identifier without sigil, ...)
    start: int
    end: int

    def is_punct(self, p: str) -> bool:
        return self.kind == PUNCT and self.text == p

    def is_bare(self, word: str) -> bool:
        return self.kind == BARE and self.text == word


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        self._peeked: Token | None = None

    # -- positions -----------------------------------------------------------

    def line_col(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self._line_starts, offset) - 1
        return line + 1, offset - self._line_starts[line] + 1

    def error(self, message: str, offset: int | None = None,
              expected=()) -> ParseError:
        if offset is None:
            offset = self.peek().start
        line, col = self.line_col(offset)
        return ParseError(message, line, col, expected)

    def reset(self, offset: int) -> None:
        self.pos = offset
        self._peeked = None

    # -- scanning ------------------------------------------------------------

    def _skip_trivia(self) -> None:
        text = self.text
        n = len(text)
        while self.pos < n:
            c = text[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif text.startswith("//", self.pos):
                nl = text.find("\n", self.pos)
                self.pos = n if nl < 0 else nl + 1
            else:
                break

    def _scan(self) -> Token:
        self._skip_trivia()
        text = self.text
        start = self.pos
        if start >= len(text):
            return Token(EOF, "", start, start)
        c = text[start]
        if c == '"':
            return self._scan_string(start)
        if c == "@" and start + 1 < len(text) and text[start + 1] == '"':
            tok = self._scan_string(start + 1)
            return Token(SYMBOL, tok.text, start, tok.end)
        if c == "@":
            m = re.compile(_SUFFIX_ID).match(text, start + 1)
            if not m:
                raise self.error("malformed symbol reference", start)
            return Token(SYMBOL, m.group(0), start, m.end())
        for kind, rx in _TOKEN_RES:
            m = rx.match(text, start)
            if m:
                return Token(kind, m.group(1), start, m.end())
        for p in _PUNCT:
            if text.startswith(p, start):
                return Token(PUNCT, p, start, start + len(p))
        raise self.error(f"unexpected character {c!r}", start)

    def _scan_string(self, start: int) -> Token:
        text = self.text
        i = start + 1
        out: list[str] = []
        while i < len(text):
            c = text[i]
            if c == '"':
                return Token(STRING, "".join(out), start, i + 1)
            if c == "\n":
                break
            if c == "\\":
                nxt = text[i + 1:i + 2]
                if nxt in _ESCAPES:
                    out.append(_ESCAPES[nxt])
                    i += 2
                    continue
                hexpair = text[i + 1:i + 3]
                if re.fullmatch(r"[0-9A-Fa-f]{2}", hexpair):
                    out.append(chr(int(hexpair, 16)))
                    i += 3
                    continue
                raise self.error("bad escape in string literal", i)
            out.append(c)
            i += 1
        raise self.error("unterminated string literal", start)

    def peek(self) -> Token:
        if self._peeked is None:
            saved = self.pos
            tok = self._scan()
            self.pos = saved
            self._peeked = tok
        return self._peeked

    def next(self) -> Token:
        tok = self.peek()
        self.pos = tok.end
        self._peeked = None
        return tok

    def raw_balanced(self, open_ch: str, close_ch: str) -> str:
        """Consume raw text up to the bracket matching an already consumed
        ``open_ch``; returns the inner text (stripped) and eats the closer."""
        text = self.text
        depth = 1
        i = self.pos
        start = i
        in_str = False
        while i < len(text):
            c = text[i]
            if in_str:
                if c == "\\":
                    i += 2
                    continue
                if c == '"':
                    in_str = False
            elif c == '"':
                in_str = True
            elif c == "-" and text.startswith("->", i):
                i += 2
                continue
            elif c == open_ch:
                depth += 1
            elif c == close_ch:
                depth -= 1
                if depth == 0:
                    self.reset(i + 1)
                    return text[start:i].strip()
            i += 1
        raise self.error(f"unbalanced '{open_ch}'", start)
