"""Tokenizer for Java source text.

Operates on UTF-8 bytes so that all reported offsets are byte offsets.
Keywords and punctuation use their surface text as the token kind;
identifiers and literals use symbolic kinds (``identifier``,
``decimal_integer_literal``, ...).

``>`` is always emitted as a single-character token (never ``>>``) so the
parser can close nested generics; shift operators are reassembled from
adjacent ``>`` tokens during expression parsing. ``>=`` stays fused.
"""

from __future__ import annotations

from dataclasses import dataclass


class LexError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

# Multi-character operators, longest first.  No '>>' family: see module doc.
_OPERATORS = [
    "<<=", "...", "->", "::",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?", ":",
    ";", ",", ".", "(", ")", "{", "}", "[", "]", "@",
]

BRACKET_CHARS = frozenset("(){}[]")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int  # byte offset, inclusive
    end: int  # byte offset, exclusive


def _is_ident_start(b: int) -> bool:
    return b == 0x5F or b == 0x24 or 0x41 <= b <= 0x5A or 0x61 <= b <= 0x7A or b >= 0x80


def _is_ident_part(b: int) -> bool:
    return _is_ident_start(b) or 0x30 <= b <= 0x39


def _is_digit(b: int) -> bool:
    return 0x30 <= b <= 0x39


class _Lexer:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.n = len(data)

    def tokens(self) -> list[Token]:
        out = []
        while True:
            self._skip_trivia()
            if self.pos >= self.n:
                return out
            out.append(self._next_token())

    def _skip_trivia(self) -> None:
        data, n = self.data, self.n
        while self.pos < n:
            b = data[self.pos]
            if b in (0x20, 0x09, 0x0A, 0x0D, 0x0C):
                self.pos += 1
            elif b == 0x2F and self.pos + 1 < n and data[self.pos + 1] == 0x2F:
                j = data.find(b"\n", self.pos)
                self.pos = n if j < 0 else j + 1
            elif b == 0x2F and self.pos + 1 < n and data[self.pos + 1] == 0x2A:
                j = data.find(b"*/", self.pos + 2)
                if j < 0:
                    raise LexError("unterminated block comment", self.pos)
                self.pos = j + 2
            else:
                return

    def _next_token(self) -> Token:
        data, start = self.data, self.pos
        b = data[start]
        if _is_ident_start(b):
            return self._ident()
        if _is_digit(b) or (b == 0x2E and start + 1 < self.n and _is_digit(data[start + 1])):
            return self._number()
        if b == 0x22:  # '"'
            return self._string()
        if b == 0x27:  # "'"
            return self._char()
        for op in _OPERATORS:
            ob = op.encode()
            if data.startswith(ob, start):
                self.pos = start + len(ob)
                return Token(op, op, start, self.pos)
        raise LexError(f"unexpected byte {b:#x}", start)

    def _ident(self) -> Token:
        data, start = self.data, self.pos
        i = start + 1
        while i < self.n and _is_ident_part(data[i]):
            i += 1
        self.pos = i
        text = data[start:i].decode("utf-8", errors="replace")
        if text in ("true", "false"):
            kind = "boolean_literal"
        elif text == "null":
            kind = "null_literal"
        elif text in KEYWORDS:
            kind = text
        else:
            kind = "identifier"
        return Token(kind, text, start, i)

    def _number(self) -> Token:
        data, start = self.data, self.pos
        i = start
        kind = "decimal_integer_literal"

        def take(pred):
            nonlocal i
            while i < self.n and pred(data[i]):
                i += 1

        if data[i] == 0x30 and i + 1 < self.n and data[i + 1] in (0x78, 0x58):  # 0x
            i += 2
            take(lambda c: _is_digit(c) or 0x41 <= c <= 0x46 or 0x61 <= c <= 0x66 or c == 0x5F)
            kind = "hex_integer_literal"
        elif data[i] == 0x30 and i + 1 < self.n and data[i + 1] in (0x62, 0x42):  # 0b
            i += 2
            take(lambda c: c in (0x30, 0x31, 0x5F))
            kind = "binary_integer_literal"
        else:
            take(lambda c: _is_digit(c) or c == 0x5F)
            is_float = False
            if i < self.n and data[i] == 0x2E:
                nxt = data[i + 1] if i + 1 < self.n else 0
                if _is_digit(nxt) or not _is_ident_start(nxt) and nxt != 0x2E:
                    is_float = True
                    i += 1
                    take(lambda c: _is_digit(c) or c == 0x5F)
            if i < self.n and data[i] in (0x65, 0x45):  # exponent
                j = i + 1
                if j < self.n and data[j] in (0x2B, 0x2D):
                    j += 1
                if j < self.n and _is_digit(data[j]):
                    is_float = True
                    i = j
                    take(_is_digit)
            if i < self.n and data[i] in (0x66, 0x46, 0x64, 0x44):  # f/F/d/D
                is_float = True
                i += 1
            elif i < self.n and data[i] in (0x6C, 0x4C):  # l/L
                i += 1
            kind = "decimal_floating_point_literal" if is_float else "decimal_integer_literal"
        if kind in ("hex_integer_literal", "binary_integer_literal") and i < self.n and data[i] in (0x6C, 0x4C):
            i += 1
        self.pos = i
        return Token(kind, data[start:i].decode("ascii", errors="replace"), start, i)

    def _string(self) -> Token:
        data, start = self.data, self.pos
        i = start + 1
        while i < self.n:
            b = data[i]
            if b == 0x5C:  # backslash
                i += 2
                continue
            if b == 0x22:
                i += 1
                self.pos = i
                return Token("string_literal", data[start:i].decode("utf-8", errors="replace"), start, i)
            if b == 0x0A:
                break
            i += 1
        raise LexError("unterminated string literal", start)

    def _char(self) -> Token:
        data, start = self.data, self.pos
        i = start + 1
        while i < self.n:
            b = data[i]
            if b == 0x5C:
                i += 2
                continue
            if b == 0x27:
                i += 1
                self.pos = i
                return Token("character_literal", data[start:i].decode("utf-8", errors="replace"), start, i)
            if b == 0x0A:
                break
            i += 1
        raise LexError("unterminated character literal", start)


def tokenize(data: bytes) -> list[Token]:
    """Tokenize Java source bytes, skipping whitespace and comments."""
    return _Lexer(data).tokens()
