"""Tokenizer for the model language (`.afm` files)."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "int", "sym", "eof"
    text: str
    line: int
    col: int
    end_line: int
    end_col: int


KEYWORDS = frozenset(
    """type fun component concrete ports sub channels efsm states init local
    trans when if then else set case of true false observe delayed""".split()
)

_SYMBOLS = [
    "->", ":=", "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "(", ")", ";", ",", ":", "?", "!", "=", "<", ">",
    "+", "-", "*", "/", "%", ".", "|", "_", "ε",
]

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>--[^\n]*)"
    r"|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<int>[0-9]+)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in _SYMBOLS) + ")"
)


def tokenize(text, filename="<input>"):
    tokens = []
    line, col, pos = 1, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(SourceLocation(filename, line, col), "a token", text[pos])
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(lexeme)
        else:
            if kind == "id" and lexeme in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, lexeme, line, col, line, col + len(lexeme)))
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "<end of input>", line, col, line, col))
    return tokens
