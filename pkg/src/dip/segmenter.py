"""Lossless segmentation of source text into classified tokens.

Word boundaries approximate the default Unicode word-boundary rules for
whitespace-delimited scripts: letters, marks and digits glue into words,
apostrophe-like mid-letter characters join two letters, zero-width
(non-)joiners stay inside words, and every other non-space character is a
single punctuation token.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass


class TokenKind(str, enum.Enum):
    WORD = "word"
    NUMBER = "number"
    PUNCTUATION = "punctuation"
    WHITESPACE = "whitespace"


@dataclass(frozen=True)
class Token:
    text: str
    kind: TokenKind
    span: tuple[int, int]
    byte_span: tuple[int, int]


# UAX #29 MidLetter / MidNumLet characters that may sit between two letters
_MID_LETTER = frozenset("'\u2019\u00b7\u0387\u05f4\u2027\uff07\u02bc")
_JOINERS = frozenset("\u200c\u200d")
_NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)*")


def _is_letter_or_mark(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "LM"


def _is_word_continue(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in "LM" or cat == "Nd" or cat == "Pc" or ch in _JOINERS


def _scan(text):
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            kind = TokenKind.WHITESPACE
        elif _is_letter_or_mark(ch):
            j = i + 1
            while j < n:
                c = text[j]
                if _is_word_continue(c):
                    j += 1
                elif c in _MID_LETTER and j + 1 < n and _is_letter_or_mark(text[j + 1]):
                    j += 2
                else:
                    break
            kind = TokenKind.WORD
        elif unicodedata.category(ch) == "Nd":
            j = _NUMBER_RE.match(text, i).end()
            kind = TokenKind.NUMBER
        else:
            j = i + 1
            kind = TokenKind.PUNCTUATION
        yield i, j, kind
        i = j


def segment(text: str) -> list[Token]:
    """Split ``text`` into tokens whose concatenation reproduces it exactly."""
    tokens = []
    byte_pos = 0
    for start, end, kind in _scan(text):
        piece = text[start:end]
        nbytes = len(piece.encode("utf-8", "surrogatepass"))
        tokens.append(Token(piece, kind, (start, end), (byte_pos, byte_pos + nbytes)))
        byte_pos += nbytes
    return tokens


def words(text: str) -> list[str]:
    return [t.text for t in segment(text) if t.kind is TokenKind.WORD]
