"""Interleaved gloss insertion, dictionary blocks, and the inverse strip."""

from __future__ import annotations

import re
from dataclasses import dataclass

from dip.errors import UnbalancedParenthesisError
from dip.lexicon import Lexicon, LexiconEntry
from dip.segmenter import TokenKind, segment


@dataclass(frozen=True)
class Insertion:
    span: tuple[int, int]
    byte_span: tuple[int, int]
    gloss: str
    entry: LexiconEntry


@dataclass(frozen=True)
class AnnotatedText:
    text: str
    insertions: tuple[Insertion, ...]
    original: str


def _matches(text: str, lexicon: Lexicon):
    """Yield ``(tokens, first, last, entry)`` for leftmost-longest matches.

    A candidate is any token span that starts at a word, does not end on
    whitespace and spans at most ``max_entry_words`` whitespace-separated
    words; it matches when its normalized text is a lexicon key. Matching
    on span text lets entries carry punctuation such as a trailing
    apostrophe or an inner hyphen.
    """
    tokens = segment(text)
    n = len(tokens)
    i = 0
    while i < n:
        if tokens[i].kind is not TokenKind.WORD or not lexicon.max_entry_words:
            i += 1
            continue
        best = None
        words = 1
        chars = 0
        # NFC merges at most three code points (Hangul jamo) into one, so longer spans cannot match
        char_limit = 3 * lexicon.max_key_chars + 3
        for j in range(i, n):
            kind = tokens[j].kind
            if kind is TokenKind.WHITESPACE:
                words += 1
                if words > lexicon.max_entry_words:
                    break
                continue
            chars += len(tokens[j].text)
            if chars > char_limit:
                break
            entry = lexicon.get(text[tokens[i].span[0]:tokens[j].span[1]])
            if entry is not None:
                best = (j, entry)
        if best is None:
            i += 1
            continue
        last, entry = best
        yield tokens, i, last, entry
        i = last + 1


def annotate_interleaved(text: str, lexicon: Lexicon) -> AnnotatedText:
    """Insert ``" (gloss)"`` after every lexicon match, scanning words left to right.

    >>> from dip.lexicon import LexiconEntry
    >>> lex = Lexicon("xx", [LexiconEntry("bola api", "fireball"), LexiconEntry("naik", "rise")])
    >>> annotate_interleaved("bola api naik 12.", lex).text
    'bola api (fireball) naik (rise) 12.'
    """
    out = []
    insertions = []
    cursor = 0
    for tokens, first, last, entry in _matches(text, lexicon):
        start, end = tokens[first].span[0], tokens[last].span[1]
        out.append(text[cursor:end])
        out.append(f" ({entry.gloss})")
        insertions.append(
            Insertion((start, end), (tokens[first].byte_span[0], tokens[last].byte_span[1]), entry.gloss, entry)
        )
        cursor = end
    out.append(text[cursor:])
    return AnnotatedText("".join(out), tuple(insertions), text)


def render_dictionary_block(text: str, lexicon: Lexicon) -> str:
    """``source: gloss`` lines for the entries matched in ``text``, first occurrence order."""
    seen = {}
    for _, _, _, entry in _matches(text, lexicon):
        seen.setdefault(entry.normalized_key, entry)
    return "\n".join(f"{e.source_surface}: {e.gloss}" for e in seen.values())


_GROUP_RE = re.compile(r" \([^()]*\)")


def strip_annotations(annotated: str) -> str:
    """Remove every inserted ``" (gloss)"`` group.

    Exact inverse of :func:`annotate_interleaved` for source texts without
    parentheses; a leftover ``(`` or ``)`` raises
    :class:`~dip.errors.UnbalancedParenthesisError`.
    """
    stripped = _GROUP_RE.sub("", annotated)
    for i, ch in enumerate(stripped):
        if ch in "()":
            # report the offset in the annotated input, not the stripped text
            offset = _source_offset(annotated, i)
            raise UnbalancedParenthesisError(f"stray {ch!r} in annotated text", offset=offset)
    return stripped


def _source_offset(annotated: str, stripped_index: int) -> int:
    pos = 0
    consumed = 0
    for m in _GROUP_RE.finditer(annotated):
        keep = m.start() - pos
        if consumed + keep > stripped_index:
            break
        consumed += keep
        pos = m.end()
    char_index = pos + (stripped_index - consumed)
    return len(annotated[:char_index].encode("utf-8", "surrogatepass"))
