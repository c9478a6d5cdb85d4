"""Bilingual lexicons: loading, surface normalization and longest-match lookup."""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from dip.errors import DuplicateEntryError, LexiconFormatError

logger = logging.getLogger(__name__)

MERGE = "merge"
REJECT = "reject"


def normalize_surface(text: str) -> str:
    """NFC-compose, case-fold and collapse whitespace runs.

    >>> normalize_surface("Bola  Api ")
    'bola api'
    """
    text = unicodedata.normalize("NFC", text).casefold()
    # casefold can emit decomposed sequences (e.g. for "İ"), recompose
    text = unicodedata.normalize("NFC", text)
    return " ".join(text.split())


def escape_gloss(gloss: str) -> str:
    # keeps " (gloss)" insertions strippable
    return gloss.replace("(", "[").replace(")", "]")


@dataclass(frozen=True)
class LexiconEntry:
    source_surface: str
    gloss: str
    normalized_key: str = field(init=False, compare=False)

    def __post_init__(self):
        source = " ".join(self.source_surface.split())
        gloss = self.gloss.strip()
        if not source:
            raise ValueError("lexicon entry has an empty source surface")
        if not gloss:
            raise ValueError(f"lexicon entry {source!r} has an empty gloss")
        object.__setattr__(self, "source_surface", source)
        object.__setattr__(self, "gloss", escape_gloss(gloss))
        object.__setattr__(self, "normalized_key", normalize_surface(source))

    @property
    def word_count(self) -> int:
        return len(self.normalized_key.split(" "))


class Lexicon:
    """An immutable source-surface -> gloss mapping for one language.

    Duplicate normalized keys are either merged (first entry wins, a warning
    is logged) or rejected, depending on ``on_duplicate``.
    """

    def __init__(self, language: str, entries: Iterable[LexiconEntry] = (), on_duplicate: str = MERGE):
        if on_duplicate not in (MERGE, REJECT):
            raise ValueError(f"on_duplicate must be {MERGE!r} or {REJECT!r}, got {on_duplicate!r}")
        self.language = language
        index: dict[str, LexiconEntry] = {}
        kept: list[LexiconEntry] = []
        for entry in entries:
            if entry.normalized_key in index:
                if on_duplicate == REJECT:
                    raise DuplicateEntryError(entry.normalized_key)
                logger.warning("duplicate lexicon key %r ignored (first entry wins)", entry.normalized_key)
                continue
            index[entry.normalized_key] = entry
            kept.append(entry)
        self._index = index
        self._entries = tuple(kept)
        self.max_entry_words = max((e.word_count for e in kept), default=0)
        self.max_key_chars = max((len(e.normalized_key) for e in kept), default=0)

    @property
    def entries(self) -> tuple[LexiconEntry, ...]:
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __contains__(self, surface):
        return normalize_surface(surface) in self._index

    def get(self, surface: str) -> Optional[LexiconEntry]:
        return self._index.get(normalize_surface(surface))

    def __eq__(self, other):
        if not isinstance(other, Lexicon):
            return NotImplemented
        return self.language == other.language and self._entries == other._entries

    def __repr__(self):
        return f"Lexicon(language={self.language!r}, entries={len(self)})"


def lookup_longest(lexicon: Lexicon, words: Sequence[str], start: int) -> Optional[tuple[int, LexiconEntry]]:
    """Return ``(match_len, entry)`` for the longest entry starting at ``words[start]``."""
    if not 0 <= start < len(words):
        raise IndexError(f"start {start} out of range for {len(words)} words")
    longest = min(lexicon.max_entry_words, len(words) - start)
    for k in range(longest, 0, -1):
        entry = lexicon._index.get(normalize_surface(" ".join(words[start:start + k])))
        if entry is not None:
            return k, entry
    return None


def load_lexicon(path, on_duplicate: str = MERGE) -> Lexicon:
    """Read a lexicon JSONL file.

    The first line is a header object ``{"language": code}``; each following
    non-blank line is ``{"source": ..., "gloss": ...}``.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        lines = fh.read().split("\n")

    def parse(lineno, line):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise LexiconFormatError(f"invalid JSON ({exc.msg})", line=lineno) from None
        if not isinstance(obj, dict):
            raise LexiconFormatError("expected a JSON object", line=lineno)
        return obj

    if not lines or not lines[0].strip():
        raise LexiconFormatError("missing header line", line=1)
    header = parse(1, lines[0])
    language = header.get("language")
    if not isinstance(language, str) or not language:
        raise LexiconFormatError("header must be an object with a 'language' string", line=1)

    entries = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        obj = parse(lineno, line)
        for key in ("source", "gloss"):
            if not isinstance(obj.get(key), str):
                raise LexiconFormatError(f"missing or non-string {key!r} field", line=lineno)
        if "\n" in obj["source"] or "\r" in obj["source"]:
            raise LexiconFormatError("source contains a line break", line=lineno)
        try:
            entry = LexiconEntry(obj["source"], obj["gloss"])
        except ValueError as exc:
            raise LexiconFormatError(str(exc), line=lineno) from None
        if entry.normalized_key in seen and on_duplicate == REJECT:
            raise DuplicateEntryError(entry.normalized_key, line=lineno)
        seen.setdefault(entry.normalized_key, lineno)
        entries.append(entry)
    return Lexicon(language, entries, on_duplicate=on_duplicate)


def dump_lexicon(lexicon: Lexicon) -> str:
    """Serialize to the JSONL format read by :func:`load_lexicon`."""
    lines = [json.dumps({"language": lexicon.language}, ensure_ascii=False)]
    for e in lexicon:
        lines.append(json.dumps({"source": e.source_surface, "gloss": e.gloss}, ensure_ascii=False))
    return "\n".join(lines) + "\n"
