"""Parsing model outputs: numbered sections, typed answers, dictionary responses."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Sequence

from dip.answers import UNPARSEABLE, Answer, Boolean, Choice, Numeric, answer_to_json, answer_from_json
from dip.errors import EmptyEntryError, MissingDictionaryLineError, UnbalancedParenthesisError
from dip.lexicon import LexiconEntry
from dip.prompts import PromptStrategy


@dataclass(frozen=True)
class ParsedResponse:
    translation: Optional[str]
    reasoning: Optional[str]
    final_answer_text: str
    answer: Answer

    def to_json(self) -> dict:
        return {
            "translation": self.translation,
            "reasoning": self.reasoning,
            "final_answer_text": self.final_answer_text,
            "answer": answer_to_json(self.answer),
        }

    @classmethod
    def from_json(cls, obj) -> "ParsedResponse":
        return cls(obj.get("translation"), obj.get("reasoning"), obj["final_answer_text"], answer_from_json(obj["answer"]))


# "3.", "3 .", "3:", "3)" at the start of a line
_HEADER_RE = re.compile(r"^[ \t]*(?:\*\*)?([123])[ \t]*[.:)]", re.MULTILINE)


def split_sections(raw: str) -> dict[int, str]:
    """Locate the numbered output sections.

    The answer section is the *last* ``3.`` header so that numbered steps
    inside a derivation do not end it early; sections 1 and 2 are the first
    matching headers before it.
    """
    headers = [(m.start(), m.end(), int(m.group(1))) for m in _HEADER_RE.finditer(raw)]
    chosen = {}
    threes = [h for h in headers if h[2] == 3]
    limit = len(raw)
    if threes:
        chosen[3] = threes[-1]
        limit = threes[-1][0]
    ones = [h for h in headers if h[2] == 1 and h[0] < limit]
    if ones:
        chosen[1] = ones[0]
    floor = chosen[1][1] if 1 in chosen else 0
    twos = [h for h in headers if h[2] == 2 and floor <= h[0] < limit]
    if twos:
        chosen[2] = twos[0]

    ordered = sorted(chosen.items(), key=lambda kv: kv[1][0])
    sections = {}
    for idx, (number, (_, body_start, _)) in enumerate(ordered):
        body_end = ordered[idx + 1][1][0] if idx + 1 < len(ordered) else len(raw)
        body = raw[body_start:body_end]
        sections[number] = body.strip().removeprefix("**").strip()
    return sections


def parse_structured_response(
    raw: str,
    strategy: PromptStrategy,
    answer_type: str = "numeric",
    labels: Optional[Sequence[str]] = None,
) -> ParsedResponse:
    """Split a completion into translation / reasoning / final answer and type the answer.

    Never raises on model text: a response with no recognisable answer
    yields ``Unparseable``.
    """
    strategy = PromptStrategy(strategy)
    sections = {n: _strip_echoed_label(body) for n, body in split_sections(raw).items()}
    translation = sections.get(1) if strategy.translates else None
    reasoning = sections.get(2) if strategy.reasons else None
    final_text = sections[3] if 3 in sections else raw.strip()
    answer = extract_answer(final_text, answer_type, labels)
    return ParsedResponse(translation, reasoning, final_text, answer)


_ECHOED_LABEL_RE = re.compile(
    r"^(?:translated english sentences?|the derivation process(?: in english)?|"
    r"the final numerical answer|the final answer(?: \(one of the given options\))?)[ \t]*(?::|\n|$)[ \t]*",
    re.IGNORECASE,
)


def _strip_echoed_label(body: str) -> str:
    """Models often repeat the format item before filling it in."""
    return _ECHOED_LABEL_RE.sub("", body, count=1).strip()


def extract_answer(text: str, answer_type: str, labels: Optional[Sequence[str]] = None) -> Answer:
    if answer_type == "numeric":
        value = extract_numeric_answer(text)
        return UNPARSEABLE if value is None else Numeric(value)
    if answer_type == "choice":
        if not labels:
            raise ValueError("choice extraction needs the option labels")
        label = extract_choice(text, labels)
        return UNPARSEABLE if label is None else Choice(label)
    if answer_type == "boolean":
        verdict = extract_boolean(text)
        return UNPARSEABLE if verdict is None else Boolean(verdict)
    raise ValueError(f"unknown answer type {answer_type!r}")


_THOUSANDS_RE = re.compile(r"(?<=\d),(?=\d)")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")


def normalize_numeric_text(text: str) -> str:
    """Drop thousands separators and currency symbols."""
    text = _THOUSANDS_RE.sub("", text)
    return "".join(ch for ch in text if unicodedata.category(ch) != "Sc")


def find_numbers(text: str) -> list[str]:
    """Number literals in already-normalized text; a '-' counts as a sign unless it follows a word."""
    found = []
    for m in _NUMBER_RE.finditer(text):
        start = m.start()
        if start and text[start - 1] == "-" and (start < 2 or not text[start - 2].isalnum()):
            start -= 1
        found.append(text[start:m.end()])
    return found


def extract_numeric_answer(text: str) -> Optional[Decimal]:
    """The last number in ``text``.

    >>> extract_numeric_answer("The answer is $1,234.50.")
    Decimal('1234.50')
    """
    found = find_numbers(normalize_numeric_text(text))
    if not found:
        return None
    return Decimal(found[-1])


def extract_choice(text: str, labels: Sequence[str]) -> Optional[str]:
    """Last standalone option label, preferring parenthesised ``(B)`` forms."""
    if not labels:
        raise ValueError("labels must be non-empty")
    by_fold = {label.casefold(): label for label in labels}
    alternation = "|".join(re.escape(label) for label in sorted(labels, key=len, reverse=True))
    # bare labels are case-sensitive so the article "a" is not option A
    for pattern, flags in ((rf"\(\s*({alternation})\s*\)", re.IGNORECASE), (rf"(?<!\w)({alternation})(?!\w)", 0)):
        hits = re.findall(pattern, text, flags=flags)
        if hits:
            return by_fold[hits[-1].casefold()]
    return None


_NEGATIVE_RE = re.compile(r"\b(?:implausible|not\s+plausible|no)\b", re.IGNORECASE)
_POSITIVE_RE = re.compile(r"\b(?:plausible|yes)\b", re.IGNORECASE)


def extract_boolean(text: str) -> Optional[bool]:
    """``True`` for plausible, ``False`` for implausible; negatives take precedence."""
    if _NEGATIVE_RE.search(text):
        return False
    if _POSITIVE_RE.search(text):
        return True
    return None


@dataclass(frozen=True)
class DictionaryResponse:
    entries: tuple[LexiconEntry, ...]
    english: Optional[str]
    source: Optional[str]


_DICT_LINE_RE = re.compile(r"^[ \t]*dictionary[ \t]*:", re.MULTILINE | re.IGNORECASE)


def parse_dictionary_response(raw: str, expected_code: str) -> list[LexiconEntry]:
    """Entries from the ``dictionary:`` line of a construction response."""
    return list(parse_dictionary_transcript(raw, expected_code).entries)


def parse_dictionary_transcript(raw: str, expected_code: str) -> DictionaryResponse:
    match = _DICT_LINE_RE.search(raw)
    if match is None:
        raise MissingDictionaryLineError("response has no line starting with 'dictionary:'")

    english = source = None
    for line in raw[: match.start()].splitlines():
        stripped = line.strip()
        if stripped.startswith("English:"):
            english = stripped[len("English:"):].strip()
        elif expected_code and stripped.startswith(f"{expected_code}:"):
            source = stripped[len(expected_code) + 1:].strip()

    body_start = match.end()
    line_end = raw.find("\n", body_start)
    line_end = len(raw) if line_end == -1 else line_end
    if raw[body_start:line_end].strip():
        body_end = line_end
    else:
        # dictionary on the following lines, up to the first blank line
        blank = re.compile(r"\n[ \t]*\n").search(raw, line_end + 1) if line_end < len(raw) else None
        body_end = blank.start() if blank else len(raw)
    entries = _parse_groups(raw, body_start, body_end)
    return DictionaryResponse(tuple(entries), english, source)


def _parse_groups(raw: str, start: int, end: int) -> list[LexiconEntry]:
    def offset(i):
        return len(raw[:i].encode("utf-8", "surrogatepass"))

    entries = []
    surface_start = start
    i = start
    while i < end:
        ch = raw[i]
        if ch == ")":
            raise UnbalancedParenthesisError("')' without matching '('", offset=offset(i))
        if ch == "(":
            close = i + 1
            while close < end and raw[close] not in "()":
                close += 1
            if close >= end or raw[close] == "(":
                raise UnbalancedParenthesisError("'(' is not closed", offset=offset(i))
            surface = " ".join(raw[surface_start:i].split())
            gloss = raw[i + 1:close].strip()
            if not surface:
                raise EmptyEntryError(f"gloss group at byte offset {offset(i)} has no source word")
            if not gloss:
                raise EmptyEntryError(f"entry {surface!r} at byte offset {offset(i)} has an empty gloss")
            entries.append(LexiconEntry(surface, gloss))
            i = close + 1
            surface_start = i
            continue
        i += 1
    return entries


def render_dictionary_line(entries: Sequence[LexiconEntry]) -> str:
    return " ".join(f"{e.source_surface} ({e.gloss})" for e in entries)
