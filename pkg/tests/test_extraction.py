import json
from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dip.answers import UNPARSEABLE, Boolean, Choice, Numeric
from dip.errors import EmptyEntryError, MissingDictionaryLineError, UnbalancedParenthesisError
from dip.extraction import (
    ParsedResponse,
    extract_boolean,
    extract_choice,
    extract_numeric_answer,
    find_numbers,
    parse_dictionary_response,
    parse_dictionary_transcript,
    parse_structured_response,
    render_dictionary_line,
    split_sections,
)
from dip.lexicon import LexiconEntry
from dip.prompts import PromptStrategy

LABELS = list("ABCDE")


@pytest.mark.parametrize(
    "text,expected",
    [
        ("The answer is 18.", "18"),
        ("$1,234.50", "1234.50"),
        ("She pays €72 in total", "72"),
        ("from 3 to -4", "-4"),
        ("x-4 is not negative", "4"),
        ("3 apples, then 7.5", "7.5"),
        ("no digits", None),
    ],
)
def test_numeric(text, expected):
    got = extract_numeric_answer(text)
    assert got == (None if expected is None else Decimal(expected))


def test_find_numbers_keeps_order():
    assert find_numbers("1 then 22 and 3.5") == ["1", "22", "3.5"]


@pytest.mark.parametrize(
    "text,expected",
    [
        ("(C) 180 km", "C"),
        ("The answer is (b).", "B"),
        ("C is a good choice", "C"),
        ("A or maybe (D)", "D"),
        ("I pick B", "B"),
        ("none of them", None),
    ],
)
def test_choice(text, expected):
    assert extract_choice(text, LABELS) == expected


@pytest.mark.parametrize(
    "text,expected",
    [("plausible", True), ("Implausible.", False), ("It is not plausible", False), ("Yes", True), ("maybe", None)],
)
def test_boolean(text, expected):
    assert extract_boolean(text) == expected


def test_sections_last_three_wins():
    raw = "1. Mary has 3.\n2. Steps:\n1. add\n3. no wait\n3. $72"
    sections = split_sections(raw)
    assert sections[1] == "Mary has 3."
    assert sections[3] == "$72"
    assert sections[2].startswith("Steps:")


def test_parse_dip_response():
    raw = "1. Translated English sentences: Mary buys 3 apples.\n2. 3 * 2 = 6\n**3.** The final numerical answer: 6"
    parsed = parse_structured_response(raw, PromptStrategy.DIP)
    assert parsed.translation == "Mary buys 3 apples."
    assert parsed.reasoning == "3 * 2 = 6"
    assert parsed.answer == Numeric(Decimal(6))


def test_parse_respects_strategy_sections():
    raw = "1. Mary buys apples.\n2. thinking\n3. 6"
    parsed = parse_structured_response(raw, PromptStrategy.STANDARD)
    assert parsed.translation is None and parsed.reasoning is None
    parsed = parse_structured_response(raw, PromptStrategy.CROSS_LINGUAL_THOUGHT)
    assert parsed.translation is None and parsed.reasoning == "thinking"


def test_parse_without_sections_uses_whole_text():
    parsed = parse_structured_response("I think it's (B)", PromptStrategy.STANDARD, "choice", LABELS)
    assert parsed.answer == Choice("B")


def test_parse_unparseable():
    parsed = parse_structured_response("3. dunno", PromptStrategy.STANDARD)
    assert parsed.answer is UNPARSEABLE


def test_parsed_response_json_roundtrip():
    parsed = ParsedResponse("t", None, "plausible", Boolean(True))
    assert ParsedResponse.from_json(json.loads(json.dumps(parsed.to_json()))) == parsed


def test_dictionary_same_line():
    raw = "English: Mary buys.\nbug_Latn: Mary melli.\ndictionary: Mary (Mary) melli (buys)"
    got = parse_dictionary_transcript(raw, "bug_Latn")
    assert [(e.source_surface, e.gloss) for e in got.entries] == [("Mary", "Mary"), ("melli", "buys")]
    assert got.english == "Mary buys."
    assert got.source == "Mary melli."


def test_dictionary_following_lines_stop_at_blank():
    raw = "dictionary:\nsatu (one) dua (two)\ntiga (three)\n\nnote (ignored)"
    assert [e.gloss for e in parse_dictionary_response(raw, "xx")] == ["one", "two", "three"]


def test_dictionary_multiword_surface():
    raw = "dictionary: сатып алды (bought) алма (apple)"
    assert [e.source_surface for e in parse_dictionary_response(raw, "kaz_Cyrl")] == ["сатып алды", "алма"]


def test_dictionary_errors():
    with pytest.raises(MissingDictionaryLineError):
        parse_dictionary_response("English: x", "xx")
    with pytest.raises(UnbalancedParenthesisError) as info:
        parse_dictionary_response("dictionary: a (b", "xx")
    assert info.value.offset == len("dictionary: a ")
    with pytest.raises(UnbalancedParenthesisError):
        parse_dictionary_response("dictionary: a b)", "xx")
    with pytest.raises(EmptyEntryError):
        parse_dictionary_response("dictionary: (b)", "xx")
    with pytest.raises(EmptyEntryError):
        parse_dictionary_response("dictionary: a ( )", "xx")


def test_fixture_transcripts(fixtures_dir):
    rows = [json.loads(line) for line in (fixtures_dir / "dictionary_transcripts.jsonl").read_text("utf-8").splitlines()]
    assert len(rows) == 50
    for row in rows:
        got = [[e.source_surface, e.gloss] for e in parse_dictionary_response(row["raw_text"], row["language"])]
        assert got == row["expected"], row["id"]


surface = st.lists(st.text(alphabet="abcxyzáқұ'-", min_size=1, max_size=5), min_size=1, max_size=2).map(" ".join)
gloss = st.text(alphabet="abc xyz[]()", min_size=1, max_size=8).filter(lambda g: g.strip())


@given(st.lists(st.tuples(surface, gloss), max_size=10))
def test_render_parse_roundtrip(pairs):
    entries = [LexiconEntry(s, g) for s, g in pairs]
    assert parse_dictionary_response("dictionary: " + render_dictionary_line(entries), "xx") == entries
