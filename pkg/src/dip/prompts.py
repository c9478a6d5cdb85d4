"""Prompt rendering for the eight strategies and the dictionary-construction prompt.

Every strategy is a small edit of the full DIP template (``templates/full.txt``):
output-format items keep their original numbers so that section ``1.`` is
always the English translation, ``2.`` the reasoning and ``3.`` the final
answer, whichever items a strategy asks for.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from dip.annotator import annotate_interleaved, render_dictionary_block
from dip.datasets import BenchmarkItem
from dip.errors import MissingLexiconError, PromptError, UnknownLanguageError
from dip.lexicon import Lexicon

PLACEHOLDER_MARKERS = ("<language>", "<question>", "<target>", "<source>", "<lang>")

NUMERIC_ANSWER_LINE = "The final numerical answer"
OPTION_ANSWER_LINE = "The final answer (one of the given options)"


class PromptStrategy(str, enum.Enum):
    STANDARD = "standard"
    NON_INSERTION = "non_insertion"
    ENGLISH_PIVOT = "english_pivot"
    ENGLISH_PIVOT_THOUGHT = "english_pivot_thought"
    CROSS_LINGUAL_THOUGHT = "cross_lingual_thought"
    DIP_NO_EP_NO_CT = "dip_no_ep_no_ct"
    DIP_EP_NO_CT = "dip_ep_no_ct"
    DIP = "dip"

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @property
    def uses_lexicon(self) -> bool:
        return self in _LEXICON_STRATEGIES

    @property
    def translates(self) -> bool:
        """Whether the template asks for an English translation section."""
        return self in _PIVOT_STRATEGIES

    @property
    def reasons(self) -> bool:
        """Whether the template asks for a derivation section."""
        return self in _THOUGHT_STRATEGIES

    @property
    def order(self) -> int:
        return _ORDER.index(self)

    @classmethod
    def parse(cls, name: str) -> "PromptStrategy":
        key = name.strip().lower().replace("-", "_").replace(" ", "_")
        try:
            return cls(key)
        except ValueError:
            raise PromptError(f"unknown strategy {name!r}; expected one of {[s.value for s in cls]}") from None


_ORDER = list(PromptStrategy)

_DISPLAY_NAMES = {
    PromptStrategy.STANDARD: "Standard Prompting",
    PromptStrategy.NON_INSERTION: "Non-insertion Prompting",
    PromptStrategy.ENGLISH_PIVOT: "English Pivoting",
    PromptStrategy.ENGLISH_PIVOT_THOUGHT: "English Pivot Thought",
    PromptStrategy.CROSS_LINGUAL_THOUGHT: "Cross-lingual Thought",
    PromptStrategy.DIP_NO_EP_NO_CT: "DIP w/o EP w/o CT",
    PromptStrategy.DIP_EP_NO_CT: "DIP w/ EP w/o CT",
    PromptStrategy.DIP: "DIP",
}

_LEXICON_STRATEGIES = frozenset(
    {PromptStrategy.NON_INSERTION, PromptStrategy.DIP_NO_EP_NO_CT, PromptStrategy.DIP_EP_NO_CT, PromptStrategy.DIP}
)
_PIVOT_STRATEGIES = frozenset(
    {PromptStrategy.ENGLISH_PIVOT, PromptStrategy.ENGLISH_PIVOT_THOUGHT, PromptStrategy.DIP_EP_NO_CT, PromptStrategy.DIP}
)
_THOUGHT_STRATEGIES = frozenset(
    {PromptStrategy.ENGLISH_PIVOT_THOUGHT, PromptStrategy.CROSS_LINGUAL_THOUGHT, PromptStrategy.DIP}
)

# (template file, annotate the question?)
_TEMPLATES = {
    PromptStrategy.STANDARD: ("standard.txt", False),
    PromptStrategy.NON_INSERTION: ("non_insertion.txt", False),
    PromptStrategy.ENGLISH_PIVOT: ("pivot.txt", False),
    PromptStrategy.ENGLISH_PIVOT_THOUGHT: ("full.txt", False),
    PromptStrategy.CROSS_LINGUAL_THOUGHT: ("cross_lingual_thought.txt", False),
    PromptStrategy.DIP_NO_EP_NO_CT: ("standard.txt", True),
    PromptStrategy.DIP_EP_NO_CT: ("pivot.txt", True),
    PromptStrategy.DIP: ("full.txt", True),
}


@dataclass(frozen=True)
class Prompt:
    text: str
    strategy: Optional[PromptStrategy]
    language_name: str
    question_text: str


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    text = resources.files("dip").joinpath("templates", name).read_text(encoding="utf-8")
    return text.rstrip("\n")


@lru_cache(maxsize=1)
def language_names() -> dict[str, str]:
    raw = resources.files("dip").joinpath("data", "flores200_languages.json").read_text(encoding="utf-8")
    return json.loads(raw)


def language_name(code: str) -> str:
    try:
        return language_names()[code]
    except KeyError:
        raise UnknownLanguageError(f"no display name for language code {code!r}") from None


def final_answer_line(answer_type: str) -> str:
    return NUMERIC_ANSWER_LINE if answer_type == "numeric" else OPTION_ANSWER_LINE


def options_block(item: BenchmarkItem) -> str:
    if item.answer_type == "choice":
        return "Answer Choices: " + " ".join(f"({label}) {text}" for label, text in item.choices)
    if item.answer_type == "boolean":
        return "Answer Choices: plausible, implausible"
    return ""


def build_prompt(strategy: PromptStrategy, item: BenchmarkItem, lexicon: Optional[Lexicon] = None) -> Prompt:
    strategy = PromptStrategy(strategy)
    if strategy.uses_lexicon and lexicon is None:
        raise MissingLexiconError(f"strategy {strategy.value} needs a lexicon for {item.language}")
    if not strategy.uses_lexicon and lexicon is not None:
        raise PromptError(f"strategy {strategy.value} does not use a lexicon")
    name = language_name(item.language)
    template_name, annotate = _TEMPLATES[strategy]

    question = item.question
    if annotate:
        question = annotate_interleaved(question, lexicon).text
    options = options_block(item)
    if options:
        question = f"{question}\n{options}"

    fields = {
        "language": name,
        "question": question,
        "final_answer": final_answer_line(item.answer_type),
        "dictionary_block": render_dictionary_block(item.question, lexicon) if lexicon is not None else "",
    }
    text = load_template(template_name).format_map(fields)
    return Prompt(text=text, strategy=strategy, language_name=name, question_text=question)


def dictionary_construction_prompt(english: str, source: str, language_name: str, language_code: str) -> Prompt:
    """Prompt asking an LLM for a translation plus a word-for-word dictionary."""
    if not english.strip() or not source.strip():
        raise PromptError("dictionary construction needs a non-empty English and source sentence")
    text = load_template("dictionary_construction.txt").format_map(
        {"language": language_name, "lang": language_code, "target": english.strip(), "source": source.strip()}
    )
    return Prompt(text=text, strategy=None, language_name=language_name, question_text=source.strip())
