"""Benchmark items for GSM8K, SVAMP, AQuA, Date and Sports in one JSONL schema."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from dip.answers import Answer, Choice, Numeric, answer_to_json, parse_boolean_gold, to_decimal
from dip.errors import SchemaError

ANSWER_TYPES = {
    "gsm8k": "numeric",
    "svamp": "numeric",
    "aqua": "choice",
    "date": "choice",
    "sports": "boolean",
}

_FIELDS = {
    "id",
    "dataset",
    "language",
    "question",
    "answer_type",
    "gold",
    "choices",
    "english_question",
    "gold_rationale",
}


@dataclass(frozen=True)
class BenchmarkItem:
    id: str
    dataset: str
    language: str
    question: str
    answer_type: str
    gold: Answer
    choices: Optional[tuple[tuple[str, str], ...]] = None
    english_question: Optional[str] = None
    gold_rationale: Optional[str] = None

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.choices or ())

    def to_json(self) -> dict:
        obj = {
            "id": self.id,
            "dataset": self.dataset,
            "language": self.language,
            "question": self.question,
            "answer_type": self.answer_type,
            "gold": answer_to_json(self.gold)["value"],
        }
        if self.choices is not None:
            obj["choices"] = [{"label": label, "text": text} for label, text in self.choices]
        if self.english_question is not None:
            obj["english_question"] = self.english_question
        if self.gold_rationale is not None:
            obj["gold_rationale"] = self.gold_rationale
        return obj


def item_from_json(obj, line: Optional[int] = None) -> BenchmarkItem:
    """Validate one decoded JSONL object and build an item."""

    def fail(field, message):
        raise SchemaError(message, line=line, field=field)

    if not isinstance(obj, dict):
        fail(None, "expected a JSON object")
    unknown = sorted(set(obj) - _FIELDS)
    if unknown:
        fail(unknown[0], "unknown field")
    for name in ("id", "dataset", "language", "question", "answer_type"):
        if not isinstance(obj.get(name), str) or not obj[name].strip():
            fail(name, "required non-empty string")
    if "gold" not in obj:
        fail("gold", "required field missing")

    dataset = obj["dataset"]
    if dataset not in ANSWER_TYPES:
        fail("dataset", f"must be one of {sorted(ANSWER_TYPES)}, got {dataset!r}")
    answer_type = obj["answer_type"]
    if answer_type != ANSWER_TYPES[dataset]:
        fail("answer_type", f"{dataset} items must have answer_type {ANSWER_TYPES[dataset]!r}, got {answer_type!r}")

    choices = obj.get("choices")
    if answer_type == "choice":
        if choices is None:
            fail("choices", "choice items need choices")
        choices = _parse_choices(choices, fail)
    elif choices is not None:
        fail("choices", f"only choice items may carry choices, this one is {answer_type}")

    raw_gold = obj["gold"]
    try:
        if answer_type == "numeric":
            if isinstance(raw_gold, bool) or not isinstance(raw_gold, (int, float, str)):
                raise ValueError(f"numeric gold must be a number, got {raw_gold!r}")
            gold = Numeric(to_decimal(raw_gold))
        elif answer_type == "choice":
            labels = [label for label, _ in choices]
            if raw_gold not in labels:
                raise ValueError(f"gold {raw_gold!r} is not one of the choice labels {labels}")
            gold = Choice(raw_gold)
        else:
            gold = parse_boolean_gold(raw_gold)
    except ValueError as exc:
        fail("gold", str(exc))

    for name in ("english_question", "gold_rationale"):
        if obj.get(name) is not None and not isinstance(obj[name], str):
            fail(name, "must be a string")

    return BenchmarkItem(
        id=obj["id"],
        dataset=dataset,
        language=obj["language"],
        question=obj["question"],
        answer_type=answer_type,
        gold=gold,
        choices=choices,
        english_question=obj.get("english_question"),
        gold_rationale=obj.get("gold_rationale"),
    )


def _parse_choices(choices, fail):
    if isinstance(choices, dict):
        pairs = list(choices.items())
    elif isinstance(choices, list):
        pairs = []
        for c in choices:
            if not isinstance(c, dict) or set(c) != {"label", "text"}:
                fail("choices", "list entries must be objects with 'label' and 'text'")
            pairs.append((c["label"], c["text"]))
    else:
        fail("choices", "must be a list of {label, text} objects or a label->text object")
    if not pairs:
        fail("choices", "must not be empty")
    labels = []
    for label, text in pairs:
        if not isinstance(label, str) or not label or any(ch.isspace() for ch in label):
            fail("choices", f"labels must be single tokens, got {label!r}")
        if not isinstance(text, str):
            fail("choices", f"choice {label!r} text must be a string")
        labels.append(label)
    if len(set(labels)) != len(labels):
        fail("choices", "labels must be distinct")
    return tuple(pairs)


def load_dataset(path) -> list[BenchmarkItem]:
    items = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON ({exc.msg})", line=lineno) from None
            items.append(item_from_json(obj, line=lineno))
    return items


def sample_subset(items: Sequence[BenchmarkItem], n: int, seed: int) -> list[BenchmarkItem]:
    """Deterministic random subset of size ``n``, kept in original order."""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if n > len(items):
        raise ValueError(f"cannot sample {n} items from {len(items)}")
    chosen = sorted(random.Random(seed).sample(range(len(items)), n))
    return [items[i] for i in chosen]
