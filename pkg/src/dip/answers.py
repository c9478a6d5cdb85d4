"""Typed final answers and the matching rule used for accuracy."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Union

NUMERIC_TOLERANCE = Decimal("1e-6")

PLAUSIBLE = "plausible"
IMPLAUSIBLE = "implausible"


@dataclass(frozen=True)
class Numeric:
    value: Decimal

    def __post_init__(self):
        if not isinstance(self.value, Decimal):
            object.__setattr__(self, "value", to_decimal(self.value))


@dataclass(frozen=True)
class Choice:
    label: str


@dataclass(frozen=True)
class Boolean:
    plausible: bool

    @property
    def label(self) -> str:
        return PLAUSIBLE if self.plausible else IMPLAUSIBLE


@dataclass(frozen=True)
class Unparseable:
    pass


UNPARSEABLE = Unparseable()

Answer = Union[Numeric, Choice, Boolean, Unparseable]


def to_decimal(value) -> Decimal:
    if isinstance(value, bool):
        raise ValueError("booleans are not numeric answers")
    if isinstance(value, float):
        value = repr(value)
    try:
        d = Decimal(str(value).strip().replace(",", ""))
    except InvalidOperation:
        raise ValueError(f"not a number: {value!r}") from None
    if not d.is_finite():
        raise ValueError(f"not a finite number: {value!r}")
    return d


def answers_match(prediction: Answer, gold: Answer) -> bool:
    """Numeric within 1e-6 absolute; labels and plausibility exactly; Unparseable never."""
    if isinstance(prediction, Unparseable) or isinstance(gold, Unparseable):
        return False
    if isinstance(prediction, Numeric) and isinstance(gold, Numeric):
        return abs(prediction.value - gold.value) <= NUMERIC_TOLERANCE
    if isinstance(prediction, Choice) and isinstance(gold, Choice):
        return prediction.label == gold.label
    if isinstance(prediction, Boolean) and isinstance(gold, Boolean):
        return prediction.plausible == gold.plausible
    return False


def answer_to_json(answer: Answer) -> dict:
    if isinstance(answer, Numeric):
        return {"type": "numeric", "value": _format_decimal(answer.value)}
    if isinstance(answer, Choice):
        return {"type": "choice", "value": answer.label}
    if isinstance(answer, Boolean):
        return {"type": "boolean", "value": answer.label}
    return {"type": "unparseable", "value": None}


def _format_decimal(d: Decimal) -> str:
    text = format(d.normalize(), "f")
    return "0" if text in ("-0", "") else text


def answer_from_json(obj) -> Answer:
    """Accept the tagged form written by :func:`answer_to_json` or a bare value.

    Bare numbers become Numeric, "plausible"/"implausible"/booleans become
    Boolean, other strings Choice, and ``None`` Unparseable.
    """
    if isinstance(obj, dict):
        kind = obj.get("type")
        value = obj.get("value")
        if kind == "numeric":
            return Numeric(to_decimal(value))
        if kind == "choice":
            if not isinstance(value, str) or not value:
                raise ValueError(f"choice answer needs a label, got {value!r}")
            return Choice(value)
        if kind == "boolean":
            return parse_boolean_gold(value)
        if kind == "unparseable":
            return UNPARSEABLE
        raise ValueError(f"unknown answer type {kind!r}")
    if obj is None:
        return UNPARSEABLE
    if isinstance(obj, bool):
        return Boolean(obj)
    if isinstance(obj, (int, float)):
        return Numeric(to_decimal(obj))
    if isinstance(obj, str):
        low = obj.strip().lower()
        if low in (PLAUSIBLE, IMPLAUSIBLE):
            return Boolean(low == PLAUSIBLE)
        try:
            return Numeric(to_decimal(obj))
        except ValueError:
            return Choice(obj.strip())
    raise ValueError(f"cannot interpret {obj!r} as an answer")


def parse_boolean_gold(value) -> Boolean:
    if isinstance(value, bool):
        return Boolean(value)
    if isinstance(value, str) and value.strip().lower() in (PLAUSIBLE, IMPLAUSIBLE):
        return Boolean(value.strip().lower() == PLAUSIBLE)
    raise ValueError(f"boolean answer must be 'plausible', 'implausible' or a JSON boolean, got {value!r}")
