"""Run matrix execution, result tables, improvement statistics and quality analyses."""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from dip.answers import answers_match
from dip.config import RunConfig
from dip.datasets import BenchmarkItem, load_dataset, sample_subset
from dip.errors import ConfigError, DataError, ItemRunError, LLMError, MissingLexiconError, RaggedGridError
from dip.extraction import ParsedResponse, parse_structured_response
from dip.lexicon import Lexicon, load_lexicon
from dip.llm_client import (
    ChatCompletionsProvider,
    CompletionParams,
    LLMClient,
    ReplayProvider,
    ResponseCache,
)
from dip.metrics import BleuScore, ChrfScore, bleu, chrfpp
from dip.prompts import PromptStrategy, build_prompt

logger = logging.getLogger(__name__)

THRESHOLDS = (5, 10, 20)


class MissingReferenceError(DataError):
    pass


@dataclass(frozen=True)
class RunRecord:
    item_id: str
    dataset: str
    language: str
    strategy: PromptStrategy
    prompt_digest: str
    parsed: ParsedResponse
    correct: bool
    timing: float
    raw_text: str = ""

    def sort_key(self):
        return (self.dataset, self.language, self.strategy.order, self.item_id)

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "dataset": self.dataset,
            "language": self.language,
            "strategy": self.strategy.value,
            "prompt_digest": self.prompt_digest,
            "parsed": self.parsed.to_json(),
            "correct": self.correct,
            "timing": self.timing,
            "raw_text": self.raw_text,
        }

    @classmethod
    def from_json(cls, obj) -> "RunRecord":
        return cls(
            item_id=obj["item_id"],
            dataset=obj["dataset"],
            language=obj["language"],
            strategy=PromptStrategy(obj["strategy"]),
            prompt_digest=obj["prompt_digest"],
            parsed=ParsedResponse.from_json(obj["parsed"]),
            correct=bool(obj["correct"]),
            timing=float(obj["timing"]),
            raw_text=obj.get("raw_text", ""),
        )


def round_half_away(value, places: int = 2) -> Decimal:
    """Round an exact value half away from zero."""
    frac = Fraction(value) if not isinstance(value, float) else Fraction(str(value))
    with localcontext() as ctx:
        ctx.prec = 60
        exact = Decimal(frac.numerator) / Decimal(frac.denominator)
        return exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def _exact(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


# ---------------------------------------------------------------- run matrix


def run_matrix(
    items: Sequence[BenchmarkItem],
    strategies: Sequence[PromptStrategy],
    lexicons: Mapping[str, Lexicon],
    client: LLMClient,
    params: CompletionParams,
    max_workers: Optional[int] = None,
) -> list[RunRecord]:
    """One record per (item, strategy), sorted by dataset, language, strategy, item id."""
    strategies = [PromptStrategy(s) for s in strategies]
    if any(s.uses_lexicon for s in strategies):
        missing = sorted({it.language for it in items} - set(lexicons))
        if missing:
            raise MissingLexiconError(f"no lexicon for language(s): {', '.join(missing)}")

    jobs = [(item, strategy) for item in items for strategy in strategies]

    def run_one(job):
        item, strategy = job
        prompt = build_prompt(strategy, item, lexicons[item.language] if strategy.uses_lexicon else None)
        try:
            response = client.complete(prompt, params)
        except LLMError as exc:
            raise ItemRunError(item.id, strategy.value, exc) from exc
        parsed = parse_structured_response(response.raw_text, strategy, item.answer_type, item.labels or None)
        return RunRecord(
            item_id=item.id,
            dataset=item.dataset,
            language=item.language,
            strategy=strategy,
            prompt_digest=client.key_for(prompt.text, params),
            parsed=parsed,
            correct=answers_match(parsed.answer, item.gold),
            timing=response.latency_ms,
            raw_text=response.raw_text,
        )

    workers = max_workers or client.max_concurrency
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, job) for job in jobs]
        done, pending = wait(futures, return_when=FIRST_EXCEPTION)
        for f in pending:
            f.cancel()
        for f in futures:
            if f.done() and not f.cancelled() and f.exception() is not None:
                raise f.exception()
        records = [f.result() for f in futures]
    return sorted(records, key=RunRecord.sort_key)


# ---------------------------------------------------------------- tables


@dataclass(frozen=True)
class ResultTable:
    """Accuracy percentages per strategy and language; cells are exact fractions."""

    languages: tuple[str, ...]
    cells: Mapping[PromptStrategy, Mapping[str, Fraction]]

    @property
    def strategies(self) -> list[PromptStrategy]:
        return sorted(self.cells, key=lambda s: s.order)

    def percent(self, strategy, language) -> Decimal:
        return round_half_away(self.cells[PromptStrategy(strategy)][language])

    def average(self, strategy) -> Decimal:
        row = self.cells[PromptStrategy(strategy)]
        return round_half_away(sum(row.values(), Fraction(0)) / len(row))

    def row(self, strategy) -> dict[str, Decimal]:
        return {lang: self.percent(strategy, lang) for lang in self.languages}

    def to_json(self) -> dict:
        return {
            "languages": list(self.languages),
            "rows": {
                s.value: {
                    "name": s.display_name,
                    "cells": {lang: float(v) for lang, v in self.row(s).items()},
                    "average": float(self.average(s)),
                }
                for s in self.strategies
            },
        }

    def render(self, title: str = "") -> str:
        header = ["Model", *self.languages, "Average"]
        body = [
            [s.display_name, *(f"{v:.2f}" for v in self.row(s).values()), f"{self.average(s):.2f}"]
            for s in self.strategies
        ]
        widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]

        def fmt(row):
            first = row[0].ljust(widths[0])
            rest = [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
            return "  ".join([first, *rest]).rstrip()

        lines = [title] if title else []
        lines.append(fmt(header))
        lines.append("-" * len(lines[-1]))
        lines.extend(fmt(r) for r in body)
        return "\n".join(lines)


def aggregate_table(records: Iterable, languages: Optional[Sequence[str]] = None) -> ResultTable:
    """Per-cell accuracy x100 over a rectangular strategy x language grid.

    ``records`` only need ``strategy``, ``language`` and ``correct``
    attributes. Column order follows ``languages`` when given, otherwise
    sorted codes.
    """
    counts: dict[PromptStrategy, dict[str, list[int]]] = defaultdict(lambda: defaultdict(lambda: [0, 0]))
    for r in records:
        cell = counts[PromptStrategy(r.strategy)][r.language]
        cell[0] += bool(r.correct)
        cell[1] += 1
    if not counts:
        raise RaggedGridError("no records to aggregate")
    seen_langs = {lang for row in counts.values() for lang in row}
    if languages is None:
        languages = sorted(seen_langs)
    else:
        languages = [lang for lang in languages if lang in seen_langs]
        extra = seen_langs - set(languages)
        if extra:
            raise RaggedGridError(f"records contain languages outside the requested columns: {sorted(extra)}")
    for strategy in sorted(counts, key=lambda s: s.order):
        for lang in languages:
            if lang not in counts[strategy]:
                raise RaggedGridError(f"missing cell: strategy {strategy.value}, language {lang}")
    cells = {
        s: {lang: Fraction(100 * counts[s][lang][0], counts[s][lang][1]) for lang in languages}
        for s in counts
    }
    return ResultTable(tuple(languages), cells)


# ---------------------------------------------------------------- improvement statistics


@dataclass(frozen=True)
class ImprovementStats:
    total: int
    improved: int
    degraded: int
    ties: int
    improved_over: Mapping[int, int]
    degraded_over: Mapping[int, int]
    improved_bands: Mapping[str, int]
    degraded_bands: Mapping[str, int]
    deltas: Mapping[str, Fraction]

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "improved": self.improved,
            "degraded": self.degraded,
            "ties": self.ties,
            "improved_over": {f">{t}": n for t, n in self.improved_over.items()},
            "degraded_over": {f">{t}": n for t, n in self.degraded_over.items()},
            "improved_bands": dict(self.improved_bands),
            "degraded_bands": dict(self.degraded_bands),
            "deltas": {lang: float(round_half_away(d)) for lang, d in self.deltas.items()},
        }


def _band_labels(thresholds):
    labels = [f"{lo}-{hi}" for lo, hi in zip(thresholds, thresholds[1:])]
    return labels + [f">{thresholds[-1]}"]


def improvement_stats(baseline: Mapping[str, object], treatment: Mapping[str, object],
                      thresholds: Sequence[int] = THRESHOLDS) -> ImprovementStats:
    """Compare per-language accuracies of a treatment against a baseline.

    ``improved_over[t]`` counts improved languages with delta > t (nested);
    ``improved_bands`` counts them in disjoint (t_i, t_i+1] bands. Ties
    count as neither improved nor degraded.
    """
    if set(baseline) != set(treatment):
        missing = sorted(set(baseline) ^ set(treatment))
        raise DataError(f"baseline and treatment cover different languages: {missing}")
    thresholds = sorted(thresholds)
    deltas = {lang: _exact(treatment[lang]) - _exact(baseline[lang]) for lang in baseline}
    ups = [d for d in deltas.values() if d > 0]
    downs = [-d for d in deltas.values() if d < 0]

    def over(values):
        return {t: sum(v > t for v in values) for t in thresholds}

    def bands(values):
        edges = list(thresholds) + [None]
        out = {}
        for label, lo, hi in zip(_band_labels(thresholds), edges, edges[1:]):
            out[label] = sum(v > lo and (hi is None or v <= hi) for v in values)
        return out

    return ImprovementStats(
        total=len(deltas),
        improved=len(ups),
        degraded=len(downs),
        ties=len(deltas) - len(ups) - len(downs),
        improved_over=over(ups),
        degraded_over=over(downs),
        improved_bands=bands(ups),
        degraded_bands=bands(downs),
        deltas=dict(sorted(deltas.items())),
    )


# ---------------------------------------------------------------- quality analyses


@dataclass(frozen=True)
class QualityScore:
    bleu: BleuScore
    chrf: ChrfScore

    def to_json(self) -> dict:
        return {"bleu": round(self.bleu.score, 4), "chrfpp": round(self.chrf.score, 4)}


def _score_sections(records, items, strategy_filter, hyp_of, ref_of, what):
    index = {(it.dataset, it.language, it.id): it for it in items}
    grouped: dict[PromptStrategy, dict[str, tuple[list, list]]] = defaultdict(lambda: defaultdict(lambda: ([], [])))
    for r in records:
        if not strategy_filter(r.strategy):
            continue
        item = index.get((r.dataset, r.language, r.item_id))
        if item is None:
            raise MissingReferenceError(f"no item {r.item_id!r} ({r.dataset}, {r.language}) for record")
        ref = ref_of(item)
        if ref is None:
            raise MissingReferenceError(f"item {item.id!r} ({item.language}) has no {what}")
        hyps, refs = grouped[r.strategy][r.language]
        hyps.append(hyp_of(r) or "")
        refs.append(ref)
    return {
        s: {lang: QualityScore(bleu(h, rf), chrfpp(h, rf)) for lang, (h, rf) in sorted(by_lang.items())}
        for s, by_lang in sorted(grouped.items(), key=lambda kv: kv[0].order)
    }


def score_translation_quality(records, items) -> dict[PromptStrategy, dict[str, QualityScore]]:
    """BLEU / chrF++ of the translation section against the English question, per strategy and language."""
    return _score_sections(
        records, items, lambda s: s.translates, lambda r: r.parsed.translation,
        lambda it: it.english_question, "english_question",
    )


def score_thinking_quality(records, items) -> dict[PromptStrategy, dict[str, QualityScore]]:
    """BLEU / chrF++ of the reasoning section against the gold rationale (absent reasoning scores as "")."""
    return _score_sections(
        records, items, lambda s: s.reasons, lambda r: r.parsed.reasoning,
        lambda it: it.gold_rationale, "gold_rationale",
    )


def _quality_json(scores):
    out = {}
    for strategy, by_lang in scores.items():
        row = {lang: q.to_json() for lang, q in by_lang.items()}
        row["average"] = {
            "bleu": round(sum(q.bleu.score for q in by_lang.values()) / len(by_lang), 4),
            "chrfpp": round(sum(q.chrf.score for q in by_lang.values()) / len(by_lang), 4),
        }
        out[strategy.value] = row
    return out


# ---------------------------------------------------------------- reports


def build_report(records: Sequence[RunRecord], items: Optional[Sequence[BenchmarkItem]] = None,
                 languages: Optional[Sequence[str]] = None) -> tuple[dict, str, dict]:
    """``(table_json, table_text, stats_json)`` for a set of records."""
    by_dataset: dict[str, list[RunRecord]] = defaultdict(list)
    for r in records:
        by_dataset[r.dataset].append(r)
    table_json, texts, stats = {}, [], {}
    for dataset in sorted(by_dataset):
        recs = by_dataset[dataset]
        table = aggregate_table(recs, languages)
        table_json[dataset] = table.to_json()
        texts.append(table.render(title=f"== {dataset} =="))

        entry = {}
        if PromptStrategy.STANDARD in table.cells:
            base = table.cells[PromptStrategy.STANDARD]
            entry["improvement_vs_standard"] = {
                s.value: improvement_stats(base, table.cells[s]).to_json()
                for s in table.strategies
                if s is not PromptStrategy.STANDARD
            }
        if items is not None:
            ds_items = [it for it in items if it.dataset == dataset]
            if ds_items and all(it.english_question is not None for it in ds_items):
                entry["translation_quality"] = _quality_json(score_translation_quality(recs, ds_items))
            if ds_items and all(it.gold_rationale is not None for it in ds_items):
                entry["thinking_quality"] = _quality_json(score_thinking_quality(recs, ds_items))
        stats[dataset] = entry
    return table_json, "\n\n".join(texts) + "\n", stats


def dump_json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def write_records(records: Sequence[RunRecord], path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def read_records(path) -> list[RunRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(RunRecord.from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: malformed record ({exc})") from None
    return records


def write_report(out_dir, records, items=None, languages=None) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table_json, table_text, stats = build_report(records, items, languages)
    paths = {
        "table.json": out_dir / "table.json",
        "table.txt": out_dir / "table.txt",
        "stats.json": out_dir / "stats.json",
    }
    paths["table.json"].write_text(dump_json(table_json), encoding="utf-8")
    paths["table.txt"].write_text(table_text, encoding="utf-8")
    paths["stats.json"].write_text(dump_json(stats), encoding="utf-8")
    return paths


# ---------------------------------------------------------------- configured runs


def make_client(config: RunConfig) -> LLMClient:
    pc = config.provider
    if pc.type == "replay":
        provider = ReplayProvider(pc.store, provider_id=pc.id or "replay")
    else:
        provider = ChatCompletionsProvider(pc.url, api_key_env=pc.api_key_env, provider_id=pc.id, timeout=pc.timeout)
    cache_path = pc.cache if pc.cache is not None else config.out_dir / "cache.jsonl"
    return LLMClient(provider, ResponseCache(cache_path), max_retries=pc.max_retries,
                     backoff_s=pc.backoff_s, max_concurrency=config.max_concurrency)


def load_items(config: RunConfig) -> list[BenchmarkItem]:
    items = []
    for path in config.datasets:
        try:
            loaded = load_dataset(path)
        except FileNotFoundError:
            raise ConfigError(f"dataset file not found: {path}") from None
        if config.languages is not None:
            wanted = set(config.languages)
            loaded = [it for it in loaded if it.language in wanted]
        if config.sample_n is not None:
            groups = defaultdict(list)
            for it in loaded:
                groups[(it.dataset, it.language)].append(it)
            loaded = [it for key in sorted(groups) for it in sample_subset(groups[key], config.sample_n, config.seed)]
        items.extend(loaded)
    return items


def load_lexicons(config: RunConfig, languages: Iterable[str]) -> dict[str, Lexicon]:
    if config.lexicon_dir is None:
        raise ConfigError("lexicon_dir is required for dictionary strategies")
    lexicons = {}
    for lang in sorted(set(languages)):
        path = config.lexicon_dir / f"{lang}.jsonl"
        if not path.exists():
            raise MissingLexiconError(f"no lexicon for {lang} (expected {path})")
        lexicon = load_lexicon(path)
        if lexicon.language != lang:
            raise ConfigError(f"{path} declares language {lexicon.language!r}, expected {lang!r}")
        lexicons[lang] = lexicon
    return lexicons


def run_experiment(config: RunConfig, client: Optional[LLMClient] = None) -> dict[str, Path]:
    """Execute a configured run and write records.jsonl, table.json, table.txt and stats.json."""
    strategies = [PromptStrategy.parse(s) for s in config.strategies] if config.strategies else list(PromptStrategy)
    items = load_items(config)
    if not items:
        raise ConfigError("no benchmark items selected")
    lexicons = {}
    if any(s.uses_lexicon for s in strategies):
        lexicons = load_lexicons(config, (it.language for it in items))
    client = client or make_client(config)
    pc = config.provider
    params = CompletionParams(pc.model, float(pc.temperature), pc.max_output_tokens, pc.seed)
    records = run_matrix(items, strategies, lexicons, client, params)

    config.out_dir.mkdir(parents=True, exist_ok=True)
    records_path = config.out_dir / "records.jsonl"
    write_records(records, records_path)
    paths = write_report(config.out_dir, records, items, config.languages)
    paths["records.jsonl"] = records_path
    logger.info("%d records, %d origin calls", len(records), client.origin_calls)
    return paths
