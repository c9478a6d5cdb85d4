import dataclasses
from collections import namedtuple
from decimal import Decimal
from fractions import Fraction

import pytest

from dip.config import load_config
from dip.datasets import load_dataset
from dip.errors import DataError, ItemRunError, MissingLexiconError, RaggedGridError
from dip.harness import (
    MissingReferenceError,
    aggregate_table,
    build_report,
    improvement_stats,
    read_records,
    round_half_away,
    run_experiment,
    run_matrix,
    score_thinking_quality,
    score_translation_quality,
    write_records,
)
from dip.lexicon import load_lexicon
from dip.llm_client import CompletionParams, LLMClient, ReplayProvider
from dip.prompts import PromptStrategy

Rec = namedtuple("Rec", "strategy language correct")


def grid(cells):
    """records reproducing {strategy: {lang: (correct, total)}}"""
    out = []
    for strategy, row in cells.items():
        for lang, (k, n) in row.items():
            out += [Rec(strategy, lang, True)] * k + [Rec(strategy, lang, False)] * (n - k)
    return out


@pytest.mark.parametrize("value,expected", [("0.125", "0.13"), ("-0.125", "-0.13"), ("61.925", "61.93"),
                                            (Fraction(1, 3), "0.33"), (2.675, "2.68")])
def test_round_half_away(value, expected):
    assert round_half_away(Fraction(value) if isinstance(value, str) else value) == Decimal(expected)


def test_aggregate_table_cells_and_average():
    table = aggregate_table(grid({"standard": {"a": (1, 3), "b": (2, 2)}, "dip": {"a": (3, 3), "b": (1, 2)}}))
    assert table.languages == ("a", "b")
    assert table.percent("standard", "a") == Decimal("33.33")
    assert table.average("standard") == Decimal("66.67")
    assert table.average("dip") == Decimal("75.00")
    assert [s.value for s in table.strategies] == ["standard", "dip"]


def test_aggregate_ragged():
    with pytest.raises(RaggedGridError):
        aggregate_table(grid({"standard": {"a": (1, 1), "b": (1, 1)}, "dip": {"a": (1, 1)}}))
    with pytest.raises(RaggedGridError):
        aggregate_table([])
    with pytest.raises(RaggedGridError):
        aggregate_table(grid({"standard": {"a": (1, 1), "b": (1, 1)}}), languages=["a"])


def test_render_alignment():
    text = aggregate_table(grid({"standard": {"a": (1, 2)}, "dip": {"a": (2, 2)}})).render()
    lines = text.splitlines()
    assert lines[0].split() == ["Model", "a", "Average"]
    assert lines[2].split()[-2:] == ["50.00", "50.00"]
    assert len({len(line) for line in lines}) <= 2


def test_improvement_stats_bands():
    base = {"a": 10, "b": 10, "c": 10, "d": 10, "e": 10, "f": 10}
    treat = {"a": 16, "b": 30, "c": 31, "d": 10, "e": 4, "f": 20}
    stats = improvement_stats(base, treat)
    assert (stats.improved, stats.degraded, stats.ties) == (4, 1, 1)
    assert stats.improved_over == {5: 4, 10: 2, 20: 1}
    assert stats.improved_bands == {"5-10": 2, "10-20": 1, ">20": 1}
    assert stats.degraded_bands == {"5-10": 1, "10-20": 0, ">20": 0}
    assert stats.deltas["c"] == 21


def test_improvement_stats_language_mismatch():
    with pytest.raises(DataError):
        improvement_stats({"a": 1}, {"b": 1})


@pytest.fixture
def fixture_run(bundled_dir):
    cfg = load_config(bundled_dir / "config.json")
    items = [it for path in cfg.datasets for it in load_dataset(path)]
    lexicons = {c: load_lexicon(bundled_dir / "lexicons" / f"{c}.jsonl") for c in ("kaz_Cyrl", "bug_Latn")}
    client = LLMClient(ReplayProvider(cfg.provider.store))
    params = CompletionParams(cfg.provider.model, cfg.provider.temperature, cfg.provider.max_output_tokens)
    return items, lexicons, client, params


def test_run_matrix_sorted_and_complete(fixture_run):
    items, lexicons, client, params = fixture_run
    records = run_matrix(items, list(PromptStrategy), lexicons, client, params)
    assert len(records) == len(items) * 8
    assert records == sorted(records, key=lambda r: r.sort_key())


def test_run_matrix_missing_lexicon(fixture_run):
    items, lexicons, client, params = fixture_run
    with pytest.raises(MissingLexiconError):
        run_matrix(items, [PromptStrategy.DIP], {"kaz_Cyrl": lexicons["kaz_Cyrl"]}, client, params)


def test_run_matrix_replay_miss_names_cell(fixture_run):
    items, lexicons, _, params = fixture_run
    with pytest.raises(ItemRunError) as info:
        run_matrix(items[:1], [PromptStrategy.STANDARD], lexicons, LLMClient(ReplayProvider({})), params)
    assert info.value.item_id == items[0].id


def test_records_roundtrip(tmp_path, fixture_run):
    items, lexicons, client, params = fixture_run
    records = run_matrix(items[:4], list(PromptStrategy), lexicons, client, params)
    write_records(records, tmp_path / "r.jsonl")
    assert read_records(tmp_path / "r.jsonl") == records


def test_quality_scores(fixture_run):
    items, lexicons, client, params = fixture_run
    records = run_matrix(items, list(PromptStrategy), lexicons, client, params)
    trans = score_translation_quality(records, items)
    assert set(trans) == {s for s in PromptStrategy if s.translates}
    # DIP translations in the fixture are exact copies of the English question
    assert all(q.chrf.score == 100.0 for q in trans[PromptStrategy.DIP].values())
    think = score_thinking_quality(records, items)
    assert set(think) == {s for s in PromptStrategy if s.reasons}


def test_quality_needs_references(fixture_run):
    items, lexicons, client, params = fixture_run
    records = run_matrix(items[:1], [PromptStrategy.DIP], lexicons, client, params)
    bare = [dataclasses.replace(it, english_question=None) for it in items[:1]]
    with pytest.raises(MissingReferenceError):
        score_translation_quality(records, bare)


def test_report_sections(fixture_run):
    items, lexicons, client, params = fixture_run
    records = run_matrix(items, list(PromptStrategy), lexicons, client, params)
    table_json, text, stats = build_report(records, items)
    assert sorted(table_json) == ["aqua", "date", "gsm8k", "sports", "svamp"]
    assert set(stats["gsm8k"]) == {"improvement_vs_standard", "translation_quality", "thinking_quality"}
    assert "== gsm8k ==" in text


def test_run_experiment_writes_outputs(tmp_path, bundled_dir):
    cfg = dataclasses.replace(load_config(bundled_dir / "config.json"), out_dir=tmp_path, sample_n=2,
                              strategies=["standard", "dip"])
    paths = run_experiment(cfg)
    assert sorted(paths) == ["records.jsonl", "stats.json", "table.json", "table.txt"]
    assert len(read_records(paths["records.jsonl"])) == 5 * 2 * 2 * 2
