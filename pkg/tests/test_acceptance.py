"""Acceptance checks, one per criterion. Each prints a single PASS/FAIL line.

Run with pytest (lines also appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import json
import random
import threading
import time
from decimal import Decimal
from fractions import Fraction
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from types import SimpleNamespace

from conftest import ACCEPTANCE_LINES

from dip.annotator import annotate_interleaved, strip_annotations
from dip.cli import dispatch
from dip.datasets import load_dataset
from dip.extraction import parse_dictionary_response, render_dictionary_line
from dip.harness import aggregate_table, improvement_stats
from dip.lexicon import Lexicon, LexiconEntry, load_lexicon
from dip.metrics import bleu, chrfpp
from dip.prompts import PromptStrategy, build_prompt

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
BUNDLED = TESTS.parent / "src" / "dip" / "fixtures"
LANGS = ["kaz_Cyrl", "nso_Latn", "srp_Cyrl", "xho_Latn", "ibo_Latn", "tum_Latn", "asm_Beng", "bug_Latn", "ckb_Arab", "azb_Arab"]

# printed per-language cells of the GSM8K and SVAMP result tables
GSM8K_STANDARD = ["17.89", "9.10", "15.62", "11.52", "11.30", "5.91", "14.25", "5.84", "9.55", "9.40"]
GSM8K_DIP = ["67.93", "46.17", "80.36", "67.10", "53.30", "43.29", "68.61", "60.50", "63.68", "68.31"]
SVAMP_STANDARD = ["53.33", "42.00", "46.33", "48.33", "36.67", "28.33", "53.00", "25.33", "37.67", "40.67"]
SVAMP_DIP = ["78.33", "57.00", "89.67", "76.67", "65.33", "65.67", "77.67", "71.00", "78.67", "75.00"]


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# 1 ---------------------------------------------------------------------------


def test_metric_oracle_equivalence():
    doc = json.loads((FIXTURES / "metric_corpus.json").read_text("utf-8"))
    scripts = {p["script"] for p in doc["pairs"]}
    started = time.perf_counter()
    groups = [("corpus", doc["pairs"], doc["corpus"])]
    groups += [(s, [p for p in doc["pairs"] if p["script"] == s], doc["by_script"][s]) for s in sorted(scripts)]
    worst = 0.0
    for _, pairs, oracle in groups:
        hyps = [p["hypothesis"] for p in pairs]
        refs = [p["reference"] for p in pairs]
        worst = max(worst, abs(bleu(hyps, refs).score - oracle["bleu"]), abs(chrfpp(hyps, refs).score - oracle["chrfpp"]))
    elapsed = time.perf_counter() - started
    ok = len(doc["pairs"]) == 20 and scripts == {"latin", "cyrillic", "arabic", "bengali"} and worst <= 0.01 and elapsed < 1
    report(1, "metric oracle equivalence", ok,
           f"{len(doc['pairs'])} pairs, max |diff| vs {doc['oracle']} = {worst:.2e} (tol 0.01), {elapsed:.3f}s (< 1s)")


# 2 ---------------------------------------------------------------------------

LATIN = list("abcdefghij")
CYRILLIC = list("абвгдежзик")


def _sentence(rng, letters, min_words=1):
    return " ".join("".join(rng.choice(letters) for _ in range(rng.randint(1, 6)))
                    for _ in range(rng.randint(min_words, 9)))


def test_metric_identities():
    rng = random.Random(2)
    identity_fail = disjoint_fail = 0
    worst_disjoint = 0.0
    for _ in range(1000):
        n = rng.randint(1, 5)
        corpus = [_sentence(rng, LATIN + CYRILLIC) for _ in range(n)]
        # BLEU needs at least one 4-gram to be non-zero
        corpus[rng.randrange(n)] = _sentence(rng, LATIN + CYRILLIC, min_words=4)
        if bleu(corpus, corpus).score != 100.0 or chrfpp(corpus, corpus).score != 100.0:
            identity_fail += 1
        hyps = [_sentence(rng, LATIN) for _ in range(n)]
        refs = [_sentence(rng, CYRILLIC) for _ in range(n)]
        worst = max(bleu(hyps, refs).score, chrfpp(hyps, refs).score)
        worst_disjoint = max(worst_disjoint, worst)
        disjoint_fail += worst > 0.01
    ok = identity_fail == 0 and disjoint_fail == 0
    report(2, "metric identities", ok,
           f"1000 cases, identity failures {identity_fail}, disjoint max score {worst_disjoint:.4f} (<= 0.01)")


# 3 ---------------------------------------------------------------------------

WORDS = ["bola", "api", "naik", "tello'", "manu'-manu'", "құс", "бар", "алма", "كم", "عدد", "দাম", "কত", "café", "x"]
SEPARATORS = [" ", " ", " ", "  ", "\t", "\n", ", ", ". ", "? ", " 12 ", " 1,200 ", "-", ": ", "'"]
GLOSS_CHARS = "abcdefg xyz()[]-'"


def _random_case(rng):
    parts = []
    for _ in range(rng.randint(0, 14)):
        parts.append(rng.choice(WORDS).upper() if rng.random() < 0.1 else rng.choice(WORDS))
        parts.append(rng.choice(SEPARATORS))
    text = "".join(parts)
    pairs = []
    for _ in range(rng.randint(0, 8)):
        source = " ".join(rng.choice(WORDS) for _ in range(rng.choice([1, 1, 1, 2, 3])))
        gloss = "".join(rng.choice(GLOSS_CHARS) for _ in range(rng.randint(1, 10)))
        pairs.append((source, gloss if gloss.strip() else "g"))
    return text, pairs


def test_annotation_round_trip():
    rng = random.Random(3)
    failures = paren_cases = insertions = 0
    started = time.perf_counter()
    for _ in range(10_000):
        text, pairs = _random_case(rng)
        paren_cases += any("(" in g or ")" in g for _, g in pairs)
        annotated = annotate_interleaved(text, Lexicon("xx", [LexiconEntry(s, g) for s, g in pairs]))
        insertions += len(annotated.insertions)
        if strip_annotations(annotated.text) != text:
            failures += 1
    elapsed = time.perf_counter() - started
    ok = failures == 0 and elapsed < 10 and paren_cases > 0
    report(3, "annotation round-trip", ok,
           f"10000 cases ({paren_cases} with parenthesized glosses), {insertions} insertions, "
           f"{failures} failures, {elapsed:.2f}s (< 10s)")


# 4 ---------------------------------------------------------------------------

VERBATIM_LINES = [
    "Solve the question. The question is made up of the Kazakh language.",
    "First translate the following question from Kazakh into English:",
    "Note: Your output format is as follows:",
    "1. Translated English sentences",
    "2. The derivation process",
    "3.The final numerical answer",
]


def test_prompt_goldens():
    lexicon = load_lexicon(BUNDLED / "lexicons" / "kaz_Cyrl.jsonl")
    items = {
        "numeric": next(it for it in load_dataset(BUNDLED / "gsm8k.jsonl") if it.language == "kaz_Cyrl"),
        "choice": next(it for it in load_dataset(BUNDLED / "aqua.jsonl") if it.language == "kaz_Cyrl"),
    }
    mismatched = []
    for strategy in PromptStrategy:
        for kind, item in items.items():
            text = build_prompt(strategy, item, lexicon if strategy.uses_lexicon else None).text
            if text.encode("utf-8") != (FIXTURES / "prompts" / f"{strategy.value}.{kind}.txt").read_bytes():
                mismatched.append(f"{strategy.value}.{kind}")
    dip_lines = (FIXTURES / "prompts" / "dip.numeric.txt").read_text("utf-8").splitlines()
    missing = [line for line in VERBATIM_LINES if line not in dip_lines]
    ok = not mismatched and not missing
    report(4, "prompt goldens", ok,
           f"16 goldens (8 strategies x 2 answer types), mismatches {mismatched or 'none'}, "
           f"DIP verbatim lines missing {missing or 'none'}")


# 5 ---------------------------------------------------------------------------


def _records_from_cells(rows):
    """Records whose per-cell accuracy equals each printed percentage exactly (k of 10000 correct)."""
    out = []
    for strategy, cells in rows.items():
        for lang, cell in zip(LANGS, cells):
            correct = int(Decimal(cell) * 100)
            out += [SimpleNamespace(strategy=strategy, language=lang, correct=True)] * correct
            out += [SimpleNamespace(strategy=strategy, language=lang, correct=False)] * (10_000 - correct)
    return out


def test_aggregation_reproduction():
    checks = []
    for name, rows, targets in [
        ("GSM8K", {"standard": GSM8K_STANDARD, "dip": GSM8K_DIP}, {"standard": "11.04", "dip": "61.92"}),
        ("SVAMP", {"standard": SVAMP_STANDARD, "dip": SVAMP_DIP}, {"standard": "41.17", "dip": "73.50"}),
    ]:
        table = aggregate_table(_records_from_cells(rows), LANGS)
        for strategy, target in targets.items():
            cells_ok = [table.percent(strategy, lang) for lang in LANGS] == [Decimal(c) for c in rows[strategy]]
            got = table.average(strategy)
            within = abs(got - Decimal(target)) <= Decimal("0.01")
            checks.append((f"{name} {strategy} {got} vs {target}", cells_ok and within))
    ok = all(flag for _, flag in checks)
    report(5, "aggregation reproduction", ok, "; ".join(label for label, _ in checks) + " (tol 0.01)")


# 6 ---------------------------------------------------------------------------


def test_statistics_reproduction():
    base = dict(zip(LANGS, (Fraction(c) for c in GSM8K_STANDARD)))
    treat = dict(zip(LANGS, (Fraction(c) for c in GSM8K_DIP)))
    stats = improvement_stats(base, treat)
    smallest = min(stats.deltas.values())
    ok = (stats.improved == 10 and stats.total == 10 and stats.improved_over[20] == 10
          and stats.improved_bands[">20"] == 10 and smallest == Fraction("37.07"))
    report(6, "statistics reproduction", ok,
           f"{stats.improved}/{stats.total} improved, {stats.improved_over[20]} with delta > 20, "
           f"minimum delta {float(smallest):.2f}")


# 7 ---------------------------------------------------------------------------


def test_end_to_end_determinism(tmp_path):
    config = BUNDLED / "config.json"
    cells = {(it.dataset, it.language) for name in ("gsm8k", "svamp", "aqua", "date", "sports")
             for it in load_dataset(BUNDLED / f"{name}.jsonl")}
    timings = []
    for run in ("a", "b"):
        started = time.perf_counter()
        code = dispatch(["run", "--config", str(config), "--out-dir", str(tmp_path / run)])
        timings.append(time.perf_counter() - started)
        assert code == 0
    names = ("records.jsonl", "table.txt", "stats.json")
    identical = all((tmp_path / run / n).read_bytes() == (FIXTURES / "run_golden" / n).read_bytes()
                    for run in ("a", "b") for n in names)
    n_records = len((tmp_path / "a" / "records.jsonl").read_text("utf-8").splitlines())
    ok = identical and max(timings) < 5 and len(cells) >= 10 and n_records >= 3 * 2 * 5 * 8
    report(7, "end-to-end offline determinism", ok,
           f"{n_records} records over {len(cells)} dataset/language cells x 8 strategies, "
           f"both runs byte-identical to goldens: {identical}, runs {timings[0]:.2f}s / {timings[1]:.2f}s (< 5s)")


# 8 ---------------------------------------------------------------------------

SURFACE_CHARS = "abcdefxyzáéқұәبكদম'-"
GLOSS_GEN_CHARS = "abc xyz[]()'-"


def _entry_list(rng):
    entries = []
    for _ in range(rng.randint(0, 10)):
        surface = " ".join("".join(rng.choice(SURFACE_CHARS) for _ in range(rng.randint(1, 6)))
                           for _ in range(rng.choice([1, 1, 2, 3])))
        gloss = "".join(rng.choice(GLOSS_GEN_CHARS) for _ in range(rng.randint(1, 10)))
        entries.append(LexiconEntry(surface, gloss if gloss.strip() else "g"))
    return entries


def test_dictionary_construction_parsing():
    rows = [json.loads(line) for line in (FIXTURES / "dictionary_transcripts.jsonl").read_text("utf-8").splitlines()]
    expected = sum(len(r["expected"]) for r in rows)
    recovered = 0
    for row in rows:
        got = [[e.source_surface, e.gloss] for e in parse_dictionary_response(row["raw_text"], row["language"])]
        if got == row["expected"]:
            recovered += len(got)
    rng = random.Random(8)
    roundtrip_fail = 0
    for _ in range(10_000):
        entries = _entry_list(rng)
        if parse_dictionary_response("dictionary: " + render_dictionary_line(entries), "xx") != entries:
            roundtrip_fail += 1
    ok = len(rows) == 50 and recovered == expected and roundtrip_fail == 0
    report(8, "dictionary-construction parsing", ok,
           f"{len(rows)} transcripts, {recovered}/{expected} entries recovered, "
           f"10000 render/parse round-trips with {roundtrip_fail} failures")


# 9 ---------------------------------------------------------------------------


class _ChatHandler(BaseHTTPRequestHandler):
    requests: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).requests.append((self.headers.get("Authorization"), body))
        payload = json.dumps({"choices": [{"message": {"role": "assistant", "content": "1. x\n2. y\n3. 42"}}]})
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(payload.encode())

    def log_message(self, *args):
        pass


def test_live_smoke_capability(tmp_path, monkeypatch):
    _ChatHandler.requests = []
    server = ThreadingHTTPServer(("127.0.0.1", 0), _ChatHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        monkeypatch.setenv("DIP_SMOKE_KEY", "test-token")
        config = {
            "datasets": [str(BUNDLED / f"{d}.jsonl") for d in ("gsm8k", "svamp", "aqua", "date", "sports")],
            "languages": ["bug_Latn"],
            "strategies": ["dip"],
            "lexicon_dir": str(BUNDLED / "lexicons"),
            "sample_n": 2,
            "seed": 0,
            "out_dir": str(tmp_path / "out"),
            "provider": {"type": "chat", "url": f"http://127.0.0.1:{server.server_port}/v1/chat/completions",
                         "api_key_env": "DIP_SMOKE_KEY", "model": "any-model", "max_retries": 0},
        }
        path = tmp_path / "smoke.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        code = dispatch(["run", "--config", str(path)])
    finally:
        server.shutdown()
    requests = _ChatHandler.requests
    records = (tmp_path / "out" / "records.jsonl").read_text("utf-8").splitlines() if code == 0 else []
    ok = (code == 0 and len(requests) == 10 and len(records) == 10
          and all(auth == "Bearer test-token" and body["model"] == "any-model" for auth, body in requests))
    report(9, "live smoke-run capability", ok,
           f"10-item run through the chat-completions provider against a local stand-in endpoint: "
           f"exit {code}, {len(requests)} requests, {len(records)} records; "
           "headline accuracies need a live model and are not offline targets (manual run: see README)")


if __name__ == "__main__":
    import pytest

    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
