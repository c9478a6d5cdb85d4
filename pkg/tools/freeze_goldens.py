"""Freeze the golden files under tests/fixtures/.

Metric oracle values come from sacrebleu (default signatures), not from
dip.metrics. Dictionary transcripts are rendered from known entry lists, so
the expected entries never pass through the parser under test. Prompt and
run goldens are the first output of the current code, pinned.

Usage: python tools/freeze_goldens.py   (needs sacrebleu installed)
"""

from __future__ import annotations

import json
import random
import shutil
import tempfile
from pathlib import Path

import sacrebleu

from dip.cli import dispatch
from dip.datasets import load_dataset
from dip.lexicon import load_lexicon
from dip.prompts import PromptStrategy, build_prompt

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "src" / "dip" / "fixtures"
OUT = ROOT / "tests" / "fixtures"

METRIC_PAIRS = [
    # Latin
    ("latin", "The cat sat on the mat near the door.", "The cat sat on the mat by the door."),
    ("latin", "Mary bought three apples for six dollars.", "Mary bought 3 apples and paid 6 dollars."),
    ("latin", "He has twelve eggs, and he ate four of them.", "He had 12 eggs and ate 4 of them."),
    ("latin", "Saya membeli buku di pasar kemarin.", "Kemarin saya membeli buku di pasar."),
    ("latin", "Is the following sentence plausible?", "Is the following sentence plausible?"),
    # Cyrillic
    ("cyrillic", "Мария 3 алма сатып алды.", "Мария үш алма сатып алды."),
    ("cyrillic", "Ағашта 9 құс бар, 3 құс ұшып кетті.", "Ағашта 9 құс болды. 3 құс ұшып кетті."),
    ("cyrillic", "Кошка сидит на ковре у двери.", "Кошка сидела на ковре возле двери."),
    ("cyrillic", "Сколько стоит одна ручка?", "Какова цена одной ручки?"),
    ("cyrillic", "Бүгін 03/01/2020, ертең қандай күн?", "Бүгін 03/01/2020. Ертеңгі күн қандай?"),
    # Arabic
    ("arabic", "القطة تجلس على السجادة قرب الباب.", "جلست القطة على السجادة بجانب الباب."),
    ("arabic", "اشترت مريم ثلاث تفاحات بستة دولارات.", "اشترت مريم 3 تفاحات ودفعت 6 دولارات."),
    ("arabic", "كم عدد الطيور على الشجرة الآن؟", "كم طائرا على الشجرة الآن؟"),
    ("arabic", "يقرأ سامي ست صفحات كل يوم.", "يقرأ سامي 6 صفحات يوميا."),
    ("arabic", "هل الجملة التالية معقولة؟", "هل الجملة التالية معقولة؟"),
    # Bengali
    ("bengali", "বিড়ালটি দরজার কাছে মাদুরে বসে আছে।", "বিড়ালটি দরজার পাশে মাদুরে বসেছিল।"),
    ("bengali", "মেরি তিনটি আপেল কিনেছে।", "মেরি ৩টি আপেল কিনেছিল।"),
    ("bengali", "গাছে নয়টি পাখি আছে, তিনটি উড়ে গেছে।", "গাছে ৯টি পাখি ছিল এবং ৩টি উড়ে গেল।"),
    ("bengali", "একটি কলমের দাম কত?", "একটি কলমের দাম কত টাকা?"),
    ("bengali", "আজ সোমবার, কাল কী বার?", "আজ সোমবার। আগামীকাল কী বার হবে?"),
]

# Bilingual word lists for the dictionary transcripts (source, gloss).
DICT_WORDS = {
    "kaz_Cyrl": [
        ("Мария", "Mary"), ("алма", "apple"), ("сатып алды", "bought"), ("әр", "each"), ("доллар", "dollar"),
        ("тұрады", "costs"), ("ол", "she"), ("қанша", "how much"), ("төлейді", "pays"), ("ағашта", "on the tree"),
        ("құс", "bird"), ("бар", "there is"), ("ұшып кетті", "flew away"), ("қазір", "now"), ("кітап", "book"),
        ("дүкен", "shop"), ("сатады", "sells"), ("күн", "day"), ("бүгін", "today"), ("ертең", "tomorrow"),
        ("3", "3"), ("12", "12"), ("жұмыртқа", "egg"), ("жейді", "eats"), ("қалды", "left"),
    ],
    "bug_Latn": [
        ("Mary", "Mary"), ("melli", "buy"), ("apel", "apple"), ("tungke", "each"), ("ellinna", "price of"),
        ("dolar", "dollar"), ("siaga", "how much"), ("nabayara", "pays"), ("tello'", "egg"), ("nanrei", "eats"),
        ("engka", "there is"), ("manu'-manu'", "bird"), ("ri", "on"), ("aju'e", "the tree"), ("lettu", "fly away"),
        ("kitta'", "book"), ("mabbalu", "sells"), ("esso", "day"), ("essoé", "today"), ("baja", "tomorrow"),
        ("segi empa'e", "the rectangle"), ("ri laleng", "within"), ("3", "3"), ("12", "12"), ("pulpen", "pen"),
    ],
}


def freeze_metrics():
    hyps = [h for _, h, _ in METRIC_PAIRS]
    refs = [r for _, _, r in METRIC_PAIRS]
    bleu_metric = sacrebleu.metrics.BLEU()
    chrf = sacrebleu.metrics.CHRF(word_order=2)

    def score(h, r):
        return {"bleu": bleu_metric.corpus_score(h, [r]).score, "chrfpp": chrf.corpus_score(h, [r]).score}

    scripts = {}
    for script in ("latin", "cyrillic", "arabic", "bengali"):
        sub = [(h, r) for s, h, r in METRIC_PAIRS if s == script]
        scripts[script] = score([h for h, _ in sub], [r for _, r in sub])
    doc = {
        "oracle": f"sacrebleu {sacrebleu.__version__}",
        "bleu_signature": str(bleu_metric.get_signature()),
        "chrf_signature": str(chrf.get_signature()),
        "pairs": [{"script": s, "hypothesis": h, "reference": r} for s, h, r in METRIC_PAIRS],
        "corpus": score(hyps, refs),
        "by_script": scripts,
    }
    (OUT / "metric_corpus.json").write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _render_transcript(lang, entries, variant):
    source = " ".join(s for s, _ in entries)
    english = " ".join(g for _, g in entries).capitalize() + "."
    sep = "  " if variant % 5 == 2 else " "
    body = sep.join(f"{s} ({g})" for s, g in entries)
    lines = []
    if variant % 7 == 3:
        lines += ["Sure, here is the translation and the dictionary.", ""]
    lines += [f"English: {english}", f"{lang}: {source}"]
    if variant % 4 == 1:
        lines += ["dictionary:", body, "", "Let me know if you need anything else."]
    elif variant % 4 == 3:
        lines += [f"Dictionary: {body}."]
    else:
        lines += [f"dictionary: {body}"]
    return "\n".join(lines) + ("\n" if variant % 2 else "")


def freeze_transcripts():
    rng = random.Random(20240101)
    rows = []
    for n in range(50):
        lang = ("kaz_Cyrl", "bug_Latn")[n % 2]
        words = DICT_WORDS[lang]
        entries = rng.sample(words, rng.randint(1, 8))
        if n % 9 == 4:
            entries.append(("бола" if lang == "kaz_Cyrl" else "bola", "ball [round toy]"))
        raw = _render_transcript(lang, entries, n)
        rows.append({"id": f"t{n:02d}", "language": lang, "raw_text": raw,
                     "expected": [[s, g] for s, g in entries]})
    with (OUT / "dictionary_transcripts.jsonl").open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def freeze_prompts():
    target = OUT / "prompts"
    target.mkdir(exist_ok=True)
    lexicon = load_lexicon(FIXTURES / "lexicons" / "kaz_Cyrl.jsonl")
    numeric = next(it for it in load_dataset(FIXTURES / "gsm8k.jsonl") if it.language == "kaz_Cyrl")
    choice = next(it for it in load_dataset(FIXTURES / "aqua.jsonl") if it.language == "kaz_Cyrl")
    for strategy in PromptStrategy:
        for tag, item in (("numeric", numeric), ("choice", choice)):
            prompt = build_prompt(strategy, item, lexicon if strategy.uses_lexicon else None)
            (target / f"{strategy.value}.{tag}.txt").write_text(prompt.text, encoding="utf-8")


def freeze_run():
    target = OUT / "run_golden"
    target.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        code = dispatch(["run", "--config", str(FIXTURES / "config.json"), "--out-dir", tmp])
        if code != 0:
            raise SystemExit(f"dip run failed with exit code {code}")
        for name in ("records.jsonl", "table.txt", "stats.json", "table.json"):
            shutil.copyfile(Path(tmp) / name, target / name)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    freeze_metrics()
    freeze_transcripts()
    freeze_prompts()
    freeze_run()
    print(f"goldens written to {OUT}")


if __name__ == "__main__":
    main()
