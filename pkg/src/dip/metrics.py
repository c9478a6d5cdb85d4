"""Corpus BLEU and chrF++ with sacreBLEU's default signatures, plus accuracy.

BLEU: 4-gram, ``13a`` tokenization, case-sensitive, exponential smoothing,
one reference per hypothesis. chrF++: character 6-grams (whitespace
removed), word 2-grams, beta 2, effective-order averaging.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from dip.answers import Answer, answers_match
from dip.errors import MetricError

BLEU_ORDER = 4
CHRF_CHAR_ORDER = 6
CHRF_WORD_ORDER = 2
CHRF_BETA = 2

BLEU_SIGNATURE = "nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp"
CHRF_SIGNATURE = "nrefs:1|case:mixed|eff:yes|nc:6|nw:2|space:no"


@dataclass(frozen=True)
class BleuScore:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    counts: tuple[int, ...] = ()
    totals: tuple[int, ...] = ()

    def __str__(self):
        prec = "/".join(f"{p:.1f}" for p in self.precisions)
        return (
            f"BLEU = {self.score:.2f} {prec} (BP = {self.brevity_penalty:.3f} "
            f"ratio = {self.hyp_len / self.ref_len if self.ref_len else 0:.3f} "
            f"hyp_len = {self.hyp_len} ref_len = {self.ref_len})"
        )


@dataclass(frozen=True)
class ChrfScore:
    score: float
    char_order: int = CHRF_CHAR_ORDER
    word_order: int = CHRF_WORD_ORDER
    beta: int = CHRF_BETA

    def __str__(self):
        return f"chrF2++ = {self.score:.2f}"


_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


def tokenize_13a(line: str) -> list[str]:
    """mteval-v13a tokenization as used by WMT."""
    line = line.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    if "&" in line:
        line = line.replace("&quot;", '"').replace("&amp;", "&").replace("&lt;", "<").replace("&gt;", ">")
    line = f" {line} "
    for pattern, repl in _13A_RULES:
        line = pattern.sub(repl, line)
    return line.split()


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _check_corpus(hypotheses, references):
    if isinstance(hypotheses, str) or isinstance(references, str):
        raise MetricError("hypotheses and references must be sequences of strings")
    if len(hypotheses) != len(references):
        raise MetricError(f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise MetricError("cannot score an empty corpus")


def bleu(hypotheses: Sequence[str], references: Sequence[str]) -> BleuScore:
    _check_corpus(hypotheses, references)
    correct = [0] * BLEU_ORDER
    total = [0] * BLEU_ORDER
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h = tokenize_13a(hyp.rstrip())
        r = tokenize_13a(ref.rstrip())
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, BLEU_ORDER + 1):
            h_grams = _ngrams(h, n)
            r_grams = _ngrams(r, n)
            correct[n - 1] += sum(min(c, r_grams[g]) for g, c in h_grams.items())
            total[n - 1] += max(len(h) - n + 1, 0)
    return _bleu_from_stats(correct, total, hyp_len, ref_len)


def _bleu_from_stats(correct, total, hyp_len, ref_len) -> BleuScore:
    bp = 1.0
    if hyp_len < ref_len:
        bp = math.exp(1 - ref_len / hyp_len) if hyp_len > 0 else 0.0
    precisions = [0.0] * BLEU_ORDER
    stats = dict(counts=tuple(correct), totals=tuple(total))
    if not any(correct):
        return BleuScore(0.0, tuple(precisions), bp, hyp_len, ref_len, **stats)

    smooth = 1.0
    for n in range(BLEU_ORDER):
        if total[n] == 0:
            break
        if correct[n] == 0:
            smooth *= 2
            precisions[n] = 100.0 / (smooth * total[n])
        else:
            precisions[n] = 100.0 * correct[n] / total[n]
    if min(precisions) == 0.0:
        score = 0.0
    else:
        # mean of log(p/100) keeps a perfect match at exactly 100.0
        score = 100.0 * bp * math.exp(sum(math.log(p / 100.0) for p in precisions) / BLEU_ORDER)
    return BleuScore(score, tuple(precisions), bp, hyp_len, ref_len, **stats)


_PUNCTS = frozenset("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")


def _chrf_words(sentence: str) -> list[str]:
    words = []
    for w in sentence.split():
        if len(w) == 1:
            words.append(w)
        elif w[-1] in _PUNCTS:
            words.extend((w[:-1], w[-1]))
        elif w[0] in _PUNCTS:
            words.extend((w[0], w[1:]))
        else:
            words.append(w)
    return words


def _chrf_ngram_counters(sentence: str) -> list[Counter]:
    chars = "".join(sentence.split())
    counters = [Counter(chars[i:i + n] for i in range(len(chars) - n + 1)) for n in range(1, CHRF_CHAR_ORDER + 1)]
    words = _chrf_words(sentence)
    counters.extend(_ngrams(words, n) for n in range(1, CHRF_WORD_ORDER + 1))
    return counters


def chrfpp(hypotheses: Sequence[str], references: Sequence[str]) -> ChrfScore:
    _check_corpus(hypotheses, references)
    orders = CHRF_CHAR_ORDER + CHRF_WORD_ORDER
    # per order: hypothesis n-grams, reference n-grams, matches
    stats = [[0, 0, 0] for _ in range(orders)]
    for hyp, ref in zip(hypotheses, references):
        for acc, h, r in zip(stats, _chrf_ngram_counters(hyp), _chrf_ngram_counters(ref)):
            acc[0] += sum(h.values()) if r else 0
            acc[1] += sum(r.values())
            acc[2] += sum(min(c, r[g]) for g, c in h.items() if g in r)
    return ChrfScore(_chrf_from_stats(stats))


def _chrf_from_stats(stats) -> float:
    factor = CHRF_BETA ** 2
    avg_prec = avg_rec = 0.0
    effective = 0
    for n_hyp, n_ref, n_match in stats:
        if n_hyp > 0 and n_ref > 0:
            avg_prec += n_match / n_hyp
            avg_rec += n_match / n_ref
            effective += 1
    if effective == 0:
        return 0.0
    avg_prec /= effective
    avg_rec /= effective
    if avg_prec + avg_rec == 0:
        return 0.0
    return 100.0 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec)


def accuracy(predictions: Sequence[Answer], golds: Sequence[Answer]) -> float:
    if len(predictions) != len(golds):
        raise MetricError(f"{len(predictions)} predictions but {len(golds)} golds")
    if not golds:
        raise MetricError("cannot compute accuracy of an empty set")
    return sum(answers_match(p, g) for p, g in zip(predictions, golds)) / len(golds)
