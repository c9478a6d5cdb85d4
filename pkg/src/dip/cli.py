"""``dip`` command line entry point.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 provider or
transport error. Data goes to stdout (or files); diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from dip import __version__
from dip.answers import answer_from_json
from dip.annotator import annotate_interleaved, render_dictionary_block
from dip.config import load_config
from dip.datasets import item_from_json, load_dataset
from dip.errors import DataError, DipError, LLMError
from dip.extraction import parse_dictionary_transcript
from dip.harness import read_records, run_experiment, write_report
from dip.lexicon import MERGE, REJECT, Lexicon, dump_lexicon, load_lexicon
from dip.metrics import BLEU_SIGNATURE, CHRF_SIGNATURE, accuracy, bleu, chrfpp
from dip.prompts import PromptStrategy, build_prompt, dictionary_construction_prompt, language_name

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3


class UsageError(Exception):
    def __init__(self, message, parser):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self)


def _read_input(path):
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _jsonl(text, source):
    rows = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise DataError(f"{source}:{lineno}: invalid JSON ({exc.msg})") from None
    return rows


def cmd_annotate(args):
    lexicon = load_lexicon(args.lexicon, on_duplicate=args.on_duplicate)
    text = sys.stdin.read()
    if args.block:
        return render_dictionary_block(text, lexicon) + "\n"
    return annotate_interleaved(text, lexicon).text


def cmd_prompt(args):
    strategy = PromptStrategy.parse(args.strategy)
    if args.dataset:
        if not args.item:
            raise DataError("--item is required with --dataset")
        matches = [it for it in load_dataset(args.dataset) if it.id == args.item]
        if args.language:
            matches = [it for it in matches if it.language == args.language]
        if not matches:
            raise DataError(f"no item {args.item!r} in {args.dataset}")
        item = matches[0]
    else:
        if not args.language:
            raise DataError("--language is required when the question comes from stdin")
        if args.answer_type == "choice":
            raise DataError("choice items need their options; use --dataset/--item")
        question = sys.stdin.read().strip()
        gold = {"numeric": 0, "boolean": "plausible"}[args.answer_type]
        dataset = {"numeric": "gsm8k", "boolean": "sports"}[args.answer_type]
        item = item_from_json({"id": "stdin", "dataset": dataset, "language": args.language,
                               "question": question or "?", "answer_type": args.answer_type, "gold": gold})
    lexicon = load_lexicon(args.lexicon) if args.lexicon and strategy.uses_lexicon else None
    return build_prompt(strategy, item, lexicon).text + "\n"


def cmd_dictgen(args):
    name = language_name(args.language)
    out = []
    for row in _jsonl(_read_input(args.input), args.input or "<stdin>"):
        if not isinstance(row, dict) or not isinstance(row.get("english"), str) or not isinstance(row.get("source"), str):
            raise DataError("bitext rows must be objects with 'english' and 'source' strings")
        prompt = dictionary_construction_prompt(row["english"], row["source"], name, args.language)
        record = {"english": row["english"], "source": row["source"], "prompt": prompt.text}
        if "id" in row:
            record["id"] = row["id"]
        out.append(json.dumps(record, ensure_ascii=False))
    return "\n".join(out) + ("\n" if out else "")


def cmd_dictparse(args):
    entries = []
    sources = args.inputs or ["-"]
    for src in sources:
        text = _read_input(src)
        if args.plain:
            transcripts = [text]
        else:
            transcripts = []
            for row in _jsonl(text, src):
                raw = row.get("raw_text", row.get("raw")) if isinstance(row, dict) else None
                if not isinstance(raw, str):
                    raise DataError(f"{src}: transcript rows need a 'raw_text' or 'raw' string")
                transcripts.append(raw)
        for raw in transcripts:
            entries.extend(parse_dictionary_transcript(raw, args.language).entries)
    policy = REJECT if args.reject_duplicates else MERGE
    return dump_lexicon(Lexicon(args.language, entries, on_duplicate=policy))


def cmd_run(args):
    config = load_config(args.config)
    if args.out_dir:
        config = dataclasses.replace(config, out_dir=Path(args.out_dir))
    paths = run_experiment(config)
    return "".join(f"{name}\t{path}\n" for name, path in sorted(paths.items()))


def cmd_score(args):
    rows = _jsonl(_read_input(args.input), args.input or "<stdin>")
    if not rows:
        raise DataError("no rows to score")
    if args.metric == "accuracy":
        try:
            preds = [answer_from_json(r["prediction"]) for r in rows]
            golds = [answer_from_json(r["gold"]) for r in rows]
        except (KeyError, TypeError):
            raise DataError("accuracy rows need 'prediction' and 'gold' fields") from None
        except ValueError as exc:
            raise DataError(str(exc)) from None
        return f"accuracy = {accuracy(preds, golds):.4f}\tn={len(rows)}\n"
    try:
        hyps = [r["hypothesis"] for r in rows]
        refs = [r["reference"] for r in rows]
    except (KeyError, TypeError):
        raise DataError("metric rows need 'hypothesis' and 'reference' fields") from None
    if not all(isinstance(x, str) for x in hyps + refs):
        raise DataError("hypothesis and reference must be strings")
    if args.metric == "bleu":
        score = bleu(hyps, refs)
        return f"{score}\n{BLEU_SIGNATURE}|version:dip-{__version__}\n"
    score = chrfpp(hyps, refs)
    return f"{score}\n{CHRF_SIGNATURE}|version:dip-{__version__}\n"


def cmd_report(args):
    records = read_records(args.records)
    items = None
    if args.dataset:
        items = [it for path in args.dataset for it in load_dataset(path)]
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.records).parent
    languages = args.languages.split(",") if args.languages else None
    paths = write_report(out_dir, records, items, languages)
    return "".join(f"{name}\t{path}\n" for name, path in sorted(paths.items()))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dip", description="Dictionary insertion prompting toolkit.")
    parser.add_argument("--version", action="version", version=f"dip {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")

    p = sub.add_parser("annotate", help="insert glosses into text read from stdin")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--block", action="store_true", help="print the dictionary block instead")
    p.add_argument("--on-duplicate", choices=[MERGE, REJECT], default=MERGE)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("prompt", help="render a strategy prompt")
    p.add_argument("--strategy", required=True, help=", ".join(s.value for s in PromptStrategy))
    p.add_argument("--language")
    p.add_argument("--lexicon")
    p.add_argument("--answer-type", choices=["numeric", "choice", "boolean"], default="numeric")
    p.add_argument("--dataset", help="dataset JSONL to take the item from")
    p.add_argument("--item", help="item id within --dataset")
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("dictgen", help="emit dictionary-construction prompts for a bitext JSONL")
    p.add_argument("--language", required=True)
    p.add_argument("--input", help="JSONL of {english, source}; default stdin")
    p.set_defaults(func=cmd_dictgen)

    p = sub.add_parser("dictparse", help="build a lexicon from stored construction responses")
    p.add_argument("--language", required=True)
    p.add_argument("--plain", action="store_true", help="inputs are raw response texts, not JSONL")
    p.add_argument("--reject-duplicates", action="store_true")
    p.add_argument("inputs", nargs="*")
    p.set_defaults(func=cmd_dictparse)

    p = sub.add_parser("run", help="execute a configured run matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", help="override the configured out_dir")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("score", help="score JSONL hypotheses/references or predictions/golds")
    p.add_argument("--metric", required=True, choices=["bleu", "chrfpp", "accuracy"])
    p.add_argument("input", nargs="?")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="re-render tables and statistics from records.jsonl")
    p.add_argument("--records", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--dataset", action="append", help="dataset JSONL for translation/thinking scores")
    p.add_argument("--languages", help="comma-separated column order")
    p.set_defaults(func=cmd_report)
    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"{exc.parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        output = args.func(args)
    except LLMError as exc:
        print(f"dip {args.command}: provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (DipError, UnicodeDecodeError) as exc:
        print(f"dip {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        name = exc.filename if exc.filename is not None else ""
        print(f"dip {args.command}: {exc.strerror or exc}: {name}", file=sys.stderr)
        return EXIT_DATA
    sys.stdout.write(output)
    sys.stdout.flush()
    return EXIT_OK


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
