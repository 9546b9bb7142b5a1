"""Command-line entry point: ``condsplit {split,convert,evaluate,graph,stats}``.

Exit codes: 0 success, 1 I/O failure, 2 invalid data.
"""
from __future__ import annotations

import argparse
import contextlib
import itertools
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .config import SplitterConfig
from .corpus import (
    CorpusError,
    corpus_stats,
    doccano_line,
    iob_to_sentences,
    iter_doccano,
    iter_iob,
    parse_doccano_record,
    write_iob,
)
from .evaluate import AlignmentError, error_breakdown, exact_match_score
from .graph import build_graph, export_dot, export_json
from .linguistics.tokenizer import EmptyInputError
from .model import Label
from .splitter import RuleSplitter, annotation_to_result, result_to_annotation

log = logging.getLogger("condsplit")

EXIT_OK, EXIT_IO, EXIT_DATA = 0, 1, 2
MODEL_NAME = "rule-based"
BATCH = 256


@dataclass
class RunConfig:
    inputs: list[str] = field(default_factory=lambda: ["-"])
    output: str = "-"
    fmt: str = "text"
    strict: bool = True
    splitter: SplitterConfig = field(default_factory=SplitterConfig)
    report: str = "table"
    jobs: int = 1

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("--jobs must be >= 1")


@contextlib.contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, encoding="utf-8") as fh:
            yield fh


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


# -- split --

_worker_splitter: Optional[RuleSplitter] = None


def _init_worker(config: SplitterConfig) -> None:
    global _worker_splitter
    _worker_splitter = RuleSplitter(config)


def _split_record(item: tuple[int, str], splitter: Optional[RuleSplitter] = None,
                  with_trace: bool = False) -> str:
    splitter = splitter or _worker_splitter
    sid, text = item
    result, trace = splitter.split(text)
    ann = result_to_annotation(sid, text, result)
    if with_trace:
        ann.meta["trace"] = [[t.stage, t.rule_id, list(t.token_range), t.note] for t in trace]
    return doccano_line(ann, MODEL_NAME)


def _split_traced(item):
    return _split_record(item, with_trace=True)


def _sentences(cfg: RunConfig, fh) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        if cfg.fmt == "text":
            yield lineno, line.rstrip("\r\n")
            continue
        try:
            try:
                rec = parse_doccano_record(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON: {exc.msg}") from None
        except CorpusError as exc:
            if cfg.strict:
                raise CorpusError(str(exc), lineno) from None
            log.warning("skipping line %d: %s", lineno, exc)
            continue
        if rec.text.strip():
            yield rec.id, rec.text


def cmd_split(cfg: RunConfig, trace: bool = False) -> int:
    if cfg.fmt not in ("text", "doccano"):
        raise ValueError("split reads --format text or doccano")
    with _open_in(cfg.inputs[0]) as fh, _open_out(cfg.output) as out:
        items = _sentences(cfg, fh)
        if cfg.jobs == 1:
            splitter = RuleSplitter(cfg.splitter)
            for item in items:
                out.write(_split_record(item, splitter, trace) + "\n")
            return EXIT_OK
        fn = _split_traced if trace else _split_record
        with ProcessPoolExecutor(cfg.jobs, initializer=_init_worker, initargs=(cfg.splitter,)) as pool:
            while True:
                batch = list(itertools.islice(items, BATCH * cfg.jobs))
                if not batch:
                    break
                # map preserves input order
                for line in pool.map(fn, batch, chunksize=BATCH):
                    out.write(line + "\n")
    return EXIT_OK


# -- convert --

def cmd_convert(cfg: RunConfig, comments: bool = False) -> int:
    with _open_in(cfg.inputs[0]) as fh, _open_out(cfg.output) as out:
        if cfg.fmt == "doccano":
            write_iob(iter_doccano(fh, cfg.strict), out, comments=comments)
        elif cfg.fmt == "iob":
            for s in iob_to_sentences(iter_iob(fh)):
                out.write(doccano_line(s) + "\n")
        else:
            raise ValueError("convert reads --format doccano or iob")
    return EXIT_OK


# -- evaluate --

def _read_annotations(path: str, fmt: str, strict: bool):
    with _open_in(path) as fh:
        if fmt == "iob":
            return list(iob_to_sentences(iter_iob(fh)))
        return list(iter_doccano(fh, strict))


def cmd_evaluate(cfg: RunConfig, gold: str, pred: str, labels, show_errors: bool = False) -> int:
    gold_s = _read_annotations(gold, cfg.fmt, cfg.strict)
    pred_s = _read_annotations(pred, cfg.fmt, cfg.strict)
    report = exact_match_score(gold_s, pred_s, labels, strict=cfg.strict)
    with _open_out(cfg.output) as out:
        out.write(report.to_json() + "\n" if cfg.report == "json" else report.render_table())
        if show_errors:
            for m in error_breakdown(gold_s, pred_s, strict=cfg.strict):
                g = f"[{m.gold.start},{m.gold.end}) {m.gold.label}" if m.gold else "-"
                p = f"[{m.pred.start},{m.pred.end}) {m.pred.label}" if m.pred else "-"
                out.write(f"{m.sentence_id}\t{m.kind}\tgold {g}\tpred {p}\n")
    return EXIT_OK


# -- graph --

def cmd_graph(cfg: RunConfig, graph_format: str = "dot") -> int:
    with _open_in(cfg.inputs[0]) as fh:
        pairs = [(s.text, annotation_to_result(s)) for s in iter_doccano(fh, cfg.strict)]
    g = build_graph(pairs)
    with _open_out(cfg.output) as out:
        out.write(export_dot(g) if graph_format == "dot" else export_json(g) + "\n")
    return EXIT_OK


# -- stats --

def _split_name(spec: str) -> tuple[str, str]:
    name, sep, path = spec.partition("=")
    if sep and name and not Path(spec).exists():
        return name, path
    return Path(spec).stem, spec


def cmd_stats(cfg: RunConfig) -> int:
    splits = {}
    for spec in cfg.inputs:
        name, path = _split_name(spec)
        splits[name] = _read_annotations(path, cfg.fmt, cfg.strict)
    stats = corpus_stats(splits)
    with _open_out(cfg.output) as out:
        if cfg.report == "json":
            doc = {name: {label.value: c[label] for label in Label} for name, c in stats.counts.items()}
            doc["total"] = {label.value: stats.total[label] for label in Label}
            out.write(json.dumps(doc, indent=2) + "\n")
        else:
            out.write(stats.render())
    return EXIT_OK


# -- argument parsing --

def _parse_labels(text: str) -> tuple[Label, ...]:
    return tuple(Label.parse(x.strip()) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condsplit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_choices, fmt_default, many_inputs=False, fmt_help="input format"):
        if many_inputs:
            p.add_argument("-i", "--input", action="append", dest="inputs",
                           help="input file, optionally NAME=PATH; repeatable")
        else:
            p.add_argument("-i", "--input", default="-", help="input file (default stdin)")
        p.add_argument("-o", "--output", default="-", help="output file (default stdout)")
        p.add_argument("--format", choices=fmt_choices, default=fmt_default, help=fmt_help)
        strict = p.add_mutually_exclusive_group()
        strict.add_argument("--strict", dest="strict", action="store_true", default=True,
                            help="abort on the first bad record (default)")
        strict.add_argument("--lenient", dest="strict", action="store_false",
                            help="skip bad records with a warning")

    p = sub.add_parser("split", help="split sentences into condition and resultant clauses")
    common(p, ["text", "doccano"], "text")
    p.add_argument("--config", help="splitter config file")
    p.add_argument("--extended-patterns", action="store_true", default=None,
                   help="enable pattern rules for conditionals without a lexical indicator")
    p.add_argument("--lexicon-dir", help="directory overriding bundled lexicon files")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--trace", action="store_true", help="record fired rules in each record's meta")

    p = sub.add_parser("convert", help="convert between Doccano JSONL and IOB")
    common(p, ["doccano", "iob"], "doccano")
    p.add_argument("--iob-comments", action="store_true",
                   help="write '# id' and '# text' lines so IOB keeps ids and exact text")

    p = sub.add_parser("evaluate", help="exact-match P/R/F1 of predictions against gold")
    common(p, ["doccano", "iob"], "doccano")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--labels", type=_parse_labels, default="CD,AC,CS",
                   help="comma separated labels to score (default CD,AC,CS)")
    p.add_argument("--report", choices=["table", "json"], default="table")
    p.add_argument("--errors", action="store_true", help="also list every mismatch")

    p = sub.add_parser("graph", help="build a process graph from prediction JSONL")
    common(p, ["dot", "json"], "dot", fmt_help="output format")

    p = sub.add_parser("stats", help="label frequencies per data split")
    common(p, ["doccano", "iob"], "doccano", many_inputs=True)
    p.add_argument("--report", choices=["table", "json"], default="table")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "split":
            splitter_cfg = SplitterConfig.from_file(args.config) if args.config else SplitterConfig()
            lexicon_dir = str(Path(args.lexicon_dir).resolve()) if args.lexicon_dir else None
            if lexicon_dir and not Path(lexicon_dir).is_dir():
                raise FileNotFoundError(f"lexicon directory not found: {args.lexicon_dir}")
            splitter_cfg = splitter_cfg.with_overrides(extended_patterns=args.extended_patterns,
                                                       lexicon_dir=lexicon_dir)
            cfg = RunConfig([args.input], args.output, args.format, args.strict, splitter_cfg,
                            jobs=args.jobs)
            return cmd_split(cfg, trace=args.trace)
        if args.command == "convert":
            cfg = RunConfig([args.input], args.output, args.format, args.strict)
            return cmd_convert(cfg, comments=args.iob_comments)
        if args.command == "evaluate":
            labels = args.labels if isinstance(args.labels, tuple) else _parse_labels(args.labels)
            cfg = RunConfig([], args.output, args.format, args.strict, report=args.report)
            return cmd_evaluate(cfg, args.gold, args.pred, labels, args.errors)
        if args.command == "graph":
            cfg = RunConfig([args.input], args.output, "doccano", args.strict)
            return cmd_graph(cfg, args.format)
        if args.command == "stats":
            cfg = RunConfig(args.inputs or ["-"], args.output, args.format, args.strict,
                            report=args.report)
            return cmd_stats(cfg)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (CorpusError, AlignmentError, EmptyInputError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
