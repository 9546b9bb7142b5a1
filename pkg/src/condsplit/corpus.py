"""Doccano JSONL and IOB readers/writers, span <-> IOB conversion, label statistics.

Doccano records look like::

    {"id": 908, "text": "Include the date if the opt-out period expires.",
     "labels": [[0, 16, "Action"], [17, 47, "Condition"]]}

Sentence-level labels (Only-Condition, No Condition) are stored as a single
triple spanning the whole text. Offsets count Unicode code points.
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .linguistics.tokenizer import Token, align_tokens, detokenize, tokenize
from .model import (
    AnnotatedSentence,
    ClauseSpan,
    Label,
    is_sentence_level,
    validate_sentence,
)

log = logging.getLogger(__name__)

# IOB entity names; Only-Condition and No Condition never appear as tags
TAG_LABELS = {
    "Condition": Label.CONDITION,
    "Action": Label.ACTION,
    "Consequence": Label.CONSEQUENCE,
    "Unconditional-Action": Label.UNCONDITIONAL_ACTION,
}

STATS_COLUMNS = (Label.CONDITION, Label.CONSEQUENCE, Label.ACTION,
                 Label.ONLY_CONDITION, Label.NO_CONDITION, Label.UNCONDITIONAL_ACTION)


class CorpusError(ValueError):
    """A record that cannot be parsed or violates the annotation invariants."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SpanAlignmentError(CorpusError):
    pass


# -- Doccano JSONL --

def parse_doccano_record(obj: object) -> AnnotatedSentence:
    if not isinstance(obj, dict):
        raise CorpusError("record is not a JSON object")
    sid = obj.get("id")
    if not isinstance(sid, int) or isinstance(sid, bool):
        raise CorpusError(f"id must be an integer, got {sid!r}")
    text = obj.get("text")
    if not isinstance(text, str):
        raise CorpusError("text must be a string")
    triples = obj.get("labels", obj.get("label", []))
    if not isinstance(triples, list):
        raise CorpusError("labels must be a list")
    spans = []
    sentence_labels = []
    for k, triple in enumerate(triples):
        if (not isinstance(triple, (list, tuple)) or len(triple) != 3
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in triple[:2])
                or not isinstance(triple[2], str)):
            raise CorpusError(f"label {k} is not a [start, end, label] triple: {triple!r}")
        try:
            label = Label.parse(triple[2])
        except ValueError as exc:
            raise CorpusError(str(exc)) from None
        if is_sentence_level(label):
            sentence_labels.append(label)
        else:
            spans.append(ClauseSpan(triple[0], triple[1], label))
    if len(sentence_labels) > 1:
        raise CorpusError("more than one sentence-level label")
    meta = obj.get("meta") or {}
    if not isinstance(meta, dict):
        raise CorpusError("meta must be an object")
    return AnnotatedSentence(sid, text, tuple(sorted(spans)),
                             sentence_labels[0] if sentence_labels else None, meta)


def iter_doccano(lines: Iterable[str], strict: bool = True,
                 skipped: Optional[list] = None) -> Iterator[AnnotatedSentence]:
    """Stream records; in lenient mode bad lines are logged and appended to `skipped`."""
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON: {exc.msg}") from None
            sent = parse_doccano_record(obj)
            violations = validate_sentence(sent)
            if violations:
                raise CorpusError("; ".join(map(str, violations)))
        except CorpusError as exc:
            exc = CorpusError(str(exc), lineno) if exc.line is None else exc
            if strict:
                raise exc
            log.warning("skipping %s", exc)
            if skipped is not None:
                skipped.append((lineno, str(exc)))
            continue
        yield sent


def read_doccano(lines: Iterable[str], strict: bool = True,
                 skipped: Optional[list] = None) -> list[AnnotatedSentence]:
    return list(iter_doccano(lines, strict, skipped))


def doccano_line(s: AnnotatedSentence, model: Optional[str] = None) -> str:
    labels = [[sp.start, sp.end, sp.label.display] for sp in s.spans]
    if s.sentence_label is not None:
        labels.append([0, len(s.text), s.sentence_label.display])
    record = {"id": s.id, "text": s.text, "labels": labels}
    if s.meta:
        record["meta"] = s.meta
    if model is not None:
        record["model"] = model
    return json.dumps(record, ensure_ascii=False)


def write_doccano(sentences: Iterable[AnnotatedSentence], stream: IO[str],
                  model: Optional[str] = None) -> None:
    for s in sentences:
        stream.write(doccano_line(s, model) + "\n")


def load_golden() -> list[AnnotatedSentence]:
    """The bundled golden corpus of reference sentences."""
    text = resources.files("condsplit.data").joinpath("golden.jsonl").read_text(encoding="utf-8")
    return read_doccano(text.splitlines())


# -- IOB --

def iob_error(tags: Sequence[str]) -> Optional[tuple[int, str]]:
    """Index and description of the first illegal tag, or None."""
    prev = None
    for i, tag in enumerate(tags):
        if tag == "O":
            prev = None
            continue
        prefix, _, name = tag.partition("-")
        if prefix not in ("B", "I") or name not in TAG_LABELS:
            return i, f"unknown tag {tag!r}"
        if prefix == "I" and prev != name:
            return i, f"{tag} must follow B-{name} or I-{name}"
        prev = name
    return None


@dataclass(frozen=True)
class IobSequence:
    tokens: tuple[Token, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.tokens) != len(self.tags):
            raise CorpusError("tokens and tags differ in length")
        err = iob_error(self.tags)
        if err is not None:
            raise CorpusError(f"token {err[0]}: {err[1]}")

    def pairs(self) -> list[tuple[str, str]]:
        return [(t.text, tag) for t, tag in zip(self.tokens, self.tags)]


def to_iob(s: AnnotatedSentence) -> IobSequence:
    """Tag tokens B-/I- inside spans and O outside.

    Punctuation at a span's trailing edge is tagged O, so a span ending on
    "expires." tags the period O.
    """
    tokens = tokenize(s.text) if s.text.strip() else []
    tags = ["O"] * len(tokens)
    for span in s.spans:
        covered = []
        for i, tok in enumerate(tokens):
            if tok.end <= span.start or tok.start >= span.end:
                continue
            if tok.start < span.start or tok.end > span.end:
                raise SpanAlignmentError(
                    f"sentence {s.id}: token {tok.text!r} [{tok.start},{tok.end}) straddles "
                    f"span [{span.start},{span.end}) {span.label.display}")
            covered.append(i)
        while covered and tokens[covered[-1]].is_punct:
            covered.pop()
        for k, i in enumerate(covered):
            tags[i] = ("B-" if k == 0 else "I-") + span.label.display
    return IobSequence(tokens, tags)


def from_iob(seq: IobSequence, text: str, sentence_id: int = 0,
             meta: Optional[dict] = None) -> AnnotatedSentence:
    """Turn B-X I-X* runs back into character spans.

    A sentence without spans gets the No Condition label, since IOB cannot
    tell No Condition from Only-Condition.
    """
    for tok in seq.tokens:
        if text[tok.start:tok.end] != tok.text:
            raise SpanAlignmentError(f"token {tok.text!r} does not match text at [{tok.start},{tok.end})")
    spans = []
    run = None
    for tok, tag in zip(seq.tokens, seq.tags):
        if tag.startswith("B-"):
            if run:
                spans.append(ClauseSpan(run[0], run[1], TAG_LABELS[run[2]]))
            run = [tok.start, tok.end, tag[2:]]
        elif tag.startswith("I-"):
            run[1] = tok.end
        else:
            if run:
                spans.append(ClauseSpan(run[0], run[1], TAG_LABELS[run[2]]))
            run = None
    if run:
        spans.append(ClauseSpan(run[0], run[1], TAG_LABELS[run[2]]))
    return AnnotatedSentence(sentence_id, text, tuple(spans),
                             None if spans else Label.NO_CONDITION, dict(meta or {}))


class IobRecord(NamedTuple):
    id: Optional[int]
    text: str
    seq: IobSequence


def format_iob(seq: IobSequence, sentence_id: Optional[int] = None,
               text: Optional[str] = None) -> str:
    """One sentence block: optional "# id" / "# text" comments, then token<TAB>tag lines."""
    lines = []
    if sentence_id is not None:
        lines.append(f"# id = {sentence_id}")
    if text is not None:
        lines.append(f"# text = {text}")
    lines.extend(f"{tok}\t{tag}" for tok, tag in seq.pairs())
    return "\n".join(lines) + "\n\n"


def write_iob(sentences: Iterable[AnnotatedSentence], stream: IO[str], comments: bool = False) -> None:
    for s in sentences:
        seq = to_iob(s)
        if comments:
            stream.write(format_iob(seq, s.id, s.text))
        else:
            stream.write(format_iob(seq))


def iter_iob(lines: Iterable[str]) -> Iterator[IobRecord]:
    """Parse IOB blocks. Without a "# text" comment the text is rebuilt from tokens."""
    sid = text = None
    toks: list[str] = []
    tags: list[str] = []
    tag_lines: list[int] = []
    lineno = 0

    def finish():
        err = iob_error(tags)
        if err is not None:
            raise CorpusError(err[1], tag_lines[err[0]])
        if text is not None:
            try:
                tokens = align_tokens(text, toks)
            except ValueError as exc:
                raise CorpusError(str(exc), tag_lines[0] if tag_lines else lineno) from None
            return IobRecord(sid, text, IobSequence(tokens, tags))
        rebuilt, tokens = detokenize(toks)
        return IobRecord(sid, rebuilt, IobSequence(tokens, tags))

    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if toks:
                yield finish()
            sid = text = None
            toks, tags, tag_lines = [], [], []
            continue
        if line.startswith("# ") and "\t" not in line and not toks:
            key, sep, value = line[2:].partition(" = ")
            if sep and key == "id":
                try:
                    sid = int(value)
                except ValueError:
                    raise CorpusError(f"bad id comment {value!r}", lineno) from None
            elif sep and key == "text":
                text = value
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2 or not parts[0]:
            raise CorpusError(f"expected 'token<TAB>tag', got {line!r}", lineno)
        toks.append(parts[0])
        tags.append(parts[1].strip())
        tag_lines.append(lineno)
    if toks:
        yield finish()


def read_iob(lines: Iterable[str]) -> list[IobRecord]:
    return list(iter_iob(lines))


def iob_to_sentences(records: Iterable[IobRecord]) -> Iterator[AnnotatedSentence]:
    for n, rec in enumerate(records, 1):
        yield from_iob(rec.seq, rec.text, rec.id if rec.id is not None else n)


# -- statistics --

@dataclass
class CorpusStats:
    counts: dict[str, Counter] = field(default_factory=dict)

    @property
    def total(self) -> Counter:
        total = Counter({label: 0 for label in Label})
        for c in self.counts.values():
            total.update(c)
        return total

    def render(self) -> str:
        header = ["Data"] + [label.value for label in STATS_COLUMNS]
        rows = [[name.capitalize()] + [f"{c[label]:,}" for label in STATS_COLUMNS]
                for name, c in self.counts.items()]
        total = self.total
        rows.append(["Total"] + [f"{total[label]:,}" for label in STATS_COLUMNS])
        widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
        lines = []
        for k, row in enumerate([header] + rows):
            cells = [row[0].ljust(widths[0])] + [row[i].rjust(widths[i]) for i in range(1, len(row))]
            lines.append(" | ".join(cells))
            if k == 0:
                lines.append("-+-".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def count_labels(sentences: Iterable[AnnotatedSentence]) -> Counter:
    c = Counter({label: 0 for label in Label})
    for s in sentences:
        for span in s.spans:
            c[span.label] += 1
        if s.sentence_label is not None:
            c[s.sentence_label] += 1
    return c


def corpus_stats(splits: Mapping[str, Iterable[AnnotatedSentence]]) -> CorpusStats:
    return CorpusStats({name: count_labels(sents) for name, sents in splits.items()})
