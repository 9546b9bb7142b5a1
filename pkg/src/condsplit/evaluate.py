"""Span-level exact-match precision, recall and F1.

A predicted span counts only if its label and both boundaries equal a gold
span. Boundaries are compared after trimming whitespace and trailing
punctuation, so "expires." and "expires" match.
"""
from __future__ import annotations

import json
import logging
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .model import AnnotatedSentence, ClauseSpan, Label

log = logging.getLogger(__name__)

DEFAULT_LABELS = (Label.CONDITION, Label.ACTION, Label.CONSEQUENCE)


class AlignmentError(ValueError):
    pass


def _trimmable(ch: str) -> bool:
    return ch.isspace() or unicodedata.category(ch).startswith("P")


def normalize_span(text: str, span: ClauseSpan) -> tuple[int, int]:
    start, end = span.start, min(span.end, len(text))
    while start < end and text[start].isspace():
        start += 1
    while end > start and _trimmable(text[end - 1]):
        end -= 1
    return start, end


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Percentages; 0 where the denominator is empty."""
    p = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    r = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass(frozen=True)
class Score:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return prf(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return prf(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return prf(self.tp, self.fp, self.fn)[2]

    @property
    def support(self) -> int:
        return self.tp + self.fn

    def as_dict(self) -> dict:
        return {
            "precision": round(self.precision, 2),
            "recall": round(self.recall, 2),
            "f1": round(self.f1, 2),
            "support": self.support,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
        }


@dataclass(frozen=True)
class EvalReport:
    per_label: dict[Label, Score]
    micro: Score
    unmatched_ids: tuple[int, ...] = ()
    sentences: int = 0

    def to_json(self) -> str:
        doc = {
            "per_label": {label.display: s.as_dict() for label, s in self.per_label.items()},
            "micro_average": self.micro.as_dict(),
            "sentences": self.sentences,
            "unmatched_ids": list(self.unmatched_ids),
        }
        return json.dumps(doc, indent=2)

    def render_table(self) -> str:
        rows = [(label.display, s) for label, s in self.per_label.items()]
        rows.append(("Average (micro)", self.micro))
        name_w = max(len(r[0]) for r in rows)
        head = f"{'':<{name_w}}  {'Precision':>9}  {'Recall':>7}  {'F1':>7}  {'support':>7}"
        lines = [head, "-" * len(head)]
        for k, (name, s) in enumerate(rows):
            if k == len(rows) - 1:
                lines.append("-" * len(head))
            lines.append(f"{name:<{name_w}}  {s.precision:>9.2f}  {s.recall:>7.2f}  "
                         f"{s.f1:>7.2f}  {s.support:>7d}")
        return "\n".join(lines) + "\n"


def _align(gold, pred, strict):
    gold_by_id = {s.id: s for s in gold}
    pred_by_id = {s.id: s for s in pred}
    unmatched = sorted(set(gold_by_id) ^ set(pred_by_id))
    if unmatched:
        msg = f"sentence ids present on one side only: {unmatched[:10]}"
        if strict:
            raise AlignmentError(msg)
        log.warning(msg)
    pairs = [(gold_by_id[i], pred_by_id[i]) for i in gold_by_id if i in pred_by_id]
    for g, p in pairs:
        if g.text != p.text:
            raise AlignmentError(f"sentence {g.id}: gold and predicted text differ")
    return pairs, tuple(unmatched)


def _keys(s: AnnotatedSentence, labels) -> Counter:
    return Counter((sp.label, *normalize_span(s.text, sp)) for sp in s.spans if sp.label in labels)


def exact_match_score(gold: Iterable[AnnotatedSentence], pred: Iterable[AnnotatedSentence],
                      labels: Sequence[Label] = DEFAULT_LABELS, strict: bool = True) -> EvalReport:
    labels = tuple(labels)
    pairs, unmatched = _align(list(gold), list(pred), strict)
    tp, fp, fn = Counter(), Counter(), Counter()
    for g, p in pairs:
        gk, pk = _keys(g, labels), _keys(p, labels)
        hit = gk & pk
        for key, n in hit.items():
            tp[key[0]] += n
        for key, n in (pk - gk).items():
            fp[key[0]] += n
        for key, n in (gk - pk).items():
            fn[key[0]] += n
    per_label = {label: Score(tp[label], fp[label], fn[label]) for label in labels}
    micro = Score(sum(tp.values()), sum(fp.values()), sum(fn.values()))
    return EvalReport(per_label, micro, unmatched, len(pairs))


# -- error analysis --

MISSING = "missing_span"
SPURIOUS = "spurious_span"
BOUNDARY = "boundary_error"
CONFUSION_AC_CS = "label_confusion_AC_CS"
CONFUSION_AC_UA = "label_confusion_AC_UA"
CONFUSION_OTHER = "label_confusion_other"


class Mismatch(NamedTuple):
    kind: str
    sentence_id: int
    gold: Optional[ClauseSpan]
    pred: Optional[ClauseSpan]


def _confusion_kind(a: Label, b: Label) -> str:
    pair = {a, b}
    if pair == {Label.ACTION, Label.CONSEQUENCE}:
        return CONFUSION_AC_CS
    if pair == {Label.ACTION, Label.UNCONDITIONAL_ACTION}:
        return CONFUSION_AC_UA
    return CONFUSION_OTHER


def error_breakdown(gold: Iterable[AnnotatedSentence], pred: Iterable[AnnotatedSentence],
                    strict: bool = False) -> list[Mismatch]:
    """Classify every non-matching span.

    Same boundaries with another label is a label confusion; same label with
    overlapping but different boundaries is a boundary error; leftovers are
    missing (gold) or spurious (predicted).
    """
    pairs, _ = _align(list(gold), list(pred), strict)
    out = []
    for g, p in pairs:
        gold_left = list(g.spans)
        pred_left = list(p.spans)
        norm = {id(sp): normalize_span(g.text, sp) for sp in gold_left + pred_left}

        for ps in list(pred_left):
            match = next((gs for gs in gold_left
                          if gs.label is ps.label and norm[id(gs)] == norm[id(ps)]), None)
            if match is not None:
                gold_left.remove(match)
                pred_left.remove(ps)
        for ps in list(pred_left):
            match = next((gs for gs in gold_left if norm[id(gs)] == norm[id(ps)]), None)
            if match is not None:
                out.append(Mismatch(_confusion_kind(match.label, ps.label), g.id, match, ps))
                gold_left.remove(match)
                pred_left.remove(ps)
        for ps in list(pred_left):
            ps_rng = norm[id(ps)]
            match = next((gs for gs in gold_left if gs.label is ps.label
                          and norm[id(gs)][0] < ps_rng[1] and ps_rng[0] < norm[id(gs)][1]), None)
            if match is not None:
                out.append(Mismatch(BOUNDARY, g.id, match, ps))
                gold_left.remove(match)
                pred_left.remove(ps)
        out.extend(Mismatch(MISSING, g.id, gs, None) for gs in gold_left)
        out.extend(Mismatch(SPURIOUS, g.id, None, ps) for ps in pred_left)
    return out
