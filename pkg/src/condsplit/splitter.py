"""Rule-based conditional sentence splitter.

A sentence passes through five rule stages:

1. scope               locate the conditional clause
2. predicate_form      reject fragments such as a bare "if"
3. candidates          collect the clauses that could be its resultant
4. resultant_selection pick the resultant among the candidates
5. resultant_labeling  Action or Consequence

Every stage that fires appends one ``RuleTrace`` entry.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional, Sequence

from .config import SplitterConfig
from .linguistics.features import (
    DISCOURSE_MARKER,
    TokenFeatures,
    TokenRange,
    _indicator_at,
    detect_imperative,
    detect_obligation,
    extract_features,
    weak_action_cues,
)
from .linguistics.lexicon import Lexicon, default_lexicon, load_lexicon
from .linguistics.tokenizer import Token, tokenize
from .model import AnnotatedSentence, ClauseSpan, Label, SplitResult

STAGES = ("scope", "predicate_form", "candidates", "resultant_selection", "resultant_labeling")

# sentence-internal terminators, e.g. "Do you like it? You can have it now."
TERMINATORS = frozenset(".?!")


@dataclass(frozen=True)
class RuleTrace:
    stage: str
    rule_id: str
    token_range: TokenRange
    note: str = ""


def _strip_trailing_punct(tokens, start, end, floor):
    while end > floor and tokens[end - 1].is_punct:
        end -= 1
    return end


def _is_boundary(tok: Token, feat: TokenFeatures) -> bool:
    return feat.is_clause_separator or (tok.is_punct and tok.text in TERMINATORS)


def find_condition_scope(tokens: Sequence[Token], features: Sequence[TokenFeatures]) -> Optional[TokenRange]:
    """Token range of the first conditional clause, or None.

    The clause runs from its indicator to the first clause separator, "then"
    marker or sentence end; trailing punctuation is left out. A discourse
    marker ("Otherwise") is a clause on its own.
    """
    idx = next((i for i, f in enumerate(features) if f.is_condition_indicator), None)
    if idx is None:
        return None
    feat = features[idx]
    if feat.indicator_kind == DISCOURSE_MARKER:
        return idx, idx + feat.indicator_length
    end = idx + feat.indicator_length
    while end < len(tokens) and not (_is_boundary(tokens[end], features[end])
                                     or features[end].is_then_marker):
        end += 1
    return idx, _strip_trailing_punct(tokens, idx, end, idx + feat.indicator_length)


def check_predicate_form(tokens: Sequence[Token], condition_range: TokenRange,
                         lexicon: Optional[Lexicon] = None) -> bool:
    """Does the conditional clause have a predicate beyond its indicator?"""
    lexicon = lexicon or default_lexicon()
    start, end = condition_range
    if not 0 <= start < end <= len(tokens):
        return False
    kind, length = _indicator_at(tokens, start, lexicon)
    if kind == DISCOURSE_MARKER:
        # anaphoric: the predicate is in an earlier sentence
        return True
    if _is_exclusion(tokens[start:end], lexicon):
        return False
    return any(t.is_word for t in tokens[start + max(length, 1):end])


def _segments(tokens, features, condition_range, lexicon):
    """Non-condition clause segments as (range, opens_with_indicator) pairs."""
    cond_start, cond_end = condition_range
    raw = []
    cur = None
    i = 0
    n = len(tokens)
    while i < n:
        if cond_start <= i < cond_end:
            if cur is not None:
                raw.append((cur, i))
                cur = None
            i = cond_end
            continue
        tok, feat = tokens[i], features[i]
        if _is_boundary(tok, feat):
            if cur is not None:
                raw.append((cur, i))
                cur = None
        elif feat.is_then_marker or feat.is_condition_indicator:
            if cur is not None:
                raw.append((cur, i))
            cur = i
        elif cur is None:
            cur = i
        i += 1
    if cur is not None:
        raw.append((cur, n))

    out = []
    for start, end in raw:
        while start < end and (tokens[start].is_punct or tokens[start].lower in lexicon.connectives):
            start += 1
        while end > start and (tokens[end - 1].is_punct or tokens[end - 1].lower in lexicon.connectives):
            end -= 1
        if not any(t.is_word for t in tokens[start:end]):
            continue
        if _is_exclusion(tokens[start:end], lexicon):
            continue
        out.append(((start, end), features[start].is_condition_indicator))
    return out


def _is_exclusion(clause, lexicon):
    return tuple(t.lower for t in clause) in lexicon.exclusions


def find_resultant_candidates(tokens: Sequence[Token], features: Sequence[TokenFeatures],
                              condition_range: TokenRange,
                              lexicon: Optional[Lexicon] = None) -> list[TokenRange]:
    """Clauses outside the condition, split at separators and "then" markers.

    A "then" marker opens the following clause and stays part of it. Clauses
    opening with another condition indicator are conditions, not candidates.
    """
    lexicon = lexicon or default_lexicon()
    return [rng for rng, is_cond in _segments(tokens, features, condition_range, lexicon) if not is_cond]


def select_resultant(candidates: Sequence[TokenRange],
                     condition_range: TokenRange) -> tuple[Optional[TokenRange], bool]:
    """Nearest following candidate, else nearest preceding one.

    Returns the choice and whether there was more than one candidate.
    """
    cond_start, cond_end = condition_range
    following = [c for c in candidates if c[0] >= cond_end]
    preceding = [c for c in candidates if c[1] <= cond_start]
    multi = len(candidates) > 1
    if following:
        return following[0], multi
    if preceding:
        return preceding[-1], multi
    return None, multi


def label_resultant(tokens: Sequence[Token], resultant_range: TokenRange,
                    lexicon: Optional[Lexicon] = None, weak_cue_threshold: int = 1,
                    others_label: Label = Label.CONSEQUENCE) -> tuple[Label, bool]:
    """Action for imperative or obligation clauses, otherwise Consequence.

    Consequences carrying weak action cues get ``others_label`` and the
    low-confidence flag.
    """
    label, low, _ = _label_with_rule(tokens, resultant_range, lexicon or default_lexicon(),
                                     weak_cue_threshold, others_label)
    return label, low


def _label_with_rule(tokens, rng, lexicon, threshold, others_label):
    start, end = rng
    if detect_imperative(tokens, start, end, lexicon):
        return Label.ACTION, False, "labeling.imperative"
    if detect_obligation(tokens, rng, lexicon):
        return Label.ACTION, False, "labeling.obligation"
    if weak_action_cues(tokens, rng, lexicon) >= threshold:
        return others_label, True, "labeling.weak_cues"
    return Label.CONSEQUENCE, False, "labeling.consequence"


def char_span(tokens: Sequence[Token], rng: TokenRange, label: Label) -> ClauseSpan:
    return ClauseSpan(tokens[rng[0]].start, tokens[rng[1] - 1].end, label)


class RuleSplitter:
    """The five-stage pipeline bound to one configuration and lexicon.

    Instances hold only immutable state and may be shared between threads.
    """

    def __init__(self, config: Optional[SplitterConfig] = None, lexicon: Optional[Lexicon] = None):
        self.config = config or SplitterConfig()
        self.lexicon = lexicon or load_lexicon(self.config.lexicon_dir)

    def analyze(self, sentence: str) -> tuple[list[Token], list[TokenFeatures]]:
        tokens = tokenize(sentence)
        return tokens, extract_features(tokens, self.lexicon)

    def _scope(self, tokens, features):
        rng = find_condition_scope(tokens, features)
        if rng is not None:
            kind = features[rng[0]].indicator_kind
            return rng, f"scope.{kind}"
        if self.config.extended_patterns:
            for rule, finder in (("scope.ext.imperative_and", self._imperative_and),
                                 ("scope.ext.interrogative", self._interrogative),
                                 ("scope.ext.relative_clause", self._relative_clause)):
                rng = finder(tokens)
                if rng is not None:
                    return rng, rule
        return None, "scope.none"

    # "Come now and I'll give you the book."
    def _imperative_and(self, tokens):
        if not tokens or not detect_imperative(tokens, 0, lexicon=self.lexicon):
            return None
        for k in range(1, len(tokens) - 1):
            if tokens[k].lower == "and":
                if tokens[k + 1].lower in self.lexicon.subject_pronouns:
                    return 0, _strip_trailing_punct(tokens, 0, k, 1)
                return None
        return None

    # "Do you like it? You can have it now."
    def _interrogative(self, tokens):
        if not tokens or tokens[0].lower not in self.lexicon.auxiliaries:
            return None
        for q, tok in enumerate(tokens):
            if tok.text == "?":
                if q > 1 and any(t.is_word for t in tokens[q + 1:]):
                    return 0, q
                return None
        return None

    # "Anyone who skips class will be disciplined."
    def _relative_clause(self, tokens):
        for r in range(1, min(4, len(tokens))):
            if tokens[r].lower in self.lexicon.relative_pronouns:
                if not all(t.is_word for t in tokens[:r]):
                    return None
                for b in range(r + 2, len(tokens)):
                    if tokens[b].is_punct:
                        return None
                    if tokens[b].lower in self.lexicon.auxiliaries:
                        return 0, b
                return None
        return None

    def classify(self, sentence: str) -> bool:
        tokens, features = self.analyze(sentence)
        rng, _ = self._scope(tokens, features)
        return rng is not None and self._predicate_ok(tokens, rng)

    def _predicate_ok(self, tokens, rng):
        return check_predicate_form(tokens, rng, self.lexicon)

    def split(self, sentence: str) -> tuple[SplitResult, list[RuleTrace]]:
        tokens, features = self.analyze(sentence)
        trace: list[RuleTrace] = []

        cond_rng, rule = self._scope(tokens, features)
        if cond_rng is None:
            trace.append(RuleTrace("scope", rule, (0, 0), "no condition indicator"))
            return SplitResult(), trace
        n_indicators = sum(f.is_condition_indicator for f in features)
        trace.append(RuleTrace("scope", rule, cond_rng,
                               f"{n_indicators} condition indicator(s)" if n_indicators else "pattern"))

        if not self._predicate_ok(tokens, cond_rng):
            trace.append(RuleTrace("predicate_form", "predicate.fragment", cond_rng,
                                   "no predicate beyond the indicator; not conditional"))
            return SplitResult(), trace
        condition = char_span(tokens, cond_rng, Label.CONDITION)
        is_anaphoric = features[cond_rng[0]].indicator_kind == DISCOURSE_MARKER
        trace.append(RuleTrace("predicate_form",
                               "predicate.anaphoric" if is_anaphoric else "predicate.clause", cond_rng))

        if is_anaphoric:
            trace.append(RuleTrace("candidates", "candidates.anaphoric", cond_rng,
                                   "antecedent condition lies in a previous sentence"))
            return SplitResult.from_spans(condition, multi_clause=n_indicators > 1), trace

        segments = _segments(tokens, features, cond_rng, self.lexicon)
        candidates = [rng for rng, is_cond in segments if not is_cond]
        extra_conditions = len(segments) - len(candidates)
        trace.append(RuleTrace("candidates", "candidates.clauses", cond_rng,
                               f"{len(candidates)} candidate(s), {extra_conditions} further condition(s)"))

        chosen, multi = select_resultant(candidates, cond_rng)
        multi = multi or extra_conditions > 0 or n_indicators > 1
        if chosen is None:
            trace.append(RuleTrace("resultant_selection", "selection.none", cond_rng, "only condition"))
            return SplitResult.from_spans(condition, multi_clause=multi), trace
        following = chosen[0] >= cond_rng[1]
        note = []
        if following and any(c[1] <= cond_rng[0] for c in candidates):
            note.append("preceding clause ignored as possible unconditional action")
        if multi:
            note.append("multiple clauses")
        trace.append(RuleTrace("resultant_selection",
                               "selection.following" if following else "selection.preceding",
                               chosen, "; ".join(note)))

        label, low, label_rule = _label_with_rule(tokens, chosen, self.lexicon,
                                                  self.config.weak_cue_threshold,
                                                  self.config.others_label)
        trace.append(RuleTrace("resultant_labeling", label_rule, chosen, label.display))
        resultant = char_span(tokens, chosen, label)
        return SplitResult.from_spans(condition, resultant, low_confidence=low, multi_clause=multi), trace


@functools.lru_cache(maxsize=8)
def get_splitter(config: Optional[SplitterConfig] = None) -> RuleSplitter:
    return RuleSplitter(config)


def classify_conditional(sentence: str, config: Optional[SplitterConfig] = None) -> bool:
    return get_splitter(config).classify(sentence)


def split(sentence: str, config: Optional[SplitterConfig] = None) -> tuple[SplitResult, list[RuleTrace]]:
    return get_splitter(config).split(sentence)


def result_to_annotation(sentence_id: int, text: str, result: SplitResult) -> AnnotatedSentence:
    """Prediction record: clause spans, or the No Condition label when there are none."""
    meta = {
        "sentence_class": result.sentence_class.value,
        "low_confidence": result.low_confidence,
        "multi_clause": result.multi_clause,
    }
    spans = result.spans()
    return AnnotatedSentence(sentence_id, text, spans,
                             None if spans else Label.NO_CONDITION, meta)


def annotation_to_result(s: AnnotatedSentence) -> SplitResult:
    """Recover a SplitResult from a prediction or gold record.

    The first Condition span is the condition; the first Action or
    Consequence span is the resultant. Anything beyond that sets multi_clause.
    """
    conds = [sp for sp in s.spans if sp.label is Label.CONDITION]
    results = [sp for sp in s.spans if sp.label in (Label.ACTION, Label.CONSEQUENCE)]
    condition = conds[0] if conds else None
    resultant = results[0] if results and condition is not None else None
    if condition is not None and resultant is not None and condition.overlaps(resultant):
        resultant = None
    meta = s.meta or {}
    multi = bool(meta.get("multi_clause")) or len(conds) > 1 or len(results) > 1
    return SplitResult.from_spans(condition, resultant,
                                  low_confidence=bool(meta.get("low_confidence")),
                                  multi_clause=multi)
