"""Lexical features per token, standing in for a full syntactic parse."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .lexicon import Lexicon, Phrase, default_lexicon
from .tokenizer import NUMBER, Token

SUBORDINATOR = "subordinator"
NEGATIVE_SUBORDINATOR = "negative_subordinator"
DISCOURSE_MARKER = "discourse_marker"

TokenRange = tuple[int, int]


@dataclass(frozen=True)
class TokenFeatures:
    is_condition_indicator: bool = False
    indicator_kind: Optional[str] = None
    # number of tokens of a multiword indicator ("as long as" -> 3), else 0
    indicator_length: int = 0
    is_obligation_modal: bool = False
    is_imperative_candidate: bool = False
    is_then_marker: bool = False
    is_clause_separator: bool = False

    def __post_init__(self):
        if self.is_condition_indicator != (self.indicator_kind is not None):
            raise ValueError("indicator_kind must be set iff is_condition_indicator")


def match_phrase(tokens: Sequence[Token], i: int, phrase: Phrase, stop: Optional[int] = None) -> bool:
    stop = len(tokens) if stop is None else stop
    if i + len(phrase) > stop:
        return False
    return all(tokens[i + k].lower == w for k, w in enumerate(phrase))


def is_excluded_phrase(tokens: Sequence[Token], i: int, lexicon: Lexicon) -> bool:
    """True if an exclusion phrase ("if possible") starts at i as a whole phrase."""
    for phrase in lexicon.exclusions:
        if match_phrase(tokens, i, phrase):
            after = i + len(phrase)
            if after == len(tokens) or tokens[after].is_punct:
                return True
    return False


def _indicator_at(tokens, i, lexicon) -> tuple[Optional[str], int]:
    candidates = [
        (phrase, kind)
        for kind, phrases in ((SUBORDINATOR, lexicon.subordinators),
                              (NEGATIVE_SUBORDINATOR, lexicon.negative_subordinators),
                              (DISCOURSE_MARKER, lexicon.discourse_markers))
        for phrase in phrases
        if match_phrase(tokens, i, phrase)
    ]
    if not candidates:
        return None, 0
    phrase, kind = max(candidates, key=lambda c: len(c[0]))
    return kind, len(phrase)


def _obligation_at(tokens, i, lexicon, stop=None) -> bool:
    return any(match_phrase(tokens, i, p, stop) for p in lexicon.obligation_modals)


def _is_clause_initial(tokens, i, lexicon) -> bool:
    j = i - 1
    while j >= 0 and tokens[j].lower in lexicon.clause_adverbs:
        j -= 1
    if j < 0:
        return True
    prev = tokens[j]
    return prev.is_punct or prev.kind == NUMBER or prev.lower in lexicon.connectives


def extract_features(tokens: Sequence[Token], lexicon: Optional[Lexicon] = None) -> list[TokenFeatures]:
    lexicon = lexicon or default_lexicon()
    out = []
    covered_until = 0
    for i, tok in enumerate(tokens):
        kind, length = (None, 0)
        if i >= covered_until and not is_excluded_phrase(tokens, i, lexicon):
            kind, length = _indicator_at(tokens, i, lexicon)
            if kind is not None:
                covered_until = i + length
        out.append(TokenFeatures(
            is_condition_indicator=kind is not None,
            indicator_kind=kind,
            indicator_length=length,
            is_obligation_modal=_obligation_at(tokens, i, lexicon),
            is_imperative_candidate=(tok.lower in lexicon.imperative_verbs
                                     and _is_clause_initial(tokens, i, lexicon)),
            is_then_marker=tok.lower in lexicon.then_markers,
            is_clause_separator=tok.is_punct and tok.text in lexicon.clause_separators,
        ))
    return out


def detect_imperative(tokens: Sequence[Token], clause_start: int, clause_end: Optional[int] = None,
                      lexicon: Optional[Lexicon] = None) -> bool:
    """Does the clause open with an imperative verb, after optional adverbs?"""
    lexicon = lexicon or default_lexicon()
    end = len(tokens) if clause_end is None else clause_end
    if not 0 <= clause_start < end <= len(tokens):
        raise IndexError(f"clause start {clause_start} out of range")
    i = clause_start
    while i < end and (tokens[i].lower in lexicon.clause_adverbs
                       or tokens[i].lower in lexicon.connectives):
        i += 1
    return i < end and tokens[i].lower in lexicon.imperative_verbs


def detect_obligation(tokens: Sequence[Token], clause_range: TokenRange,
                      lexicon: Optional[Lexicon] = None) -> bool:
    lexicon = lexicon or default_lexicon()
    start, end = clause_range
    if not 0 <= start <= end <= len(tokens):
        raise IndexError(f"clause range {clause_range} out of range")
    return any(_obligation_at(tokens, i, lexicon, end) for i in range(start, end))


def weak_action_cues(tokens: Sequence[Token], clause_range: TokenRange,
                     lexicon: Optional[Lexicon] = None) -> int:
    """Count hints of an action phrased neither as imperative nor obligation."""
    lexicon = lexicon or default_lexicon()
    start, end = clause_range
    count = 0
    for i in range(start, end):
        w = tokens[i].lower
        if w in lexicon.weak_action_cues or (i > start and w in lexicon.imperative_verbs):
            count += 1
    return count
