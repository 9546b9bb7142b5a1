"""Shared data types: the annotation label set, clause spans and split results.

Spans are character offsets into the original sentence text, start inclusive
and end exclusive.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional


class Label(str, enum.Enum):
    CONDITION = "CD"
    ACTION = "AC"
    CONSEQUENCE = "CS"
    ONLY_CONDITION = "OC"
    NO_CONDITION = "NC"
    UNCONDITIONAL_ACTION = "UA"

    @property
    def display(self) -> str:
        """Name used in Doccano files and IOB tags."""
        return _DISPLAY[self]

    @property
    def is_clause_level(self) -> bool:
        return self in CLAUSE_LABELS

    @property
    def is_sentence_level(self) -> bool:
        return self in SENTENCE_LABELS

    def to_string(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Label":
        """Accept either the two-letter code or the display name."""
        try:
            return cls(text)
        except ValueError:
            pass
        try:
            return _BY_DISPLAY[text]
        except KeyError:
            raise ValueError(f"unknown label: {text!r}") from None

    def __str__(self) -> str:
        return self.value


_DISPLAY = {
    Label.CONDITION: "Condition",
    Label.ACTION: "Action",
    Label.CONSEQUENCE: "Consequence",
    Label.ONLY_CONDITION: "Only-Condition",
    Label.NO_CONDITION: "No Condition",
    Label.UNCONDITIONAL_ACTION: "Unconditional-Action",
}
_BY_DISPLAY = {v: k for k, v in _DISPLAY.items()}

CLAUSE_LABELS = frozenset(
    {Label.CONDITION, Label.ACTION, Label.CONSEQUENCE, Label.UNCONDITIONAL_ACTION}
)
SENTENCE_LABELS = frozenset({Label.ONLY_CONDITION, Label.NO_CONDITION})
RESULTANT_LABELS = frozenset({Label.ACTION, Label.CONSEQUENCE})


def is_clause_level(label: Label) -> bool:
    return label in CLAUSE_LABELS


def is_sentence_level(label: Label) -> bool:
    return label in SENTENCE_LABELS


class SentenceClass(str, enum.Enum):
    """Four-way sentence category derived from the clause labels."""

    NC = "NC"
    OC = "OC"
    CA = "CA"
    CC = "CC"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class ClauseSpan:
    start: int
    end: int
    label: Label

    def text_of(self, sentence: str) -> str:
        return sentence[self.start:self.end]

    def overlaps(self, other: "ClauseSpan") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class AnnotatedSentence:
    """One Doccano record: text plus either clause spans or a sentence label."""

    id: int
    text: str
    spans: tuple[ClauseSpan, ...] = ()
    sentence_label: Optional[Label] = None
    meta: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if not isinstance(self.spans, tuple):
            object.__setattr__(self, "spans", tuple(self.spans))


class Violation(NamedTuple):
    invariant: str
    spans: tuple[int, ...]
    detail: str

    def __str__(self) -> str:
        where = f" (spans {', '.join(map(str, self.spans))})" if self.spans else ""
        return f"{self.invariant}{where}: {self.detail}"


def validate_sentence(s: AnnotatedSentence) -> list[Violation]:
    violations = []
    n = len(s.text)
    for i, span in enumerate(s.spans):
        if not (0 <= span.start < span.end <= n):
            violations.append(Violation(
                "bounds", (i,),
                f"[{span.start},{span.end}) not within text of length {n}"))
        if not is_clause_level(span.label):
            violations.append(Violation(
                "clause_label", (i,), f"{span.label.display} is not a clause-level label"))
    for i in range(1, len(s.spans)):
        if s.spans[i].start < s.spans[i - 1].start:
            violations.append(Violation(
                "sorted", (i - 1, i), "spans are not sorted by start"))
    for i in range(len(s.spans)):
        for j in range(i + 1, len(s.spans)):
            if s.spans[i].overlaps(s.spans[j]):
                a, b = s.spans[i], s.spans[j]
                violations.append(Violation(
                    "overlap", (i, j),
                    f"[{a.start},{a.end}) {a.label} overlaps [{b.start},{b.end}) {b.label}"))
    if s.sentence_label is not None:
        if s.spans:
            violations.append(Violation(
                "sentence_label", (), "sentence label set on a sentence with clause spans"))
        if not is_sentence_level(s.sentence_label):
            violations.append(Violation(
                "sentence_label", (), f"{s.sentence_label.display} is not a sentence-level label"))
    elif not s.spans:
        violations.append(Violation(
            "sentence_label", (), "sentence has neither clause spans nor a sentence label"))
    return violations


@dataclass(frozen=True)
class SplitResult:
    """Condition clause P and resultant clause Q of "If P, Q"."""

    condition: Optional[ClauseSpan] = None
    resultant: Optional[ClauseSpan] = None
    sentence_class: SentenceClass = SentenceClass.NC
    low_confidence: bool = False
    multi_clause: bool = False

    def __post_init__(self):
        expected = derive_class(self.condition, self.resultant)
        if self.sentence_class is not expected:
            raise ValueError(
                f"sentence_class {self.sentence_class} inconsistent with spans (expected {expected})")
        if self.condition is not None and self.condition.label is not Label.CONDITION:
            raise ValueError("condition span must carry the Condition label")
        if self.resultant is not None and self.resultant.label not in RESULTANT_LABELS:
            raise ValueError("resultant span must be Action or Consequence")
        if self.condition and self.resultant and self.condition.overlaps(self.resultant):
            raise ValueError("condition and resultant spans overlap")

    @classmethod
    def from_spans(cls, condition=None, resultant=None, *, low_confidence=False,
                   multi_clause=False) -> "SplitResult":
        return cls(condition, resultant, derive_class(condition, resultant),
                   low_confidence, multi_clause)

    def spans(self) -> tuple[ClauseSpan, ...]:
        return tuple(sorted(s for s in (self.condition, self.resultant) if s is not None))


def derive_class(condition: Optional[ClauseSpan], resultant: Optional[ClauseSpan]) -> SentenceClass:
    if resultant is not None:
        if condition is None:
            raise ValueError("a resultant requires a condition")
        return SentenceClass.CA if resultant.label is Label.ACTION else SentenceClass.CC
    if condition is not None:
        return SentenceClass.OC
    return SentenceClass.NC
