"""Rule-based splitting of conditional sentences into Condition and Action/Consequence clauses."""
from .config import SplitterConfig
from .model import AnnotatedSentence, ClauseSpan, Label, SentenceClass, SplitResult, validate_sentence
from .splitter import RuleSplitter, RuleTrace, classify_conditional, split

__all__ = [
    "AnnotatedSentence", "ClauseSpan", "Label", "RuleSplitter", "RuleTrace", "SentenceClass",
    "SplitResult", "SplitterConfig", "classify_conditional", "split", "validate_sentence",
]
__version__ = "0.1.0"
