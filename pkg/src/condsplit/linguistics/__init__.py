from .features import (
    DISCOURSE_MARKER,
    NEGATIVE_SUBORDINATOR,
    SUBORDINATOR,
    TokenFeatures,
    detect_imperative,
    detect_obligation,
    extract_features,
    weak_action_cues,
)
from .lexicon import Lexicon, default_lexicon, load_lexicon
from .tokenizer import NUMBER, PUNCT, WORD, EmptyInputError, Token, detokenize, tokenize

__all__ = [
    "DISCOURSE_MARKER", "NEGATIVE_SUBORDINATOR", "SUBORDINATOR", "NUMBER", "PUNCT", "WORD",
    "EmptyInputError", "Lexicon", "Token", "TokenFeatures", "default_lexicon",
    "detect_imperative", "detect_obligation", "detokenize", "extract_features",
    "load_lexicon", "tokenize", "weak_action_cues",
]
