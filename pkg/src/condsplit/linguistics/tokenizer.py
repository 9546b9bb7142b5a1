"""Offset-preserving tokenizer.

Words keep intra-word hyphens and apostrophes ("opt-out", "I'll"); every other
non-space, non-word character is its own punctuation token.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

WORD = "word"
NUMBER = "number"
PUNCT = "punctuation"

_TOKEN_RE = re.compile(
    r"(?P<number>\d+(?:[.,]\d+)*(?!\w))"
    r"|(?P<word>\w+(?:[-'’]\w+)*)"
    r"|(?P<punctuation>[^\w\s])"
)


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int
    kind: str

    @property
    def lower(self) -> str:
        return self.text.lower()

    @property
    def is_word(self) -> bool:
        return self.kind == WORD

    @property
    def is_punct(self) -> bool:
        return self.kind == PUNCT


def tokenize(sentence: str) -> list[Token]:
    if not sentence.strip():
        raise EmptyInputError("cannot tokenize empty or whitespace-only input")
    return [Token(m.group(), m.start(), m.end(), m.lastgroup) for m in _TOKEN_RE.finditer(sentence)]


def token_kind(text: str) -> str:
    m = _TOKEN_RE.fullmatch(text)
    if m is None:
        # foreign tokens from other tokenizers, e.g. "n't" or "..."
        return WORD if any(ch.isalnum() for ch in text) else PUNCT
    return m.lastgroup


# no space is inserted before these / after these when rebuilding text
_ATTACH_LEFT = frozenset(".,;:?!)]}%")
_ATTACH_RIGHT = frozenset("([{")


def detokenize(texts: Iterable[str]) -> tuple[str, list[Token]]:
    """Rebuild a sentence from bare token strings, returning text and offset tokens.

    Used when IOB files carry no original text. Spacing is conventional, so the
    result is not the original sentence byte for byte, but re-tokenizing it
    gives back the same token strings for tokens this module produced.
    """
    parts: list[str] = []
    tokens: list[Token] = []
    pos = 0
    prev = None
    for text in texts:
        if prev is not None and text not in _ATTACH_LEFT and prev not in _ATTACH_RIGHT:
            parts.append(" ")
            pos += 1
        tokens.append(Token(text, pos, pos + len(text), token_kind(text)))
        parts.append(text)
        pos += len(text)
        prev = text
    return "".join(parts), tokens


def align_tokens(text: str, texts: Iterable[str]) -> list[Token]:
    """Locate token strings in `text` left to right, skipping whitespace only."""
    tokens = []
    pos = 0
    for t in texts:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if not text.startswith(t, pos):
            raise ValueError(f"token {t!r} not found at offset {pos} of {text!r}")
        tokens.append(Token(t, pos, pos + len(t), token_kind(t)))
        pos += len(t)
    if text[pos:].strip():
        raise ValueError(f"text has untokenized trailing content {text[pos:]!r}")
    return tokens
