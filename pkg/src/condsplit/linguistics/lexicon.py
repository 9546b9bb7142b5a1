"""Word lists driving feature extraction and the rule splitter.

Each list is a plain-text file, one entry per line, ``#`` starting a comment.
The defaults ship inside the package; a lexicon directory may override any
subset of files by name.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

Phrase = tuple[str, ...]


def parse_lexicon(lines: Iterable[str]) -> tuple[str, ...]:
    entries = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries.append(" ".join(line.split()).lower())
    return tuple(entries)


@dataclass(frozen=True)
class Lexicon:
    subordinators: tuple[Phrase, ...]
    negative_subordinators: tuple[Phrase, ...]
    discourse_markers: tuple[Phrase, ...]
    exclusions: tuple[Phrase, ...]
    obligation_modals: tuple[Phrase, ...]
    then_markers: frozenset[str]
    clause_separators: frozenset[str]
    clause_adverbs: frozenset[str]
    connectives: frozenset[str]
    imperative_verbs: frozenset[str]
    weak_action_cues: frozenset[str]
    subject_pronouns: frozenset[str]
    auxiliaries: frozenset[str]
    relative_pronouns: frozenset[str]

    def entries(self) -> dict[str, list[str]]:
        """Every entry of every list, for documentation and audits."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = sorted(" ".join(v) if isinstance(v, tuple) else v for v in value)
        return out


LEXICON_NAMES = tuple(f.name for f in fields(Lexicon))
_PHRASE_LISTS = {"subordinators", "negative_subordinators", "discourse_markers",
                 "exclusions", "obligation_modals"}


def _read_default(name: str) -> str:
    return resources.files("condsplit.lexicons").joinpath(f"{name}.txt").read_text(encoding="utf-8")


def _build(texts: dict[str, str]) -> Lexicon:
    kwargs = {}
    for name in LEXICON_NAMES:
        entries = parse_lexicon(texts[name].splitlines())
        if name in _PHRASE_LISTS:
            # longest phrases first so "have got to" wins over "have to"
            phrases = sorted({tuple(e.split()) for e in entries}, key=lambda p: (-len(p), p))
            kwargs[name] = tuple(phrases)
        else:
            kwargs[name] = frozenset(entries)
    return Lexicon(**kwargs)


@functools.lru_cache(maxsize=None)
def _load_cached(directory: Optional[str]) -> Lexicon:
    texts = {}
    for name in LEXICON_NAMES:
        path = Path(directory, f"{name}.txt") if directory else None
        if path is not None and path.is_file():
            texts[name] = path.read_text(encoding="utf-8")
        else:
            texts[name] = _read_default(name)
    return _build(texts)


def load_lexicon(directory: Union[str, Path, None] = None) -> Lexicon:
    """Load (once per directory) the lexicon, falling back to bundled files."""
    return _load_cached(str(Path(directory).resolve()) if directory else None)


def default_lexicon() -> Lexicon:
    return _load_cached(None)
