"""Splitter configuration and its INI-style file format.

Example file::

    [splitter]
    # enable the imperative+and, interrogative and relative-clause patterns
    extended_patterns = true
    # directory whose *.txt files override the bundled lexicons
    lexicon_dir = ./my-lexicons
    # weak action cues needed before a resultant is flagged low-confidence
    weak_cue_threshold = 1
    # label for low-confidence resultants: Consequence or Action
    others_label = Consequence
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .model import Label

SECTION = "splitter"


@dataclass(frozen=True)
class SplitterConfig:
    extended_patterns: bool = False
    lexicon_dir: Optional[str] = None
    weak_cue_threshold: int = 1
    others_label: Label = Label.CONSEQUENCE

    def __post_init__(self):
        if self.weak_cue_threshold < 1:
            raise ValueError("weak_cue_threshold must be >= 1")
        if self.others_label not in (Label.ACTION, Label.CONSEQUENCE):
            raise ValueError("others_label must be Action or Consequence")

    @classmethod
    def from_file(cls, path) -> "SplitterConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        if not parser.has_section(SECTION):
            return cls()
        sec = parser[SECTION]
        unknown = set(sec) - {"extended_patterns", "lexicon_dir", "weak_cue_threshold", "others_label"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        lexicon_dir = sec.get("lexicon_dir") or None
        if lexicon_dir is not None:
            # relative to the config file, not the working directory
            lexicon_dir = str((Path(path).parent / lexicon_dir).resolve())
        return cls(
            extended_patterns=sec.getboolean("extended_patterns", fallback=False),
            lexicon_dir=lexicon_dir,
            weak_cue_threshold=sec.getint("weak_cue_threshold", fallback=1),
            others_label=Label.parse(sec.get("others_label", fallback="CS")),
        )

    def with_overrides(self, **kwargs) -> "SplitterConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})
