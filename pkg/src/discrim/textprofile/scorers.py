"""Pluggable per-sample scorers for the model-based text features.

Each kind has a simple builtin fallback and a precomputed mode that reads
per-sample scores produced by an external tool:

* ``perplexity``: builtin add-one bigram model; file ``sample_id,value``.
* ``grammar``: builtin duplicate-word and a/an heuristic; file
  ``sample_id,errors,words``.
* ``language_id``: builtin non-Latin-script detector; file
  ``sample_id,value`` with 0/1 flags.
"""
from __future__ import annotations

import csv
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .tokens import is_word

KINDS = ("perplexity", "grammar", "language_id")
SOURCES = ("builtin", "precomputed_file")

BOS = "<s>"
UNK = "<unk>"

# fraction of alphabetic characters outside the Latin script above which a sample is flagged
NON_LATIN_THRESHOLD = 0.2


class ScorerError(ValueError):
    pass


@dataclass(frozen=True)
class ScorerPlugin:
    kind: str
    source: str = "builtin"
    values: Optional[dict] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScorerError(f"unknown scorer kind {self.kind!r}")
        if self.source not in SOURCES:
            raise ScorerError(f"unknown scorer source {self.source!r}")
        if self.source == "precomputed_file" and self.values is None:
            raise ScorerError(f"precomputed {self.kind} scorer needs values")

    @property
    def precomputed(self) -> bool:
        return self.source == "precomputed_file"

    def lookup(self, sample_id: str):
        try:
            return self.values[sample_id]
        except KeyError:
            raise ScorerError(f"precomputed {self.kind} scores have no entry for sample {sample_id!r}") from None


def builtin(kind: str) -> ScorerPlugin:
    return ScorerPlugin(kind)


def load_precomputed(path, kind: str) -> ScorerPlugin:
    """Read a precomputed score CSV. Every sample id may appear only once."""
    values = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = ["sample_id", "errors", "words"] if kind == "grammar" else ["sample_id", "value"]
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in cols):
            raise ScorerError(f"{path}: expected header {','.join(cols)}")
        for lineno, row in enumerate(reader, start=2):
            sid = row["sample_id"]
            if sid in values:
                raise ScorerError(f"{path}:{lineno}: duplicate sample id {sid!r}")
            try:
                if kind == "grammar":
                    values[sid] = (float(row["errors"]), float(row["words"]))
                else:
                    values[sid] = float(row["value"])
            except ValueError as exc:
                raise ScorerError(f"{path}:{lineno}: {exc}") from None
    return ScorerPlugin(kind, "precomputed_file", values)


def is_latin(ch: str) -> bool:
    try:
        return unicodedata.name(ch).startswith("LATIN")
    except ValueError:
        return False


def non_latin_flag(text: str) -> int:
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return 0
    foreign = sum(1 for ch in letters if not is_latin(ch))
    return int(foreign / len(letters) > NON_LATIN_THRESHOLD)


def grammar_flags(tokens) -> tuple:
    """(flagged words, words) under the builtin heuristic.

    Flags a word repeating the token right before it, "a" before a
    vowel-initial word and "an" before a consonant-initial word.
    """
    flagged = 0
    n_words = 0
    for i, tok in enumerate(tokens):
        if not is_word(tok):
            continue
        n_words += 1
        if i > 0 and tokens[i - 1] == tok:
            flagged += 1
            continue
        if tok in ("a", "an") and i + 1 < len(tokens) and is_word(tokens[i + 1]):
            first = tokens[i + 1][0]
            if first.isalpha():
                vowel = first in "aeiou"
                if (tok == "a" and vowel) or (tok == "an" and not vowel):
                    flagged += 1
    return flagged, n_words


class BigramModel:
    """Add-one smoothed bigram model with a begin-of-sentence context.

    The predicted vocabulary is the training types plus ``<unk>``; unseen
    words map to ``<unk>``.
    """

    def __init__(self, token_lists):
        self.vocab = {UNK}
        self.bigrams = Counter()
        self.contexts = Counter()
        for tokens in token_lists:
            self.vocab.update(tokens)
            prev = BOS
            for tok in tokens:
                self.bigrams[prev, tok] += 1
                self.contexts[prev] += 1
                prev = tok
        self.V = len(self.vocab)

    def _norm(self, tok):
        return tok if tok in self.vocab else UNK

    def log_prob(self, prev, tok) -> float:
        return math.log((self.bigrams[prev, tok] + 1) / (self.contexts[prev] + self.V))

    def perplexity(self, tokens):
        """Per-sample perplexity, ``None`` for an empty token list."""
        if not tokens:
            return None
        total = 0.0
        prev = BOS
        for tok in tokens:
            tok = self._norm(tok)
            total += self.log_prob(prev, tok)
            prev = tok
        return math.exp(-total / len(tokens))
