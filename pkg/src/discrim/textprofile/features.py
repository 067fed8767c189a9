"""Intrinsic dataset features for text classification datasets.

Feature names are ``<scope>_<feature>`` with scope ``tr`` (train split),
``te`` (test split) or ``ix`` (train/test interaction). ``FEATURE_NAMES``
fixes the order of a profile.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import Optional

from . import scorers
from .scorers import ScorerError, ScorerPlugin
from .tokens import (FRE_EASY_THRESHOLD, flesch_reading_ease, tokenize,
                     type_token_ratio, words)

SPLITS = ("train", "test")
SCOPE_PREFIX = {"train": "tr", "test": "te"}

# (feature, scopes) in output order
FEATURE_LAYOUT = (
    ("len", ("tr", "te", "ix")),
    ("lab", ("tr",)),
    ("bal", ("tr",)),
    ("basic", ("tr", "te")),
    ("ttr", ("tr", "te", "ix")),
    ("lmix", ("tr", "te", "ix")),
    ("pmi", ("tr", "te", "ix")),
    ("r_pmi", ("tr",)),
    ("ppl", ("tr", "te")),
    ("gerr", ("tr", "te", "ix")),
    ("fre", ("tr", "te", "ix")),
    ("r_fre", ("tr", "te", "ix")),
)
FEATURE_NAMES = tuple(f"{s}_{f}" for f, scopes in FEATURE_LAYOUT for s in scopes)

TOP_WORDS = 10


class DatasetError(ValueError):
    pass


class UndefinedInteraction(ValueError):
    pass


@dataclass(frozen=True)
class TextSample:
    id: str
    text: str
    label: str
    split: str

    def __post_init__(self):
        if not self.text.strip():
            raise DatasetError(f"sample {self.id!r}: empty text")
        if not str(self.label).strip():
            raise DatasetError(f"sample {self.id!r}: empty label")
        if self.split not in SPLITS:
            raise DatasetError(f"sample {self.id!r}: split must be train or test, got {self.split!r}")

    @cached_property
    def tokens(self) -> list:
        return tokenize(self.text)


@dataclass(frozen=True)
class TextDataset:
    dataset_id: str
    samples: tuple = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        seen = set()
        for s in self.samples:
            if s.id in seen:
                raise DatasetError(f"{self.dataset_id}: duplicate sample id {s.id!r}")
            seen.add(s.id)

    def scope(self, split: str) -> list:
        if split not in SPLITS:
            raise DatasetError(f"unknown scope {split!r}")
        return [s for s in self.samples if s.split == split]

    def __len__(self):
        return len(self.samples)


def _nonempty(d: TextDataset, scope: str) -> list:
    samples = d.scope(scope)
    if not samples:
        raise DatasetError(f"{d.dataset_id}: no {scope} samples")
    return samples


def _mean_skipping_none(values) -> float:
    vals = [v for v in values if v is not None]
    return math.fsum(vals) / len(vals) if vals else 0.0


def avg_length(d: TextDataset, scope: str = "train") -> float:
    samples = _nonempty(d, scope)
    return sum(len(s.tokens) for s in samples) / len(samples)


def label_stats(d: TextDataset, scope: str = "train") -> tuple:
    """(number of labels, label balance).

    Balance is ``(H - log2 K) / log2 K`` with ``H`` the base-2 entropy of the
    label distribution: 0 for uniform labels, -1 for a single label.
    """
    samples = _nonempty(d, scope)
    counts = Counter(s.label for s in samples)
    k = len(counts)
    if k == 1:
        return 1, -1.0
    n = len(samples)
    entropy = -math.fsum((c / n) * math.log2(c / n) for c in counts.values())
    ideal = math.log2(k)
    return k, (entropy - ideal) / ideal


def basic_word_ratio(d: TextDataset, scope: str, wordlist) -> float:
    ws = [w for s in _nonempty(d, scope) for w in words(s.tokens)]
    if not ws:
        return 0.0
    return sum(1 for w in ws if w in wordlist) / len(ws)


def ttr(d: TextDataset, scope: str = "train") -> float:
    """Type-token ratio per sample, averaged; empty samples are skipped."""
    return _mean_skipping_none(type_token_ratio(s.tokens) for s in _nonempty(d, scope))


def language_mixedness(d: TextDataset, scope: str, plugin: Optional[ScorerPlugin] = None) -> float:
    samples = _nonempty(d, scope)
    if plugin is not None and plugin.precomputed:
        flags = [plugin.lookup(s.id) for s in samples]
    else:
        flags = [scorers.non_latin_flag(s.text) for s in samples]
    return sum(1 for f in flags if f) / len(samples)


@dataclass(frozen=True)
class PMIResult:
    phi_pmi: float
    phi_r_pmi: float
    top_words: dict


def _pmi_counts(samples):
    joint = Counter()
    for s in samples:
        for tok in s.tokens:
            joint[s.label, tok] += 1
    n = sum(joint.values())
    by_class = Counter()
    by_word = Counter()
    for (c, w), cnt in joint.items():
        by_class[c] += cnt
        by_word[w] += cnt
    # exact ratio p(c,w) / (p(c) p(w)); comparisons stay tie-exact
    return {(c, w): Fraction(cnt * n, by_class[c] * by_word[w]) for (c, w), cnt in joint.items()}


def class_word_pmi(samples) -> dict:
    """PMI of every (label, word) pair seen in ``samples``, natural log."""
    return {k: math.log(r) for k, r in _pmi_counts(samples).items()}


def pmi(d: TextDataset, scope: str = "train") -> PMIResult:
    """Class-word association summary.

    ``phi_pmi`` sums the positive PMI values and divides by the number of
    (label, word) pairs seen; ``top_words`` keeps the ten highest-PMI words
    per label (ties alphabetical); ``phi_r_pmi`` is the fraction of samples
    containing a top word of any label.
    """
    samples = _nonempty(d, scope)
    ratios = _pmi_counts(samples)
    if not ratios:
        return PMIResult(0.0, 0.0, {})
    keys = sorted(ratios)
    phi = math.fsum(math.log(ratios[k]) for k in keys if ratios[k] > 1) / len(keys)
    per_class = {}
    for (c, w) in keys:
        per_class.setdefault(c, []).append((-ratios[c, w], w))
    top = {c: [w for _, w in sorted(items)[:TOP_WORDS]] for c, items in sorted(per_class.items())}
    vocab = {w for ws in top.values() for w in ws}
    hits = sum(1 for s in samples if vocab.intersection(s.tokens))
    return PMIResult(phi, hits / len(samples), top)


def perplexity(d: TextDataset, scope: str, plugin: Optional[ScorerPlugin] = None) -> float:
    """Mean per-sample perplexity.

    The builtin scorer trains a bigram model on the train split of ``d``.
    """
    samples = _nonempty(d, scope)
    if plugin is not None and plugin.precomputed:
        return _mean_skipping_none(plugin.lookup(s.id) for s in samples)
    lm = scorers.BigramModel(s.tokens for s in d.scope("train"))
    return _mean_skipping_none(lm.perplexity(s.tokens) for s in samples)


def grammar_error_ratio(d: TextDataset, scope: str, plugin: Optional[ScorerPlugin] = None) -> float:
    ratios = []
    for s in _nonempty(d, scope):
        if plugin is not None and plugin.precomputed:
            errors, n_words = plugin.lookup(s.id)
        else:
            errors, n_words = scorers.grammar_flags(s.tokens)
        ratios.append(errors / n_words if n_words else None)
    return _mean_skipping_none(ratios)


def flesch(d: TextDataset, scope: str = "train") -> tuple:
    """(mean Flesch Reading Ease, fraction of samples scoring below 60).

    Samples without words are skipped in both.
    """
    scores = [flesch_reading_ease(s.text, s.tokens) for s in _nonempty(d, scope)]
    scores = [f for f in scores if f is not None]
    if not scores:
        return 0.0, 0.0
    return math.fsum(scores) / len(scores), sum(1 for f in scores if f < FRE_EASY_THRESHOLD) / len(scores)


def interaction(tr_value: float, te_value: float) -> float:
    """Squared relative train/test shift ``((tr - te) / tr) ** 2``."""
    if tr_value == te_value:
        return 0.0
    if tr_value == 0:
        raise UndefinedInteraction("interaction undefined for a zero train value")
    return ((tr_value - te_value) / tr_value) ** 2


def profile(d: TextDataset, plugins: Optional[dict] = None, wordlist=None) -> dict:
    """Full feature vector of ``d`` as an ordered ``{name: value}`` dict.

    Features that cannot be computed (an interaction with a zero train value)
    are left out rather than set to zero. ``plugins`` maps scorer kind to a
    ``ScorerPlugin``; missing kinds use the builtin scorer.
    """
    plugins = plugins or {}
    if wordlist is None:
        wordlist = default_wordlist()
    _nonempty(d, "train")
    _nonempty(d, "test")

    per_scope = {}
    for split in SPLITS:
        fre, r_fre = flesch(d, split)
        pmi_res = pmi(d, split)
        per_scope[SCOPE_PREFIX[split]] = {
            "len": avg_length(d, split),
            "basic": basic_word_ratio(d, split, wordlist),
            "ttr": ttr(d, split),
            "lmix": language_mixedness(d, split, plugins.get("language_id")),
            "pmi": pmi_res.phi_pmi,
            "r_pmi": pmi_res.phi_r_pmi,
            "ppl": perplexity(d, split, plugins.get("perplexity")),
            "gerr": grammar_error_ratio(d, split, plugins.get("grammar")),
            "fre": fre,
            "r_fre": r_fre,
        }
    lab, bal = label_stats(d, "train")
    per_scope["tr"]["lab"] = float(lab)
    per_scope["tr"]["bal"] = bal

    out = {}
    for feat, scopes in FEATURE_LAYOUT:
        for scope in scopes:
            if scope == "ix":
                try:
                    out[f"ix_{feat}"] = interaction(per_scope["tr"][feat], per_scope["te"][feat])
                except UndefinedInteraction:
                    pass
            else:
                out[f"{scope}_{feat}"] = float(per_scope[scope][feat])
    return out


def default_wordlist() -> frozenset:
    text = resources.files("discrim.textprofile").joinpath("data/basic_words.txt").read_text("utf-8")
    return parse_wordlist(text)


def parse_wordlist(text: str) -> frozenset:
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


def load_wordlist(path) -> frozenset:
    with open(path, encoding="utf-8") as fh:
        return parse_wordlist(fh.read())


def read_jsonl(path, dataset_id: Optional[str] = None) -> TextDataset:
    """Load a dataset from JSON lines ``{"id", "text", "label", "split"}``."""
    from pathlib import Path

    path = Path(path)
    samples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                samples.append(TextSample(str(obj["id"]), obj["text"], str(obj["label"]), obj["split"]))
            except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
                raise DatasetError(f"{path}:{lineno}: bad sample ({exc})") from None
            except DatasetError as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from None
    return TextDataset(dataset_id or path.stem, samples)


def dumps_jsonl(samples) -> str:
    return "".join(
        json.dumps({"id": s.id, "text": s.text, "label": s.label, "split": s.split}, ensure_ascii=False) + "\n"
        for s in samples
    )


__all__ = [
    "FEATURE_NAMES", "DatasetError", "PMIResult", "ScorerError", "TextDataset", "TextSample",
    "UndefinedInteraction", "avg_length", "basic_word_ratio", "class_word_pmi", "default_wordlist",
    "dumps_jsonl", "flesch", "grammar_error_ratio", "interaction", "label_stats", "language_mixedness",
    "load_wordlist", "parse_wordlist", "perplexity", "pmi", "profile", "read_jsonl", "ttr",
]
