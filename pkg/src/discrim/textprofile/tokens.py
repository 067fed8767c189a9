"""Tokenization and per-sample text statistics."""
from __future__ import annotations

import re
import unicodedata

_SENTENCE_END = re.compile(r"[.!?]+")
_VOWEL_GROUP = re.compile(r"[aeiouy]+")
_VOWELS = frozenset("aeiouy")

FRE_EASY_THRESHOLD = 60.0


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str) -> list:
    """Lowercase, NFC-normalize and split on whitespace.

    Leading and trailing punctuation/symbol characters of each chunk become
    one token each; internal ones stay ("don't" is one token).

    >>> tokenize("The cat sat.")
    ['the', 'cat', 'sat', '.']
    """
    tokens = []
    for chunk in unicodedata.normalize("NFC", text).lower().split():
        start, end = 0, len(chunk)
        while start < end and _is_punct(chunk[start]):
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            end -= 1
        tokens.extend(chunk[:start])
        if start < end:
            tokens.append(chunk[start:end])
        tokens.extend(chunk[end:])
    return tokens


def is_word(token: str) -> bool:
    """True for tokens with at least one letter or digit."""
    return any(ch.isalnum() for ch in token)


def words(tokens) -> list:
    return [t for t in tokens if is_word(t)]


def syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups, minus a silent final e.

    A final "e" after a consonant is silent unless the word ends in
    consonant + "le" ("table"). Every word has at least one syllable.
    """
    w = "".join(ch for ch in word.lower() if "a" <= ch <= "z")
    count = len(_VOWEL_GROUP.findall(w))
    if len(w) >= 2 and w[-1] == "e" and w[-2] not in _VOWELS:
        if not (w[-2] == "l" and len(w) >= 3 and w[-3] not in _VOWELS):
            count -= 1
    return max(1, count)


def sentence_count(text: str) -> int:
    return max(1, len(_SENTENCE_END.findall(text)))


def flesch_reading_ease(text: str, tokens=None):
    """Flesch Reading Ease of one sample, or ``None`` if it has no words."""
    if tokens is None:
        tokens = tokenize(text)
    ws = words(tokens)
    if not ws:
        return None
    n_syll = sum(syllables(w) for w in ws)
    return 206.835 - 1.015 * (len(ws) / sentence_count(text)) - 84.6 * (n_syll / len(ws))


def type_token_ratio(tokens):
    if not tokens:
        return None
    return len(set(tokens)) / len(tokens)
