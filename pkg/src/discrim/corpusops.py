"""Experiment corpus construction.

Leaderboard ingestion, splitting a dataset into sub-datasets by binning a
per-sample feature, joining feature profiles with discrimination targets,
random holdout splits and rank groups.
"""
from __future__ import annotations

import csv
import logging
import math
import zlib
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import measures
from .predict.metrics import RankGroup
from .predict.table import TrainTable
from .textprofile import scorers
from .textprofile.features import TextDataset, default_wordlist
from .textprofile.tokens import flesch_reading_ease, type_token_ratio, words

log = logging.getLogger(__name__)

DEFAULT_UPPER_LIMIT = 100.0
DEFAULT_MIN_SIZE = 50
SPLIT_FEATURES = ("len", "ttr", "fre", "gerr", "basic")


class CorpusError(ValueError):
    pass


class InvalidFeature(CorpusError):
    pass


@dataclass(frozen=True)
class LeaderboardRow:
    benchmark: str
    dataset_id: str
    system_id: str
    score: float
    upper_limit: float = DEFAULT_UPPER_LIMIT


@dataclass(frozen=True)
class LeaderboardTable:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for r in self.rows:
            key = (r.dataset_id, r.system_id)
            if key in seen:
                raise CorpusError(f"duplicate score for system {r.system_id!r} on {r.dataset_id!r}")
            seen.add(key)
            if not math.isfinite(r.score):
                raise CorpusError(f"non-finite score for {key}")

    def datasets(self) -> "OrderedDict[str, list]":
        out = OrderedDict()
        for r in self.rows:
            out.setdefault(r.dataset_id, []).append(r)
        return out

    def performance_lists(self, top: Optional[int] = None) -> tuple:
        """(lists, skipped ids) per dataset in first-seen order.

        ``top`` keeps only the best ``top`` systems. Datasets left with fewer
        than two systems are skipped.
        """
        lists, skipped = [], []
        for did, rows in self.datasets().items():
            limits = {r.upper_limit for r in rows}
            if len(limits) > 1:
                raise CorpusError(f"{did}: inconsistent upper limits {sorted(limits)}")
            if top is not None:
                rows = sorted(rows, key=lambda r: (-r.score, r.system_id))[:top]
            if len(rows) < 2:
                log.warning("skipping %s: %d system score(s), need 2", did, len(rows))
                skipped.append(did)
                continue
            lists.append(measures.PerformanceList(did, [r.score for r in rows], [r.system_id for r in rows],
                                                  rows[0].upper_limit))
        return lists, skipped


def read_leaderboard(path, upper_limit_default: float = DEFAULT_UPPER_LIMIT) -> LeaderboardTable:
    """Read ``benchmark,dataset,system,score[,upper_limit]``."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = ["benchmark", "dataset", "system", "score"]
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in need):
            raise CorpusError(f"{path}: header must contain {','.join(need)}[,upper_limit]")
        for lineno, r in enumerate(reader, start=2):
            try:
                score = float(r["score"])
                raw_u = (r.get("upper_limit") or "").strip()
                upper = float(raw_u) if raw_u else float(upper_limit_default)
            except (TypeError, ValueError):
                raise CorpusError(f"{path}:{lineno}: bad number") from None
            if not (math.isfinite(score) and math.isfinite(upper)):
                raise CorpusError(f"{path}:{lineno}: non-finite value")
            rows.append(LeaderboardRow(r["benchmark"], r["dataset"], r["system"], score, upper))
    return LeaderboardTable(rows)


def format_leaderboard(table: LeaderboardTable) -> str:
    lines = ["benchmark,dataset,system,score,upper_limit"]
    for r in table.rows:
        lines.append(f"{r.benchmark},{r.dataset_id},{r.system_id},{r.score:.6g},{r.upper_limit:.6g}")
    return "\n".join(lines) + "\n"


def sample_feature_values(d: TextDataset, feature: str, wordlist=None) -> np.ndarray:
    """Per-sample analogue of a dataset feature, one value per sample.

    Samples without words get 0 for the ratio-type features.
    """
    if feature not in SPLIT_FEATURES:
        raise InvalidFeature(f"feature {feature!r} has no per-sample value; choose from {SPLIT_FEATURES}")
    vals = []
    for s in d.samples:
        toks = s.tokens
        if feature == "len":
            v = len(toks)
        elif feature == "ttr":
            v = type_token_ratio(toks)
        elif feature == "fre":
            v = flesch_reading_ease(s.text, toks)
        elif feature == "gerr":
            err, n = scorers.grammar_flags(toks)
            v = err / n if n else None
        else:
            ws = words(toks)
            wl = default_wordlist() if wordlist is None else wordlist
            v = sum(1 for w in ws if w in wl) / len(ws) if ws else None
        vals.append(0.0 if v is None else float(v))
    return np.array(vals, dtype=np.float64)


@dataclass(frozen=True)
class SubdatasetSpec:
    parent_id: str
    feature: str
    bin_edges: tuple
    assignments: dict = field(repr=False)  # sample id -> bin index

    def bounds(self, b: int) -> tuple:
        e = self.bin_edges
        if len(e) == 1:
            return e[0], e[0]
        return e[b], e[b + 1]


def child_id(parent: str, feature: str, b: int) -> str:
    return f"{parent}#{feature}#{b}"


def partition(d: TextDataset, feature: str, bins: int, wordlist=None) -> SubdatasetSpec:
    """Equal-frequency bins over all samples of ``d``.

    Duplicate quantile edges collapse, so constant values give a single bin.
    A value equal to an inner edge goes to the upper bin.
    """
    if bins < 2:
        raise CorpusError(f"bins must be >= 2, got {bins}")
    if len(d) == 0:
        raise CorpusError(f"{d.dataset_id}: no samples to split")
    values = sample_feature_values(d, feature, wordlist)
    edges = np.unique(np.quantile(values, np.linspace(0.0, 1.0, bins + 1)))
    idx = np.searchsorted(edges[1:-1], values, side="right")
    return SubdatasetSpec(d.dataset_id, feature, tuple(float(e) for e in edges),
                          {s.id: int(b) for s, b in zip(d.samples, idx)})


def children_of(d: TextDataset, spec: SubdatasetSpec, min_size: int = DEFAULT_MIN_SIZE) -> list:
    """Child datasets of a partition, dropping bins with fewer than
    ``min_size`` samples in the train or the test split."""
    groups = OrderedDict()
    for s in d.samples:
        groups.setdefault(spec.assignments[s.id], []).append(s)
    out = []
    for b in sorted(groups):
        members = groups[b]
        n_train = sum(1 for s in members if s.split == "train")
        n_test = len(members) - n_train
        if n_train < min_size or n_test < min_size:
            log.info("dropping %s: %d train / %d test samples", child_id(d.dataset_id, spec.feature, b),
                     n_train, n_test)
            continue
        out.append(TextDataset(child_id(d.dataset_id, spec.feature, b), members))
    return out


def split_by_feature(d: TextDataset, feature: str, bins: int, min_size: int = DEFAULT_MIN_SIZE,
                     wordlist=None) -> list:
    """Non-overlapping sub-datasets of ``d`` binned on a per-sample feature."""
    return children_of(d, partition(d, feature, bins, wordlist), min_size)


def manifest_rows(spec: SubdatasetSpec, children) -> list:
    """``child_id,parent,feature,bin,low_edge,high_edge,n_train,n_test`` rows."""
    rows = []
    for c in children:
        b = int(c.dataset_id.rsplit("#", 1)[1])
        lo, hi = spec.bounds(b)
        n_train = len(c.scope("train"))
        rows.append([c.dataset_id, spec.parent_id, spec.feature, b, lo, hi, n_train, len(c) - n_train])
    return rows


def sample_features(count: int, seed: int, choices=SPLIT_FEATURES) -> list:
    """Draw ``count`` distinct split features, reproducibly."""
    if not 0 < count <= len(choices):
        raise CorpusError(f"count must be in [1, {len(choices)}]")
    rng = np.random.default_rng(seed)
    return [choices[i] for i in sorted(rng.choice(len(choices), size=count, replace=False))]


def assemble_table(profiles, scores: LeaderboardTable, target: str = "var", feature_names=None) -> tuple:
    """Join feature profiles with targets computed from system scores.

    ``profiles`` maps dataset id to a feature dict (or is a sequence of
    pairs). Returns ``(table, skipped)`` where ``skipped`` lists the ids
    dropped for lacking a profile or two system scores.
    """
    profiles = OrderedDict(profiles)
    lists, skipped = scores.performance_lists()
    by_id = {p.dataset_id: p for p in lists}
    rows = []
    for did, feats in profiles.items():
        p = by_id.get(did)
        if p is None:
            if did not in skipped:
                log.warning("skipping %s: no system scores", did)
                skipped.append(did)
            continue
        rows.append((feats, measures.perf_variance(p), measures.scaled_perf_variance(p), did))
    for did in by_id:
        if did not in profiles:
            log.warning("skipping %s: no feature profile", did)
            skipped.append(did)
    if feature_names is None:
        from .textprofile.features import FEATURE_NAMES
        known = [f for f in FEATURE_NAMES if any(f in r[0] for r in rows)]
        extra = [f for r in rows for f in r[0] if f not in FEATURE_NAMES]
        feature_names = tuple(OrderedDict.fromkeys(known + extra))
    return TrainTable.from_rows(rows, feature_names, target), skipped


def holdout_split(t: TrainTable, test_count: int, seed: int) -> tuple:
    """(train, test) with ``test_count`` rows drawn uniformly for test."""
    if not 0 <= test_count <= len(t):
        raise CorpusError(f"test_count must be in [0, {len(t)}], got {test_count}")
    perm = np.random.default_rng(seed).permutation(len(t))
    test_rows = np.sort(perm[:test_count])
    train_rows = np.sort(perm[test_count:])
    return t.subset(train_rows), t.subset(test_rows)


def make_groups(t: TrainTable, n: int, count: int, seed: int) -> list:
    """``count`` groups of ``n`` distinct rows each, drawn uniformly.

    Rows repeat across groups but never within one. Each group records its
    row indices in ``rows``.
    """
    if not 2 <= n <= len(t):
        raise CorpusError(f"group size must be in [2, {len(t)}], got {n}")
    rng = np.random.default_rng(seed)
    groups = []
    for g in range(count):
        rows = rng.choice(len(t), size=n, replace=False)
        members = [(t.row_features(int(i)), float(t.y[i])) for i in rows]
        groups.append(RankGroup(f"g{g}", members, tuple(int(i) for i in rows)))
    return groups


def default_driver(features: dict) -> float:
    """Score spread grows with average train length."""
    return 0.5 + 0.25 * features.get("tr_len", 0.0)


def simulate_leaderboard(profiles, k: int = 4, seed: int = 42, noise: float = 0.1,
                         driver: Callable[[dict], float] = default_driver, base: float = 85.0,
                         benchmark: str = "sim", upper_limit: float = 100.0) -> LeaderboardTable:
    """Synthetic system scores whose spread is driven by dataset features.

    System ``i`` scores ``base + spread * offset_i * (1 + noise * eps)`` with
    evenly spaced offsets and standard normal ``eps``, clipped to
    ``[0, upper_limit]``. Each dataset's noise depends only on ``seed`` and
    its id.
    """
    offsets = np.linspace(-1.0, 1.0, k)
    rows = []
    for did, feats in OrderedDict(profiles).items():
        rng = np.random.default_rng([seed, zlib.crc32(did.encode("utf-8"))])
        spread = driver(feats)
        eps = rng.standard_normal(k)
        scores = np.clip(base + spread * offsets * (1.0 + noise * eps), 0.0, upper_limit)
        rows.extend(LeaderboardRow(benchmark, did, f"sys{i}", float(s), upper_limit) for i, s in enumerate(scores))
    return LeaderboardTable(rows)
