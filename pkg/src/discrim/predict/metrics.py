"""Regression and ranking metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAP_THRESHOLDS = {"var": 3.0, "sva": 28.0}


@dataclass(frozen=True)
class RankGroup:
    """A set of datasets to be ranked against each other."""

    group_id: str
    members: tuple  # (features: dict, true_target: float)
    rows: tuple = ()  # source table rows, when drawn from a table

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "rows", tuple(self.rows))
        if len(self.members) < 2:
            raise ValueError(f"group {self.group_id!r} needs at least 2 members")

    @property
    def targets(self) -> np.ndarray:
        return np.array([t for _, t in self.members], dtype=np.float64)


def rmse(pred, gold) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    gold = np.asarray(gold, dtype=np.float64)
    if pred.shape != gold.shape or pred.size == 0:
        raise ValueError("rmse needs two non-empty lists of equal length")
    return math.sqrt(float(np.mean((pred - gold) ** 2)))


def order_by_score(scores) -> np.ndarray:
    """Indices sorted by descending score, ties kept in input order."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.argsort(-scores, kind="stable")


def ranks_from_scores(scores) -> list:
    """1-based ranks, rank 1 for the highest score; ties by input order."""
    order = order_by_score(scores)
    ranks = [0] * len(order)
    for pos, i in enumerate(order):
        ranks[i] = pos + 1
    return ranks


def rank(model, group: RankGroup) -> list:
    """Ranks of the group members by predicted discrimination."""
    preds = [model.predict(f) for f, _ in group.members]
    return ranks_from_scores(preds)


def dcg(gains) -> float:
    gains = np.asarray(gains, dtype=np.float64)
    return float(np.sum(gains / np.log2(np.arange(2, gains.size + 2))))


def ndcg(gains_in_predicted_order) -> float:
    """DCG of the given order over DCG of the descending-gain order.

    An all-zero gain list scores 1.
    """
    gains = np.asarray(gains_in_predicted_order, dtype=np.float64)
    ideal = dcg(np.sort(gains)[::-1])
    if ideal == 0.0:
        return 1.0
    return dcg(gains) / ideal


def minmax_gains(targets) -> np.ndarray:
    """True targets rescaled to [0, 1] within a group; a flat group gets all ones."""
    t = np.asarray(targets, dtype=np.float64)
    lo, hi = t.min(), t.max()
    if hi == lo:
        return np.ones_like(t)
    return (t - lo) / (hi - lo)


def group_ndcg(targets, scores) -> float:
    gains = minmax_gains(targets)
    return ndcg(gains[order_by_score(scores)])


def average_precision(relevance_in_predicted_order) -> float:
    """Mean precision at each relevant position; 1.0 if nothing is relevant."""
    rel = np.asarray(relevance_in_predicted_order, dtype=bool)
    if not rel.any():
        return 1.0
    hits = np.cumsum(rel)
    positions = np.nonzero(rel)[0]
    return float(np.mean(hits[positions] / (positions + 1)))


def group_average_precision(targets, scores, threshold: float) -> float:
    rel = np.asarray(targets, dtype=np.float64) >= threshold
    return average_precision(rel[order_by_score(scores)])


def mean_average_precision(groups) -> float:
    """MAP over ``(targets, scores, threshold)`` triples."""
    aps = [group_average_precision(t, s, thr) for t, s, thr in groups]
    if not aps:
        raise ValueError("no groups")
    return float(np.mean(aps))
