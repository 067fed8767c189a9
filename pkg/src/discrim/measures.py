"""Dataset discrimination measures.

Three views of how well a dataset separates its top-scoring systems:

* ``perf_variance``: sample standard deviation of the systems' scores.
* ``scaled_perf_variance``: the same, scaled by the headroom left below the
  metric's upper limit.
* ``hit_rate``: how often the better system on the full test set also wins
  on paired bootstrap resamples of it, averaged over all system pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import _backend

TIE_POLICIES = ("zero", "half")
DEFAULT_ITERATIONS = 1000
DEFAULT_SUBSET_RATIO = 0.8


class InvalidInput(ValueError):
    pass


class UndefinedCorrelation(ValueError):
    pass


@dataclass(frozen=True)
class PerformanceList:
    dataset_id: str
    scores: tuple
    system_ids: tuple
    upper_limit: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        object.__setattr__(self, "system_ids", tuple(str(s) for s in self.system_ids))
        if len(self.scores) != len(self.system_ids):
            raise InvalidInput(f"{self.dataset_id}: {len(self.scores)} scores for {len(self.system_ids)} systems")
        if len(self.scores) < 2:
            raise InvalidInput(f"{self.dataset_id}: need at least 2 scores, got {len(self.scores)}")
        if not all(math.isfinite(s) for s in self.scores):
            raise InvalidInput(f"{self.dataset_id}: scores must be finite")
        if not math.isfinite(self.upper_limit):
            raise InvalidInput(f"{self.dataset_id}: upper limit must be finite")

    @property
    def k(self) -> int:
        return len(self.scores)

    @classmethod
    def from_scores(cls, scores, upper_limit=100.0, dataset_id="dataset"):
        return cls(dataset_id, tuple(scores), tuple(f"s{i}" for i in range(len(scores))), upper_limit)


@dataclass(frozen=True)
class PredictionMatrix:
    """Per-sample 0/1 correctness of ``k`` systems on one test set (n x k)."""

    dataset_id: str
    sample_ids: tuple
    system_ids: tuple
    correctness: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.correctness)
        if c.ndim != 2:
            raise InvalidInput("correctness must be a 2-d matrix")
        if not np.isin(c, (0, 1)).all():
            raise InvalidInput("correctness cells must be 0 or 1")
        c = c.astype(np.uint8)
        c.setflags(write=False)
        object.__setattr__(self, "correctness", c)
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))
        object.__setattr__(self, "system_ids", tuple(str(s) for s in self.system_ids))
        n, k = c.shape
        if n < 1 or k < 2:
            raise InvalidInput(f"need n >= 1 samples and k >= 2 systems, got {n}x{k}")
        if len(self.sample_ids) != n or len(self.system_ids) != k:
            raise InvalidInput("id lists do not match the correctness matrix shape")

    @property
    def n(self) -> int:
        return self.correctness.shape[0]

    @property
    def k(self) -> int:
        return self.correctness.shape[1]

    def accuracies(self) -> np.ndarray:
        """Full-test-set accuracy of every system, in percent."""
        return self.correctness.mean(axis=0) * 100.0


@dataclass(frozen=True)
class DiscriminationReport:
    dataset_id: str
    k: int
    lambda_var: float
    lambda_sva: float
    lambda_hit: Optional[float] = None


def perf_variance(p: PerformanceList) -> float:
    """Sample standard deviation (divisor k-1) of the scores."""
    if len(p.scores) < 2:
        raise InvalidInput("need at least 2 scores")
    return float(np.std(np.asarray(p.scores, dtype=np.float64), ddof=1))


def scaled_perf_variance(p: PerformanceList) -> float:
    """``perf_variance`` times the headroom ``upper_limit - mean(scores)``.

    Negative headroom is passed through unchanged.
    """
    return perf_variance(p) * (p.upper_limit - float(np.mean(p.scores)))


def report(p: PerformanceList) -> DiscriminationReport:
    return DiscriminationReport(p.dataset_id, p.k, perf_variance(p), scaled_perf_variance(p))


def subset_size(n: int, subset_ratio: float) -> int:
    if not 0.0 < subset_ratio <= 1.0:
        raise InvalidInput(f"subset_ratio must be in (0, 1], got {subset_ratio}")
    # the epsilon keeps e.g. 0.7 * 10 from rounding up to 8
    return max(1, math.ceil(subset_ratio * n - 1e-9))


def _check_resampling(iterations, tie_policy):
    if iterations < 1:
        raise InvalidInput(f"iterations must be >= 1, got {iterations}")
    if tie_policy not in TIE_POLICIES:
        raise InvalidInput(f"unknown tie policy {tie_policy!r}")


def _orient(m: PredictionMatrix, i: int, j: int) -> tuple:
    """Order a pair as (better, worse) on the full test set.

    Equal accuracies are ordered by ascending system id.
    """
    correct = m.correctness.sum(axis=0)
    ci, cj = int(correct[i]), int(correct[j])
    if ci > cj or (ci == cj and m.system_ids[i] <= m.system_ids[j]):
        return i, j
    return j, i


def _pair_frequency(sums: np.ndarray, i: int, j: int, tie_policy: str) -> float:
    a, b = sums[:, i], sums[:, j]
    wins = int(np.count_nonzero(a > b))
    if tie_policy == "half":
        ties = int(np.count_nonzero(a == b))
        return (wins + 0.5 * ties) / sums.shape[0]
    return wins / sums.shape[0]


def bootstrap_correct_counts(
    m: PredictionMatrix,
    subset_ratio: float = DEFAULT_SUBSET_RATIO,
    iterations: int = DEFAULT_ITERATIONS,
    rng_seed: int = 42,
    replace: bool = True,
) -> np.ndarray:
    """Correct-answer counts of every system on each resampled subset.

    All systems are scored on the same resampled rows (paired resampling).
    Subset ``t`` depends only on ``(rng_seed, t)``. Subsets all have the same
    size, so comparing counts is the same as comparing accuracies.
    """
    size = subset_size(m.n, subset_ratio)
    if iterations < 1:
        raise InvalidInput(f"iterations must be >= 1, got {iterations}")
    key = _backend.stream_key(rng_seed)
    return _backend.bootstrap_sums(m.correctness, size, int(iterations), key, bool(replace))


def pairwise_hit(
    m: PredictionMatrix,
    i: int,
    j: int,
    subset_ratio: float = DEFAULT_SUBSET_RATIO,
    iterations: int = DEFAULT_ITERATIONS,
    rng_seed: int = 42,
    tie_policy: str = "zero",
    replace: bool = True,
) -> float:
    """Frequency with which the full-set winner of ``(i, j)`` also wins on a resample."""
    if not (0 <= i < m.k and 0 <= j < m.k) or i == j:
        raise InvalidInput(f"invalid system pair ({i}, {j}) for k={m.k}")
    _check_resampling(iterations, tie_policy)
    i, j = _orient(m, i, j)
    sub = PredictionMatrix(m.dataset_id, m.sample_ids, (m.system_ids[i], m.system_ids[j]),
                           m.correctness[:, [i, j]])
    sums = bootstrap_correct_counts(sub, subset_ratio, iterations, rng_seed, replace)
    return _pair_frequency(sums, 0, 1, tie_policy)


def pairwise_matrix(
    m: PredictionMatrix,
    subset_ratio: float = DEFAULT_SUBSET_RATIO,
    iterations: int = DEFAULT_ITERATIONS,
    rng_seed: int = 42,
    tie_policy: str = "zero",
    replace: bool = True,
) -> list:
    """``(better_id, worse_id, P)`` for every unordered system pair."""
    _check_resampling(iterations, tie_policy)
    sums = bootstrap_correct_counts(m, subset_ratio, iterations, rng_seed, replace)
    out = []
    for a, b in combinations(range(m.k), 2):
        i, j = _orient(m, a, b)
        out.append((m.system_ids[i], m.system_ids[j], _pair_frequency(sums, i, j, tie_policy)))
    return out


def hit_rate(
    m: PredictionMatrix,
    subset_ratio: float = DEFAULT_SUBSET_RATIO,
    iterations: int = DEFAULT_ITERATIONS,
    rng_seed: int = 42,
    tie_policy: str = "zero",
    replace: bool = True,
) -> float:
    """Mean pairwise hit frequency over all C(k, 2) system pairs."""
    pairs = pairwise_matrix(m, subset_ratio, iterations, rng_seed, tie_policy, replace)
    return float(np.mean([p for _, _, p in pairs]))


def average_ranks(x: Sequence[float]) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the ranks they span."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    sx = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple:
    """Tie-aware Spearman correlation and its two-sided p-value.

    The coefficient is the Pearson correlation of average ranks. The p-value
    uses ``t = rho * sqrt((n - 2) / (1 - rho**2))`` with ``n - 2`` degrees of
    freedom.
    """
    if len(x) != len(y):
        raise InvalidInput(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise InvalidInput(f"need at least 3 pairs, got {n}")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("correlation undefined for constant input")
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) >= 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(stats.t.sf(abs(t), n - 2))
    return rho, p
