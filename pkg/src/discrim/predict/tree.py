"""Greedy least-squares regression trees."""
from __future__ import annotations

import numpy as np

from .. import _backend

# relative gain below which a node is not split (guards float noise)
MIN_REL_GAIN = 1e-12
# split scores this close (relative to node SSE) count as tied
TIE_REL_TOL = 1e-10


def presort(X: np.ndarray) -> np.ndarray:
    """Row order of every column, shape (n_features, n_rows)."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)


class RegressionTree:
    """Binary tree in flat arrays; node 0 is the root.

    Internal nodes send ``x[feature] < threshold`` left. Leaves have
    ``feature == -1`` and predict ``value``.
    """

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=np.float64)

    @classmethod
    def fit(cls, X, y, max_depth: int, min_leaf: int = 1, order=None) -> "RegressionTree":
        X = np.asarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        if max_depth < 0 or min_leaf < 1:
            raise ValueError("max_depth must be >= 0 and min_leaf >= 1")
        if order is None:
            order = presort(X)
        nodes = {"feature": [], "threshold": [], "left": [], "right": [], "value": []}

        def add(rows, depth):
            node = len(nodes["value"])
            yr = y[rows]
            for key, v in (("feature", -1), ("threshold", 0.0), ("left", -1), ("right", -1),
                           ("value", float(np.mean(yr)))):
                nodes[key].append(v)
            if depth >= max_depth or rows.size < 2 * min_leaf or yr.max() == yr.min():
                return node
            mask = np.zeros(y.shape[0], dtype=np.uint8)
            mask[rows] = 1
            # centering keeps the split scores on the scale of the node's SSE
            yc = y - yr.mean()
            sse = float(np.sum(yc[rows] ** 2))
            f, thr, score = _backend.best_split(X, yc, order, mask, min_leaf, TIE_REL_TOL * sse)
            if f < 0:
                return node
            base = float(yc[rows].sum()) ** 2 / rows.size
            if score - base <= MIN_REL_GAIN * max(sse, np.finfo(float).tiny):
                return node
            go_left = X[rows, f] < thr
            nodes["feature"][node] = int(f)
            nodes["threshold"][node] = float(thr)
            nodes["left"][node] = add(rows[go_left], depth + 1)
            nodes["right"][node] = add(rows[~go_left], depth + 1)
            return node

        add(np.arange(y.shape[0]), 0)
        return cls(**nodes)

    @property
    def n_nodes(self) -> int:
        return int(self.value.shape[0])

    @property
    def depth(self) -> int:
        def d(i):
            if self.feature[i] < 0:
                return 0
            return 1 + max(d(self.left[i]), d(self.right[i]))
        return d(0)

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by every row."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] < self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[node] >= 0
        return node

    def predict(self, X) -> np.ndarray:
        return self.value[self.apply(X)]

    def split_counts(self, n_features: int) -> np.ndarray:
        counts = np.zeros(n_features, dtype=np.int64)
        for f in self.feature:
            if f >= 0:
                counts[f] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])
