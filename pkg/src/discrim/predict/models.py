"""Discrimination regressors: k-nearest neighbours, CART and gradient boosting.

All models impute missing features with training medians, predict from a
feature dict or a matrix, and serialize to a JSON document tagged
``discrim-model/v1``. Round-tripping preserves predictions bit for bit.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .table import TrainTable
from .tree import RegressionTree, presort

FORMAT = "discrim-model/v1"

DEFAULTS = {
    "knn": {"k": 5},
    "cart": {"max_depth": 6, "min_leaf": 2},
    "gbdt": {"n_trees": 100, "learning_rate": 0.1, "max_depth": 3, "min_leaf": 2},
}


class ModelError(ValueError):
    pass


def _medians(X: np.ndarray) -> np.ndarray:
    out = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        col = X[:, j]
        col = col[~np.isnan(col)]
        out[j] = float(np.median(col)) if col.size else 0.0
    return out


class PredictorModel:
    kind = ""

    def __init__(self, feature_names, medians, target_kind="var", **hyper):
        self.feature_names = tuple(feature_names)
        self.medians = np.asarray(medians, dtype=np.float64)
        self.target_kind = target_kind
        self.hyperparameters = dict(hyper)

    def _impute(self, X) -> np.ndarray:
        X = np.array(X, dtype=np.float64, ndmin=2)
        if X.shape[1] != len(self.feature_names):
            raise ModelError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        return np.where(np.isnan(X), self.medians[None, :], X)

    def vectorize(self, features: dict) -> np.ndarray:
        return np.array([features.get(f, math.nan) for f in self.feature_names], dtype=np.float64)

    def predict(self, features: dict) -> float:
        """Prediction for one feature vector; absent features are imputed."""
        return float(self.predict_matrix(self.vectorize(features)[None, :])[0])

    def predict_table(self, t: TrainTable) -> np.ndarray:
        if tuple(t.feature_names) != self.feature_names:
            idx = {f: i for i, f in enumerate(t.feature_names)}
            cols = [t.X[:, idx[f]] if f in idx else np.full(len(t), math.nan) for f in self.feature_names]
            return self.predict_matrix(np.column_stack(cols) if cols else np.empty((len(t), 0)))
        return self.predict_matrix(t.X)

    def predict_matrix(self, X) -> np.ndarray:
        raise NotImplementedError

    def _state(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "format": FORMAT,
            "kind": self.kind,
            "target_kind": self.target_kind,
            "hyperparameters": self.hyperparameters,
            "feature_names": list(self.feature_names),
            "medians": self.medians.tolist(),
            "state": self._state(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


class KNNModel(PredictorModel):
    kind = "knn"

    def __init__(self, feature_names, medians, means, scales, Z, targets, target_kind="var", k=5):
        super().__init__(feature_names, medians, target_kind, k=int(k))
        self.k = int(k)
        self.means = np.asarray(means, dtype=np.float64)
        self.scales = np.asarray(scales, dtype=np.float64)
        self.Z = np.asarray(Z, dtype=np.float64).reshape(-1, len(self.feature_names))
        self.targets = np.asarray(targets, dtype=np.float64)

    def neighbors(self, X) -> np.ndarray:
        """Indices of the k nearest training rows, distance ties by row index."""
        Q = (self._impute(X) - self.means) / self.scales
        d = ((Q[:, None, :] - self.Z[None, :, :]) ** 2).sum(axis=2)
        return np.argsort(d, axis=1, kind="stable")[:, : self.k]

    def predict_matrix(self, X) -> np.ndarray:
        return self.targets[self.neighbors(X)].mean(axis=1)

    def _state(self):
        return {"means": self.means.tolist(), "scales": self.scales.tolist(),
                "rows": self.Z.tolist(), "targets": self.targets.tolist()}


class CARTModel(PredictorModel):
    kind = "cart"

    def __init__(self, feature_names, medians, tree, target_kind="var", max_depth=6, min_leaf=2):
        super().__init__(feature_names, medians, target_kind, max_depth=int(max_depth), min_leaf=int(min_leaf))
        self.tree = tree

    def predict_matrix(self, X) -> np.ndarray:
        return self.tree.predict(self._impute(X))

    def split_counts(self) -> np.ndarray:
        return self.tree.split_counts(len(self.feature_names))

    def _state(self):
        return {"tree": self.tree.to_dict()}


class GBDTModel(PredictorModel):
    kind = "gbdt"

    def __init__(self, feature_names, medians, init, trees, target_kind="var",
                 n_trees=100, learning_rate=0.1, max_depth=3, min_leaf=2):
        super().__init__(feature_names, medians, target_kind, n_trees=int(n_trees),
                         learning_rate=float(learning_rate), max_depth=int(max_depth), min_leaf=int(min_leaf))
        self.init = float(init)
        self.learning_rate = float(learning_rate)
        self.trees = list(trees)

    def staged_predict(self, X):
        """Predictions after 0, 1, ..., n_trees stages."""
        X = self._impute(X)
        pred = np.full(X.shape[0], self.init)
        yield pred.copy()
        for tree in self.trees:
            pred = pred + self.learning_rate * tree.predict(X)
            yield pred.copy()

    def predict_matrix(self, X) -> np.ndarray:
        *_, last = self.staged_predict(X)
        return last

    def split_counts(self) -> np.ndarray:
        counts = np.zeros(len(self.feature_names), dtype=np.int64)
        for tree in self.trees:
            counts += tree.split_counts(len(self.feature_names))
        return counts

    def _state(self):
        return {"init": self.init, "trees": [t.to_dict() for t in self.trees]}


def _prepare(t: TrainTable):
    if len(t) == 0:
        raise ModelError("cannot fit on an empty table")
    medians = _medians(t.X)
    X = np.where(np.isnan(t.X), medians[None, :], t.X)
    return X, t.y.copy(), medians


def fit_knn(t: TrainTable, k: int = 5) -> KNNModel:
    if k < 1 or k > len(t):
        raise ModelError(f"k must be in [1, {len(t)}], got {k}")
    X, y, medians = _prepare(t)
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales[scales == 0] = 1.0
    return KNNModel(t.feature_names, medians, means, scales, (X - means) / scales, y, t.target_kind, k)


def fit_cart(t: TrainTable, max_depth: int = 6, min_leaf: int = 2) -> CARTModel:
    X, y, medians = _prepare(t)
    tree = RegressionTree.fit(X, y, max_depth, min_leaf)
    return CARTModel(t.feature_names, medians, tree, t.target_kind, max_depth, min_leaf)


def fit_gbdt(t: TrainTable, n_trees: int = 100, learning_rate: float = 0.1, max_depth: int = 3,
             min_leaf: int = 2) -> GBDTModel:
    """Least-squares boosting: start at the mean, add shrunken residual trees."""
    if n_trees < 0 or not learning_rate > 0:
        raise ModelError("n_trees must be >= 0 and learning_rate > 0")
    X, y, medians = _prepare(t)
    init = float(np.mean(y))
    order = presort(X)
    pred = np.full(y.shape[0], init)
    trees = []
    for _ in range(n_trees):
        tree = RegressionTree.fit(X, y - pred, max_depth, min_leaf, order=order)
        trees.append(tree)
        pred = pred + learning_rate * tree.predict(X)
    return GBDTModel(t.feature_names, medians, init, trees, t.target_kind, n_trees, learning_rate,
                     max_depth, min_leaf)


def fit(kind: str, t: TrainTable, **hyper) -> PredictorModel:
    if kind not in DEFAULTS:
        raise ModelError(f"unknown model kind {kind!r}")
    params = {**DEFAULTS[kind], **{k: v for k, v in hyper.items() if v is not None}}
    unknown = set(params) - set(DEFAULTS[kind])
    if unknown:
        raise ModelError(f"{kind} does not take {sorted(unknown)}")
    return {"knn": fit_knn, "cart": fit_cart, "gbdt": fit_gbdt}[kind](t, **params)


def feature_importance(m: PredictorModel) -> dict:
    """Times each feature was chosen for a split, over all trees."""
    if not hasattr(m, "split_counts"):
        raise ModelError(f"{m.kind} models have no split-count importance")
    return {f: int(c) for f, c in zip(m.feature_names, m.split_counts())}


def from_dict(d: dict) -> PredictorModel:
    if d.get("format") != FORMAT:
        raise ModelError(f"unsupported model format {d.get('format')!r}")
    common = dict(feature_names=d["feature_names"], medians=d["medians"], target_kind=d["target_kind"])
    hp, st = d["hyperparameters"], d["state"]
    kind = d["kind"]
    if kind == "knn":
        return KNNModel(means=st["means"], scales=st["scales"], Z=st["rows"], targets=st["targets"], **common, **hp)
    if kind == "cart":
        return CARTModel(tree=RegressionTree.from_dict(st["tree"]), **common, **hp)
    if kind == "gbdt":
        return GBDTModel(init=st["init"], trees=[RegressionTree.from_dict(t) for t in st["trees"]], **common, **hp)
    raise ModelError(f"unknown model kind {kind!r}")


def loads(text: str) -> PredictorModel:
    try:
        return from_dict(json.loads(text))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ModelError(f"malformed model document: {exc}") from None


def load(path) -> PredictorModel:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
