"""Training tables: feature rows paired with discrimination targets."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

TARGET_KINDS = ("var", "sva")
TARGET_COLUMNS = {"var": "lambda_var", "sva": "lambda_sva"}


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class TrainTable:
    """Rows of (features, lambda_var, lambda_sva) keyed by dataset id.

    ``X`` holds NaN for missing features; ``missing`` flags them per row.
    """

    dataset_ids: tuple
    feature_names: tuple
    X: np.ndarray = field(repr=False)
    lambda_var: np.ndarray = field(repr=False)
    lambda_sva: np.ndarray = field(repr=False)
    target_kind: str = "var"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64).reshape(len(self.dataset_ids), len(self.feature_names))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "dataset_ids", tuple(self.dataset_ids))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        for name in ("lambda_var", "lambda_sva"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (len(self.dataset_ids),):
                raise TableError(f"{name} has shape {arr.shape}, expected ({len(self.dataset_ids)},)")
            object.__setattr__(self, name, arr)
        if self.target_kind not in TARGET_KINDS:
            raise TableError(f"unknown target kind {self.target_kind!r}")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise TableError("duplicate feature names")

    def __len__(self):
        return len(self.dataset_ids)

    @property
    def y(self) -> np.ndarray:
        return self.lambda_var if self.target_kind == "var" else self.lambda_sva

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.X)

    def with_target(self, kind: str) -> "TrainTable":
        return TrainTable(self.dataset_ids, self.feature_names, self.X, self.lambda_var, self.lambda_sva, kind)

    def subset(self, rows) -> "TrainTable":
        rows = np.asarray(rows, dtype=np.intp)
        return TrainTable(tuple(self.dataset_ids[i] for i in rows), self.feature_names, self.X[rows],
                          self.lambda_var[rows], self.lambda_sva[rows], self.target_kind)

    @classmethod
    def from_rows(cls, rows, feature_names=None, target_kind="var") -> "TrainTable":
        """Build from ``(features: dict, lambda_var, lambda_sva, dataset_id)`` tuples.

        Without ``feature_names`` the union of row keys is used, in first-seen order.
        """
        rows = list(rows)
        if feature_names is None:
            seen = {}
            for feats, *_ in rows:
                for k in feats:
                    seen.setdefault(k, None)
            feature_names = tuple(seen)
        X = np.array([[feats.get(f, math.nan) for f in feature_names] for feats, *_ in rows],
                     dtype=np.float64).reshape(len(rows), len(feature_names))
        return cls(tuple(r[3] for r in rows), tuple(feature_names), X,
                   [r[1] for r in rows], [r[2] for r in rows], target_kind)

    def row_features(self, i: int) -> dict:
        return {f: float(v) for f, v in zip(self.feature_names, self.X[i]) if not math.isnan(v)}


def _parse_cell(text: str, where: str) -> float:
    if text.strip() == "":
        return math.nan
    try:
        v = float(text)
    except ValueError:
        raise TableError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise TableError(f"{where}: non-finite value {text!r}")
    return v


def read_table(path, target_kind: str = "var") -> TrainTable:
    """Read ``dataset_id,<features...>,lambda_var,lambda_sva`` (missing cells empty)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableError(f"{path}: empty file") from None
        if len(header) < 3 or header[0] != "dataset_id" or header[-2:] != ["lambda_var", "lambda_sva"]:
            raise TableError(f"{path}: header must be dataset_id,<features...>,lambda_var,lambda_sva")
        features = header[1:-2]
        ids, X, lv, ls = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise TableError(f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}")
            where = f"{path}:{lineno}"
            ids.append(row[0])
            X.append([_parse_cell(c, where) for c in row[1:-2]])
            lv.append(_parse_cell(row[-2], where))
            ls.append(_parse_cell(row[-1], where))
    if any(math.isnan(v) for v in lv + ls):
        raise TableError(f"{path}: target cells may not be empty")
    return TrainTable(tuple(ids), tuple(features), np.array(X, dtype=np.float64).reshape(len(ids), len(features)),
                      lv, ls, target_kind)


def fmt(v: Optional[float]) -> str:
    """Six significant digits; empty for missing."""
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{v:.6g}"


def format_table(t: TrainTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset_id", *t.feature_names, "lambda_var", "lambda_sva"])
    for i, did in enumerate(t.dataset_ids):
        w.writerow([did, *(fmt(float(v)) for v in t.X[i]), fmt(float(t.lambda_var[i])), fmt(float(t.lambda_sva[i]))])
    return buf.getvalue()
