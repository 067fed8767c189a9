"""Discrimination predictors and their evaluation."""
from .metrics import (MAP_THRESHOLDS, RankGroup, average_precision, dcg, group_average_precision,
                      group_ndcg, mean_average_precision, minmax_gains, ndcg, rank, ranks_from_scores, rmse)
from .models import (DEFAULTS, FORMAT, CARTModel, GBDTModel, KNNModel, ModelError, PredictorModel,
                     feature_importance, fit, fit_cart, fit_gbdt, fit_knn, load, loads)
from .table import TARGET_KINDS, TableError, TrainTable, format_table, read_table
from .tree import RegressionTree

__all__ = [
    "MAP_THRESHOLDS", "RankGroup", "average_precision", "dcg", "group_average_precision", "group_ndcg",
    "mean_average_precision", "minmax_gains", "ndcg", "rank", "ranks_from_scores", "rmse",
    "DEFAULTS", "FORMAT", "CARTModel", "GBDTModel", "KNNModel", "ModelError", "PredictorModel",
    "feature_importance", "fit", "fit_cart", "fit_gbdt", "fit_knn", "load", "loads",
    "TARGET_KINDS", "TableError", "TrainTable", "format_table", "read_table", "RegressionTree",
]
