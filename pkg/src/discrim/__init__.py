"""Quantify and predict how well benchmark datasets discriminate top systems."""
from ._backend import NAME as backend
from .measures import (DiscriminationReport, PerformanceList, PredictionMatrix, hit_rate, pairwise_hit,
                       perf_variance, scaled_perf_variance, spearman)

__version__ = "0.1.0"

__all__ = [
    "backend", "DiscriminationReport", "PerformanceList", "PredictionMatrix", "hit_rate", "pairwise_hit",
    "perf_variance", "scaled_perf_variance", "spearman",
]
