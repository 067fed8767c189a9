"""Pure numpy implementations of the hot kernels.

These define the reference arithmetic. ``_kernels.pyx`` must reproduce every
result bit for bit, which is why the random draws come from a counter-based
hash (splitmix64) instead of a stateful generator, and why prefix sums are
plain sequential accumulations.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S32 = (np.uint64(s) for s in (30, 27, 31, 32))

# rows of draws materialized at once by the bootstrap kernel
_CHUNK_CELLS = 1 << 22


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _draw(key: int, counters: np.ndarray) -> np.ndarray:
    return _mix(np.uint64(key) + (counters + np.uint64(1)) * _GOLDEN)


def _bounded(x: np.ndarray, bound) -> np.ndarray:
    # multiply-shift reduction of the high 32 bits onto [0, bound)
    return ((x >> _S32) * np.asarray(bound, dtype=np.uint64)) >> _S32


def bootstrap_sums(correct, subset_size, iterations, key, replace=True):
    """Per-iteration column sums of ``correct`` over resampled rows.

    Row ``j`` of iteration ``t`` is drawn from the hash of counter
    ``t * subset_size + j`` under ``key``, so iteration ``t`` depends only on
    ``(key, t)``.

    Returns an ``(iterations, k)`` int64 array.
    """
    correct = np.ascontiguousarray(correct, dtype=np.uint8)
    n, k = correct.shape
    m = int(subset_size)
    out = np.empty((iterations, k), dtype=np.int64)
    chunk = max(1, _CHUNK_CELLS // max(1, m * (k if replace else 1) + (0 if replace else n)))
    cols = np.arange(m, dtype=np.uint64)
    for start in range(0, iterations, chunk):
        stop = min(iterations, start + chunk)
        t = np.arange(start, stop, dtype=np.uint64)
        base = t * np.uint64(m)
        if replace:
            idx = _bounded(_draw(key, base[:, None] + cols[None, :]), n).astype(np.intp)
        else:
            rows = stop - start
            perm = np.tile(np.arange(n, dtype=np.intp), (rows, 1))
            rr = np.arange(rows)
            for j in range(m):
                r = j + _bounded(_draw(key, base + np.uint64(j)), n - j).astype(np.intp)
                a = perm[rr, j].copy()
                perm[rr, j] = perm[rr, r]
                perm[rr, r] = a
            idx = perm[:, :m]
        out[start:stop] = correct[idx].sum(axis=1, dtype=np.int64)
    return out


def best_split(X, y, order, mask, min_leaf, tol=0.0):
    """Best variance-reduction split among the rows flagged in ``mask``.

    ``order[f]`` lists all row indices sorted by column ``f``. The score of a
    split is ``sl**2/nl + sr**2/nr`` (larger is better). With ``M`` the best
    score, the first candidate in (feature, threshold) order scoring at least
    ``M - tol`` wins, so float noise cannot break exact ties.

    Returns ``(feature, threshold, score)`` with feature ``-1`` if no split
    satisfies ``min_leaf``.
    """
    candidates = []
    for f in range(X.shape[1]):
        idx = order[f][mask[order[f]].astype(bool)]
        cnt = idx.shape[0]
        if cnt < 2 * min_leaf:
            continue
        xs = X[idx, f]
        cs = np.cumsum(y[idx])
        p = np.arange(min_leaf, cnt - min_leaf + 1)
        p = p[xs[p - 1] < xs[p]]
        if p.size == 0:
            continue
        sl = cs[p - 1]
        sr = cs[-1] - sl
        score = sl * sl / p.astype(np.float64) + sr * sr / (cnt - p).astype(np.float64)
        candidates.append((f, xs, p, score))
    if not candidates:
        return -1, 0.0, 0.0
    top = max(float(score.max()) for *_, score in candidates)
    for f, xs, p, score in candidates:
        hit = np.nonzero(score >= top - tol)[0]
        if hit.size:
            i = int(hit[0])
            return f, float((xs[p[i] - 1] + xs[p[i]]) / 2.0), float(score[i])
