# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_fallback.py``.

Same contracts, same arithmetic; outputs are bit-identical.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdint cimport uint64_t, uint8_t, int64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL


cdef inline uint64_t _draw(uint64_t key, uint64_t counter) nogil:
    cdef uint64_t z = key + (counter + 1) * GOLDEN
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


cdef inline Py_ssize_t _bounded(uint64_t x, uint64_t bound) nogil:
    return <Py_ssize_t>(((x >> 32) * bound) >> 32)


def bootstrap_sums(correct, Py_ssize_t subset_size, Py_ssize_t iterations, key, bint replace=True):
    cdef const uint8_t[:, ::1] c = np.ascontiguousarray(correct, dtype=np.uint8)
    cdef Py_ssize_t n = c.shape[0], k = c.shape[1], m = subset_size
    out_arr = np.zeros((iterations, k), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t[::1] perm = np.empty(n, dtype=np.intp)
    cdef uint64_t ukey = <uint64_t>int(key)
    cdef Py_ssize_t t, j, col, idx, r, tmp
    cdef uint64_t base
    with nogil:
        for t in range(iterations):
            base = <uint64_t>t * <uint64_t>m
            if replace:
                for j in range(m):
                    idx = _bounded(_draw(ukey, base + <uint64_t>j), <uint64_t>n)
                    for col in range(k):
                        out[t, col] += c[idx, col]
            else:
                for j in range(n):
                    perm[j] = j
                for j in range(m):
                    r = j + _bounded(_draw(ukey, base + <uint64_t>j), <uint64_t>(n - j))
                    tmp = perm[j]
                    perm[j] = perm[r]
                    perm[r] = tmp
                    idx = perm[j]
                    for col in range(k):
                        out[t, col] += c[idx, col]
    return out_arr


cdef double _scan(const double[:, :] xv, const double[::1] yv, const Py_ssize_t[:, ::1] ov,
                  const uint8_t[::1] mv, Py_ssize_t[::1] idx, Py_ssize_t min_leaf, double cutoff,
                  bint find, Py_ssize_t* best_f, double* best_thr) noexcept nogil:
    # find=0: return the maximum score; find=1: stop at the first score >= cutoff
    cdef Py_ssize_t n = ov.shape[1], n_features = xv.shape[1]
    cdef Py_ssize_t f, i, cnt, p
    cdef double total, sl, sr, score, top = -INFINITY
    for f in range(n_features):
        cnt = 0
        for i in range(n):
            if mv[ov[f, i]]:
                idx[cnt] = ov[f, i]
                cnt += 1
        if cnt < 2 * min_leaf:
            continue
        total = 0.0
        for i in range(cnt):
            total += yv[idx[i]]
        sl = 0.0
        for p in range(1, cnt - min_leaf + 1):
            sl += yv[idx[p - 1]]
            if p < min_leaf:
                continue
            if not (xv[idx[p - 1], f] < xv[idx[p], f]):
                continue
            sr = total - sl
            score = sl * sl / <double>p + sr * sr / <double>(cnt - p)
            if find:
                if score >= cutoff:
                    best_f[0] = f
                    best_thr[0] = (xv[idx[p - 1], f] + xv[idx[p], f]) / 2.0
                    return score
            elif score > top:
                top = score
    return top


def best_split(X, y, order, mask, Py_ssize_t min_leaf, double tol=0.0):
    cdef const double[:, :] xv = X
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const Py_ssize_t[:, ::1] ov = np.ascontiguousarray(order, dtype=np.intp)
    cdef const uint8_t[::1] mv = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t[::1] idx = np.empty(ov.shape[1], dtype=np.intp)
    cdef Py_ssize_t best_f = -1
    cdef double top, score = 0.0, best_thr = 0.0
    with nogil:
        top = _scan(xv, yv, ov, mv, idx, min_leaf, 0.0, 0, &best_f, &best_thr)
        if top != -INFINITY:
            score = _scan(xv, yv, ov, mv, idx, min_leaf, top - tol, 1, &best_f, &best_thr)
    if best_f < 0:
        return -1, 0.0, 0.0
    return best_f, best_thr, score
