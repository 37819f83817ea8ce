# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in _npkernels.py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, sqrt

cnp.import_array()

IMPL = "cython"

cdef double LOG_2PI = 1.8378770664093453


def pairwise_sqdist(X, Y):
    cdef double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(Y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], m = yv.shape[0], dim = xv.shape[1]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, d
    cdef double acc, diff
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for d in range(dim):
                diff = xv[i, d] - yv[j, d]
                acc += diff * diff
            out[i, j] = acc
    return out_arr


def radius_neighbor_lists(X, eps):
    cdef double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], dim = xv.shape[1]
    cdef double thr = float(eps) * float(eps)
    cdef Py_ssize_t i, j, d
    cdef double acc, diff
    buf_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] buf = buf_arr
    cdef Py_ssize_t cnt
    lists = []
    for i in range(n):
        cnt = 0
        for j in range(n):
            acc = 0.0
            for d in range(dim):
                diff = xv[i, d] - xv[j, d]
                acc += diff * diff
                if acc > thr:
                    break
            if acc <= thr:
                buf[cnt] = j
                cnt += 1
        lists.append(buf_arr[:cnt].copy())
    return lists


def gauss_kde_logpdf(query, support, bandwidth):
    q2 = np.atleast_2d(np.asarray(query, dtype=np.float64))
    s2 = np.atleast_2d(np.asarray(support, dtype=np.float64))
    cdef double[:, ::1] qv = np.ascontiguousarray(q2)
    cdef double[:, ::1] sv = np.ascontiguousarray(s2)
    cdef double[::1] bw = np.ascontiguousarray(bandwidth, dtype=np.float64)
    cdef Py_ssize_t nq = qv.shape[0], n = sv.shape[0], dim = sv.shape[1]
    cdef double log_norm = -0.5 * dim * LOG_2PI
    cdef Py_ssize_t d, i, j
    for d in range(dim):
        log_norm -= log(bw[d])
    out_arr = np.empty(nq, dtype=np.float64)
    cdef double[::1] out = out_arr
    expo_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] expo = expo_arr
    cdef double acc, z, m, s
    for i in range(nq):
        m = -1e308
        for j in range(n):
            acc = 0.0
            for d in range(dim):
                z = (qv[i, d] - sv[j, d]) / bw[d]
                acc += z * z
            expo[j] = -0.5 * acc
            if expo[j] > m:
                m = expo[j]
        s = 0.0
        for j in range(n):
            s += exp(expo[j] - m)
        out[i] = m + log(s) - log(<double>n) + log_norm
    return out_arr


def kth_neighbor_dist(X, Y, k, exclude_self=False):
    cdef double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(Y, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], m = yv.shape[0], dim = xv.shape[1]
    cdef Py_ssize_t kk = int(k) + (1 if exclude_self else 0)
    if kk > m:
        raise ValueError(f"k={k} too large for {m} reference points")
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    row_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] row = row_arr
    cdef Py_ssize_t i, j, d
    cdef double acc, diff
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for d in range(dim):
                diff = xv[i, d] - yv[j, d]
                acc += diff * diff
            row[j] = acc
        row_arr.partition(kk - 1)
        out[i] = sqrt(row_arr[kk - 1])
    return out_arr
