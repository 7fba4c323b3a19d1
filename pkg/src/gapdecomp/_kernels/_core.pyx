# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: elementwise logistic, Bernoulli log likelihood,
and the sequential-switch path means used by the decomposition.

Semantics match `pyfallback.py`; only the accumulation order differs
(plain left-to-right sums here), so results can drift from the fallback
at the level of float rounding, never beyond.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, log1p

cnp.import_array()


cdef inline double _sigmoid(double t) noexcept nogil:
    cdef double e
    if t >= 0.0:
        return 1.0 / (1.0 + exp(-t))
    e = exp(t)
    return e / (1.0 + e)


def logistic(eta):
    """Elementwise standard logistic F(t) = 1 / (1 + exp(-t))."""
    cdef const double[::1] x = np.ascontiguousarray(eta, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = _sigmoid(x[i])
    return out_arr


def bernoulli_loglik(eta, y):
    """Bernoulli log likelihood sum(y*eta - softplus(eta)) on the linear scale."""
    cdef const double[::1] x = np.ascontiguousarray(eta, dtype=np.float64)
    cdef const double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    if x.shape[0] != yy.shape[0]:
        raise ValueError("eta and y must have the same length")
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0, t, softplus
    with nogil:
        for i in range(n):
            t = x[i]
            softplus = (t if t > 0.0 else 0.0) + log1p(exp(-fabs(t)))
            acc += yy[i] * t - softplus
    return acc


def path_means(eta0, deltas, order):
    """Mean logistic response along a sequential covariate-switching path.

    See the fallback docstring for the contract; returns an array of
    length J+1 with the mean of F(eta) before any switch and after each
    switch in `order`.
    """
    eta_arr = np.array(eta0, dtype=np.float64, copy=True)
    cdef double[::1] eta = eta_arr
    cdef const double[:, ::1] d = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef const cnp.int64_t[::1] ord_ = np.ascontiguousarray(order, dtype=np.int64)
    cdef Py_ssize_t i, t, v
    cdef Py_ssize_t n = eta.shape[0], j = ord_.shape[0]
    if d.shape[0] != n:
        raise ValueError("deltas must be n x J")
    if d.shape[1] != j:
        raise ValueError("order must index every column of deltas")
    means_arr = np.empty(j + 1, dtype=np.float64)
    cdef double[::1] means = means_arr
    cdef double acc
    with nogil:
        acc = 0.0
        for i in range(n):
            acc += _sigmoid(eta[i])
        means[0] = acc / n
        for t in range(j):
            v = ord_[t]
            acc = 0.0
            for i in range(n):
                eta[i] += d[i, v]
                acc += _sigmoid(eta[i])
            means[t + 1] = acc / n
    return means_arr
