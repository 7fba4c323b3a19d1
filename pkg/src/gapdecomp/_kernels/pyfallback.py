"""Pure-numpy implementations of the hot kernels.

Matches the compiled extension in `_core.pyx` function for function;
`gapdecomp._kernels` picks one of the two at import time.
"""

import numpy as np

__all__ = ["logistic", "bernoulli_loglik", "path_means"]


def logistic(eta):
    """Elementwise standard logistic F(t) = 1 / (1 + exp(-t)).

    Split by sign so the exponential argument is never positive.
    """
    eta = np.ascontiguousarray(eta, dtype=np.float64)
    out = np.empty_like(eta)
    pos = eta >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def bernoulli_loglik(eta, y):
    """Bernoulli log likelihood sum(y*eta - softplus(eta)) on the linear scale.

    Never forms probabilities, so it is finite for any eta.
    """
    eta = np.ascontiguousarray(eta, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if eta.shape != y.shape:
        raise ValueError("eta and y must have the same length")
    softplus = np.maximum(eta, 0.0) + np.log1p(np.exp(-np.abs(eta)))
    return float(np.sum(y * eta - softplus))


def path_means(eta0, deltas, order):
    """Mean logistic response along a sequential covariate-switching path.

    Starting from linear predictors ``eta0`` (length n), add the columns
    of ``deltas`` (n x J) one at a time in the sequence given by
    ``order`` (a permutation of 0..J-1) and record the mean of
    F(eta) before any switch and after each one.  Returns an array of
    length J+1.
    """
    eta = np.array(eta0, dtype=np.float64, copy=True)
    deltas = np.ascontiguousarray(deltas, dtype=np.float64)
    order = np.ascontiguousarray(order, dtype=np.int64)
    if deltas.ndim != 2 or deltas.shape[0] != eta.shape[0]:
        raise ValueError("deltas must be n x J")
    if order.shape[0] != deltas.shape[1]:
        raise ValueError("order must index every column of deltas")
    means = np.empty(order.shape[0] + 1, dtype=np.float64)
    means[0] = logistic(eta).mean()
    for t, v in enumerate(order):
        eta += deltas[:, v]
        means[t + 1] = logistic(eta).mean()
    return means
