"""Binary logit estimation.

Newton/IRLS from a zero start with step halving, stopping when the
largest score component falls below tolerance.  Covariances come in two
flavours: classical inverse information and the robust sandwich.  All
likelihood work happens on the linear-predictor scale via the kernels,
so nothing here overflows for extreme coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.special

from . import _kernels
from .errors import (
    CollinearityError,
    ConfigError,
    DataError,
    EstimationError,
    NonConvergenceError,
    ShapeError,
)

_HALVINGS = 10


def _as_values(X) -> np.ndarray:
    values = getattr(X, "values", X)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
        raise ShapeError("design must be a non-empty 2-d array")
    return values


def _labels_of(X, k: int) -> tuple[str, ...]:
    labels = getattr(X, "labels", None)
    if labels is None:
        return tuple(f"x{j}" for j in range(k))
    return tuple(labels)


def _as_outcome(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise ShapeError(f"outcome has shape {y.shape}, expected ({n},)")
    if not np.isin(y, (0, 1)).all():
        raise DataError("outcome values must be 0 or 1")
    return y.astype(np.float64)


@dataclass(eq=False)
class LogitFit:
    """A fitted binary logit."""

    beta: np.ndarray
    cov_classical: np.ndarray
    cov_robust: np.ndarray
    log_lik: float
    iterations: int
    converged: bool
    n: int
    labels: tuple[str, ...]

    def __post_init__(self):
        for arr in (self.beta, self.cov_classical, self.cov_robust):
            arr.setflags(write=False)

    @property
    def k(self) -> int:
        return self.beta.shape[0]

    @property
    def se_classical(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov_classical))

    @property
    def se_robust(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov_robust))

    @property
    def z_values(self) -> np.ndarray:
        return self.beta / self.se_robust

    @property
    def p_values(self) -> np.ndarray:
        # two-sided normal p-values from robust z
        return scipy.special.erfc(np.abs(self.z_values) / np.sqrt(2.0))


def log_likelihood(beta, X, y) -> float:
    """Bernoulli log likelihood at `beta` (linear-predictor scale)."""
    values = _as_values(X)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (values.shape[1],):
        raise ShapeError(
            f"beta has shape {beta.shape}, expected ({values.shape[1]},)"
        )
    y = _as_outcome(y, values.shape[0])
    return _kernels.bernoulli_loglik(values @ beta, y)


def score(beta, X, y) -> np.ndarray:
    """Score vector X'(y - p) at `beta`."""
    values = _as_values(X)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (values.shape[1],):
        raise ShapeError(
            f"beta has shape {beta.shape}, expected ({values.shape[1]},)"
        )
    y = _as_outcome(y, values.shape[0])
    p = _kernels.logistic(values @ beta)
    return values.T @ (y - p)


def _smallest_pivot_columns(
    H: np.ndarray, labels: tuple[str, ...]
) -> tuple[str, ...]:
    """Columns behind a singular information matrix, via pivoted QR."""
    _, r, perm = scipy.linalg.qr(H, pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag[0] > 0.0 else 1.0
    bad = [int(perm[j]) for j in range(len(diag)) if diag[j] <= 1e-10 * scale]
    if not bad:
        bad = [int(perm[-1])]
    return tuple(labels[j] for j in sorted(bad))


def _hessian(values: np.ndarray, w: np.ndarray) -> np.ndarray:
    return (values * w[:, None]).T @ values


def _spd_inverse(H: np.ndarray, labels: tuple[str, ...]) -> np.ndarray:
    try:
        chol = scipy.linalg.cho_factor(H, lower=True)
    except scipy.linalg.LinAlgError:
        cols = _smallest_pivot_columns(H, labels)
        raise CollinearityError(
            "singular information matrix; smallest-pivot columns: "
            + ", ".join(cols),
            columns=cols,
        ) from None
    return scipy.linalg.cho_solve(chol, np.eye(H.shape[0]))


def fit_logit(
    X,
    y,
    *,
    tol: float = 1e-8,
    max_iter: int = 50,
    ridge: float = 0.0,
) -> LogitFit:
    """Fit a binary logit by IRLS from a zero start.

    Stops when max|score| < tol.  Each Newton step is halved up to 10
    times until the log likelihood does not decrease (allowing float
    rounding of the likelihood evaluation itself); exhausting the
    halvings raises a non-convergence error, while simply running out
    of iterations only clears the `converged` flag.  `ridge` is added
    to the information matrix during iteration for stability only; the
    stopping rule and the reported covariances use the unmodified
    score and information, so a converged fit is the exact MLE.
    """
    if tol <= 0.0:
        raise ConfigError("tol must be positive")
    if max_iter < 1:
        raise ConfigError("max_iter must be at least 1")
    if ridge < 0.0:
        raise ConfigError("ridge must be non-negative")
    values = _as_values(X)
    n, k = values.shape
    if n <= k:
        raise DataError(f"need more observations ({n}) than columns ({k})")
    labels = _labels_of(X, k)
    if len(labels) != k:
        raise ShapeError("labels do not match design width")
    y64 = _as_outcome(y, n)

    beta = np.zeros(k)
    eta = np.zeros(n)
    p = _kernels.logistic(eta)
    ll = _kernels.bernoulli_loglik(eta, y64)
    converged = False
    iterations = 0
    for _ in range(max_iter + 1):
        g = values.T @ (y64 - p)
        if np.abs(g).max() < tol:
            converged = True
            break
        if iterations == max_iter:
            break
        w = p * (1.0 - p)
        H = _hessian(values, w)
        if ridge > 0.0:
            H = H + ridge * np.eye(k)
        try:
            chol = scipy.linalg.cho_factor(H, lower=True)
        except scipy.linalg.LinAlgError:
            cols = _smallest_pivot_columns(H, labels)
            raise CollinearityError(
                "singular information matrix; smallest-pivot columns: "
                + ", ".join(cols),
                columns=cols,
            ) from None
        step = scipy.linalg.cho_solve(chol, g)
        # non-decreasing up to float rounding: near the optimum the true
        # improvement can be smaller than the error in evaluating ll itself
        floor = ll - 1e-10 * (1.0 + abs(ll))
        lam = 1.0
        for _ in range(_HALVINGS + 1):
            cand = beta + lam * step
            eta_c = values @ cand
            ll_c = _kernels.bernoulli_loglik(eta_c, y64)
            if ll_c >= floor:
                break
            lam *= 0.5
        else:
            raise NonConvergenceError(
                "log likelihood decreased after "
                f"{_HALVINGS} step halvings at iteration {iterations + 1}"
            )
        beta, eta, ll = cand, eta_c, ll_c
        p = _kernels.logistic(eta)
        iterations += 1

    w = p * (1.0 - p)
    info = _hessian(values, w)
    cov = _spd_inverse(info, labels)
    resid = y64 - p
    meat = _hessian(values, resid * resid)
    cov_robust = cov @ meat @ cov
    return LogitFit(
        beta=beta,
        cov_classical=cov,
        cov_robust=cov_robust,
        log_lik=ll,
        iterations=iterations,
        converged=converged,
        n=n,
        labels=labels,
    )


def robust_covariance(fit: LogitFit, X, y) -> np.ndarray:
    """Sandwich covariance H^{-1} (sum s_i s_i') H^{-1} at the fit."""
    if not fit.converged:
        raise EstimationError("robust covariance requires a converged fit")
    values = _as_values(X)
    if values.shape[1] != fit.k:
        raise ShapeError("design width does not match the fit")
    labels = getattr(X, "labels", None)
    if labels is not None and tuple(labels) != fit.labels:
        raise ShapeError("design columns do not match the fit")
    y64 = _as_outcome(y, values.shape[0])
    p = _kernels.logistic(values @ fit.beta)
    cov = _spd_inverse(_hessian(values, p * (1.0 - p)), fit.labels)
    resid = y64 - p
    meat = _hessian(values, resid * resid)
    return cov @ meat @ cov


def odds_ratios(fit: LogitFit) -> tuple[np.ndarray, np.ndarray]:
    """Odds ratios exp(beta) with delta-method robust SEs (OR * se(beta))."""
    if not fit.converged:
        raise EstimationError("odds ratios require a converged fit")
    ratio = np.exp(fit.beta)
    return ratio, ratio * fit.se_robust


def predict_probabilities(fit: LogitFit, X) -> np.ndarray:
    """Predicted P(y=1) for each row of X under the fit."""
    values = _as_values(X)
    if values.shape[1] != fit.k:
        raise ShapeError("design width does not match the fit")
    labels = getattr(X, "labels", None)
    if labels is not None and tuple(labels) != fit.labels:
        raise ShapeError("design columns do not match the fit")
    return _kernels.logistic(values @ fit.beta)


def significance_stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


def fit_report(fit: LogitFit) -> dict:
    """Machine-readable fit summary."""
    ratio = np.exp(fit.beta)
    ratio_se = ratio * fit.se_robust
    return {
        "coef": [float(b) for b in fit.beta],
        "robust_se": [float(s) for s in fit.se_robust],
        "or": [float(r) for r in ratio],
        "or_se": [float(s) for s in ratio_se],
        "loglik": float(fit.log_lik),
        "n": int(fit.n),
        "converged": bool(fit.converged),
        "labels": list(fit.labels),
    }


def format_fit_text(fit: LogitFit, title: str | None = None) -> str:
    """Plain-text coefficient table with robust SEs and stars."""
    width = max(len(lab) for lab in fit.labels)
    width = max(width, len("term"))
    lines = []
    if title:
        lines.append(title)
    lines.append(
        f"n = {fit.n}   log-likelihood = {fit.log_lik:.6f}   "
        f"iterations = {fit.iterations}   converged = {fit.converged}"
    )
    header = (
        f"{'term':<{width}}  {'coef':>12}  {'robust se':>12}  "
        f"{'z':>9}  {'p':>8}  {'OR':>10}  {'OR se':>10}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    ratio = np.exp(fit.beta)
    ratio_se = ratio * fit.se_robust
    for j, lab in enumerate(fit.labels):
        p = float(fit.p_values[j])
        lines.append(
            f"{lab:<{width}}  {fit.beta[j]:>12.6f}  {fit.se_robust[j]:>12.6f}  "
            f"{fit.z_values[j]:>9.3f}  {p:>8.4f}  {ratio[j]:>10.6f}  "
            f"{ratio_se[j]:>10.6f} {significance_stars(p)}"
        )
    return "\n".join(lines)
