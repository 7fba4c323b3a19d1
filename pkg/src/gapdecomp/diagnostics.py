"""Fit diagnostics: VIF, link test, ROC curve and AUC."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    CollinearityWarning,
    DataError,
    DiagnosticError,
    EstimationError,
    ShapeError,
)
from .logit import LogitFit, _as_values, fit_logit

#: R-squared at or above this is reported as an infinite VIF
R2_CEILING = 1.0 - 1e-12


def vif_from_correlation(corr: np.ndarray) -> np.ndarray:
    """Per-column VIFs 1/(1-R^2_j) from a correlation matrix.

    Columns whose R^2 against the others reaches 1 - 1e-12 come back as
    +inf.  Singular matrices are handled (least-squares projection), so
    this never raises for valid correlation input.
    """
    corr = np.asarray(corr, dtype=np.float64)
    k = corr.shape[0]
    if corr.shape != (k, k):
        raise ShapeError("correlation matrix must be square")
    if k == 1:
        return np.ones(1)
    out = np.empty(k)
    idx = np.arange(k)
    for j in range(k):
        others = idx != j
        sub = corr[np.ix_(others, others)]
        r = corr[others, j]
        coef, *_ = np.linalg.lstsq(sub, r, rcond=None)
        r2 = min(float(r @ coef), 1.0)
        out[j] = np.inf if r2 >= R2_CEILING else 1.0 / (1.0 - r2)
    return out


@dataclass(frozen=True)
class VifResult:
    """VIF per non-intercept column plus the mean."""

    labels: tuple[str, ...]
    values: np.ndarray
    mean: float

    @property
    def max(self) -> float:
        return float(np.max(self.values))

    @property
    def has_infinite(self) -> bool:
        return bool(np.isinf(self.values).any())


def vif(X) -> VifResult:
    """Variance inflation factors for the non-intercept design columns.

    Computed from the correlation matrix of the columns, which makes the
    result invariant to rescaling any column by a positive constant.  A
    perfectly collinear column yields +inf and a collinearity warning
    instead of an exception.
    """
    values = _as_values(X)
    labels = list(getattr(X, "labels", (f"x{j}" for j in range(values.shape[1]))))
    if values.shape[1] > 0 and (values[:, 0] == 1.0).all():
        values = values[:, 1:]
        labels = labels[1:]
    if values.shape[1] == 0:
        raise ShapeError("no non-intercept columns to diagnose")

    centered = values - values.mean(axis=0)
    sd = np.sqrt((centered * centered).sum(axis=0))
    live = sd > 0.0
    out = np.full(values.shape[1], np.inf)
    if live.any():
        sub = centered[:, live]
        scatter = sub.T @ sub
        denom = np.outer(sd[live], sd[live])
        out[live] = vif_from_correlation(scatter / denom)
    if np.isinf(out).any():
        flagged = [lab for lab, v in zip(labels, out) if np.isinf(v)]
        warnings.warn(
            f"perfectly collinear design columns: {', '.join(flagged)}",
            CollinearityWarning,
            stacklevel=2,
        )
    return VifResult(tuple(labels), out, float(np.mean(out)))


@dataclass(frozen=True)
class LinkTestResult:
    """Auxiliary regression of the outcome on the fitted linear predictor
    and its square."""

    coef_hat: float
    coef_hatsq: float
    p_hat: float
    p_hatsq: float
    well_specified: bool


def link_test(fit: LogitFit, X, y) -> LinkTestResult:
    """Specification check via y ~ logit(intercept, h, h^2), h = X @ beta.

    The model counts as well specified when the linear term is clearly
    needed (p < 0.01) and the squared term clearly is not (p > 0.10);
    p-values are two-sided from robust SEs.
    """
    if not fit.converged:
        raise EstimationError("link test requires a converged fit")
    values = _as_values(X)
    if values.shape[1] != fit.k:
        raise ShapeError("design width does not match the fit")
    h = values @ fit.beta
    if np.ptp(h) == 0.0:
        raise DiagnosticError("linear predictor is constant; link test undefined")
    aux_design = np.column_stack([np.ones_like(h), h, h * h])
    try:
        aux = fit_logit(aux_design, y)
    except EstimationError as exc:
        raise DiagnosticError(f"auxiliary regression failed: {exc}") from exc
    if not aux.converged:
        raise DiagnosticError("auxiliary regression did not converge")
    p_hat = float(aux.p_values[1])
    p_hatsq = float(aux.p_values[2])
    return LinkTestResult(
        coef_hat=float(aux.beta[1]),
        coef_hatsq=float(aux.beta[2]),
        p_hat=p_hat,
        p_hatsq=p_hatsq,
        well_specified=(p_hat < 0.01) and (p_hatsq > 0.10),
    )


def roc_curve(y, scores) -> np.ndarray:
    """ROC points (fpr, tpr) at every distinct score threshold.

    Thresholds descend; tied scores fall into one group.  The first
    point is (0, 0) and the last (1, 1).  Needs both classes present.
    """
    y = np.asarray(y)
    scores = np.asarray(scores, dtype=np.float64)
    if y.ndim != 1 or y.shape != scores.shape:
        raise ShapeError("y and scores must be equal-length vectors")
    if not np.isin(y, (0, 1)).all():
        raise DataError("outcome values must be 0 or 1")
    if not np.isfinite(scores).all():
        raise DataError("scores must be finite")
    positives = int(y.sum())
    negatives = y.shape[0] - positives
    if positives == 0 or negatives == 0:
        raise DiagnosticError("ROC needs both outcome classes present")

    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_y = y[order].astype(np.float64)
    ends = np.append(np.nonzero(np.diff(sorted_scores))[0], y.shape[0] - 1)
    tp = np.cumsum(sorted_y)[ends]
    fp = (ends + 1.0) - tp
    points = np.column_stack([fp / negatives, tp / positives])
    return np.vstack([[0.0, 0.0], points])


def auc(points) -> float:
    """Area under a piecewise-linear ROC curve (trapezoid rule)."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
        raise ShapeError("ROC points must be an m x 2 array with m >= 2")
    x = points[:, 0]
    if (np.diff(x) < 0.0).any():
        raise DataError("ROC x-coordinates must be non-decreasing")
    return float(np.trapezoid(points[:, 1], x))


def roc_csv(points) -> str:
    """Two-column CSV (fpr, tpr) of ROC points."""
    points = np.asarray(points, dtype=np.float64)
    lines = ["fpr,tpr"]
    for fpr, tpr in points:
        lines.append(f"{float(fpr)!r},{float(tpr)!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DiagnosticsReport:
    """VIF, link test, ROC points and AUC for one fitted model."""

    vif: VifResult
    link: LinkTestResult
    roc_points: np.ndarray
    auc: float

    def to_json_dict(self) -> dict:
        def _num(v: float):
            return "inf" if np.isinf(v) else float(v)

        return {
            "vif": {
                "labels": list(self.vif.labels),
                "values": [_num(v) for v in self.vif.values],
                "mean": _num(self.vif.mean),
            },
            "link_test": {
                "coef_hat": self.link.coef_hat,
                "coef_hatsq": self.link.coef_hatsq,
                "p_hat": self.link.p_hat,
                "p_hatsq": self.link.p_hatsq,
                "well_specified": self.link.well_specified,
            },
            "auc": float(self.auc),
            "roc": [[float(a), float(b)] for a, b in self.roc_points],
        }


def run_diagnostics(fit: LogitFit, X, y) -> DiagnosticsReport:
    """VIF + link test + ROC/AUC in one pass."""
    from .logit import predict_probabilities

    scores = predict_probabilities(fit, X)
    points = roc_curve(y, scores)
    return DiagnosticsReport(
        vif=vif(X),
        link=link_test(fit, X, y),
        roc_points=points,
        auc=auc(points),
    )
