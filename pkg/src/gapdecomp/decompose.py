"""Group-gap decompositions.

`oaxaca_linear` splits the gap in mean outcomes with per-group linear
probability models.  `fairlie_decompose` is the nonlinear analogue for
the logit: per-variable contributions come from sequentially switching
covariate distributions along matched pairs, averaged over replications
with randomized switching order, with replication-dispersion standard
errors (an approximation, flagged in output).

Randomness: one master `numpy.random.SeedSequence(seed)` is spawned
into per-replication child streams feeding PCG64 generators, so results
are bit-identical for a given seed regardless of execution order or
thread count.  Within a replication the stream is consumed in a fixed
order: the subsample draw (only when group sizes differ), then the
ordering permutation (only when ordering is randomized).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .data import DesignMatrix
from .errors import (
    CollinearityError,
    ConfigError,
    DataError,
    EstimationError,
    ShapeError,
    UndefinedPercentageError,
)
from .logit import _smallest_pivot_columns, fit_logit, significance_stars

COEF_SOURCES = ("group1", "group2", "pooled")
ORDERINGS = ("fixed", "randomized")


@dataclass(eq=False)
class GroupSample:
    """One comparison group: label, dummy design and outcome vector."""

    label: str
    X: DesignMatrix
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y)
        if y.shape != (self.X.n,):
            raise ShapeError(
                f"group {self.label!r}: outcome length {y.shape} "
                f"does not match design rows {self.X.n}"
            )
        if not np.isin(y, (0, 1)).all():
            raise DataError(f"group {self.label!r}: outcome values must be 0 or 1")
        y = y.astype(np.float64)
        y.setflags(write=False)
        self.y = y

    @property
    def n(self) -> int:
        return self.X.n


def harmonize_groups(
    g1: GroupSample, g2: GroupSample
) -> tuple[GroupSample, GroupSample]:
    """Restrict both designs to their common columns (g1's order).

    Categories present in only one group (for example dropped as empty
    there) are removed from the other and recorded in its `dropped`.
    """
    if g1.X.columns == g2.X.columns:
        return g1, g2

    def _trim(sample: GroupSample, other: GroupSample) -> GroupSample:
        common = [
            j
            for j, col in enumerate(sample.X.columns)
            if col in set(other.X.columns)
        ]
        if len(common) == sample.X.k:
            reordered = sample.X
        else:
            extra = [
                (var, cat, f"not present in group {other.label!r}")
                for var, cat in sample.X.columns
                if (var, cat) not in set(other.X.columns)
            ]
            reordered = sample.X.select_columns(common, extra)
        return GroupSample(sample.label, reordered, sample.y)

    h1 = _trim(g1, g2)
    h2 = _trim(g2, g1)
    if h1.X.columns != h2.X.columns:
        # same column set, different order: realign group 2 to group 1
        pos = {col: j for j, col in enumerate(h2.X.columns)}
        h2 = GroupSample(
            h2.label, h2.X.select_columns([pos[c] for c in h1.X.columns]), h2.y
        )
    return h1, h2


def _check_harmonized(g1: GroupSample, g2: GroupSample):
    if g1.X.columns != g2.X.columns:
        raise ShapeError(
            "group designs are not harmonized; call harmonize_groups first"
        )


# -- linear decomposition --------------------------------------------------------


@dataclass(frozen=True)
class OaxacaResult:
    """Linear two-fold decomposition of the mean-outcome gap."""

    gap: float
    explained: float
    unexplained: float
    per_variable: dict[str, float]


def _ols(X: DesignMatrix, y: np.ndarray) -> np.ndarray:
    beta, _, rank, _ = np.linalg.lstsq(X.values, y, rcond=None)
    if rank < X.k:
        cols = _smallest_pivot_columns(X.values.T @ X.values, X.labels)
        raise CollinearityError(
            "singular linear-model design; smallest-pivot columns: "
            + ", ".join(cols),
            columns=cols,
        )
    return beta


def oaxaca_linear(g1: GroupSample, g2: GroupSample) -> OaxacaResult:
    """Two-fold Blinder–Oaxaca split using group 1's coefficients.

    explained = (mean(X1) - mean(X2)) @ b1, reported per variable;
    unexplained = mean(X2) @ (b1 - b2).  With intercept-bearing OLS the
    two terms add up to the raw gap exactly.
    """
    _check_harmonized(g1, g2)
    b1 = _ols(g1.X, g1.y)
    b2 = _ols(g2.X, g2.y)
    xbar1 = g1.X.column_means()
    xbar2 = g2.X.column_means()
    explained_cols = (xbar1 - xbar2) * b1
    per_variable: dict[str, float] = {}
    for var in g1.X.variable_names:
        cols = g1.X.variable_columns(var)
        per_variable[var] = float(explained_cols[cols].sum())
    return OaxacaResult(
        gap=float(g1.y.mean() - g2.y.mean()),
        explained=float(explained_cols.sum()),
        unexplained=float(xbar2 @ (b1 - b2)),
        per_variable=per_variable,
    )


# -- nonlinear (Fairlie) decomposition ---------------------------------------------


@dataclass(frozen=True)
class VariableContribution:
    """Average contribution of one variable to the explained gap."""

    variable: str
    coef: float
    se: float  # nan when replications == 1
    pct: float | None  # None when the gap is zero


@dataclass(eq=False)
class DecompositionResult:
    """Nonlinear decomposition output."""

    group1: str
    group2: str
    n1: int
    n2: int
    p1: float
    p2: float
    gap: float
    total_explained: float
    pct_explained: float | None
    contributions: tuple[VariableContribution, ...]
    replications: int
    seed: int
    ordering: str
    coef_source: str
    outcome_name: str = "outcome"

    def to_json_dict(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "p1": self.p1,
            "p2": self.p2,
            "gap": self.gap,
            "explained": self.total_explained,
            "pct_explained": self.pct_explained,
            "replications": self.replications,
            "seed": self.seed,
            "contributions": [
                {
                    "variable": c.variable,
                    "coef": c.coef,
                    "se": None if math.isnan(c.se) else c.se,
                    "pct": c.pct,
                }
                for c in self.contributions
            ],
        }


def _resolve_threads(threads: int | None, replications: int) -> int:
    if threads is None:
        raw = os.environ.get("GAPDECOMP_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(
                f"GAPDECOMP_THREADS must be an integer, got {raw!r}"
            ) from None
    if threads < 1:
        raise ConfigError("thread count must be at least 1")
    return min(threads, replications)


def _validate_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigError("seed must be a non-negative integer")
    if seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    return int(seed)


def fairlie_decompose(
    g1: GroupSample,
    g2: GroupSample,
    *,
    replications: int = 100,
    seed: int,
    coef_source: str = "group1",
    ordering: str = "randomized",
    threads: int | None = None,
) -> DecompositionResult:
    """Nonlinear decomposition of the gap in mean predicted probability.

    gap = mean(y1) - mean(y2).  total_explained evaluates the logistic
    mean difference on the full samples under one coefficient vector
    (from `coef_source`).  Per-variable contributions switch covariate
    distributions one variable at a time along rank-matched pairs
    (pairing by predicted probability); when group sizes differ, each
    replication first draws a uniform subsample of the larger group of
    the smaller group's size.  Contributions are averaged over
    `replications`; each variable's se is the replication standard
    deviation / sqrt(R).
    """
    _check_harmonized(g1, g2)
    if replications < 1:
        raise ConfigError("replications must be at least 1")
    if coef_source not in COEF_SOURCES:
        raise ConfigError(f"coef_source must be one of {COEF_SOURCES}")
    if ordering not in ORDERINGS:
        raise ConfigError(f"ordering must be one of {ORDERINGS}")
    seed = _validate_seed(seed)
    workers = _resolve_threads(threads, replications)

    if coef_source == "group1":
        fit = fit_logit(g1.X, g1.y)
    elif coef_source == "group2":
        fit = fit_logit(g2.X, g2.y)
    else:
        stacked = np.vstack([g1.X.values, g2.X.values])
        fit = fit_logit(stacked, np.concatenate([g1.y, g2.y]))
    if not fit.converged:
        raise EstimationError(
            f"coefficient fit ({coef_source}) did not converge"
        )
    beta = fit.beta

    v1, v2 = g1.X.values, g2.X.values
    eta1 = v1 @ beta
    eta2 = v2 @ beta
    p1 = float(g1.y.mean())
    p2 = float(g2.y.mean())
    gap = p1 - p2
    total_explained = float(
        _kernels.logistic(eta1).mean() - _kernels.logistic(eta2).mean()
    )

    variables = g1.X.variable_names
    col_idx = [g1.X.variable_columns(var) for var in variables]
    n1, n2, m = g1.n, g2.n, min(g1.n, g2.n)
    n_vars = len(variables)
    identity = np.arange(n_vars)

    def one_replication(child: np.random.SeedSequence) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(child))
        idx1 = rng.choice(n1, size=m, replace=False) if n1 > m else np.arange(n1)
        idx2 = rng.choice(n2, size=m, replace=False) if n2 > m else np.arange(n2)
        order = rng.permutation(n_vars) if ordering == "randomized" else identity
        s1 = idx1[np.argsort(eta1[idx1], kind="stable")]
        s2 = idx2[np.argsort(eta2[idx2], kind="stable")]
        deltas = np.empty((m, n_vars))
        for j, cols in enumerate(col_idx):
            deltas[:, j] = (
                v2[np.ix_(s2, cols)] @ beta[cols]
                - v1[np.ix_(s1, cols)] @ beta[cols]
            )
        means = _kernels.path_means(eta1[s1], deltas, order)
        contrib = np.empty(n_vars)
        for t, j in enumerate(order):
            contrib[j] = means[t] - means[t + 1]
        return contrib

    children = np.random.SeedSequence(seed).spawn(replications)
    draws = np.empty((replications, n_vars))
    if workers <= 1:
        for r, child in enumerate(children):
            draws[r] = one_replication(child)
    else:
        # map() preserves submission order, so aggregation is by
        # replication index and independent of scheduling
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, contrib in enumerate(pool.map(one_replication, children)):
                draws[r] = contrib

    coefs = draws.mean(axis=0)
    if replications > 1:
        ses = draws.std(axis=0, ddof=1) / math.sqrt(replications)
    else:
        ses = np.full(n_vars, math.nan)
    contributions = tuple(
        VariableContribution(
            variable=var,
            coef=float(coefs[j]),
            se=float(ses[j]),
            pct=(100.0 * float(coefs[j]) / gap) if gap != 0.0 else None,
        )
        for j, var in enumerate(variables)
    )
    return DecompositionResult(
        group1=g1.label,
        group2=g2.label,
        n1=n1,
        n2=n2,
        p1=p1,
        p2=p2,
        gap=gap,
        total_explained=total_explained,
        pct_explained=(100.0 * total_explained / gap) if gap != 0.0 else None,
        contributions=contributions,
        replications=replications,
        seed=seed,
        ordering=ordering,
        coef_source=coef_source,
    )


def percentage_contributions(contribs, gap: float):
    """Per-variable percentages 100*coef/gap; zero gap is an error."""
    if gap == 0.0:
        raise UndefinedPercentageError(
            "percentage contributions are undefined for a zero gap"
        )
    if isinstance(contribs, Mapping):
        return {k: 100.0 * float(v) / gap for k, v in contribs.items()}
    values = np.asarray(contribs, dtype=np.float64)
    return 100.0 * values / gap


# -- reporting -------------------------------------------------------------------


def _fmt_pct(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def _contribution_stars(coef: float, se: float) -> str:
    if math.isnan(se):
        return ""
    if se == 0.0:
        return "***" if coef != 0.0 else ""
    z = coef / se
    return significance_stars(math.erfc(abs(z) / math.sqrt(2.0)))


def decomposition_report(result: DecompositionResult) -> str:
    """Text report: summary block then per-variable contribution table."""
    g1, g2 = result.group1, result.group2
    out = result.outcome_name
    label_width = max(
        len(f"Pr({out} != 0 | G = {g})") for g in (g1, g2)
    )
    label_width = max(label_width, len("Number of observations"))

    def row(label: str, value: str) -> str:
        return f"{label:<{label_width}}  {value:>14}"

    lines = [
        f"Nonlinear decomposition of the {out} gap ({g1} - {g2})",
        (
            f"coefficients: {result.coef_source}; ordering: {result.ordering}; "
            f"replications: {result.replications}; seed: {result.seed}"
        ),
        "standard errors are replication-dispersion approximations",
        "",
        row("Number of observations", str(result.n1 + result.n2)),
        row(f"No. of observations - {g1}", str(result.n1)),
        row(f"No. of observations - {g2}", str(result.n2)),
        row(f"Pr({out} != 0 | G = {g1})", f"{result.p1:.7f}"),
        row(f"Pr({out} != 0 | G = {g2})", f"{result.p2:.7f}"),
        row("Difference", f"{result.gap:.7f}"),
        row("Total explained", f"{result.total_explained:.7f}"),
        row("% explained", _fmt_pct(result.pct_explained)),
        "",
    ]
    var_width = max(
        [len("variable")] + [len(c.variable) for c in result.contributions]
    )
    header = (
        f"{'variable':<{var_width}}  {'coef':>12}  {'se':>12}  "
        f"{'% contribution':>14}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for c in result.contributions:
        se_text = "—" if math.isnan(c.se) else f"{c.se:.7f}"
        lines.append(
            f"{c.variable:<{var_width}}  {c.coef:>12.7f}  {se_text:>12}  "
            f"{_fmt_pct(c.pct):>14} {_contribution_stars(c.coef, c.se)}".rstrip()
        )
    return "\n".join(lines) + "\n"


def oaxaca_report(result: OaxacaResult) -> str:
    """Text block for the linear decomposition."""
    lines = [
        "Linear (Blinder-Oaxaca) decomposition",
        f"gap         {result.gap:>12.7f}",
        f"explained   {result.explained:>12.7f}",
        f"unexplained {result.unexplained:>12.7f}",
        "",
        "per-variable explained:",
    ]
    width = max(len(v) for v in result.per_variable) if result.per_variable else 8
    for var, value in result.per_variable.items():
        lines.append(f"  {var:<{width}}  {value:>12.7f}")
    return "\n".join(lines) + "\n"
