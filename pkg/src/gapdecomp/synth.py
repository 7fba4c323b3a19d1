"""Synthetic microdata generation and brute-force reference routines.

The data-generating process draws categorical covariates per group from
group-specific marginals and the outcome from Bernoulli(F(x'beta)) with
one shared coefficient map.  Generation is a pure function of
(dgp, seed): a master `SeedSequence(seed)` is spawned into one child
stream per group, and within a group the stream draws each variable's
codes in declaration order, then the outcome uniforms.

`brute_force_logit` (derivative-free pattern search on a plain-Python
likelihood) and `exact_fairlie_small` (direct summation over matched
pairs, plain Python) deliberately share no code with the estimators
they check.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .data import CategoricalVariable, MicrodataTable, encode_design
from .decompose import GroupSample, harmonize_groups
from .errors import ConfigError, OracleError, ShapeError

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class DgpVariable:
    """One synthetic categorical variable with per-group marginals."""

    name: str
    categories: tuple[str, ...]
    p1: tuple[float, ...]
    p2: tuple[float, ...]

    def __post_init__(self):
        categories = tuple(str(c) for c in self.categories)
        object.__setattr__(self, "categories", categories)
        if len(categories) < 2 or len(set(categories)) != len(categories):
            raise ConfigError(
                f"dgp variable {self.name!r} needs >= 2 distinct categories"
            )
        for attr in ("p1", "p2"):
            probs = tuple(float(p) for p in getattr(self, attr))
            object.__setattr__(self, attr, probs)
            if len(probs) != len(categories):
                raise ConfigError(
                    f"dgp variable {self.name!r}: {attr} length mismatch"
                )
            if any(p < 0.0 for p in probs):
                raise ConfigError(
                    f"dgp variable {self.name!r}: negative probability in {attr}"
                )
            if abs(math.fsum(probs) - 1.0) > _PROB_TOL:
                raise ConfigError(
                    f"dgp variable {self.name!r}: {attr} must sum to 1"
                )


@dataclass(frozen=True)
class DataGeneratingProcess:
    """Ground truth for synthetic two-group microdata."""

    outcome_name: str
    group_name: str
    group_labels: tuple[str, str]
    variables: tuple[DgpVariable, ...]
    intercept: float
    beta: Mapping[str, Mapping[str, float]]
    n1: int
    n2: int
    seed: int | None = None

    def __post_init__(self):
        labels = tuple(str(g) for g in self.group_labels)
        object.__setattr__(self, "group_labels", labels)
        if len(labels) != 2 or labels[0] == labels[1]:
            raise ConfigError("dgp needs exactly two distinct group labels")
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if not variables:
            raise ConfigError("dgp needs at least one variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ConfigError("dgp variable names must be unique")
        if self.group_name in names or self.group_name == self.outcome_name:
            raise ConfigError("dgp group name collides with another column")
        if self.n1 < 1 or self.n2 < 1:
            raise ConfigError("group sizes must be at least 1")
        if not math.isfinite(self.intercept):
            raise ConfigError("intercept must be finite")
        by_name = {v.name: v for v in variables}
        beta: dict[str, dict[str, float]] = {}
        for var_name, entries in dict(self.beta).items():
            if var_name not in by_name:
                raise ConfigError(f"beta references unknown variable {var_name!r}")
            beta[var_name] = {}
            for cat, value in dict(entries).items():
                if cat not in by_name[var_name].categories:
                    raise ConfigError(
                        f"beta references unknown category {var_name!r}/{cat!r}"
                    )
                value = float(value)
                if not math.isfinite(value):
                    raise ConfigError("beta values must be finite")
                beta[var_name][cat] = value
        object.__setattr__(self, "beta", beta)

    # -- derived views ---------------------------------------------------------

    def beta_vector(self, var: DgpVariable) -> np.ndarray:
        entries = self.beta.get(var.name, {})
        return np.array([entries.get(cat, 0.0) for cat in var.categories])

    def base_map(self) -> dict[str, str]:
        """Default base per variable: first category without a beta entry,
        falling back to the first category."""
        out = {}
        for var in self.variables:
            entries = self.beta.get(var.name, {})
            free = [c for c in var.categories if c not in entries]
            out[var.name] = free[0] if free else var.categories[0]
        return out

    def true_coefficients(self, design) -> np.ndarray:
        """True identified coefficients for a dummy design built from this
        dgp (intercept absorbs the base-category effects)."""
        by_name = {v.name: v for v in self.variables}
        intercept = self.intercept
        for var_name, base in design.base_map.items():
            intercept += self.beta.get(var_name, {}).get(base, 0.0)
        out = [intercept]
        for var_name, cat in design.columns[1:]:
            if var_name not in by_name:
                raise ConfigError(f"design variable {var_name!r} not in dgp")
            base = design.base_map[var_name]
            entries = self.beta.get(var_name, {})
            out.append(entries.get(cat, 0.0) - entries.get(base, 0.0))
        return np.array(out)

    def to_json_dict(self) -> dict:
        return {
            "outcome": self.outcome_name,
            "group": self.group_name,
            "group_labels": list(self.group_labels),
            "n1": self.n1,
            "n2": self.n2,
            "seed": self.seed,
            "intercept": self.intercept,
            "variables": [
                {
                    "name": v.name,
                    "categories": list(v.categories),
                    "p1": list(v.p1),
                    "p2": list(v.p2),
                }
                for v in self.variables
            ],
            "beta": {k: dict(v) for k, v in self.beta.items()},
        }

    def sha256(self) -> str:
        canon = json.dumps(
            self.to_json_dict(), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def dgp_from_dict(raw: Mapping) -> DataGeneratingProcess:
    if not isinstance(raw, Mapping):
        raise ConfigError("dgp file must hold a JSON object")
    required = {
        "outcome",
        "group",
        "group_labels",
        "n1",
        "n2",
        "intercept",
        "variables",
        "beta",
    }
    missing = required - set(raw)
    if missing:
        raise ConfigError(f"dgp is missing keys: {sorted(missing)}")
    unknown = set(raw) - required - {"seed"}
    if unknown:
        raise ConfigError(f"unknown dgp keys: {sorted(unknown)}")
    variables = []
    for entry in raw["variables"]:
        extra = set(entry) - {"name", "categories", "p1", "p2"}
        if extra:
            raise ConfigError(f"unknown dgp variable keys: {sorted(extra)}")
        try:
            variables.append(
                DgpVariable(
                    str(entry["name"]),
                    tuple(entry["categories"]),
                    tuple(entry["p1"]),
                    tuple(entry["p2"]),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"dgp variable is missing {exc}") from None
    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError("dgp seed must be an integer or null")
    for size_key in ("n1", "n2"):
        if isinstance(raw[size_key], bool) or not isinstance(raw[size_key], int):
            raise ConfigError(f"dgp {size_key} must be an integer")
    return DataGeneratingProcess(
        outcome_name=str(raw["outcome"]),
        group_name=str(raw["group"]),
        group_labels=tuple(raw["group_labels"]),
        variables=tuple(variables),
        intercept=float(raw["intercept"]),
        beta=raw["beta"],
        n1=raw["n1"],
        n2=raw["n2"],
        seed=seed,
    )


def load_dgp(path) -> DataGeneratingProcess:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read dgp file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"dgp file is not valid JSON: {exc}") from exc
    return dgp_from_dict(raw)


def load_preset(name: str = "health_survey") -> DataGeneratingProcess:
    """Load a dgp preset shipped with the package."""
    ref = resources.files("gapdecomp").joinpath(f"presets/{name}.json")
    try:
        raw = json.loads(ref.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"no preset named {name!r}") from None
    return dgp_from_dict(raw)


# -- generation ------------------------------------------------------------------


def generate_table(
    dgp: DataGeneratingProcess, seed: int | None = None
) -> MicrodataTable:
    """Draw a pooled table (group column included) from the dgp.

    `seed` overrides the dgp's own seed; one of the two must be set.
    """
    if seed is None:
        seed = dgp.seed
    if seed is None:
        raise ConfigError("generation needs a seed (dgp seed or explicit)")
    streams = np.random.SeedSequence(seed).spawn(2)
    sizes = (dgp.n1, dgp.n2)
    betas = [dgp.beta_vector(v) for v in dgp.variables]

    outcome_parts = []
    code_parts: list[list[np.ndarray]] = []
    for g in range(2):
        rng = np.random.Generator(np.random.PCG64(streams[g]))
        n = sizes[g]
        codes = []
        eta = np.full(n, dgp.intercept)
        for v, var in enumerate(dgp.variables):
            probs = var.p1 if g == 0 else var.p2
            drawn = rng.choice(len(var.categories), size=n, p=probs)
            codes.append(drawn.astype(np.int32))
            eta += betas[v][drawn]
        outcome_parts.append(
            (rng.random(n) < _kernels.logistic(eta)).astype(np.uint8)
        )
        code_parts.append(codes)

    variables = [
        CategoricalVariable(v.name, v.categories) for v in dgp.variables
    ] + [CategoricalVariable(dgp.group_name, dgp.group_labels)]
    codes = {
        var.name: np.concatenate([code_parts[0][j], code_parts[1][j]])
        for j, var in enumerate(dgp.variables)
    }
    codes[dgp.group_name] = np.concatenate(
        [np.zeros(dgp.n1, dtype=np.int32), np.ones(dgp.n2, dtype=np.int32)]
    )
    return MicrodataTable(
        dgp.outcome_name,
        variables,
        np.concatenate(outcome_parts),
        codes,
        group_name=dgp.group_name,
    )


def generate_microdata(
    dgp: DataGeneratingProcess, seed: int | None = None
) -> tuple[GroupSample, GroupSample]:
    """Draw the two encoded, harmonized group samples from the dgp."""
    table = generate_table(dgp, seed)
    groups = table.split_by_group()
    base = dgp.base_map()
    samples = []
    for label in dgp.group_labels:
        sub = groups[label]
        samples.append(GroupSample(label, encode_design(sub, base), sub.outcome))
    return harmonize_groups(samples[0], samples[1])


# -- brute-force oracles -----------------------------------------------------------


def _softplus(t: float) -> float:
    if t >= 0.0:
        return t + math.log1p(math.exp(-t))
    return math.log1p(math.exp(t))


def _logistic_scalar(t: float) -> float:
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def brute_force_logit(
    X,
    y,
    *,
    step0: float = 0.5,
    resolution: float = 1e-5,
    max_evals: int = 500_000,
) -> np.ndarray:
    """Maximize the logit likelihood by coordinate pattern search.

    Plain-Python likelihood, no gradients: from beta = 0, poll +/- step
    moves along each coordinate, accept improvements, halve the step
    when a full sweep stalls, stop below `resolution`.  Only meant for
    tiny instances (at most 3 columns, 200 rows).
    """
    values = np.asarray(getattr(X, "values", X), dtype=np.float64)
    if values.ndim != 2:
        raise ShapeError("design must be 2-d")
    n, k = values.shape
    if k > 3 or n > 200:
        raise ConfigError("brute force supports at most 3 columns and 200 rows")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n,):
        raise ShapeError("outcome length does not match design")
    rows = [tuple(row) for row in values.tolist()]
    ys = [float(v) for v in y.tolist()]
    if resolution <= 0.0 or step0 <= resolution:
        raise ConfigError("need step0 > resolution > 0")

    def loglik(beta: list[float]) -> float:
        total = 0.0
        for row, yi in zip(rows, ys):
            eta = 0.0
            for v, b in zip(row, beta):
                eta += v * b
            total += yi * eta - _softplus(eta)
        return total

    beta = [0.0] * k
    best = loglik(beta)
    evals = 1
    step = step0
    while step >= resolution:
        improved = True
        while improved:
            improved = False
            for j in range(k):
                for delta in (step, -step):
                    if evals >= max_evals:
                        raise OracleError(
                            f"pattern search exceeded {max_evals} evaluations"
                        )
                    cand = list(beta)
                    cand[j] += delta
                    f = loglik(cand)
                    evals += 1
                    if f > best:
                        beta, best = cand, f
                        improved = True
                        break
        step *= 0.5
    return np.array(beta)


def exact_fairlie_small(
    g1: GroupSample,
    g2: GroupSample,
    beta,
    ordering: Sequence[str],
) -> dict[str, float]:
    """Sequential-switch contributions by direct summation (equal N <= 20).

    Matches groups by sorting each on its predicted probability and
    pairing by rank, then switches each variable's dummy block in the
    given fixed order, recording the drop in mean F after each switch.
    Deliberately plain Python, independent of the production path.
    """
    if g1.X.columns != g2.X.columns:
        raise ShapeError("group designs must be harmonized")
    if g1.n != g2.n:
        raise ConfigError("exact oracle requires equal group sizes")
    if g1.n > 20:
        raise ConfigError("exact oracle supports at most 20 rows per group")
    names = list(g1.X.variable_names)
    if sorted(ordering) != sorted(names):
        raise ConfigError("ordering must be a permutation of the variables")
    beta = [float(b) for b in np.asarray(beta, dtype=np.float64)]
    if len(beta) != g1.X.k:
        raise ShapeError("beta length does not match design width")

    rows1 = [list(r) for r in g1.X.values.tolist()]
    rows2 = [list(r) for r in g2.X.values.tolist()]

    def eta(row: list[float]) -> float:
        total = 0.0
        for v, b in zip(row, beta):
            total += v * b
        return total

    order1 = sorted(range(len(rows1)), key=lambda i: eta(rows1[i]))
    order2 = sorted(range(len(rows2)), key=lambda i: eta(rows2[i]))
    current = [list(rows1[i]) for i in order1]
    partner = [rows2[i] for i in order2]

    def mean_f() -> float:
        return math.fsum(_logistic_scalar(eta(r)) for r in current) / len(current)

    contributions: dict[str, float] = {}
    previous = mean_f()
    for var in ordering:
        cols = [j for j, (v, _) in enumerate(g1.X.columns) if v == var]
        for row, src in zip(current, partner):
            for j in cols:
                row[j] = src[j]
        after = mean_f()
        contributions[var] = previous - after
        previous = after
    return contributions
