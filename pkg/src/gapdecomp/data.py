"""Categorical microdata handling.

A `MicrodataTable` stores a binary outcome plus categorical variables
column-wise as integer category codes; tables are immutable after
construction.  `encode_design` turns a table into a dummy-coded
`DesignMatrix` with a leading intercept, `select_base_categories`
chooses base categories by mean-VIF, and `detect_perfect_predictors`
flags categories whose rows all share one outcome value.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ConfigError,
    DataError,
    DegeneracyError,
    ParseError,
    SchemaError,
    ShapeError,
)

#: outcome spellings treated as missing (row dropped and counted)
MISSING_OUTCOME = ("", "NA")

#: column-label pair reserved for the intercept column
INTERCEPT = ("intercept", "")


@dataclass(frozen=True)
class CategoricalVariable:
    """A named categorical variable with an ordered category list."""

    name: str
    categories: tuple[str, ...]
    base: str | None = None

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise ConfigError("variable name must be a non-empty string")
        if self.name == INTERCEPT[0]:
            raise ConfigError(f"variable name {self.name!r} is reserved")
        cats = tuple(str(c) for c in self.categories)
        object.__setattr__(self, "categories", cats)
        if len(cats) < 2:
            raise DegeneracyError(
                f"variable {self.name!r} needs at least two categories"
            )
        if len(set(cats)) != len(cats):
            raise ConfigError(f"variable {self.name!r} has duplicate categories")
        if any(c == "" for c in cats):
            raise ConfigError(f"variable {self.name!r} has an empty category label")
        if self.base is not None and self.base not in cats:
            raise ConfigError(
                f"base {self.base!r} is not a category of {self.name!r}"
            )

    def index_of(self, category: str) -> int:
        try:
            return self.categories.index(category)
        except ValueError:
            raise ConfigError(
                f"{category!r} is not a category of {self.name!r}"
            ) from None


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class MicrodataTable:
    """Immutable column store: 0/1 outcome plus coded categorical columns."""

    __slots__ = (
        "outcome_name",
        "variables",
        "group_name",
        "dropped_missing_outcome",
        "_outcome",
        "_codes",
    )

    def __init__(
        self,
        outcome_name: str,
        variables: Sequence[CategoricalVariable],
        outcome,
        codes: Mapping[str, Iterable[int]],
        group_name: str | None = None,
        dropped_missing_outcome: int = 0,
    ):
        if not outcome_name:
            raise ConfigError("outcome name must be non-empty")
        self.outcome_name = outcome_name
        self.variables = tuple(variables)
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate variable names")
        if not names:
            raise ConfigError("a table needs at least one variable")
        if outcome_name in names:
            raise ConfigError("outcome collides with a variable name")
        if group_name is not None and group_name not in names:
            raise ConfigError(f"group variable {group_name!r} not in table")
        self.group_name = group_name
        self.dropped_missing_outcome = int(dropped_missing_outcome)

        y = np.asarray(outcome)
        if y.ndim != 1 or y.shape[0] == 0:
            raise DataError("outcome must be a non-empty vector")
        if not np.isin(y, (0, 1)).all():
            raise DataError("outcome values must be 0 or 1")
        self._outcome = _frozen(y.astype(np.uint8))

        n = y.shape[0]
        coded: dict[str, np.ndarray] = {}
        for var in self.variables:
            try:
                col = np.asarray(codes[var.name])
            except KeyError:
                raise ShapeError(f"missing codes for variable {var.name!r}") from None
            if col.shape != (n,):
                raise ShapeError(
                    f"codes for {var.name!r} have length {col.shape}, expected {n}"
                )
            col = col.astype(np.int32)
            if col.min() < 0 or col.max() >= len(var.categories):
                raise DataError(f"codes for {var.name!r} out of range")
            coded[var.name] = _frozen(col)
        self._codes = coded

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_columns(
        cls,
        outcome_name: str,
        outcome,
        columns: Mapping[str, Sequence[str]],
        group_name: str | None = None,
        variables: Sequence[CategoricalVariable] | None = None,
        dropped_missing_outcome: int = 0,
    ) -> "MicrodataTable":
        """Build a table from per-variable label sequences.

        Without explicit `variables`, categories are inferred in first
        appearance order per column.
        """
        if variables is None:
            inferred = []
            codes = {}
            for name, labels in columns.items():
                seen: dict[str, int] = {}
                col = []
                for lab in labels:
                    lab = str(lab)
                    col.append(seen.setdefault(lab, len(seen)))
                if len(seen) < 2:
                    raise DegeneracyError(
                        f"variable {name!r} needs at least two categories"
                    )
                inferred.append(CategoricalVariable(name, tuple(seen)))
                codes[name] = col
            variables = inferred
        else:
            by_name = {v.name: v for v in variables}
            if set(by_name) != set(columns):
                raise ShapeError("variables and columns do not match")
            codes = {
                name: [by_name[name].index_of(str(lab)) for lab in labels]
                for name, labels in columns.items()
            }
        return cls(
            outcome_name,
            variables,
            outcome,
            codes,
            group_name=group_name,
            dropped_missing_outcome=dropped_missing_outcome,
        )

    # -- basic access ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self._outcome.shape[0]

    @property
    def outcome(self) -> np.ndarray:
        return self._outcome

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def variable(self, name: str) -> CategoricalVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ConfigError(f"unknown variable {name!r}")

    def codes(self, name: str) -> np.ndarray:
        self.variable(name)
        return self._codes[name]

    def labels(self, name: str) -> np.ndarray:
        var = self.variable(name)
        return np.array(var.categories, dtype=object)[self._codes[name]]

    def counts(self, name: str) -> np.ndarray:
        var = self.variable(name)
        return np.bincount(self._codes[name], minlength=len(var.categories))

    # -- derived tables ---------------------------------------------------------

    def subset(self, mask) -> "MicrodataTable":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.n,):
            raise ShapeError("mask length does not match table")
        if not mask.any():
            raise DataError("subset would be empty")
        return MicrodataTable(
            self.outcome_name,
            self.variables,
            self._outcome[mask],
            {name: col[mask] for name, col in self._codes.items()},
            group_name=self.group_name,
        )

    def drop_variable(self, name: str) -> "MicrodataTable":
        self.variable(name)
        keep = [v for v in self.variables if v.name != name]
        if not keep:
            raise ConfigError("cannot drop the only variable")
        return MicrodataTable(
            self.outcome_name,
            keep,
            self._outcome,
            {v.name: self._codes[v.name] for v in keep},
            group_name=self.group_name if self.group_name != name else None,
        )

    def split_by_group(self) -> dict[str, "MicrodataTable"]:
        """Split into one table per observed group label.

        The group variable itself is removed from the children.
        """
        if self.group_name is None:
            raise ConfigError("table has no group variable")
        var = self.variable(self.group_name)
        codes = self._codes[self.group_name]
        out: dict[str, MicrodataTable] = {}
        for idx, label in enumerate(var.categories):
            mask = codes == idx
            if mask.any():
                out[label] = self.subset(mask).drop_variable(self.group_name)
        return out


# -- schema and CSV loading -----------------------------------------------------


@dataclass(frozen=True)
class Schema:
    """Names the outcome column, variable columns and optional group column."""

    outcome: str
    variables: tuple[str, ...]
    group: str | None = None

    def __post_init__(self):
        if not self.outcome or not isinstance(self.outcome, str):
            raise SchemaError("schema outcome must be a non-empty string")
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if not variables:
            raise SchemaError("schema needs at least one variable")
        if len(set(variables)) != len(variables):
            raise SchemaError("schema lists a variable twice")
        if self.outcome in variables:
            raise SchemaError("outcome cannot also be a variable")
        if self.group is not None:
            if not isinstance(self.group, str) or not self.group:
                raise SchemaError("schema group must be a non-empty string or null")
            if self.group == self.outcome:
                raise SchemaError("group cannot be the outcome")

    @classmethod
    def from_dict(cls, d: Mapping) -> "Schema":
        if not isinstance(d, Mapping):
            raise SchemaError("schema must be a JSON object")
        allowed = {"outcome", "variables", "group"}
        unknown = set(d) - allowed
        if unknown:
            raise SchemaError(f"unknown schema keys: {sorted(unknown)}")
        for key in ("outcome", "variables"):
            if key not in d:
                raise SchemaError(f"schema is missing {key!r}")
        variables = d["variables"]
        if not isinstance(variables, (list, tuple)) or not all(
            isinstance(v, str) for v in variables
        ):
            raise SchemaError("schema variables must be a list of strings")
        return cls(d["outcome"], tuple(variables), d.get("group"))


def load_schema(path) -> Schema:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read schema file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema file is not valid JSON: {exc}") from exc
    return Schema.from_dict(raw)


def load_csv(path, schema: Schema | Mapping) -> MicrodataTable:
    """Load a standard CSV into a table.

    The first row is the header; categories are inferred in first
    appearance order.  Rows whose outcome is empty or "NA" are dropped
    and counted on `dropped_missing_outcome`.  Any other outcome value
    besides 0/1, an empty variable cell, or a ragged row raises a parse
    error carrying the 1-based file row number (header = row 1).
    """
    if isinstance(schema, Mapping):
        schema = Schema.from_dict(schema)
    var_names = list(schema.variables)
    if schema.group is not None and schema.group not in var_names:
        var_names.append(schema.group)

    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read data file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError("data file is empty")
        positions: dict[str, int] = {}
        for i, name in enumerate(header):
            positions.setdefault(name, i)
        missing = [c for c in [schema.outcome, *var_names] if c not in positions]
        if missing:
            raise SchemaError(f"columns missing from header: {missing}")
        y_pos = positions[schema.outcome]
        var_pos = [positions[name] for name in var_names]

        seen: list[dict[str, int]] = [{} for _ in var_names]
        codes: list[list[int]] = [[] for _ in var_names]
        outcome: list[int] = []
        dropped = 0
        width = len(header)
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ParseError(
                    f"expected {width} fields, got {len(row)}", row=row_no
                )
            raw = row[y_pos]
            if raw in MISSING_OUTCOME:
                dropped += 1
                continue
            if raw == "0":
                outcome.append(0)
            elif raw == "1":
                outcome.append(1)
            else:
                raise ParseError(
                    f"outcome {schema.outcome!r} must be 0 or 1, got {raw!r}",
                    row=row_no,
                )
            for j, pos in enumerate(var_pos):
                lab = row[pos]
                if lab == "":
                    raise ParseError(
                        f"empty value for variable {var_names[j]!r}", row=row_no
                    )
                codes[j].append(seen[j].setdefault(lab, len(seen[j])))

    if not outcome:
        raise DataError("no usable data rows (all outcomes missing or file empty)")
    thin = [name for name, s in zip(var_names, seen) if len(s) < 2]
    if thin:
        raise DegeneracyError(f"variables with fewer than two categories: {thin}")
    variables = [
        CategoricalVariable(name, tuple(s)) for name, s in zip(var_names, seen)
    ]
    return MicrodataTable(
        schema.outcome,
        variables,
        outcome,
        dict(zip(var_names, codes)),
        group_name=schema.group,
        dropped_missing_outcome=dropped,
    )


# -- prevalence and perfect predictors --------------------------------------------


@dataclass(frozen=True)
class CategoryRate:
    """Per-category case count and prevalence per 100 observations."""

    category: str
    count: int
    cases: int
    per_100: float


def group_prevalence(table: MicrodataTable, by: str) -> tuple[CategoryRate, ...]:
    """Outcome prevalence per 100 within each category of `by`."""
    var = table.variable(by)
    codes = table.codes(by)
    counts = np.bincount(codes, minlength=len(var.categories))
    cases = np.bincount(
        codes, weights=table.outcome.astype(np.float64), minlength=len(var.categories)
    )
    rows = []
    for i, cat in enumerate(var.categories):
        n_cat = int(counts[i])
        k_cat = int(cases[i])
        rate = 100.0 * k_cat / n_cat if n_cat else float("nan")
        rows.append(CategoryRate(cat, n_cat, k_cat, rate))
    return tuple(rows)


@dataclass(frozen=True)
class PerfectPredictor:
    """A non-empty category whose rows all share one outcome value."""

    variable: str
    category: str
    outcome_value: int
    n_rows: int

    @property
    def reason(self) -> str:
        return (
            f"perfect predictor: outcome all {self.outcome_value} "
            f"({self.n_rows} rows)"
        )


def detect_perfect_predictors(table: MicrodataTable) -> tuple[PerfectPredictor, ...]:
    """Flag categories with outcome all 0 or all 1 (non-empty ones only)."""
    found = []
    y = table.outcome.astype(np.float64)
    for var in table.variables:
        codes = table.codes(var.name)
        counts = np.bincount(codes, minlength=len(var.categories))
        cases = np.bincount(codes, weights=y, minlength=len(var.categories))
        for i, cat in enumerate(var.categories):
            n_cat = int(counts[i])
            if n_cat == 0:
                continue
            k_cat = int(cases[i])
            if k_cat == 0:
                found.append(PerfectPredictor(var.name, cat, 0, n_cat))
            elif k_cat == n_cat:
                found.append(PerfectPredictor(var.name, cat, 1, n_cat))
    return tuple(found)


def drop_perfect_predictor_rows(
    table: MicrodataTable,
    flagged: Sequence[PerfectPredictor] | None = None,
) -> tuple[MicrodataTable, tuple[PerfectPredictor, ...]]:
    """Remove rows belonging to flagged categories.

    Returns the reduced table plus the flags applied.  Raises if the
    drop would empty the table.
    """
    if flagged is None:
        flagged = detect_perfect_predictors(table)
    flagged = tuple(flagged)
    if not flagged:
        return table, ()
    keep = np.ones(table.n, dtype=bool)
    for flag in flagged:
        var = table.variable(flag.variable)
        keep &= table.codes(flag.variable) != var.index_of(flag.category)
    if not keep.any():
        raise DataError("dropping perfect predictors would remove every row")
    return table.subset(keep), flagged


# -- design encoding -----------------------------------------------------------


class DesignMatrix:
    """Dummy-coded design with a leading intercept column.

    `columns` are (variable, category) pairs, the first being the
    intercept sentinel; `dropped` records (variable, category, reason)
    for columns left out.
    """

    __slots__ = ("values", "columns", "base_map", "dropped")

    def __init__(self, values, columns, base_map, dropped=()):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
            raise ShapeError("design values must be a non-empty 2-d array")
        columns = tuple((str(v), str(c)) for v, c in columns)
        if len(columns) != values.shape[1]:
            raise ShapeError("column labels do not match value width")
        if len(set(columns)) != len(columns):
            raise ShapeError("duplicate design columns")
        if columns[0] != INTERCEPT:
            raise ShapeError("first design column must be the intercept")
        if not (values[:, 0] == 1.0).all():
            raise ShapeError("intercept column must be all ones")
        body = values[:, 1:]
        if body.size and not np.isin(body, (0.0, 1.0)).all():
            raise ShapeError("dummy entries must be 0 or 1")
        base_map = dict(base_map)
        per_var: dict[str, list[int]] = {}
        for j, (var, _) in enumerate(columns[1:], start=1):
            per_var.setdefault(var, []).append(j)
        for var, cols in per_var.items():
            if var not in base_map:
                raise ConfigError(f"base map does not cover variable {var!r}")
            if values[:, cols].sum(axis=1).max(initial=0.0) > 1.0:
                raise ShapeError(f"dummies for {var!r} are not mutually exclusive")
        self.values = _frozen(values)
        self.columns = columns
        self.base_map = base_map
        self.dropped = tuple((str(v), str(c), str(r)) for v, c, r in dropped)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(
            "intercept" if col == INTERCEPT else f"{col[0]}={col[1]}"
            for col in self.columns
        )

    @property
    def variable_names(self) -> tuple[str, ...]:
        out: list[str] = []
        for var, _ in self.columns[1:]:
            if var not in out:
                out.append(var)
        return tuple(out)

    def variable_columns(self, name: str) -> np.ndarray:
        idx = [j for j, (var, _) in enumerate(self.columns) if var == name]
        if not idx:
            raise ConfigError(f"no design columns for variable {name!r}")
        return np.array(idx, dtype=np.intp)

    def column_means(self) -> np.ndarray:
        return self.values.mean(axis=0)

    def select_columns(self, keep, extra_dropped=()) -> "DesignMatrix":
        """Keep the given column indices (intercept must be among them)."""
        keep = np.asarray(keep, dtype=np.intp)
        return DesignMatrix(
            self.values[:, keep],
            [self.columns[int(j)] for j in keep],
            self.base_map,
            tuple(self.dropped) + tuple(extra_dropped),
        )

    def decode(self) -> dict[str, list[str]]:
        """Map design rows back to labels; all-zero rows decode to the base."""
        out: dict[str, list[str]] = {}
        for var in self.variable_names:
            cols = self.variable_columns(var)
            cats = [self.columns[int(j)][1] for j in cols]
            block = self.values[:, cols]
            hit = block.argmax(axis=1)
            any_hit = block.max(axis=1) > 0.0
            base = self.base_map[var]
            out[var] = [
                cats[int(h)] if flag else base for h, flag in zip(hit, any_hit)
            ]
        return out


def encode_design(
    table: MicrodataTable,
    base_map: Mapping[str, str],
    dropped: Sequence[tuple[str, str, str]] = (),
) -> DesignMatrix:
    """Dummy-code a table against a base-category map.

    One column per non-base category, in declaration order, after a
    leading intercept.  Categories with no rows — and any (variable,
    category) pairs listed in `dropped` — are omitted and recorded.
    """
    for var in table.variables:
        if var.name not in base_map:
            raise ConfigError(f"base map does not cover variable {var.name!r}")
        var.index_of(base_map[var.name])

    skip = {(v, c): r for v, c, r in dropped}
    drop_records: list[tuple[str, str, str]] = list(dropped)
    cols: list[np.ndarray] = [np.ones(table.n, dtype=np.float64)]
    labels: list[tuple[str, str]] = [INTERCEPT]
    for var in table.variables:
        codes = table.codes(var.name)
        counts = table.counts(var.name)
        base = base_map[var.name]
        for i, cat in enumerate(var.categories):
            if cat == base:
                continue
            if (var.name, cat) in skip:
                continue
            if counts[i] == 0:
                drop_records.append((var.name, cat, "no rows in category"))
                continue
            cols.append((codes == i).astype(np.float64))
            labels.append((var.name, cat))
    return DesignMatrix(
        np.column_stack(cols),
        labels,
        {v.name: base_map[v.name] for v in table.variables},
        tuple(drop_records),
    )


# -- base-category selection -----------------------------------------------------


def _pairwise_counts(table: MicrodataTable):
    """Per-category counts and the K x K co-occurrence count matrix."""
    sizes = [len(v.categories) for v in table.variables]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    counts = np.zeros(total, dtype=np.int64)
    cross = np.zeros((total, total), dtype=np.int64)
    all_codes = [table.codes(v.name) for v in table.variables]
    for a, var_a in enumerate(table.variables):
        ca = all_codes[a]
        na = sizes[a]
        block = np.bincount(ca, minlength=na)
        counts[offsets[a] : offsets[a] + na] = block
        cross[
            offsets[a] : offsets[a] + na, offsets[a] : offsets[a] + na
        ] = np.diag(block)
        for b in range(a + 1, len(table.variables)):
            cb = all_codes[b]
            nb = sizes[b]
            joint = np.bincount(ca.astype(np.int64) * nb + cb, minlength=na * nb)
            joint = joint.reshape(na, nb)
            cross[offsets[a] : offsets[a] + na, offsets[b] : offsets[b] + nb] = joint
            cross[offsets[b] : offsets[b] + nb, offsets[a] : offsets[a] + na] = (
                joint.T
            )
    return offsets, counts, cross


def _mean_vif_for(selection, n, counts, cross) -> float:
    """Mean VIF over the dummy columns given by global category indices."""
    from .diagnostics import vif_from_correlation

    sel = np.asarray(selection, dtype=np.intp)
    c = counts[sel].astype(np.float64)
    scatter = cross[np.ix_(sel, sel)].astype(np.float64) - np.outer(c, c) / n
    sd = np.sqrt(np.diag(scatter))
    if (sd <= 0.0).any():
        return float("inf")
    corr = scatter / np.outer(sd, sd)
    return float(np.mean(vif_from_correlation(corr)))


def select_base_categories(table: MicrodataTable) -> dict[str, str]:
    """Choose base categories minimizing mean VIF of the encoded design.

    Greedy over variables in declaration order, starting from the most
    frequent category of each variable; candidate bases are the
    non-empty categories.  Ties go to the higher-frequency category,
    then to declaration order.  Deterministic for a given table.
    """
    offsets, counts, cross = _pairwise_counts(table)
    non_empty: list[list[int]] = []
    for a, var in enumerate(table.variables):
        cats = [
            i
            for i in range(len(var.categories))
            if counts[offsets[a] + i] > 0
        ]
        if len(cats) < 2:
            raise DegeneracyError(
                f"variable {var.name!r} has fewer than two non-empty categories"
            )
        non_empty.append(cats)

    # start from the most frequent category of each variable
    assignment = []
    for a, cats in enumerate(non_empty):
        block = counts[[offsets[a] + i for i in cats]]
        assignment.append(cats[int(np.argmax(block))])

    def selected_columns(assn):
        sel = []
        for a, cats in enumerate(non_empty):
            sel.extend(offsets[a] + i for i in cats if i != assn[a])
        return sel

    n = table.n
    for a, cats in enumerate(non_empty):
        scores = []
        for cand in cats:
            trial = list(assignment)
            trial[a] = cand
            scores.append(_mean_vif_for(selected_columns(trial), n, counts, cross))
        best = min(scores)
        tol = 1e-9 * max(1.0, abs(best))
        tied = [
            (cand, int(counts[offsets[a] + cand]))
            for cand, s in zip(cats, scores)
            if s <= best + tol
        ]
        tied.sort(key=lambda pair: -pair[1])  # frequency first; sort is stable
        assignment[a] = tied[0][0]

    return {
        var.name: var.categories[assignment[a]]
        for a, var in enumerate(table.variables)
    }
