"""Command-line interface.

Commands: fit | diagnose | decompose | simulate | report.  All take
--config (a JSON file); --seed/--replications/--format/--out override
the config.  Exit codes: 0 success, 2 input/config error, 3 numerical
or estimation failure; failures also emit one JSON object on stderr.
Output is deterministic for a fixed config and seed; GAPDECOMP_THREADS
only caps decomposition parallelism and never changes results.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .data import (
    MicrodataTable,
    Schema,
    detect_perfect_predictors,
    encode_design,
    load_csv,
    load_schema,
    select_base_categories,
)
from .decompose import (
    decomposition_report,
    fairlie_decompose,
    harmonize_groups,
    GroupSample,
    oaxaca_linear,
    oaxaca_report,
)
from .diagnostics import run_diagnostics, roc_csv, vif
from .errors import (
    ConfigError,
    DataError,
    DiagnosticError,
    GapdecompError,
    InputError,
    NonConvergenceError,
    NumericError,
)
from .logit import fit_logit, fit_report, format_fit_text
from .synth import generate_table, load_dgp

FORMATS = ("text", "json", "csv")


@dataclass
class AnalysisConfig:
    """Resolved analysis configuration (paths absolute)."""

    data: str
    schema: Schema
    group1: str
    group2: str
    base: str | dict = "auto"
    replications: int = 100
    seed: int | None = None
    coef_source: str = "group1"
    ordering: str = "randomized"
    linear: bool = False
    format: str = "text"
    out: str | None = None

    def __post_init__(self):
        if self.group1 == self.group2:
            raise ConfigError("group1 and group2 must differ")
        if self.schema.group is None:
            raise ConfigError("schema must name a group variable")
        if self.base != "auto":
            if not isinstance(self.base, Mapping) or not all(
                isinstance(k, str) and isinstance(v, str)
                for k, v in self.base.items()
            ):
                raise ConfigError('base must be "auto" or a {variable: category} map')
            self.base = dict(self.base)
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.coef_source not in ("group1", "group2", "pooled"):
            raise ConfigError("coef_source must be group1, group2 or pooled")
        if self.ordering not in ("fixed", "randomized"):
            raise ConfigError("ordering must be fixed or randomized")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")

    @classmethod
    def from_file(cls, path: str | Path) -> "AnalysisConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        allowed = {
            "data",
            "schema",
            "group1",
            "group2",
            "base",
            "decomposition",
            "format",
            "out",
        }
        unknown = set(raw) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("data", "schema", "group1", "group2"):
            if key not in raw:
                raise ConfigError(f"config is missing {key!r}")
        base_dir = path.parent

        def _resolve(p: str) -> str:
            candidate = Path(p)
            return str(candidate if candidate.is_absolute() else base_dir / candidate)

        schema_raw = raw["schema"]
        if isinstance(schema_raw, str):
            schema = load_schema(_resolve(schema_raw))
        else:
            schema = Schema.from_dict(schema_raw)

        dec = raw.get("decomposition", {})
        if not isinstance(dec, dict):
            raise ConfigError("decomposition options must be an object")
        dec_allowed = {"replications", "seed", "coef_source", "ordering", "linear"}
        dec_unknown = set(dec) - dec_allowed
        if dec_unknown:
            raise ConfigError(f"unknown decomposition keys: {sorted(dec_unknown)}")
        return cls(
            data=_resolve(str(raw["data"])),
            schema=schema,
            group1=str(raw["group1"]),
            group2=str(raw["group2"]),
            base=raw.get("base", "auto"),
            replications=dec.get("replications", 100),
            seed=dec.get("seed"),
            coef_source=dec.get("coef_source", "group1"),
            ordering=dec.get("ordering", "randomized"),
            linear=bool(dec.get("linear", False)),
            format=str(raw.get("format", "text")),
            out=(_resolve(str(raw["out"])) if raw.get("out") else None),
        )

    def resolved(self) -> dict:
        """Provenance block embedded in every report."""
        return {
            "data": self.data,
            "schema": {
                "outcome": self.schema.outcome,
                "variables": list(self.schema.variables),
                "group": self.schema.group,
            },
            "group1": self.group1,
            "group2": self.group2,
            "base": self.base,
            "decomposition": {
                "replications": self.replications,
                "seed": self.seed,
                "coef_source": self.coef_source,
                "ordering": self.ordering,
                "linear": self.linear,
            },
            "format": self.format,
            "out": self.out,
        }


@dataclass
class PreparedGroups:
    """Cleaned per-group tables plus the base map used for encoding."""

    config: AnalysisConfig
    base_map: dict[str, str]
    tables: dict[str, MicrodataTable]
    flags: dict[str, tuple]
    dropped_missing: int = 0
    notes: list[str] = field(default_factory=list)


def prepare_groups(config: AnalysisConfig) -> PreparedGroups:
    """Load, split, drop perfect predictors per group, resolve bases."""
    table = load_csv(config.data, config.schema)
    group = config.schema.group
    group_var = table.variable(group)
    for label in (config.group1, config.group2):
        if label not in group_var.categories:
            raise ConfigError(f"group label {label!r} not present in the data")
    codes = table.codes(group)
    in_scope = np.zeros(table.n, dtype=bool)
    for label in (config.group1, config.group2):
        in_scope |= codes == group_var.index_of(label)
    if not in_scope.any():
        raise ConfigError("no rows belong to the configured groups")
    scoped = table.subset(in_scope)

    split = scoped.split_by_group()
    notes: list[str] = []
    if table.dropped_missing_outcome:
        notes.append(
            f"dropped {table.dropped_missing_outcome} rows with missing outcome"
        )
    flags = {}
    keep = np.ones(scoped.n, dtype=bool)
    scoped_codes = scoped.codes(group)
    for label in (config.group1, config.group2):
        sub = split[label]
        if sub.outcome.min() == sub.outcome.max():
            # single-class group: every category is trivially "perfect",
            # so flagging would drop the whole group; leave it intact and
            # let estimation/diagnostics report the degeneracy
            flags[label] = ()
            continue
        found = detect_perfect_predictors(sub)
        flags[label] = found
        if not found:
            continue
        in_group = scoped_codes == group_var.index_of(label)
        for flag in found:
            var = scoped.variable(flag.variable)
            hit = in_group & (
                scoped.codes(flag.variable) == var.index_of(flag.category)
            )
            keep &= ~hit
            notes.append(
                f"group {label!r}: dropped {flag.n_rows} rows — "
                f"{flag.variable}={flag.category} ({flag.reason})"
            )
    clean = scoped.subset(keep) if not keep.all() else scoped
    clean_codes = clean.codes(group)
    for label in (config.group1, config.group2):
        if not (clean_codes == group_var.index_of(label)).any():
            raise DataError(
                f"group {label!r} has no rows left after dropping "
                "perfect-predictor categories"
            )

    if config.base == "auto":
        base_map = select_base_categories(clean.drop_variable(group))
    else:
        base_map = dict(config.base)

    tables = clean.split_by_group()
    return PreparedGroups(
        config=config,
        base_map=base_map,
        tables={
            config.group1: tables[config.group1],
            config.group2: tables[config.group2],
        },
        flags=flags,
        dropped_missing=table.dropped_missing_outcome,
        notes=notes,
    )


def encoded_group(prep: PreparedGroups, label: str) -> GroupSample:
    sub = prep.tables[label]
    dropped = [
        (f.variable, f.category, f.reason) for f in prep.flags.get(label, ())
    ]
    design = encode_design(sub, prep.base_map, dropped=dropped)
    return GroupSample(label, design, sub.outcome)


# -- output plumbing ---------------------------------------------------------------


def _config_line(config: AnalysisConfig) -> str:
    return "# config: " + json.dumps(config.resolved(), sort_keys=True)


def _write_output(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(
            text if text.endswith("\n") else text + "\n", encoding="utf-8"
        )


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _emit_error(exc: Exception):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(payload) + "\n")


# -- commands ---------------------------------------------------------------------


def cmd_fit(config: AnalysisConfig) -> int:
    prep = prepare_groups(config)
    models = {}
    for label in (config.group1, config.group2):
        sample = encoded_group(prep, label)
        fit = fit_logit(sample.X, sample.y)
        if not fit.converged:
            raise NonConvergenceError(f"model for group {label!r} did not converge")
        models[label] = (sample, fit)

    if config.format == "json":
        payload = {
            "config": config.resolved(),
            "models": {
                label: {
                    **fit_report(fit),
                    "dropped": [list(d) for d in sample.X.dropped],
                }
                for label, (sample, fit) in models.items()
            },
        }
        _write_output(_json_text(payload), config.out)
    elif config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model", "term", "coef", "robust_se", "or", "or_se"])
        for label, (_, fit) in models.items():
            report = fit_report(fit)
            for j, term in enumerate(report["labels"]):
                writer.writerow(
                    [
                        label,
                        term,
                        repr(report["coef"][j]),
                        repr(report["robust_se"][j]),
                        repr(report["or"][j]),
                        repr(report["or_se"][j]),
                    ]
                )
        _write_output(buf.getvalue(), config.out)
    else:
        lines = [_config_line(config)]
        lines.extend(prep.notes)
        for label, (_, fit) in models.items():
            lines.append("")
            lines.append(format_fit_text(fit, title=f"model: group {label!r}"))
        _write_output("\n".join(lines) + "\n", config.out)
    return 0


def cmd_diagnose(config: AnalysisConfig) -> int:
    prep = prepare_groups(config)
    text_lines = [_config_line(config)] + list(prep.notes)
    payload = {"config": config.resolved(), "models": {}}
    csv_rows = [["model", "fpr", "tpr"]]
    try:
        for label in (config.group1, config.group2):
            sample = encoded_group(prep, label)
            if sample.y.min() == sample.y.max():
                raise DiagnosticError(
                    f"ROC is undefined for group {label!r}: "
                    "the outcome has a single class"
                )
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                vif_result = vif(sample.X)
            text_lines.append("")
            text_lines.append(f"model: group {label!r}")
            for w in caught:
                text_lines.append(f"warning: {w.message}")
            width = max(len(lab) for lab in vif_result.labels)
            text_lines.append(f"{'term':<{width}}  {'VIF':>10}")
            for lab, value in zip(vif_result.labels, vif_result.values):
                rendered = "inf" if np.isinf(value) else f"{value:.4f}"
                text_lines.append(f"{lab:<{width}}  {rendered:>10}")
            text_lines.append(f"mean VIF: {vif_result.mean:.4f}")

            fit = fit_logit(sample.X, sample.y)
            if not fit.converged:
                raise NonConvergenceError(
                    f"model for group {label!r} did not converge"
                )
            report = run_diagnostics(fit, sample.X, sample.y)
            verdict = "specified" if report.link.well_specified else "misspecified"
            text_lines.append(
                f"link test: coef(h)={report.link.coef_hat:.6f} "
                f"p={report.link.p_hat:.4g}; coef(h^2)={report.link.coef_hatsq:.6f} "
                f"p={report.link.p_hatsq:.4g}; verdict: {verdict}"
            )
            text_lines.append(f"AUC: {report.auc:.6f}")
            payload["models"][label] = {
                "fit": fit_report(fit),
                "diagnostics": report.to_json_dict(),
            }
            for fpr, tpr in report.roc_points:
                csv_rows.append([label, repr(float(fpr)), repr(float(tpr))])
            if config.out and config.format == "text":
                roc_path = f"{config.out}.roc-{label}.csv"
                Path(roc_path).write_text(
                    roc_csv(report.roc_points), encoding="utf-8"
                )
                text_lines.append(f"ROC points written to {roc_path}")
            else:
                text_lines.append(
                    f"ROC points: {len(report.roc_points)} "
                    "(use --format csv or json for the values)"
                )
    except GapdecompError:
        # keep the partial text (e.g. the VIF warning) visible on stdout
        if config.format == "text" and config.out is None and len(text_lines) > 1:
            sys.stdout.write("\n".join(text_lines) + "\n")
        raise

    if config.format == "json":
        _write_output(_json_text(payload), config.out)
    elif config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(csv_rows)
        _write_output(buf.getvalue(), config.out)
    else:
        _write_output("\n".join(text_lines) + "\n", config.out)
    return 0


def cmd_decompose(config: AnalysisConfig) -> int:
    if config.seed is None:
        raise ConfigError(
            "decomposition is stochastic: set a seed in the config or via --seed"
        )
    prep = prepare_groups(config)
    g1 = encoded_group(prep, config.group1)
    g2 = encoded_group(prep, config.group2)
    g1, g2 = harmonize_groups(g1, g2)
    result = fairlie_decompose(
        g1,
        g2,
        replications=config.replications,
        seed=config.seed,
        coef_source=config.coef_source,
        ordering=config.ordering,
    )
    result.outcome_name = config.schema.outcome
    linear = oaxaca_linear(g1, g2) if config.linear else None

    if config.format == "json":
        payload = {
            "config": config.resolved(),
            "decomposition": result.to_json_dict(),
        }
        if linear is not None:
            payload["linear"] = {
                "gap": linear.gap,
                "explained": linear.explained,
                "unexplained": linear.unexplained,
                "per_variable": linear.per_variable,
            }
        _write_output(_json_text(payload), config.out)
    elif config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["variable", "coef", "se", "pct"])
        for c in result.contributions:
            writer.writerow(
                [
                    c.variable,
                    repr(c.coef),
                    "" if np.isnan(c.se) else repr(c.se),
                    "" if c.pct is None else repr(c.pct),
                ]
            )
        _write_output(buf.getvalue(), config.out)
    else:
        parts = [_config_line(config), *prep.notes, ""]
        parts.append(decomposition_report(result))
        if linear is not None:
            parts.append(oaxaca_report(linear))
        _write_output("\n".join(parts), config.out)
    return 0


def cmd_report(config: AnalysisConfig) -> int:
    """Fit, diagnostics and decomposition in one document."""
    if config.format == "csv":
        raise ConfigError("report supports text or json output only")
    if config.seed is None:
        raise ConfigError(
            "decomposition is stochastic: set a seed in the config or via --seed"
        )
    prep = prepare_groups(config)
    g1 = encoded_group(prep, config.group1)
    g2 = encoded_group(prep, config.group2)
    samples = {config.group1: g1, config.group2: g2}

    models = {}
    for label, sample in samples.items():
        fit = fit_logit(sample.X, sample.y)
        if not fit.converged:
            raise NonConvergenceError(f"model for group {label!r} did not converge")
        models[label] = (sample, fit, run_diagnostics(fit, sample.X, sample.y))

    h1, h2 = harmonize_groups(g1, g2)
    result = fairlie_decompose(
        h1,
        h2,
        replications=config.replications,
        seed=config.seed,
        coef_source=config.coef_source,
        ordering=config.ordering,
    )
    result.outcome_name = config.schema.outcome
    linear = oaxaca_linear(h1, h2) if config.linear else None

    if config.format == "json":
        payload = {
            "config": config.resolved(),
            "models": {
                label: {
                    **fit_report(fit),
                    "diagnostics": diag.to_json_dict(),
                }
                for label, (_, fit, diag) in models.items()
            },
            "decomposition": result.to_json_dict(),
        }
        if linear is not None:
            payload["linear"] = {
                "gap": linear.gap,
                "explained": linear.explained,
                "unexplained": linear.unexplained,
                "per_variable": linear.per_variable,
            }
        _write_output(_json_text(payload), config.out)
    else:
        lines = [_config_line(config)]
        lines.extend(prep.notes)
        for label, (_, fit, diag) in models.items():
            lines.append("")
            lines.append(format_fit_text(fit, title=f"model: group {label!r}"))
            verdict = "specified" if diag.link.well_specified else "misspecified"
            lines.append(
                f"mean VIF: {diag.vif.mean:.4f}   link test: {verdict}   "
                f"AUC: {diag.auc:.6f}"
            )
        lines.append("")
        lines.append(decomposition_report(result))
        if linear is not None:
            lines.append(oaxaca_report(linear))
        _write_output("\n".join(lines), config.out)
    return 0


def cmd_simulate(args) -> int:
    dgp = load_dgp(args.config)
    seed = args.seed if args.seed is not None else dgp.seed
    if seed is None:
        raise ConfigError("simulate needs a seed (dgp seed or --seed)")
    if args.out is None:
        raise ConfigError("simulate needs --out for the CSV path")
    table = generate_table(dgp, seed)

    header = [table.outcome_name, *table.variable_names]
    label_columns = [table.labels(name) for name in table.variable_names]
    out_path = Path(args.out)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        outcome = table.outcome
        for i in range(table.n):
            writer.writerow(
                [str(int(outcome[i]))] + [col[i] for col in label_columns]
            )
    manifest = {
        "dgp_sha256": dgp.sha256(),
        "seed": int(seed),
        "rows": table.n,
        "columns": header,
    }
    manifest_path = Path(str(out_path) + ".manifest.json")
    manifest_path.write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    sys.stdout.write(
        f"wrote {table.n} rows to {out_path} (manifest: {manifest_path})\n"
    )
    return 0


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapdecomp",
        description=(
            "Logit estimation and nonlinear group-gap decomposition "
            "for categorical survey microdata"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("fit", "fit one logit model per group"),
        ("diagnose", "VIF, link test, ROC and AUC per group model"),
        ("decompose", "nonlinear decomposition of the group gap"),
        ("simulate", "draw a synthetic CSV from a dgp file"),
        ("report", "fit + diagnostics + decomposition in one document"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument(
            "--config",
            required=True,
            help="JSON config (for simulate: the dgp file)",
        )
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--format", choices=FORMATS, default=None)
        p.add_argument("--out", default=None)
    return parser


def _analysis_config(args) -> AnalysisConfig:
    config = AnalysisConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.replications is not None:
        if args.replications < 1:
            raise ConfigError("replications must be at least 1")
        config.replications = args.replications
    if args.format is not None:
        config.format = args.format
    if args.out is not None:
        config.out = args.out
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        config = _analysis_config(args)
        handler = {
            "fit": cmd_fit,
            "diagnose": cmd_diagnose,
            "decompose": cmd_decompose,
            "report": cmd_report,
        }[args.command]
        return handler(config)
    except InputError as exc:
        _emit_error(exc)
        return 2
    except NumericError as exc:
        _emit_error(exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
