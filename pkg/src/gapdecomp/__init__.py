"""Logit estimation and group-gap decomposition for categorical microdata.

The package fits binary logit models on dummy-encoded categorical
survey data, reports robust (sandwich) inference and odds ratios,
diagnoses specification problems (VIF, link test, ROC/AUC), and splits
the outcome-rate gap between two groups into per-variable
contributions — linearly (Oaxaca) and nonlinearly via distribution
switching with subsample matching and replication standard errors.
"""

from ._kernels import BACKEND
from .data import (
    CategoricalVariable,
    CategoryRate,
    DesignMatrix,
    MicrodataTable,
    PerfectPredictor,
    Schema,
    detect_perfect_predictors,
    drop_perfect_predictor_rows,
    encode_design,
    group_prevalence,
    load_csv,
    load_schema,
    select_base_categories,
)
from .decompose import (
    DecompositionResult,
    GroupSample,
    OaxacaResult,
    VariableContribution,
    decomposition_report,
    fairlie_decompose,
    harmonize_groups,
    oaxaca_linear,
    oaxaca_report,
    percentage_contributions,
)
from .diagnostics import (
    DiagnosticsReport,
    LinkTestResult,
    VifResult,
    auc,
    link_test,
    roc_csv,
    roc_curve,
    run_diagnostics,
    vif,
    vif_from_correlation,
)
from .errors import (
    CollinearityError,
    CollinearityWarning,
    ConfigError,
    DataError,
    DegeneracyError,
    DiagnosticError,
    EstimationError,
    GapdecompError,
    InputError,
    NonConvergenceError,
    NumericError,
    OracleError,
    ParseError,
    SchemaError,
    ShapeError,
    UndefinedPercentageError,
)
from .logit import (
    LogitFit,
    fit_logit,
    fit_report,
    format_fit_text,
    log_likelihood,
    odds_ratios,
    predict_probabilities,
    robust_covariance,
    score,
    significance_stars,
)
from .synth import (
    DataGeneratingProcess,
    DgpVariable,
    brute_force_logit,
    dgp_from_dict,
    exact_fairlie_small,
    generate_microdata,
    generate_table,
    load_dgp,
    load_preset,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # data
    "CategoricalVariable",
    "CategoryRate",
    "DesignMatrix",
    "MicrodataTable",
    "PerfectPredictor",
    "Schema",
    "detect_perfect_predictors",
    "drop_perfect_predictor_rows",
    "encode_design",
    "group_prevalence",
    "load_csv",
    "load_schema",
    "select_base_categories",
    # estimation
    "LogitFit",
    "fit_logit",
    "fit_report",
    "format_fit_text",
    "log_likelihood",
    "odds_ratios",
    "predict_probabilities",
    "robust_covariance",
    "score",
    "significance_stars",
    # diagnostics
    "DiagnosticsReport",
    "LinkTestResult",
    "VifResult",
    "auc",
    "link_test",
    "roc_csv",
    "roc_curve",
    "run_diagnostics",
    "vif",
    "vif_from_correlation",
    # decomposition
    "DecompositionResult",
    "GroupSample",
    "OaxacaResult",
    "VariableContribution",
    "decomposition_report",
    "fairlie_decompose",
    "harmonize_groups",
    "oaxaca_linear",
    "oaxaca_report",
    "percentage_contributions",
    # synthetic data
    "DataGeneratingProcess",
    "DgpVariable",
    "brute_force_logit",
    "dgp_from_dict",
    "exact_fairlie_small",
    "generate_microdata",
    "generate_table",
    "load_dgp",
    "load_preset",
    # errors
    "CollinearityError",
    "CollinearityWarning",
    "ConfigError",
    "DataError",
    "DegeneracyError",
    "DiagnosticError",
    "EstimationError",
    "GapdecompError",
    "InputError",
    "NonConvergenceError",
    "NumericError",
    "OracleError",
    "ParseError",
    "SchemaError",
    "ShapeError",
    "UndefinedPercentageError",
]
