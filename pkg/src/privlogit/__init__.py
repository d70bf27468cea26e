"""Differentially private collaborative logistic regression.

Multiple simulated parties train logistic classifiers on their own data and
share only perturbed parameters through weighted averaging. Two objective
perturbation mechanisms (a Laplace noise vector folded into the objective,
and per-degree noise on a quadratic Taylor surrogate) plus a direct
parameter-noise baseline are provided, together with an experiment harness
that sweeps privacy budget, dataset cardinality, and dimensionality.
"""

__version__ = "0.1.0"

from .data import (
    ColumnSchema,
    MinMaxStats,
    RawTable,
    SplitSpec,
    fit_minmax,
    label_encode,
    load_csv,
    load_schema,
    normalize,
    partition,
    project_dims,
    subsample,
    synthesize,
)
from .dataset import EncodedDataset, Record
from .errors import DataError, NumericalError
from .experiments import (
    CsvSource,
    ExperimentSpec,
    MetricsReport,
    MetricsRow,
    SyntheticSource,
    emit_report,
    render_report_csv,
    sweep_cardinality,
    sweep_dimensionality,
    sweep_epsilon,
    time_training,
)
from .federation import (
    FederationConfig,
    FederationResult,
    Mechanism,
    Party,
    budget_ledger,
    local_train_round,
    run_federation,
    weighted_average,
)
from .logistic import (
    GdSettings,
    LogisticObjective,
    ModelParams,
    minimize,
    misclassification_rate,
    objective_gradient,
    objective_value,
    predict_label,
    predict_proba,
    sigmoid,
)
from .mechanisms import (
    LaplaceSampler,
    PrivacyBudget,
    QuadraticObjective,
    build_quadratic_objective,
    laplace_sample,
    ofaa_perturb,
    ofaa_sensitivity,
    ofpa_perturb,
    ofpa_scale,
    perturb_params,
    taylor_coefficients,
)

__all__ = [
    "__version__",
    "ColumnSchema",
    "CsvSource",
    "DataError",
    "EncodedDataset",
    "ExperimentSpec",
    "FederationConfig",
    "FederationResult",
    "GdSettings",
    "LaplaceSampler",
    "LogisticObjective",
    "Mechanism",
    "MetricsReport",
    "MetricsRow",
    "MinMaxStats",
    "ModelParams",
    "NumericalError",
    "Party",
    "PrivacyBudget",
    "QuadraticObjective",
    "RawTable",
    "Record",
    "SplitSpec",
    "SyntheticSource",
    "budget_ledger",
    "build_quadratic_objective",
    "emit_report",
    "fit_minmax",
    "label_encode",
    "laplace_sample",
    "load_csv",
    "load_schema",
    "local_train_round",
    "minimize",
    "misclassification_rate",
    "normalize",
    "objective_gradient",
    "objective_value",
    "ofaa_perturb",
    "ofaa_sensitivity",
    "ofpa_perturb",
    "ofpa_scale",
    "partition",
    "perturb_params",
    "predict_label",
    "predict_proba",
    "project_dims",
    "render_report_csv",
    "run_federation",
    "sigmoid",
    "subsample",
    "sweep_cardinality",
    "sweep_dimensionality",
    "sweep_epsilon",
    "synthesize",
    "taylor_coefficients",
    "time_training",
    "weighted_average",
]
