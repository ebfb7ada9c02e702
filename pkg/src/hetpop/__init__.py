"""hetpop: simulation and detection of heterogeneous item populations.

A bivariate correlation can come from one item population sharing a
common factor, or from several populations whose items load strongly on
factors of their own. The closed forms here quantify how mixing
populations attenuates the correlation; the generators simulate it; the
kappa statistic on principal-component scores, compared against its
single-population reference distribution, detects it.
"""

from hetpop.analytics import (
    LOADING_BOUND,
    CorrelationPrediction,
    expected_correlation,
    expected_loading,
    reproduced_covariance,
)
from hetpop.errors import DataError, DegenerateDataError, DomainError, HetpopError
from hetpop.experiment import (
    DEFAULT_SEED,
    ConditionGrid,
    ConditionResult,
    emit_raw_csv,
    emit_table,
    quick_grid,
    run_condition,
    run_grid,
    table1_grid,
    table2_grid,
)
from hetpop.kappa_detect import (
    METHODS,
    DetectionResult,
    KappaValue,
    ReferenceDistribution,
    detect,
    kappa,
    percentile_5,
    reference_distribution,
)
from hetpop.model_gen import (
    MODES,
    BivariateSample,
    FactorCorrelation,
    ModelSpec,
    cholesky_lower,
    factor_correlation,
    generate_item_pair,
    generate_m_items,
)
from hetpop.pca_stats import (
    ComponentScores,
    CorrelationSummary,
    component_scores,
    summarize,
)
from hetpop.stochastics import (
    RngState,
    box_muller,
    normal_matrix,
    seed_stream,
    standard_normal,
    uniform_open,
)

__version__ = "0.1.0"

__all__ = [
    "BivariateSample",
    "ComponentScores",
    "ConditionGrid",
    "ConditionResult",
    "CorrelationPrediction",
    "CorrelationSummary",
    "DEFAULT_SEED",
    "DataError",
    "DegenerateDataError",
    "DetectionResult",
    "DomainError",
    "FactorCorrelation",
    "HetpopError",
    "KappaValue",
    "LOADING_BOUND",
    "METHODS",
    "MODES",
    "ModelSpec",
    "ReferenceDistribution",
    "RngState",
    "box_muller",
    "cholesky_lower",
    "component_scores",
    "detect",
    "emit_raw_csv",
    "emit_table",
    "expected_correlation",
    "expected_loading",
    "factor_correlation",
    "generate_item_pair",
    "generate_m_items",
    "kappa",
    "normal_matrix",
    "percentile_5",
    "quick_grid",
    "reference_distribution",
    "reproduced_covariance",
    "run_condition",
    "run_grid",
    "seed_stream",
    "standard_normal",
    "summarize",
    "table1_grid",
    "table2_grid",
    "uniform_open",
    "__version__",
]
