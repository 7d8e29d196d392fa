"""Bradley-Terry and beta-model fitting with high-dimensional Wilks-type likelihood-ratio tests."""

import logging

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

from .beta import (
    BetaCovariance,
    beta_covariance,
    beta_expected_degrees,
    beta_fit_mle,
    beta_fit_restricted,
    beta_loglik,
)
from .bt import (
    BtCovariance,
    bt_covariance,
    bt_expected_degrees,
    bt_fit_mle,
    bt_fit_restricted,
    bt_loglik,
)
from .data import (
    ComparisonMatrix,
    Existence,
    SimpleGraph,
    beta_existence_check,
    degrees,
    ford_existence_check,
    out_degrees,
    parse_bt_csv,
    parse_graph_csv,
)
from .fitting import FitResult, SolverOptions
from .normal import normal_quantile, normal_upper_p
from .season import synthetic_season
from .simulate import (
    PowerRow,
    QqSummary,
    SimConfig,
    gen_null_betas,
    gen_power_betas,
    ks_distance,
    run_power_experiment,
    run_qq_experiment,
    sample_beta,
    sample_bt,
)
from .stats import (
    ConditionReport,
    TestReport,
    beta_composite_test,
    beta_simple_test,
    bt_composite_test,
    bt_simple_test,
    condition_report,
    diag_quadratic,
    full_quadratic,
)
