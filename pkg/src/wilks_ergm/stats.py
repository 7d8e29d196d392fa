"""Normalised likelihood-ratio statistics and the degree quadratic forms.

Every test reports ``z = (2 * (ll_full - ll_null) - df) / sqrt(2 * df)`` with
the upper-tail normal p-value and the two-sided one, ``2 P(Z > |z|)``.
Degrees of freedom are n-1 (BT simple), r-1 (BT tied), n (beta simple) and
r (beta tied).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .beta import beta_fit_mle, beta_fit_restricted, beta_loglik
from .bt import bt_fit_mle, bt_fit_restricted, bt_loglik
from .data import ComparisonMatrix, SimpleGraph
from .errors import DimensionMismatch, NonpositiveVariance, SingularCovariance
from .fitting import DEFAULT_OPTIONS, SolverOptions, validate_tied
from .normal import normal_upper_p


@dataclass(frozen=True)
class TestReport:
    model: str
    null_kind: str
    raw_lrt: float
    df: int
    z: float
    p_value: float
    p_two_sided: float
    n: int
    r: int | None = None
    loglik_full: float = math.nan
    loglik_null: float = math.nan

    __test__ = False  # not a pytest class

    def rejects(self, alpha: float = 0.05, tail: str = "two-sided") -> bool:
        if tail == "two-sided":
            return self.p_two_sided < alpha
        if tail == "upper":
            return self.p_value < alpha
        raise ValueError(f"tail must be 'two-sided' or 'upper', got {tail!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def make_report(model, null_kind, ll_full, ll_null, df, n, r=None) -> TestReport:
    raw = 2.0 * (ll_full - ll_null)
    z = (raw - df) / math.sqrt(2.0 * df)
    p_two = min(1.0, 2.0 * normal_upper_p(abs(z)))
    return TestReport(model, null_kind, raw, df, z, normal_upper_p(z), p_two, n, r, ll_full, ll_null)


def bt_simple_test(m: ComparisonMatrix, null_beta, opts: SolverOptions = DEFAULT_OPTIONS) -> TestReport:
    null_beta = np.asarray(null_beta, dtype=float)
    if null_beta.shape != (m.n,):
        raise DimensionMismatch(f"expected {m.n} null parameters, got shape {null_beta.shape}")
    if null_beta[0] != 0.0:
        raise ValueError("the Bradley-Terry null must have beta_1 = 0")
    full = bt_fit_mle(m, opts)
    return make_report("bt", "simple", full.loglik, bt_loglik(m, null_beta), m.n - 1, m.n)


def bt_composite_test(m: ComparisonMatrix, tied, opts: SolverOptions = DEFAULT_OPTIONS) -> TestReport:
    tied = validate_tied(tied, m.n)
    full = bt_fit_mle(m, opts)
    null = bt_fit_restricted(m, tied, opts)
    r = len(tied)
    return make_report("bt", "composite", full.loglik, null.loglik, r - 1, m.n, r)


def beta_simple_test(g: SimpleGraph, null_beta, opts: SolverOptions = DEFAULT_OPTIONS) -> TestReport:
    null_beta = np.asarray(null_beta, dtype=float)
    if null_beta.shape != (g.n,):
        raise DimensionMismatch(f"expected {g.n} null parameters, got shape {null_beta.shape}")
    full = beta_fit_mle(g, opts)
    return make_report("beta", "simple", full.loglik, beta_loglik(g, null_beta), g.n, g.n)


def beta_composite_test(
    g: SimpleGraph,
    tied,
    opts: SolverOptions = DEFAULT_OPTIONS,
    value: float | None = None,
) -> TestReport:
    """Tied-group test, centred at r.

    ``value=None`` leaves the common value free (r - 1 constraints); a number
    pins the tied group to it (r constraints), which is the null used in the
    power and QQ simulations.
    """
    tied = validate_tied(tied, g.n)
    full = beta_fit_mle(g, opts)
    null = beta_fit_restricted(g, tied, opts, value=value)
    r = len(tied)
    return make_report("beta", "composite", full.loglik, null.loglik, r, g.n, r)


def diag_quadratic(d, expected, diag_var) -> float:
    """Sum of squared standardised degree deviations."""
    diag_var = np.asarray(diag_var, dtype=float)
    if np.any(diag_var <= 0):
        raise NonpositiveVariance("all variances must be positive")
    dev = np.asarray(d, dtype=float) - np.asarray(expected, dtype=float)
    return float(np.sum(dev**2 / diag_var))


def full_quadratic(d, expected, cov, drop_index: int | None = None) -> float:
    """``dev' inv(cov) dev`` through a Cholesky solve.

    For Bradley-Terry pass the full n x n covariance and ``drop_index=0``:
    the full matrix is singular because its rows sum to zero.
    """
    dev = np.asarray(d, dtype=float) - np.asarray(expected, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if drop_index is not None:
        keep = np.arange(dev.shape[0]) != drop_index
        dev = dev[keep]
        if cov.shape[0] == keep.shape[0]:
            cov = cov[np.ix_(keep, keep)]
    if cov.shape != (dev.shape[0], dev.shape[0]):
        raise DimensionMismatch(f"covariance shape {cov.shape} does not match {dev.shape[0]} deviations")
    try:
        factor = cho_factor(cov)
    except LinAlgError as exc:
        raise SingularCovariance(f"covariance is not positive definite: {exc}") from None
    return float(dev @ cho_solve(factor, dev))


@dataclass(frozen=True)
class ConditionReport:
    """Growth quantities appearing in the sufficient conditions, with reference rates.

    Advisory only: the conditions are asymptotic and cannot be decided at a
    fixed n.
    """

    model: str
    n: int
    M_n: float
    bt_sum: float
    L_n: float
    beta_sum: float
    rate_M_n: float
    rate_bt_sum: float
    rate_L_n: float
    rate_beta_sum: float

    def to_dict(self) -> dict:
        return asdict(self)


def condition_report(model: str, beta, n: int | None = None) -> ConditionReport:
    """Both models' quantities are always filled; ``model`` labels the report."""
    if model not in ("bt", "beta"):
        raise ValueError(f"model must be 'bt' or 'beta', got {model!r}")
    beta = np.asarray(beta, dtype=float)
    n = beta.shape[0] if n is None else n
    if beta.shape != (n,):
        raise DimensionMismatch(f"expected {n} parameters, got shape {beta.shape}")
    diff = beta[:, None] - beta[None, :]
    # |(e^a - e^b)/(e^a + e^b)| = |tanh((a - b)/2)|, summed over all ordered pairs
    bt_sum = float(np.abs(np.tanh(diff / 2.0)).sum())
    iu, ju = np.triu_indices(n, 1)
    # unordered pairs, matching the single-counted pair sum of the log-likelihood
    beta_sum = float(np.abs(np.exp(beta[iu] + beta[ju]) - 0.5).sum())
    logn = math.log(n)
    return ConditionReport(
        model=model,
        n=n,
        M_n=float(np.exp(beta.max() - beta.min())),
        bt_sum=bt_sum,
        L_n=float(np.abs(beta).max()),
        beta_sum=beta_sum,
        rate_M_n=n ** (1 / 14) * logn ** (-2 / 7),
        rate_bt_sum=n ** (25 / 14) * logn ** (-15 / 7),
        rate_L_n=math.log(logn) if n > 2 else math.nan,
        rate_beta_sum=n**2 / logn,
    )
