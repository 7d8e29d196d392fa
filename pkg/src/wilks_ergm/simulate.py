"""Seeded Monte Carlo experiments: null QQ runs, power grids and moment checks.

Replicate ``i`` draws from ``SeedSequence(base_seed, spawn_key=(i,))`` so its
data depend only on ``(base_seed, i)``.  Results are merged by replicate
index, so any number of worker processes produces identical output.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.special import expit

from .beta import beta_covariance, beta_expected_degrees
from .bt import bt_covariance, bt_expected_degrees
from .data import ComparisonMatrix, SimpleGraph
from .errors import EmptySample, FitError, TooManyFailures
from .normal import normal_cdf_array, normal_quantile, normal_quantile_array
from .stats import (
    beta_composite_test,
    beta_simple_test,
    bt_composite_test,
    bt_simple_test,
    diag_quadratic,
    full_quadratic,
)

log = logging.getLogger(__name__)

LN_RULES = ("zero", "log_log_n", "sqrt_log_n", "log_n")
_LN_ALIASES = {"0": "zero", "loglog": "log_log_n", "sqrtlog": "sqrt_log_n", "log": "log_n"}


def resolve_ln(rule, n: int) -> float:
    """Turn a growth rule (name or number) into the value of L_n for this n."""
    if isinstance(rule, (int, float)):
        return float(rule)
    key = _LN_ALIASES.get(str(rule).strip(), str(rule).strip())
    if key == "zero":
        return 0.0
    if key == "log_log_n":
        return math.log(math.log(n))
    if key == "sqrt_log_n":
        return math.sqrt(math.log(n))
    if key == "log_n":
        return math.log(n)
    try:
        return float(key)
    except ValueError:
        raise ValueError(f"unknown L_n rule {rule!r}; use one of {LN_RULES} or a number") from None


def gen_null_betas(model: str, n: int, ln, composite_r: int | None = None) -> np.ndarray:
    """Linear parameters ``(i-1) L_n / (n-1)``; the first ``composite_r`` are zeroed."""
    beta = np.arange(n) * resolve_ln(ln, n) / (n - 1)
    if composite_r is not None:
        beta[:composite_r] = 0.0
    return beta


def gen_power_betas(n: int, r: int, c: float, ln) -> np.ndarray:
    """``i c / r`` for the first r vertices, ``(i - r) L_n / n`` after (1-based i)."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    i = np.arange(1, n + 1, dtype=float)
    return np.where(i <= r, i * c / r, (i - r) * resolve_ln(ln, n) / n)


def replicate_rng(base_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(index,)))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_bt(n: int, K: int, beta, seed) -> ComparisonMatrix:
    rng = _rng(seed)
    beta = np.asarray(beta, dtype=float)
    iu, ju = np.triu_indices(n, 1)
    upper = np.zeros((n, n), dtype=np.int64)
    upper[iu, ju] = rng.binomial(K, expit(beta[iu] - beta[ju]))
    return ComparisonMatrix.from_upper(upper, K)


def sample_beta(n: int, beta, seed) -> SimpleGraph:
    rng = _rng(seed)
    beta = np.asarray(beta, dtype=float)
    iu, ju = np.triu_indices(n, 1)
    adj = np.zeros((n, n), dtype=np.int64)
    adj[iu, ju] = rng.random(iu.shape[0]) < expit(beta[iu] + beta[ju])
    return SimpleGraph(adj + adj.T)


@dataclass(frozen=True)
class SimConfig:
    model: str
    n: int
    ln: object = "zero"
    r: int | None = None
    c: float = 0.0
    K: int = 1
    replicates: int = 1000
    base_seed: int = 0
    alpha: float = 0.05
    tail: str = "two-sided"
    # beta-model composite nulls pin the tied group here; None leaves it free
    tied_value: float | None = 0.0

    def __post_init__(self):
        if self.model not in ("bt", "beta"):
            raise ValueError(f"model must be 'bt' or 'beta', got {self.model!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.r is not None and not 2 <= self.r <= self.n:
            raise ValueError(f"need 2 <= r <= n, got r={self.r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.tail not in ("two-sided", "upper"):
            raise ValueError(f"tail must be 'two-sided' or 'upper', got {self.tail!r}")
        resolve_ln(self.ln, self.n)

    @property
    def tied_size(self) -> int:
        return self.r if self.r is not None else self.n // 2

    @property
    def critical_value(self) -> float:
        level = self.alpha / 2 if self.tail == "two-sided" else self.alpha
        return normal_quantile(1.0 - level)

    def rejects(self, z: np.ndarray) -> np.ndarray:
        return (np.abs(z) if self.tail == "two-sided" else z) > self.critical_value


def _sample(cfg: SimConfig, beta, rng):
    if cfg.model == "bt":
        return sample_bt(cfg.n, cfg.K, beta, rng)
    return sample_beta(cfg.n, beta, rng)


def _test(cfg: SimConfig, data, null_kind: str, null_beta):
    tied = range(cfg.tied_size)
    if cfg.model == "bt":
        if null_kind == "simple":
            return bt_simple_test(data, null_beta)
        return bt_composite_test(data, tied)
    if null_kind == "simple":
        return beta_simple_test(data, null_beta)
    return beta_composite_test(data, tied, value=cfg.tied_value)


def _replicate(cfg: SimConfig, null_kind: str, true_beta, index: int):
    rng = replicate_rng(cfg.base_seed, index)
    data = _sample(cfg, true_beta, rng)
    try:
        return _test(cfg, data, null_kind, true_beta).z, None
    except FitError as exc:
        return math.nan, type(exc).__name__


def _run(cfg: SimConfig, null_kind: str, true_beta, workers: int):
    task = partial(_replicate, cfg, null_kind, true_beta)
    indices = range(cfg.replicates)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, indices, chunksize=max(1, cfg.replicates // (8 * workers))))
    else:
        results = [task(i) for i in indices]
    z = np.array([r[0] for r in results], dtype=float)
    failures = Counter(r[1] for r in results if r[1] is not None)
    return z, failures


def _check_failures(cfg: SimConfig, failures: Counter, label: str):
    nfail = sum(failures.values())
    if 2 * nfail > cfg.replicates:
        raise TooManyFailures(
            f"{label}: {nfail} of {cfg.replicates} replicates failed ({dict(failures)})",
            failures=nfail, replicates=cfg.replicates,
        )


def ks_distance(samples) -> float:
    """Two-sided Kolmogorov distance between the sample's empirical CDF and N(0, 1)."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise EmptySample("KS distance of an empty sample")
    f = normal_cdf_array(x)
    k = np.arange(1, x.size + 1)
    return float(max(np.max(k / x.size - f), np.max(f - (k - 1) / x.size)))


@dataclass(frozen=True)
class QqSummary:
    theoretical: np.ndarray
    empirical: np.ndarray
    ks_distance: float
    replicates: int
    failures: dict = field(default_factory=dict)

    @property
    def failed_replicates(self) -> int:
        return sum(self.failures.values())

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.theoretical.tolist(), self.empirical.tolist()))

    def to_csv(self) -> str:
        lines = ["k,theoretical,empirical"]
        lines += [f"{k},{t:.10g},{e:.10g}" for k, (t, e) in enumerate(self.pairs, start=1)]
        return "\n".join(lines) + "\n"


def qq_summary(z, replicates: int | None = None, failures=None) -> QqSummary:
    """Sorted (normal quantile, empirical quantile) pairs for the finite ``z``."""
    z = np.sort(np.asarray(z, dtype=float))
    z = z[np.isfinite(z)]
    if z.size == 0:
        raise EmptySample("no successful replicates")
    theoretical = normal_quantile_array((np.arange(1, z.size + 1) - 0.5) / z.size)
    return QqSummary(theoretical, z, ks_distance(z), replicates or z.size, dict(failures or {}))


def run_qq_experiment(cfg: SimConfig, null_kind: str = "simple", workers: int = 1) -> QqSummary:
    """Null distribution of the normalised statistic under the linear design.

    Simple nulls test the true parameters ``(i-1) L_n / (n-1)``; composite
    nulls tie the first ``cfg.tied_size`` vertices (default n/2), whose true
    parameters are zero.  Replicates without an MLE are dropped and counted.
    """
    if null_kind not in ("simple", "composite"):
        raise ValueError(f"null_kind must be 'simple' or 'composite', got {null_kind!r}")
    r = cfg.tied_size if null_kind == "composite" else None
    true_beta = gen_null_betas(cfg.model, cfg.n, cfg.ln, r)
    z, failures = _run(cfg, null_kind, true_beta, workers)
    _check_failures(cfg, failures, f"{cfg.model} {null_kind} n={cfg.n} Ln={cfg.ln}")
    return qq_summary(z, cfg.replicates, failures)


@dataclass(frozen=True)
class PowerRow:
    model: str
    n: int
    ln: object
    r: int
    c: float
    rejections: int
    failures: int
    replicates: int
    too_many_failures: bool = False

    @property
    def successes(self) -> int:
        return self.replicates - self.failures

    @property
    def rejection_rate(self) -> float:
        if self.too_many_failures or self.successes == 0:
            return math.nan
        return self.rejections / self.successes

    def csv_row(self) -> str:
        return f"{self.model},{self.n},{self.ln},{self.r},{self.c:g},{self.rejections},{self.failures},{self.rejection_rate:.4f}"


POWER_CSV_HEADER = "model,n,Ln,r,c,rejections,failures,rate"


def power_csv(rows) -> str:
    return "\n".join([POWER_CSV_HEADER] + [row.csv_row() for row in rows]) + "\n"


def run_power_cell(cfg: SimConfig, workers: int = 1) -> PowerRow:
    """Rejection rate of the composite test tying the first ``cfg.r`` vertices.

    The default rule rejects when ``|z|`` exceeds the two-sided normal
    critical value; ``cfg.tail="upper"`` switches to ``z > z_(1-alpha)``.
    """
    r = cfg.tied_size
    true_beta = gen_power_betas(cfg.n, r, cfg.c, cfg.ln)
    z, failures = _run(cfg, "composite", true_beta, workers)
    _check_failures(cfg, failures, f"{cfg.model} power n={cfg.n} Ln={cfg.ln} r={r} c={cfg.c}")
    ok = np.isfinite(z)
    return PowerRow(cfg.model, cfg.n, cfg.ln, r, cfg.c, int(np.sum(cfg.rejects(z[ok]))),
                    int(np.sum(~ok)), cfg.replicates)


def run_power_experiment(cells, workers: int = 1, strict: bool = False) -> list[PowerRow]:
    """Run every cell; with ``strict=False`` a failed cell becomes a flagged row."""
    rows = []
    for cfg in cells:
        try:
            rows.append(run_power_cell(cfg, workers))
        except TooManyFailures as exc:
            if strict:
                raise
            log.warning("TooManyFailures: %s", exc)
            rows.append(PowerRow(cfg.model, cfg.n, cfg.ln, cfg.tied_size, cfg.c, 0,
                                 exc.failures, exc.replicates, too_many_failures=True))
    return rows


def power_grid(model: str, ns, lns, rs, cs, **common) -> list[SimConfig]:
    return [SimConfig(model, n, ln, r, c, **common) for n in ns for ln in lns for r in rs for c in cs]


def quadratic_form_samples(model: str, n: int, replicates: int, base_seed: int = 0, K: int = 1, beta=None):
    """Draw degree sequences at ``beta`` (default 0) and evaluate both quadratic forms.

    Returns ``(diag, full)`` arrays: the diagonally standardised sum and the
    exact inverse-covariance form (BT drops vertex 0, beta-model keeps all).
    """
    beta = np.zeros(n) if beta is None else np.asarray(beta, dtype=float)
    if model == "bt":
        probe = ComparisonMatrix.from_upper(np.zeros((n, n), dtype=np.int64), K)
        expected = bt_expected_degrees(probe, beta)
        cov = bt_covariance(probe, beta)
        var, full_cov, drop = cov.v_full_diag, cov.v, 0
    else:
        expected = beta_expected_degrees(n, beta)
        cov = beta_covariance(n, beta)
        var, full_cov, drop = cov.diag, cov.u, None
    diag = np.empty(replicates)
    full = np.empty(replicates)
    for i in range(replicates):
        rng = replicate_rng(base_seed, i)
        data = sample_bt(n, K, beta, rng) if model == "bt" else sample_beta(n, beta, rng)
        d = data.out_degrees() if model == "bt" else data.degrees()
        diag[i] = diag_quadratic(d, expected, var)
        full[i] = full_quadratic(d, expected, full_cov, drop_index=drop)
    return diag, full
