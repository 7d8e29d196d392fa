"""The beta-model for undirected graphs: P(edge ij) = logistic(b_i + b_j).

All n parameters are free.  The unrestricted fit decides existence exactly
from the degree sequence before iterating.  Restricted fits screen block
boundary totals and otherwise detect nonexistence from the iteration: a
parameter escaping the divergence bound or a stalled residual is reported as
``NoMleExists``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import Existence, SimpleGraph, beta_existence_check
from .errors import DimensionMismatch, Diverged, NoMleExists
from .fitting import (
    DEFAULT_OPTIONS,
    FitResult,
    SolverOptions,
    block_labels,
    scaling_iteration,
    validate_tied,
)


def _check_dims(n: int, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (n,):
        raise DimensionMismatch(f"expected {n} parameters, got shape {beta.shape}")
    return beta


def edge_probabilities(beta) -> np.ndarray:
    """Matrix of P(edge ij) with a zero diagonal."""
    beta = np.asarray(beta, dtype=float)
    p = expit(beta[:, None] + beta[None, :])
    np.fill_diagonal(p, 0.0)
    return p


def beta_loglik(g: SimpleGraph, beta) -> float:
    beta = _check_dims(g.n, beta)
    iu, ju = np.triu_indices(g.n, 1)
    return float(g.degrees() @ beta - np.logaddexp(0.0, beta[iu] + beta[ju]).sum())


def beta_expected_degrees(g: SimpleGraph | int, beta) -> np.ndarray:
    """Expected degrees; only the vertex count of ``g`` matters."""
    n = g if isinstance(g, (int, np.integer)) else g.n
    beta = _check_dims(n, beta)
    return edge_probabilities(beta).sum(axis=1)


def beta_score(g: SimpleGraph, beta) -> np.ndarray:
    return g.degrees() - beta_expected_degrees(g, beta)


@dataclass(frozen=True)
class BetaCovariance:
    u: np.ndarray

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.u).copy()


def beta_covariance(n: int, beta) -> BetaCovariance:
    beta = _check_dims(n, beta)
    # p(1 - p) = 1 / (4 cosh^2(s/2)); stays <= 1/4 under rounding
    u = 0.25 / np.cosh((beta[:, None] + beta[None, :]) / 2.0) ** 2
    np.fill_diagonal(u, 0.0)
    np.fill_diagonal(u, u.sum(axis=1))
    return BetaCovariance(u)


def _solve_blocks(g: SimpleGraph, labels: np.ndarray, opts: SolverOptions, fixed=None):
    """Fit one parameter per block label; ``labels == -1`` marks vertices held at ``fixed``."""
    n = g.n
    free = labels >= 0
    nb = int(labels.max()) + 1
    lab = labels[free]
    sizes = np.bincount(lab, minlength=nb)
    observed = np.bincount(lab, weights=g.degrees()[free], minlength=nb).astype(float)
    on_boundary = (observed == 0) | (observed == sizes * (n - 1))
    if np.any(on_boundary):
        blocks = np.flatnonzero(on_boundary)
        members = [int(v) + 1 for v in np.flatnonzero(free)[np.isin(lab, blocks)]]
        raise NoMleExists(f"NotExists (boundary degree total for vertices {members[:10]})")

    beta = np.full(n, 0.0 if fixed is None else float(fixed))

    def expand(theta):
        beta[free] = theta[lab]
        return beta

    def expected(theta):
        e = beta_expected_degrees(n, expand(theta))[free]
        return np.bincount(lab, weights=e, minlength=nb)

    tol = opts.tol_scale * (n - 1) * int(sizes.max())
    try:
        theta, sweeps, resid = scaling_iteration(
            np.zeros(nb), observed, expected, tol, opts, detect_stall=True,
        )
    except Diverged as exc:
        raise NoMleExists(f"NotExists (iteration diverged: {exc})") from exc
    return expand(theta).copy(), sweeps, resid


def beta_fit_mle(g: SimpleGraph, opts: SolverOptions = DEFAULT_OPTIONS) -> FitResult:
    verdict = beta_existence_check(g)
    if not verdict:
        raise NoMleExists(verdict.describe())
    beta, sweeps, resid = _solve_blocks(g, np.arange(g.n), opts)
    return FitResult("beta", beta, beta_loglik(g, beta), sweeps, resid, Existence(True))


def beta_fit_restricted(
    g: SimpleGraph,
    tied,
    opts: SolverOptions = DEFAULT_OPTIONS,
    value: float | None = None,
) -> FitResult:
    """MLE with every vertex in ``tied`` sharing one parameter.

    With ``value=None`` the shared value is free and is updated from the
    group's summed degree equation alongside the other coordinates.  With a
    number, the tied vertices are held at that value (the null
    ``beta_1 = ... = beta_r = value``) and only the rest are fitted.
    """
    tied = validate_tied(tied, g.n)
    if value is None:
        labels = block_labels(g.n, tied)
    else:
        if len(tied) == g.n:
            beta = np.full(g.n, float(value))
            return FitResult("beta", beta, beta_loglik(g, beta), 0, 0.0, Existence(True), tied)
        labels = np.full(g.n, -1)
        rest = np.setdiff1d(np.arange(g.n), tied)
        labels[rest] = np.arange(rest.size)
    beta, sweeps, resid = _solve_blocks(g, labels, opts, fixed=value)
    return FitResult("beta", beta, beta_loglik(g, beta), sweeps, resid, Existence(True), tied)
