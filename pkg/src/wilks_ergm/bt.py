"""Bradley-Terry model: likelihood, MLE, restricted MLE and degree covariance.

P(i beats j) = exp(b_i) / (exp(b_i) + exp(b_j)).  Only differences are
identified, so fitted parameters pin the reference vertex (default 0) at 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import ComparisonMatrix, Existence, ford_existence_check
from .errors import DimensionMismatch, NoMleExists
from .fitting import (
    DEFAULT_OPTIONS,
    FitResult,
    SolverOptions,
    block_labels,
    scaling_iteration,
    validate_tied,
)


def _check_dims(m: ComparisonMatrix, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (m.n,):
        raise DimensionMismatch(f"expected {m.n} parameters, got shape {beta.shape}")
    return beta


def win_probabilities(beta) -> np.ndarray:
    """Matrix of P(i beats j); the diagonal is 1/2 and should be ignored."""
    beta = np.asarray(beta, dtype=float)
    return expit(beta[:, None] - beta[None, :])


def bt_loglik(m: ComparisonMatrix, beta) -> float:
    beta = _check_dims(m, beta)
    iu, ju = np.triu_indices(m.n, 1)
    k = m.k[iu, ju]
    return float(m.out_degrees() @ beta - k @ np.logaddexp(beta[iu], beta[ju]))


def bt_expected_degrees(m: ComparisonMatrix, beta) -> np.ndarray:
    beta = _check_dims(m, beta)
    return (m.k * win_probabilities(beta)).sum(axis=1)


def bt_score(m: ComparisonMatrix, beta) -> np.ndarray:
    """Gradient of the log-likelihood: observed minus expected out-degrees."""
    return m.out_degrees() - bt_expected_degrees(m, beta)


@dataclass(frozen=True)
class BtCovariance:
    """Covariance of the out-degrees and its diagonal-plus-rank-one inverse approximation.

    ``v`` drops the reference vertex (index 0), so it is the (n-1)x(n-1)
    covariance of d_2..d_n.  ``s_approx[i, j] = delta_ij / v_ii + 1 / v_11``
    over the same indices, and ``w_bound`` bounds the entrywise gap between
    ``inv(v)`` and ``s_approx``.
    """

    v_full: np.ndarray
    v: np.ndarray
    v_full_diag: np.ndarray
    s_approx: np.ndarray
    w_bound: float
    max_merit_ratio: float


def bt_covariance(m: ComparisonMatrix, beta) -> BtCovariance:
    beta = _check_dims(m, beta)
    v_full = -m.k * 0.25 / np.cosh((beta[:, None] - beta[None, :]) / 2.0) ** 2
    np.fill_diagonal(v_full, 0.0)
    np.fill_diagonal(v_full, -v_full.sum(axis=1))
    diag = np.diag(v_full).copy()
    v = v_full[1:, 1:].copy()
    with np.errstate(divide="ignore"):
        s = np.diag(1.0 / diag[1:]) + 1.0 / diag[0]
    n = m.n
    N = m.max_k
    M = float(np.exp(beta.max() - beta.min()))
    w_bound = 4.0 * N * M**2 * (1.0 + N * M) / (n - 1) ** 2
    return BtCovariance(v_full, v, diag, s, w_bound, M)


def _tolerance(m: ComparisonMatrix, opts: SolverOptions) -> float:
    # K(n-1) for uniform designs; largest number of games per vertex otherwise.
    return opts.tol_scale * max(1.0, float(m.k.sum(axis=1).max()))


def bt_fit_mle(
    m: ComparisonMatrix,
    opts: SolverOptions = DEFAULT_OPTIONS,
    reference: int = 0,
) -> FitResult:
    """Maximum likelihood estimate with ``beta[reference] = 0``.

    Ford's condition is checked first so that nonexistence surfaces as
    ``NoMleExists`` (with a witness split) instead of a runaway iteration.
    """
    if not 0 <= reference < m.n:
        raise ValueError(f"reference vertex {reference} outside 0..{m.n - 1}")
    verdict = ford_existence_check(m)
    if not verdict:
        raise NoMleExists(verdict.describe(), witness=verdict.witness)
    d = m.out_degrees().astype(float)
    beta, sweeps, resid = scaling_iteration(
        np.zeros(m.n), d, lambda b: bt_expected_degrees(m, b),
        _tolerance(m, opts), opts, reference=reference,
    )
    return FitResult("bt", beta, bt_loglik(m, beta), sweeps, resid, verdict)


def contract(m: ComparisonMatrix, labels: np.ndarray) -> ComparisonMatrix:
    """Merge vertices sharing a label into one node; within-block games are dropped."""
    nb = int(labels.max()) + 1
    onehot = np.zeros((m.n, nb), dtype=np.int64)
    onehot[np.arange(m.n), labels] = 1
    w = onehot.T @ m.wins @ onehot
    np.fill_diagonal(w, 0)
    return ComparisonMatrix(w)


def bt_fit_restricted(
    m: ComparisonMatrix,
    tied,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> FitResult:
    """MLE under the constraint that every vertex in ``tied`` shares one parameter.

    The tied group is collapsed to a single merit and the unrestricted solver
    runs on the contracted comparisons.  Vertex 0 stays the reference, so the
    shared value is 0 whenever vertex 0 is tied.
    """
    tied = validate_tied(tied, m.n)
    if len(tied) == m.n:
        beta = np.zeros(m.n)
        return FitResult("bt", beta, bt_loglik(m, beta), 0, 0.0, Existence(True), tied)
    labels = block_labels(m.n, tied)
    reduced = contract(m, labels)
    try:
        fit = bt_fit_mle(reduced, opts, reference=0)
    except NoMleExists as exc:
        witness = None
        if exc.witness is not None:
            witness = tuple(
                tuple(int(v) for v in np.flatnonzero(np.isin(labels, side)))
                for side in exc.witness
            )
        raise NoMleExists(f"restricted model: {exc}", witness=witness) from exc
    beta = fit.beta[labels]
    return FitResult("bt", beta, bt_loglik(m, beta), fit.iterations, fit.residual,
                     fit.existence, tied)
