"""Synthetic round-robin seasons in the comparison-file format.

Real league logs are not bundled; this produces data of the same shape
(every pair meets a few times, counts vary by pair) for demos and tests.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .data import ComparisonMatrix


def synthetic_season(n_teams: int = 30, games=(3, 4), seed=0, beta=None, spread: float = 1.0) -> ComparisonMatrix:
    """Each pair plays a number of games drawn uniformly from ``games``.

    Strengths default to evenly spaced values over ``[-spread, spread]``
    shifted so team 1 is the reference.
    """
    rng = np.random.default_rng(seed)
    if beta is None:
        beta = np.linspace(-spread, spread, n_teams)
    beta = np.asarray(beta, dtype=float)
    beta = beta - beta[0]
    iu, ju = np.triu_indices(n_teams, 1)
    k = rng.choice(np.asarray(games), size=iu.size)
    won = rng.binomial(k, expit(beta[iu] - beta[ju]))
    wins = np.zeros((n_teams, n_teams), dtype=np.int64)
    wins[iu, ju] = won
    wins[ju, iu] = k - won
    return ComparisonMatrix(wins)
