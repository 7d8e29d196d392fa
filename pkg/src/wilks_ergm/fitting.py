"""Solver options, the fit result record and the shared log-scaling iteration.

Both models admit the same multiplicative fixed point on ``w = exp(beta)``:

    w_b <- w_b * observed_b / expected_b(w)

For Bradley-Terry this is the minorization (Zermelo/Ford) update; for the
beta-model it is the log-ratio fixed point of the degree equations.  Blocks
``b`` are single vertices for unrestricted fits and tied groups otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .data import Existence
from .errors import Diverged, NotConverged


@dataclass(frozen=True)
class SolverOptions:
    tol_scale: float = 1e-10
    max_iter: int = 10_000
    divergence_bound: float = 40.0
    # beta-model only: sweeps without improving the best residual before
    # the fit is declared divergent.
    stall_window: int = 500


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class FitResult:
    model: str
    beta: np.ndarray
    loglik: float
    iterations: int
    residual: float
    existence: Existence = field(default_factory=lambda: Existence(True))
    tied: tuple[int, ...] | None = None

    @property
    def merits(self) -> np.ndarray:
        return np.exp(self.beta)

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "n": int(self.beta.shape[0]),
            "beta": [float(b) for b in self.beta],
            "loglik": float(self.loglik),
            "iterations": int(self.iterations),
            "residual": float(self.residual),
            "existence": self.existence.describe(),
        }
        if self.tied is not None:
            out["tied"] = [v + 1 for v in self.tied]
        return out


def scaling_iteration(
    theta0: np.ndarray,
    observed: np.ndarray,
    expected: Callable[[np.ndarray], np.ndarray],
    tol: float,
    opts: SolverOptions,
    reference: int | None = None,
    detect_stall: bool = False,
) -> tuple[np.ndarray, int, float]:
    """Iterate ``theta += log(observed) - log(expected(theta))`` to tolerance.

    Returns ``(theta, sweeps, residual)`` where ``residual`` is the max-norm
    gap between observed and expected.  Raises ``Diverged`` when a parameter
    exceeds ``opts.divergence_bound`` in absolute value or (with
    ``detect_stall``) the residual fails to improve for ``opts.stall_window``
    sweeps, and ``NotConverged`` after ``opts.max_iter`` sweeps.
    """
    theta = np.array(theta0, dtype=float)
    log_obs = np.log(observed)
    best = np.inf
    best_at = 0
    for sweep in range(opts.max_iter + 1):
        e = expected(theta)
        resid = float(np.max(np.abs(observed - e)))
        if resid <= tol:
            return theta, sweep, resid
        if detect_stall:
            if resid < best:
                best, best_at = resid, sweep
            elif sweep - best_at >= opts.stall_window:
                raise Diverged(
                    f"residual stalled at {best:.3g} for {opts.stall_window} sweeps",
                    iterations=sweep, residual=resid,
                )
        if sweep == opts.max_iter:
            break
        theta += log_obs - np.log(e)
        if reference is not None:
            theta -= theta[reference]
        if np.max(np.abs(theta)) > opts.divergence_bound:
            raise Diverged(
                f"|beta| exceeded {opts.divergence_bound} after {sweep + 1} sweeps",
                iterations=sweep + 1, residual=resid,
            )
    raise NotConverged(
        f"residual {resid:.3g} above tolerance {tol:.3g} after {opts.max_iter} sweeps",
        iterations=opts.max_iter, residual=resid,
    )


def validate_tied(tied, n: int) -> tuple[int, ...]:
    """Normalise a 0-based tied vertex set; raise ``InvalidTiedSet`` if unusable."""
    from .errors import InvalidTiedSet

    try:
        t = tuple(sorted({int(v) for v in tied}))
    except (TypeError, ValueError):
        raise InvalidTiedSet(f"tied set must contain integers, got {tied!r}") from None
    if len(t) < 2:
        raise InvalidTiedSet(f"tied set needs at least two vertices, got {len(t)}")
    if t[0] < 0 or t[-1] >= n:
        raise InvalidTiedSet(f"tied vertices must lie in 0..{n - 1}")
    return t


def block_labels(n: int, tied: tuple[int, ...]) -> np.ndarray:
    """Map each vertex to its block; blocks are numbered by smallest member."""
    rep = np.arange(n)
    rep[list(tied)] = tied[0]
    _, labels = np.unique(rep, return_inverse=True)
    return labels
