"""Standard normal tail probabilities and quantiles.

``statistics.NormalDist.inv_cdf`` is Wichura's AS241 rational approximation
(relative error about 1e-16); the upper tail goes through ``erfc`` so it keeps
full relative precision far into the right tail.
"""

import math
from statistics import NormalDist

import numpy as np

_STD = NormalDist()


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_upper_p(z: float) -> float:
    """P(Z > z) for standard normal Z."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {p}")
    return _STD.inv_cdf(p)


normal_cdf_array = np.vectorize(normal_cdf, otypes=[float])
normal_quantile_array = np.vectorize(normal_quantile, otypes=[float])
