"""Pointwise integrand helpers shared by the energy and initial-data code."""

from __future__ import annotations

import numpy as np


def entropy_density(n: np.ndarray) -> np.ndarray:
    """n*log(n) - n + 1 with the 0*log(0) = 0 convention.

    Evaluated as n*log1p(n-1) - (n-1) so the quadratic minimum at n = 1 is
    resolved without cancellation; the value at n = 0 is exactly 1.
    """
    n = np.asarray(n)
    d = n - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * np.log1p(d) - d
    return np.where(n > 0.0, out, 1.0)


def velocity_log_density(n: np.ndarray, speed2: np.ndarray) -> np.ndarray:
    """n*(1+|v|^2)*log(1+|v|^2), the velocity-compactness integrand."""
    return n * (1.0 + speed2) * np.log1p(speed2)
