"""Gilbert-Varshamov relative distance for comparison."""

from __future__ import annotations

import math

from scipy.optimize import brentq


def entropy_q(delta: float, q: int) -> float:
    if delta <= 0.0:
        return 0.0
    h = delta * math.log(q - 1) - delta * math.log(delta)
    if delta < 1.0:
        h -= (1.0 - delta) * math.log1p(-delta)
    return h / math.log(q)


def gv_distance(R: float, q: int) -> float:
    """delta in (0, 1 - 1/q) solving R = 1 - h_q(delta)."""
    if not (0.0 < R < 1.0):
        raise ValueError("rate must lie in (0, 1)")
    if q < 2:
        raise ValueError("q must be at least 2")
    return float(brentq(lambda x: 1.0 - entropy_q(x, q) - R, 1e-15, 1.0 - 1.0 / q, xtol=1e-12))
