"""Union bound on the failure probability at finite blocklength N."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .exponent import BoundConfig

ETA_MODES = {"stirling": 0, "entropy": 1}
DENOMINATORS = {"exact": 0, "stirling": 1}


@dataclass
class FiniteLengthCurve:
    N: int
    i: np.ndarray
    log_pe: np.ndarray
    eta: str
    denominator: str
    visited: list = field(default_factory=list)

    @property
    def pe(self) -> np.ndarray:
        return np.exp(self.log_pe)

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.pe)

    def rows(self, stop_at_one: bool = False):
        """(i, pe_i, cumulative) rows, optionally ending once the cumulative reaches 1."""
        out = []
        for i, p, s in zip(self.i, self.pe, self.cumulative):
            if stop_at_one and s >= 1.0:
                break
            out.append((int(i), float(p), float(s)))
        return out


def check_blocklength(N: int, c: int, d: int) -> None:
    if N <= 0 or (N * c) % d:
        raise ValueError(f"N={N}: N*c = {N * c} is not divisible by d={d}")


def stratum_log_pe(i: int, N: int, cfg: BoundConfig, eta: str = "stirling",
                   denominator: str = "exact") -> tuple[float, int]:
    """log p_e(i) for exactly i corrupt variables; -inf for an empty stratum."""
    check_blocklength(N, cfg.c, cfg.d)
    lcf, lcg0, lcg1, *_ = cfg.kernel_args()
    lp, visited = K.finite_length_stratum(i, N, cfg.c, cfg.d, cfg.t, cfg.c1, lcf, lcg0, lcg1,
                                          ETA_MODES[eta], DENOMINATORS[denominator],
                                          cfg.prune_nats)
    return float(lp), int(visited)


def finite_length_bound(N: int, i_max: int, cfg: BoundConfig, eta: str = "stirling",
                        denominator: str = "exact", stop_at_one: bool = False,
                        progress: Optional[Callable[[int, float], None]] = None) -> FiniteLengthCurve:
    """p_e(i) for i = 1..i_max, each a sum over all admissible integer partition counts.

    ``denominator="exact"`` evaluates the edge multinomial by log-gamma;
    ``"stirling"`` uses its Stirling lower bound (the bound-form variant).
    With ``stop_at_one`` the computation ends at the first i whose cumulative
    value reaches 1.
    """
    if eta not in ETA_MODES or denominator not in DENOMINATORS:
        raise ValueError(f"unknown variant eta={eta!r} denominator={denominator!r}")
    check_blocklength(N, cfg.c, cfg.d)
    if i_max < 0 or i_max > N:
        raise ValueError("i_max must lie in 0..N")
    idx, logs, visited = [], [], []
    total = 0.0
    for i in range(1, i_max + 1):
        lp, v = stratum_log_pe(i, N, cfg, eta, denominator)
        idx.append(i)
        logs.append(lp)
        visited.append(v)
        total += math.exp(lp)
        if progress is not None:
            progress(i, lp)
        if stop_at_one and total >= 1.0:
            break
    return FiniteLengthCurve(N, np.array(idx, dtype=int), np.array(logs, dtype=float),
                             eta, denominator, visited)
