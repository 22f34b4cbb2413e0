"""Entropy function and bounds on multinomial coefficients (natural logs)."""

from __future__ import annotations

import math
from typing import Sequence

_TOL = 1e-12


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0.0 else 0.0


def entropy_h(*tau: float) -> float:
    """h(tau_1..tau_i) = -sum tau_j log tau_j - rest log rest, rest = 1 - sum tau."""
    if any(x < -_TOL for x in tau):
        raise ValueError(f"negative component in {tau}")
    total = math.fsum(tau)
    if total > 1.0 + _TOL:
        raise ValueError(f"components sum to {total} > 1")
    rest = max(0.0, 1.0 - total)
    return -(math.fsum(_xlogx(max(x, 0.0)) for x in tau) + _xlogx(rest))


def _check_parts(n: int, parts: Sequence[int]) -> list[int]:
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts) or sum(parts) > n:
        raise ValueError(f"invalid multinomial parts {parts} for n={n}")
    return parts


def log_multinomial(n: int, parts: Sequence[int]) -> float:
    """Exact log of n! / (n_1! ... n_i! n_{i+1}!) with n_{i+1} = n - sum(parts)."""
    parts = _check_parts(n, parts)
    rest = n - sum(parts)
    return math.lgamma(n + 1) - math.fsum(math.lgamma(p + 1) for p in parts) - math.lgamma(rest + 1)


def log_upper_h(n: int, parts: Sequence[int]) -> float:
    """log of the bound C(n; parts) <= exp(n h(parts/n))."""
    parts = _check_parts(n, parts)
    if n == 0:
        return 0.0
    return n * entropy_h(*(p / n for p in parts))


def _nonzero(n: int, parts: Sequence[int]) -> list[int]:
    return [p for p in _check_parts(n, parts) if p > 0]


def log_upper_stirling(n: int, parts: Sequence[int]) -> float:
    """Stirling-improved upper bound; zero parts are removed before applying it.

    Requires the remainder n - sum(parts) to be at least 1 after the removal.
    """
    kept = _nonzero(n, parts)
    if not kept:
        return 0.0
    rest = n - sum(kept)
    if rest < 1:
        raise ValueError("Stirling bound needs a positive remainder")
    i = len(kept)
    log_prod = math.fsum(math.log(p) for p in kept) + math.log(rest)
    return (-0.5 * i * math.log(2 * math.pi) + 1.0 / 12.0
            + 0.5 * (math.log(n) - log_prod) + log_upper_h(n, kept))


def stirling_c0(i: int) -> float:
    """C_0 = (2 pi)^(-i/2) exp(-(i+1)/12)."""
    return (2 * math.pi) ** (-i / 2) * math.exp(-(i + 1) / 12)


def log_lower_stirling(n: int, parts: Sequence[int]) -> float:
    """Stirling lower bound log C_0 + n h - 0.5 sum log n_j (zero parts removed)."""
    kept = _nonzero(n, parts)
    if not kept:
        return 0.0
    if n - sum(kept) < 1:
        raise ValueError("Stirling bound needs a positive remainder")
    i = len(kept)
    return math.log(stirling_c0(i)) + log_upper_h(n, kept) - 0.5 * math.fsum(math.log(p) for p in kept)
