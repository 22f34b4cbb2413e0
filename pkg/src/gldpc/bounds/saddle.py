"""Generating polynomials of the ensemble and the saddle-point inequality."""

from __future__ import annotations

import math
from math import comb
from typing import Sequence

import numpy as np

from . import _kernels as K


def poly_F(i: int, c: int, c1: int) -> list[int]:
    """Coefficient list (index = degree) of F_0..F_3.

    F0: degrees c-c1+1..c, F1: 0..c-c1, F2: c1..c, F3: 0..c1-1, all with C(c, j).
    """
    ranges = {0: (c - c1 + 1, c), 1: (0, c - c1), 2: (c1, c), 3: (0, c1 - 1)}
    if i not in ranges:
        raise ValueError(f"no polynomial F_{i}")
    lo, hi = ranges[i]
    return [comb(c, j) if lo <= j <= hi else 0 for j in range(c + 1)]


def poly_G(i: int, d: int, t: int) -> list[int]:
    """G_0 = sum_{j>t} C(d,j) x^j, G_1 = sum_{j<=t} C(d,j) x^j."""
    if i == 0:
        return [comb(d, j) if j > t else 0 for j in range(d + 1)]
    if i == 1:
        return [comb(d, j) for j in range(t + 1)]
    raise ValueError(f"no polynomial G_{i}")


def log_coefficients(coefs: Sequence[float], length: int | None = None) -> np.ndarray:
    """Log-coefficients with -inf for zeros, padded to ``length``."""
    n = len(coefs) if length is None else length
    out = np.full(n, -np.inf)
    for j, a in enumerate(coefs):
        if a < 0:
            raise ValueError("coefficients must be nonnegative")
        if a > 0:
            # math.log handles big ints exactly enough
            out[j] = math.log(a)
    return out


def _is_log_concave(lc: np.ndarray) -> bool:
    idx = np.flatnonzero(np.isfinite(lc))
    if idx.size == 0:
        return False
    if idx[-1] - idx[0] + 1 != idx.size:
        return False
    v = lc[idx[0]: idx[-1] + 1]
    return bool(np.all(v[1:-1] * 2 >= v[:-2] + v[2:] - 1e-12)) if v.size > 2 else True


def saddle_min(F: Sequence[float], L: float, k: float) -> tuple[float, float]:
    """inf_{x>0} L log F(x) - k log x, returned as (value, argmin x).

    The value may be -inf when k lies outside L times the degree range of F.
    At a boundary infimum the argmin is reported as 0.0 or inf.
    """
    lc = log_coefficients(F)
    if not np.isfinite(lc).any():
        raise ValueError("F is identically zero")
    if L < 0 or k < 0:
        raise ValueError("L and k must be nonnegative")
    if _is_log_concave(lc):
        val, u, st = K.saddle2(lc, float(L), np.zeros(1), 0.0, float(k))
        x = math.exp(u) if st == K.INTERIOR else (0.0 if st == K.AT_ZERO else math.inf)
        return float(val), x
    return _saddle_min_general(lc, float(L), float(k))


def _saddle_min_general(lc: np.ndarray, L: float, k: float) -> tuple[float, float]:
    # arbitrary nonnegative coefficients: convex in u, solve on a bracket with scipy
    from scipy.optimize import minimize_scalar
    from scipy.special import logsumexp

    idx = np.flatnonzero(np.isfinite(lc))
    lo, hi = L * idx[0], L * idx[-1]
    tol = 1e-11 * max(hi, 1e-300)
    if L == 0.0:
        return (0.0, 0.0) if k == 0.0 else (-math.inf, 0.0)
    if k < lo - tol or k > hi + tol:
        return -math.inf, 0.0
    if k <= lo + tol:
        return L * lc[idx[0]], 0.0
    if k >= hi - tol:
        return L * lc[idx[-1]], math.inf
    j = idx.astype(float)
    a = lc[idx]

    def obj(u):
        return L * logsumexp(a + j * u) - k * u

    res = minimize_scalar(obj, bracket=(-5.0, 5.0), tol=1e-12)
    return float(res.fun), math.exp(res.x)
