"""The exponent psi, its maximization f(alpha), and the radii alpha0 / alphaR."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.stats import binom

from . import _kernels as K
from .multinomial import entropy_h, stirling_c0
from .saddle import log_coefficients, poly_F, poly_G


class ConditionError(ValueError):
    """The admissibility condition on (c, c1, t) fails."""


class NoRootError(RuntimeError):
    """No sign change of f was found in the scanned range."""


def condition_check(c: int, c1: int, t: int) -> bool:
    """True iff c1 >= 2 and (c - c1 + 1) t / (t + 1) > 1."""
    return c1 >= 2 and (c - c1 + 1) * t > t + 1


def condition_message(c: int, c1: int, t: int) -> str:
    if c1 < 2:
        return f"c1 = {c1} must be at least 2"
    return f"(c - c1 + 1) * t / (t + 1) = {(c - c1 + 1) * t / (t + 1):.6g} must exceed 1 (c={c}, c1={c1}, t={t})"


def default_c1(c: int) -> int:
    return (c + 1) // 2


@dataclass(frozen=True)
class BoundConfig:
    c: int
    d: int
    t: int
    c1: int
    grid_w: int = 48           # outer grid points over omega/alpha
    grid_r: int = 36           # outer grid points over phi/omega
    starts: int = 4            # Nelder-Mead restarts from the best grid points
    w_min: float = 1e-12
    alpha_min: float = 1e-8
    alpha_max: float = 0.5
    scan_factor: float = 1.5
    root_rtol: float = 1e-4    # tighter than the required 1e-3
    prune_nats: float = 40.0

    def __post_init__(self):
        if not (1 <= self.c1 <= self.c):
            raise ValueError(f"c1={self.c1} outside 1..c")
        if not (0 <= self.t < self.d):
            raise ValueError(f"t={self.t} outside 0..d-1")

    @property
    def C0(self) -> float:
        return stirling_c0(3)

    @property
    def C1(self) -> float:
        return 1.0 / self.C0

    @property
    def admissible(self) -> bool:
        return condition_check(self.c, self.c1, self.t)

    @cached_property
    def lcf(self) -> np.ndarray:
        return np.vstack([log_coefficients(poly_F(i, self.c, self.c1)) for i in range(4)])

    @cached_property
    def lcg0(self) -> np.ndarray:
        return log_coefficients(poly_G(0, self.d, self.t))

    @cached_property
    def lcg1(self) -> np.ndarray:
        return log_coefficients(poly_G(1, self.d, self.t))

    def kernel_args(self):
        return (self.lcf, self.lcg0, self.lcg1, float(self.c), float(self.d),
                float(self.t), float(self.c1))

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items()}


@dataclass
class FractionPoint:
    alpha: float
    gamma: float
    delta: float
    phi: float
    omega: float
    nu: Optional[float] = None

    def violations(self, cfg: BoundConfig) -> dict:
        """Amount by which each constraint is violated (positive = violated)."""
        a, g, dl, ph, om = self.alpha, self.gamma, self.delta, self.phi, self.omega
        c, d, t, c1 = cfg.c, cfg.d, cfg.t, cfg.c1
        v = {
            "gamma>=0": -g,
            "gamma<=alpha": g - a,
            "delta>=0": -dl,
            "delta<=1-alpha": dl - (1 - a),
            "omega>=0": -om,
            "omega<=alpha": om - a,
            "omega<=phi": om - ph,
            "alpha-omega<=1-phi": (a - om) - (1 - ph),
            "phi<=omega*d/(t+1)": ph - om * d / (t + 1),
            "delta<=(phi-omega)c/c1": dl - (ph - om) * c / c1,
            "gamma<=omega*c/(c-c1+1)": g - om * c / (c - c1 + 1),
        }
        if self.nu is None:
            v["delta>=alpha-gamma"] = (a - g) - dl
        else:
            v["gamma+delta>=nu"] = self.nu - (g + dl)
        return v

    def max_violation(self, cfg: BoundConfig) -> float:
        return max(self.violations(cfg).values())


def rho_parts(pt: FractionPoint, cfg: BoundConfig) -> tuple[float, float, float, float]:
    lcf, lcg0, lcg1, c, d, _, _ = cfg.kernel_args()
    return tuple(float(x) for x in K.rho_parts(lcf, lcg0, lcg1, c, d, pt.alpha, pt.gamma,
                                                 pt.delta, pt.phi, pt.omega))


def rho(pt: FractionPoint, cfg: BoundConfig) -> float:
    parts = rho_parts(pt, cfg)
    return -math.inf if -math.inf in parts else math.fsum(parts)


def psi(pt: FractionPoint, cfg: BoundConfig) -> float:
    r = rho(pt, cfg)
    if r == -math.inf:
        return r
    c, d = cfg.c, cfg.d
    return (entropy_h(pt.gamma, pt.alpha - pt.gamma, pt.delta) + (c / d) * entropy_h(pt.phi)
            + r - c * entropy_h(pt.omega, pt.alpha - pt.omega, pt.phi - pt.omega))


def psi_tilde(pt: FractionPoint, cfg: BoundConfig) -> float:
    r = rho(pt, cfg)
    if r == -math.inf:
        return r
    c, d, a = cfg.c, cfg.d, pt.alpha
    split = a * entropy_h(pt.gamma / a) + (1 - a) * entropy_h(pt.delta / (1 - a))
    return (split + (c / d) * entropy_h(pt.phi)
            + r - c * entropy_h(pt.omega, pt.alpha - pt.omega, pt.phi - pt.omega))


@dataclass
class FResult:
    value: float
    witness: Optional[FractionPoint]
    evaluations: int = 0


def _outer(cfg: BoundConfig, alpha: float, s: float, w: float, r: float):
    lcf, lcg0, lcg1, c, d, t, c1 = cfg.kernel_args()
    omega = w * alpha
    return K.outer_value(lcf, lcg0, lcg1, c, d, t, c1, alpha, r * omega, omega, s)


def f_alpha(alpha: float, cfg: BoundConfig, nu: Optional[float] = None) -> FResult:
    """Maximum of psi (worst-case, nu=None) or psi_tilde (random errors with nu).

    The inner (gamma, delta) problem is concave and solved exactly; the outer
    (omega, phi) problem is searched on a log grid then refined by Nelder-Mead.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    s = alpha if nu is None else float(nu)
    shift = 0.0 if nu is None else entropy_h(alpha)
    lcf, lcg0, lcg1, c, d, t, c1 = cfg.kernel_args()
    r_max = cfg.d / (cfg.t + 1)
    ws = np.geomspace(cfg.w_min, 1.0, cfg.grid_w)
    rs = np.geomspace(1.0, r_max, cfg.grid_r)
    grid = K.outer_grid(lcf, lcg0, lcg1, c, d, t, c1, alpha, s, ws, rs)
    nevals = grid.size
    finite = np.isfinite(grid)
    if not finite.any():
        return FResult(-math.inf, None, nevals)

    lw_lo, lr_hi = math.log(cfg.w_min), math.log(r_max)

    # smooth map of R^2 onto the (log w, log r) box, so boundary optima are
    # approached without the flat regions that clamping would create
    def to_box(z):
        sw = 0.5 * (1.0 + math.tanh(0.5 * z[0]))
        sr = 0.5 * (1.0 + math.tanh(0.5 * z[1]))
        return math.exp(lw_lo * (1.0 - sw)), math.exp(lr_hi * sr)

    def from_box(w, r):
        def logit(p):
            p = min(max(p, 1e-12), 1 - 1e-12)
            return math.log(p / (1.0 - p))
        return np.array([logit(1.0 - math.log(w) / lw_lo), logit(math.log(r) / lr_hi)])

    unpack = to_box

    def obj(z):
        w, r = unpack(z)
        v = _outer(cfg, alpha, s, w, r)[0]
        # scaled so that Nelder-Mead tolerances are relative to alpha
        return -v / alpha if math.isfinite(v) else 1e6

    order = np.argsort(np.where(finite, grid, -np.inf), axis=None)[::-1]
    best_v, best_z = -math.inf, None
    for flat in order[: cfg.starts]:
        i, j = np.unravel_index(flat, grid.shape)
        if not finite[i, j]:
            break
        z0 = from_box(ws[i], rs[j])
        res = minimize(obj, z0, method="Nelder-Mead",
                       options=dict(xatol=1e-9, fatol=1e-13, maxiter=800,
                                    initial_simplex=[z0, z0 + [0.2, 0.0], z0 + [0.0, 0.2]]))
        nevals += res.nfev
        v = -res.fun * alpha
        if grid[i, j] > v:
            v, z = grid[i, j], z0
        else:
            z = res.x
        if v > best_v:
            best_v, best_z = v, z
    w, r = unpack(best_z)
    val, g, dl = _outer(cfg, alpha, s, w, r)
    omega = w * alpha
    pt = FractionPoint(alpha, float(g), float(dl), r * omega, omega, nu)
    return FResult(float(val) - shift, pt, nevals)


def f_tilde(alpha: float, nu: float, cfg: BoundConfig) -> FResult:
    return f_alpha(alpha, cfg, nu=nu)


@dataclass
class RootResult:
    alpha0: float
    bracket: tuple[float, float]
    f_left: float
    f_right: float
    evaluations: int = 0
    scan: list = field(default_factory=list)


def alpha0(cfg: BoundConfig, start: Optional[float] = None) -> RootResult:
    """Smallest positive root of f: geometric scan from alpha_min, then Brent bisection.

    ``start`` (a warm start used when sweeping c1) begins the scan there instead,
    provided f(start) < 0; otherwise the scan falls back to alpha_min.
    """
    if not cfg.admissible:
        raise ConditionError(condition_message(cfg.c, cfg.c1, cfg.t))
    count = [0]
    cache: dict[float, float] = {}

    def f(a):
        if a not in cache:
            cache[a] = f_alpha(a, cfg).value
            count[0] += 1
        return cache[a]

    a = cfg.alpha_min
    if start is not None and start > a and f(start) < 0:
        a = start
    fa = f(a)
    if fa >= 0:
        raise NoRootError(f"f(alpha_min={a:g}) = {fa:.3e} is already nonnegative")
    scan = [(a, fa)]
    while True:
        b = min(a * cfg.scan_factor, cfg.alpha_max)
        fb = f(b)
        scan.append((b, fb))
        if fb >= 0:
            break
        if b >= cfg.alpha_max:
            raise NoRootError(f"no sign change of f below alpha = {cfg.alpha_max}")
        a, fa = b, fb
    if fb == 0:
        root = b
    else:
        root = brentq(f, a, b, rtol=cfg.root_rtol, xtol=1e-14)
    # report the final bracket around the root
    lo, hi = a, b
    for x, v in sorted(cache.items()):
        if v < 0 and x <= root:
            lo = max(lo, x)
        if v >= 0 and x >= root:
            hi = min(hi, x)
    return RootResult(float(root), (lo, hi), cache[lo], cache[hi], count[0], scan)


def typical_point(alpha: float, cfg: BoundConfig) -> FractionPoint:
    """Fractions after one decoding step for a uniformly random error set.

    This is the unconstrained maximizer of psi_tilde (where it equals 0):
    a check is in J_b when it sees more than t corrupt edges, a corrupt
    variable stays corrupt unless fewer than c1 of its checks are in J_b, etc.
    """
    c, d, t, c1 = cfg.c, cfg.d, cfg.t, cfg.c1
    phi = float(binom.sf(t, d, alpha))
    w = float(binom.sf(t - 1, d - 1, alpha))      # P(edge of a corrupt variable hits J_b)
    y = float(binom.sf(t, d - 1, alpha))          # same for a correct variable
    gamma = alpha * float(binom.sf(c - c1, c, w))
    delta = (1 - alpha) * float(binom.sf(c1 - 1, c, y))
    return FractionPoint(alpha, gamma, delta, phi, alpha * w)


def alphaR(cfg: BoundConfig, a0: float) -> float:
    """Largest alpha for which f_tilde(alpha, a0) is strictly negative.

    f_tilde vanishes exactly when the constraint gamma + delta >= a0 is slack at
    the unconstrained maximizer, so the predicate is evaluated there. Downward
    geometric scan from alpha_max, then bisection.
    """
    def g(a):
        p = typical_point(a, cfg)
        return p.gamma + p.delta - a0

    hi = cfg.alpha_max
    if g(hi) <= 0:
        return hi
    while True:
        lo = hi / cfg.scan_factor
        if lo <= a0:
            return a0
        if g(lo) <= 0:
            break
        hi = lo
    return float(brentq(g, lo, hi, rtol=1e-10, xtol=1e-15))


def best_c1(c: int, d: int, t: int, **cfg_kwargs) -> tuple[int, Optional[RootResult]]:
    """Admissible c1 with the largest alpha0; (c1, None) if no root exists.

    alpha0 is unimodal in c1 in every case we have checked, so the search
    climbs from c1 ~ 0.42 c in both directions and stops at the first decrease.
    Neighbouring roots warm-start each other.
    """
    cands = [c1 for c1 in range(2, c + 1) if condition_check(c, c1, t)]
    if not cands:
        raise ConditionError(f"no admissible c1 for c={c}, t={t}")
    results: dict[int, Optional[RootResult]] = {}

    def value(c1, hint):
        if c1 not in results:
            try:
                results[c1] = alpha0(BoundConfig(c, d, t, c1, **cfg_kwargs),
                                     start=None if hint is None else hint / 2)
            except NoRootError:
                results[c1] = None
        r = results[c1]
        return -1.0 if r is None else r.alpha0

    c0 = min(cands, key=lambda x: abs(x - round(0.42 * c)))
    v0 = value(c0, None)
    for step in (-1, 1):
        prev, x = v0, c0 + step
        while x in cands:
            hint = prev if prev > 0 else None
            v = value(x, hint)
            if v < prev or (v < 0 and prev < 0 and abs(x - c0) > 3):
                break
            prev, x = v, x + step
    best = max(results, key=lambda k: -1.0 if results[k] is None else results[k].alpha0)
    return best, results[best]


def exhaustive_best_c1(c: int, d: int, t: int, **cfg_kwargs) -> tuple[int, Optional[RootResult]]:
    """Reference version of best_c1 that tries every admissible c1."""
    best: tuple[int, Optional[RootResult]] = (default_c1(c), None)
    for c1 in range(2, c + 1):
        if not condition_check(c, c1, t):
            continue
        try:
            r = alpha0(BoundConfig(c, d, t, c1, **cfg_kwargs))
        except NoRootError:
            continue
        if best[1] is None or r.alpha0 > best[1].alpha0:
            best = (c1, r)
    return best
