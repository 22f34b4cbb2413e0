"""Compiled scalar kernels for the ensemble exponent.

Polynomials are passed as arrays of log-coefficients indexed by degree, with
``-inf`` marking a zero coefficient. Every saddle here involves at most two
polynomials sharing one variable ``x = exp(u)``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf

# status codes returned by saddle2
INTERIOR = 0
AT_ZERO = -1
AT_INF = 1
INFEASIBLE = 2


@njit(cache=True)
def xlogx(x):
    if x <= 0.0:
        return 0.0
    return x * math.log(x)


@njit(cache=True)
def degree_span(lc):
    lo = -1
    hi = -1
    for j in range(lc.shape[0]):
        if lc[j] > NEG_INF:
            if lo < 0:
                lo = j
            hi = j
    return lo, hi


@njit(cache=True)
def log_poly_moments(lc, u):
    """log F(e^u) and the mean/variance of the degree under the tilted law.

    Coefficients must be log-concave on a contiguous support (true for every
    truncated binomial used here), so the tilted terms are unimodal: locate
    the mode by bisection and sum outward until terms drop below e^-42.
    """
    lo, hi = degree_span(lc)
    # largest j in [lo, hi] with lc[j] - lc[j-1] + u >= 0
    a = lo
    b = hi
    while a < b:
        mid = (a + b + 1) // 2
        if lc[mid] - lc[mid - 1] + u >= 0.0:
            a = mid
        else:
            b = mid - 1
    jm = a
    m = lc[jm] + jm * u
    rest = 0.0
    s1 = 0.0
    s2 = 0.0
    j = jm + 1
    while j <= hi:
        x = lc[j] + j * u - m
        if x < -42.0:
            break
        e = math.exp(x)
        rest += e
        s1 += e * (j - jm)
        s2 += e * (j - jm) * (j - jm)
        j += 1
    j = jm - 1
    while j >= lo:
        x = lc[j] + j * u - m
        if x < -42.0:
            break
        e = math.exp(x)
        rest += e
        s1 += e * (j - jm)
        s2 += e * (j - jm) * (j - jm)
        j -= 1
    tot = 1.0 + rest
    mean_off = s1 / tot
    var = s2 / tot - mean_off * mean_off
    if var < 0.0:
        var = 0.0
    return m + math.log1p(rest), jm + mean_off, var


@njit(cache=True)
def log_poly(lc, u):
    return log_poly_moments(lc, u)[0]


@njit(cache=True)
def saddle2(lca, la, lcb, lb, k):
    """inf over u of la*log Fa(e^u) + lb*log Fb(e^u) - k*u.

    Returns (value, u_star, status). Terms with zero weight are ignored.
    """
    smin = 0.0
    smax = 0.0
    cmin = 0.0
    cmax = 0.0
    if la > 0.0:
        lo, hi = degree_span(lca)
        smin += la * lo
        smax += la * hi
        cmin += la * lca[lo]
        cmax += la * lca[hi]
    if lb > 0.0:
        lo, hi = degree_span(lcb)
        smin += lb * lo
        smax += lb * hi
        cmin += lb * lcb[lo]
        cmax += lb * lcb[hi]
    tol = 1e-11 * max(smax, 1e-300) + 1e-300
    if k < smin - tol or k > smax + tol:
        return NEG_INF, 0.0, INFEASIBLE
    if k <= smin + tol:
        # value is nondecreasing in u; limit at x -> 0
        if smax - smin <= tol:
            return cmin, 0.0, INTERIOR
        return cmin, NEG_INF, AT_ZERO
    if k >= smax - tol:
        return cmax, np.inf, AT_INF

    def deriv(u):
        val = 0.0
        d1 = -k
        d2 = 0.0
        if la > 0.0:
            f, mu, var = log_poly_moments(lca, u)
            val += la * f
            d1 += la * mu
            d2 += la * var
        if lb > 0.0:
            f, mu, var = log_poly_moments(lcb, u)
            val += lb * f
            d1 += lb * mu
            d2 += lb * var
        return val - k * u, d1, d2

    # bracket the root of the (increasing) derivative
    lo = 0.0
    hi = 0.0
    _, d0, _ = deriv(0.0)
    if d0 > 0.0:
        step = 1.0
        lo = -step
        while True:
            _, dl, _ = deriv(lo)
            if dl <= 0.0:
                break
            hi = lo
            step *= 2.0
            lo = -step
            if step > 4096.0:
                return cmin, NEG_INF, AT_ZERO
    else:
        step = 1.0
        hi = step
        while True:
            _, dh, _ = deriv(hi)
            if dh >= 0.0:
                break
            lo = hi
            step *= 2.0
            hi = step
            if step > 4096.0:
                return cmax, np.inf, AT_INF

    u = 0.5 * (lo + hi)
    for _ in range(200):
        _, d1, d2 = deriv(u)
        if d1 == 0.0:
            break
        if d1 < 0.0:
            lo = u
        else:
            hi = u
        un = u - d1 / d2 if d2 > 0.0 else 0.5 * (lo + hi)
        if not (lo < un < hi):
            un = 0.5 * (lo + hi)
        if abs(un - u) <= 1e-13 * (1.0 + abs(u)) or hi - lo <= 1e-14 * (1.0 + abs(u)):
            u = un
            break
        u = un
    val, _, _ = deriv(u)
    return val, u, INTERIOR


@njit(cache=True)
def log_ratio_at(lca, lcb, u, status):
    """log Fa(x) - log Fb(x) at a saddle location, with limits at 0 and inf."""
    if status == AT_ZERO or status == AT_INF:
        alo, ahi = degree_span(lca)
        blo, bhi = degree_span(lcb)
        if status == AT_ZERO:
            if alo > blo:
                return NEG_INF
            if alo < blo:
                return np.inf
            return lca[alo] - lcb[blo]
        if ahi > bhi:
            return np.inf
        if ahi < bhi:
            return NEG_INF
        return lca[ahi] - lcb[bhi]
    return log_poly(lca, u) - log_poly(lcb, u)


@njit(cache=True)
def entropy3(a, b, cc):
    """h(a, b, cc) with the remainder 1 - a - b - cc."""
    r = 1.0 - a - b - cc
    if r < 0.0:
        r = 0.0
    return -(xlogx(a) + xlogx(b) + xlogx(cc) + xlogx(r))


@njit(cache=True)
def entropy1(a):
    if a <= 0.0 or a >= 1.0:
        return 0.0
    return -xlogx(a) - (1.0 - a) * math.log1p(-a)


@njit(cache=True)
def t1_term(lcf0, lcf1, c, alpha, gamma, omega):
    return saddle2(lcf0, gamma, lcf1, alpha - gamma, omega * c)


@njit(cache=True)
def t2_term(lcf2, lcf3, c, alpha, delta, phi, omega):
    return saddle2(lcf2, delta, lcf3, 1.0 - alpha - delta, (phi - omega) * c)


@njit(cache=True)
def rho_parts(lcf, lcg0, lcg1, c, d, alpha, gamma, delta, phi, omega):
    dummy = np.zeros(1)
    t1 = t1_term(lcf[0], lcf[1], c, alpha, gamma, omega)[0]
    t2 = t2_term(lcf[2], lcf[3], c, alpha, delta, phi, omega)[0]
    u1 = saddle2(lcg0, phi * c / d, dummy, 0.0, omega * c)[0]
    u2 = saddle2(lcg1, (1.0 - phi) * c / d, dummy, 0.0, (alpha - omega) * c)[0]
    return t1, t2, u1, u2


@njit(cache=True)
def psi_value(lcf, lcg0, lcg1, c, d, alpha, gamma, delta, phi, omega):
    t1, t2, u1, u2 = rho_parts(lcf, lcg0, lcg1, c, d, alpha, gamma, delta, phi, omega)
    rho = t1 + t2 + u1 + u2
    if rho == NEG_INF:
        return NEG_INF
    h1 = -(xlogx(gamma) + xlogx(alpha - gamma) + xlogx(delta) + xlogx(1.0 - alpha - delta))
    h2 = entropy1(phi)
    h3 = entropy3(omega, alpha - omega, phi - omega)
    return h1 + (c / d) * h2 + rho - c * h3


@njit(cache=True)
def _gamma_side(lcf, c, alpha, gamma, omega):
    """Value and derivative of the gamma-dependent part of psi."""
    val, u, st = t1_term(lcf[0], lcf[1], c, alpha, gamma, omega)
    if val == NEG_INF:
        return NEG_INF, 0.0
    h = -(xlogx(gamma) + xlogx(alpha - gamma))
    if gamma <= 0.0:
        dh = np.inf
    elif alpha - gamma <= 0.0:
        dh = NEG_INF
    else:
        dh = math.log((alpha - gamma) / gamma)
    dr = log_ratio_at(lcf[0], lcf[1], u, st)
    return h + val, dh + dr


@njit(cache=True)
def _delta_side(lcf, c, alpha, delta, phi, omega):
    val, u, st = t2_term(lcf[2], lcf[3], c, alpha, delta, phi, omega)
    if val == NEG_INF:
        return NEG_INF, 0.0
    rest = 1.0 - alpha - delta
    h = -(xlogx(delta) + xlogx(rest))
    if delta <= 0.0:
        dh = np.inf
    elif rest <= 0.0:
        dh = NEG_INF
    else:
        dh = math.log(rest / delta)
    dr = log_ratio_at(lcf[2], lcf[3], u, st)
    return h + val, dh + dr


@njit(cache=True)
def _binom_tail(c, lo, y):
    """P(Binomial(c, y) >= lo)."""
    if lo <= 0:
        return 1.0
    if lo > c:
        return 0.0
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    s = 0.0
    for j in range(lo, c + 1):
        s += math.exp(math.lgamma(c + 1.0) - math.lgamma(j + 1.0) - math.lgamma(c - j + 1.0)
                      + j * math.log(y) + (c - j) * math.log1p(-y))
    return min(s, 1.0)


@njit(cache=True)
def inner_max(lcf, c, c1, alpha, phi, omega, s):
    """max over (gamma, delta) of the gamma/delta-dependent part of psi.

    Maximizes subject to the box constraints and gamma + delta >= s.
    Returns (value, gamma, delta); value is -inf when infeasible.
    """
    ghi = min(alpha, omega * c / (c - c1 + 1))
    glo = max(0.0, (omega * c - alpha * (c - c1)) / c1)
    dhi = min(1.0 - alpha, (phi - omega) * c / c1)
    dlo = max(0.0, ((phi - omega) * c - (1.0 - alpha) * (c1 - 1)) / (c - c1 + 1))
    if glo > ghi * (1.0 + 1e-12) + 1e-300 or dlo > dhi * (1.0 + 1e-12) + 1e-300:
        return NEG_INF, 0.0, 0.0
    glo = min(glo, ghi)
    dlo = min(dlo, dhi)

    # unconstrained optimum in closed form (binomial tilting)
    w = omega / alpha if alpha > 0.0 else 0.0
    g0 = alpha * _binom_tail(c, c - c1 + 1, min(max(w, 0.0), 1.0))
    y = (phi - omega) / (1.0 - alpha)
    d0 = (1.0 - alpha) * _binom_tail(c, c1, min(max(y, 0.0), 1.0))
    g0 = min(max(g0, glo), ghi)
    d0 = min(max(d0, dlo), dhi)
    if g0 + d0 >= s:
        va, _ = _gamma_side(lcf, c, alpha, g0, omega)
        vb, _ = _delta_side(lcf, c, alpha, d0, phi, omega)
        return va + vb, g0, d0

    # coupling active: gamma + delta = s
    a = max(glo, s - dhi)
    b = min(ghi, s - dlo)
    if a > b:
        if a - b <= 1e-12 * max(s, 1e-300):
            b = a
        else:
            return NEG_INF, 0.0, 0.0
    lo = a
    hi = b
    # the derivative of the coupled objective is decreasing in gamma; Illinois
    # regula falsi once both ends are finite, bisection otherwise
    flo = np.inf
    fhi = NEG_INF
    side = 0
    for _ in range(200):
        if hi - lo <= 1e-12 * max(hi, 1e-300):
            break
        if math.isfinite(flo) and math.isfinite(fhi) and flo > fhi:
            m = lo + flo * (hi - lo) / (flo - fhi)
            if not (lo < m < hi):
                m = 0.5 * (lo + hi)
        else:
            m = 0.5 * (lo + hi)
        _, da = _gamma_side(lcf, c, alpha, m, omega)
        _, db = _delta_side(lcf, c, alpha, s - m, phi, omega)
        fm = da - db
        if fm == 0.0:
            lo = m
            hi = m
            break
        if fm > 0.0:
            lo = m
            flo = fm
            if side == 1 and math.isfinite(fhi):
                fhi *= 0.5
            side = 1
        else:
            hi = m
            fhi = fm
            if side == -1 and math.isfinite(flo):
                flo *= 0.5
            side = -1
    g = 0.5 * (lo + hi)
    dl = max(s - g, 0.0)
    va, _ = _gamma_side(lcf, c, alpha, g, omega)
    vb, _ = _delta_side(lcf, c, alpha, dl, phi, omega)
    return va + vb, g, dl


@njit(cache=True)
def outer_value(lcf, lcg0, lcg1, c, d, t, c1, alpha, phi, omega, s):
    """max over (gamma, delta) of psi at fixed (alpha, phi, omega)."""
    if omega < 0.0 or omega > alpha or omega > phi or phi > 1.0:
        return NEG_INF, 0.0, 0.0
    if phi * (t + 1) > omega * d * (1.0 + 1e-12):
        return NEG_INF, 0.0, 0.0
    if alpha - omega > 1.0 - phi:
        return NEG_INF, 0.0, 0.0
    dummy = np.zeros(1)
    u1 = saddle2(lcg0, phi * c / d, dummy, 0.0, omega * c)[0]
    if u1 == NEG_INF:
        return NEG_INF, 0.0, 0.0
    u2 = saddle2(lcg1, (1.0 - phi) * c / d, dummy, 0.0, (alpha - omega) * c)[0]
    if u2 == NEG_INF:
        return NEG_INF, 0.0, 0.0
    inner, g, dl = inner_max(lcf, c, c1, alpha, phi, omega, s)
    if inner == NEG_INF:
        return NEG_INF, 0.0, 0.0
    val = inner + (c / d) * entropy1(phi) + u1 + u2 - c * entropy3(omega, alpha - omega, phi - omega)
    return val, g, dl


@njit(cache=True)
def outer_grid(lcf, lcg0, lcg1, c, d, t, c1, alpha, s, ws, rs):
    """Evaluate outer_value on omega = w*alpha, phi = r*omega for all grid pairs."""
    out = np.full((ws.shape[0], rs.shape[0]), NEG_INF)
    for i in range(ws.shape[0]):
        omega = ws[i] * alpha
        for j in range(rs.shape[0]):
            phi = rs[j] * omega
            out[i, j] = outer_value(lcf, lcg0, lcg1, c, d, t, c1, alpha, phi, omega, s)[0]
    return out


# ---------------------------------------------------------------------------
# finite-length strata


@njit(cache=True)
def _log_multinomial_exact(n, p1, p2, p3):
    rest = n - p1 - p2 - p3
    return (math.lgamma(n + 1.0) - math.lgamma(p1 + 1.0) - math.lgamma(p2 + 1.0)
            - math.lgamma(p3 + 1.0) - math.lgamma(rest + 1.0))


@njit(cache=True)
def _log_upper_stirling(n, parts):
    """Stirling upper bound on log C(n; parts), zero parts (rest included) dropped."""
    rest = n
    for p in parts:
        rest -= p
    nz = 0
    lsum = 0.0
    xl = 0.0
    for p in parts:
        if p > 0:
            nz += 1
            lsum += math.log(p)
            xl += p * math.log(p)
    if rest > 0:
        nz += 1
        lsum += math.log(rest)
        xl += rest * math.log(rest)
    if nz <= 1:
        return 0.0
    i = nz - 1
    return (-0.5 * i * math.log(2.0 * math.pi) + 1.0 / 12.0
            + 0.5 * (math.log(n) - lsum) + n * math.log(n) - xl)


@njit(cache=True)
def _log_upper_entropy(n, parts):
    rest = n
    xl = 0.0
    for p in parts:
        rest -= p
        if p > 0:
            xl += p * math.log(p)
    if rest > 0:
        xl += rest * math.log(rest)
    return n * math.log(n) - xl


@njit(cache=True)
def _log_lower_stirling(n, parts):
    """Stirling lower bound on log C(n; parts); zero parts dropped, rest >= 1."""
    rest = n
    nz = 0
    lsum = 0.0
    xl = 0.0
    for p in parts:
        rest -= p
        if p > 0:
            nz += 1
            lsum += math.log(p)
            xl += p * math.log(p)
    if rest > 0:
        xl += rest * math.log(rest)
    if nz == 0:
        return 0.0
    return (-0.5 * nz * math.log(2.0 * math.pi) - (nz + 1) / 12.0
            - 0.5 * lsum + n * math.log(n) - xl)


@njit(cache=True)
def _lse_add(acc, x):
    if x == NEG_INF:
        return acc
    if acc == NEG_INF:
        return x
    if acc >= x:
        return acc + math.log1p(math.exp(x - acc))
    return x + math.log1p(math.exp(acc - x))


@njit(cache=True)
def finite_length_stratum(i, n, c, d, t, c1, lcf, lcg0, lcg1, eta_mode, denom_mode, prune):
    """log of the union-bound term for exactly i corrupt variables.

    eta_mode: 0 Stirling upper bound on both factors of eta, 1 entropy bound.
    denom_mode: 0 exact log-gamma multinomial, 1 Stirling lower bound.
    Returns (log_pe, tuples_visited).
    """
    dummy = np.zeros(1)
    jn = n * c // d
    nc = n * c
    acc = NEG_INF
    best = NEG_INF
    visited = 0
    parts3 = np.zeros(3)
    parts1 = np.zeros(1)
    t1cache = np.full(i + 1, np.nan)
    for om in range(t + 1, i * c + 1):
        t1cache[:] = np.nan
        ph_lo = (om + d - 1) // d
        ph_hi = om // (t + 1)
        for ph in range(max(ph_lo, 1), ph_hi + 1):
            if i * c - om > (jn - ph) * d:
                continue
            nu1 = saddle2(lcg0, float(ph), dummy, 0.0, float(om))[0]
            if nu1 == NEG_INF:
                continue
            nu2 = saddle2(lcg1, float(jn - ph), dummy, 0.0, float(i * c - om))[0]
            if nu2 == NEG_INF:
                continue
            parts1[0] = ph
            if eta_mode == 0:
                leta_chk = _log_upper_stirling(float(jn), parts1)
            else:
                leta_chk = _log_upper_entropy(float(jn), parts1)
            parts3[0] = om
            parts3[1] = i * c - om
            parts3[2] = ph * d - om
            if denom_mode == 0:
                lden = _log_multinomial_exact(float(nc), parts3[0], parts3[1], parts3[2])
            else:
                lden = _log_lower_stirling(float(nc), parts3)
            head = leta_chk + nu1 + nu2 - lden
            g_hi = min(i, om // (c - c1 + 1))
            dl_cap = (ph * d - om) // c1
            for g in range(0, g_hi + 1):
                if np.isnan(t1cache[g]):
                    t1cache[g] = saddle2(lcf[0], float(g), lcf[1], float(i - g), float(om))[0]
                nt1 = t1cache[g]
                if nt1 == NEG_INF:
                    continue
                dl_lo = i - g
                if dl_lo > dl_cap:
                    continue
                local = NEG_INF
                prev = NEG_INF
                for dl in range(dl_lo, min(dl_cap, n - i) + 1):
                    nt2 = saddle2(lcf[2], float(dl), lcf[3], float(n - i - dl), float(ph * d - om))[0]
                    visited += 1
                    if nt2 == NEG_INF:
                        if local > NEG_INF:
                            break
                        continue
                    parts3[0] = g
                    parts3[1] = i - g
                    parts3[2] = dl
                    if eta_mode == 0:
                        leta_var = _log_upper_stirling(float(n), parts3)
                    else:
                        leta_var = _log_upper_entropy(float(n), parts3)
                    term = head + leta_var + nt1 + nt2
                    acc = _lse_add(acc, term)
                    if term > local:
                        local = term
                    if term > best:
                        best = term
                    # terms are unimodal in dl; stop once decreasing and negligible
                    if term < prev and (term < local - prune or term < best - prune):
                        break
                    prev = term
    return acc, visited
