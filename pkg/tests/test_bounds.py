import math
from math import comb, log

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from gldpc.bounds import (BoundConfig, ConditionError, FractionPoint, alpha0, alphaR,
                          compute_report, condition_check, entropy_h, f_alpha, f_tilde,
                          finite_length_bound, gv_distance, log_lower_stirling,
                          log_multinomial, log_upper_h, log_upper_stirling, poly_F, poly_G,
                          psi, psi_tilde, rho_parts, saddle_min, stratum_log_pe, typical_point)
from oracles import grid_saddle, log_multinomial_factorial, poly_power_coeff

RS30 = BoundConfig(4, 30, 3, 3)
RS40 = BoundConfig(4, 40, 4, 3)


@pytest.fixture(scope="module")
def roots():
    return {"rs30": alpha0(RS30), "rs40": alpha0(RS40)}


# entropy and multinomials

def test_entropy_examples():
    assert entropy_h(0.5) == pytest.approx(log(2), abs=1e-12)
    assert entropy_h(0.0) == 0.0
    expect = -0.2 * log(0.2) - 0.3 * log(0.3) - 0.5 * log(0.5)
    assert entropy_h(0.2, 0.3) == pytest.approx(expect, abs=1e-12)
    assert expect == pytest.approx(1.029653, abs=1e-6)
    # growth rate of the exact multinomial approaches the entropy
    n = 1_000_000
    assert log_multinomial(n, [n // 5, 3 * n // 10]) / n == pytest.approx(expect, abs=5e-5)


@pytest.mark.parametrize("tau", [(-0.1,), (0.7, 0.4)])
def test_entropy_errors(tau):
    with pytest.raises(ValueError):
        entropy_h(*tau)


def test_multinomial_examples():
    assert log_multinomial(4, [2]) == pytest.approx(log(6))
    assert log_multinomial(60, [10, 20]) == pytest.approx(log_multinomial_factorial(60, [10, 20]))
    lo, ex = log_lower_stirling(60, [10, 20]), log_multinomial(60, [10, 20])
    up, uh = log_upper_stirling(60, [10, 20]), log_upper_h(60, [10, 20])
    assert lo < ex < up < uh
    assert log_upper_stirling(5, [0, 3]) == log_upper_stirling(5, [3])
    assert log_lower_stirling(5, [0, 3]) == log_lower_stirling(5, [3])
    with pytest.raises(ValueError):
        log_multinomial(5, [4, 3])
    with pytest.raises(ValueError):
        log_multinomial(5, [-1])


def test_multinomial_sandwich_random():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(2, 201))
        i = int(rng.integers(1, 4))
        # i positive parts plus a positive remainder
        cuts = np.sort(rng.choice(np.arange(1, n), size=min(i, n - 1), replace=False))
        parts = np.diff(np.concatenate([[0], cuts])).tolist()
        ex = log_multinomial_factorial(n, parts)
        assert log_lower_stirling(n, parts) < ex < log_upper_stirling(n, parts) <= log_upper_h(n, parts)


# polynomials and saddle points

def test_poly_examples():
    assert poly_F(0, 4, 2) == [0, 0, 0, 4, 1]
    assert poly_G(1, 7, 1) == [1, 7]
    assert poly_F(3, 3, 2) == [1, 3, 0, 0]
    for c, c1 in [(4, 2), (9, 5), (3, 3)]:
        assert [a + b for a, b in zip(poly_F(0, c, c1), poly_F(1, c, c1))] == [comb(c, j) for j in range(c + 1)]
        assert [a + b for a, b in zip(poly_F(2, c, c1), poly_F(3, c, c1))] == [comb(c, j) for j in range(c + 1)]


def test_saddle_examples():
    v, x = saddle_min([1, 1], 4, 2)
    assert v == pytest.approx(log(16), abs=1e-9) and x == pytest.approx(1.0, abs=1e-6)
    assert v > log(6)
    v, _ = saddle_min([1, 0, 3], 3, 0)
    assert v == pytest.approx(0.0, abs=1e-12)
    v, _ = saddle_min([0, 0, 0, 4, 1], 1, 1)
    assert v == -math.inf


def test_saddle_validity_random():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(1000):
        deg = int(rng.integers(0, 9))
        F = rng.integers(0, 6, size=deg + 1).tolist()
        if not any(F):
            F[int(rng.integers(0, deg + 1))] = 1
        L = int(rng.integers(1, 5))
        for k in range(L * deg + 1):
            coef = poly_power_coeff(F, L, k)
            if coef == 0:
                continue
            v, _ = saddle_min(F, L, k)
            assert log(coef) <= v + 1e-9 * max(1.0, abs(v))
            checked += 1
    assert checked > 1000


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=2, max_size=7).filter(lambda f: f[0] > 0 and f[-1] > 0),
       st.integers(1, 4), st.floats(0.05, 0.95))
def test_saddle_matches_grid(F, L, frac):
    k = frac * L * (len(F) - 1)
    v, _ = saddle_min(F, L, k)
    assert v == pytest.approx(grid_saddle(F, L, k), abs=1e-5)


# rho, psi and the optimizer

def _oracle_min(weights, k):
    """min over u of sum L_a log F_a(e^u) - k u for (L_a, lcoeffs_a) pairs."""
    def obj(u):
        total = -k * u
        for L, lc in weights:
            if L > 0:
                j = np.arange(lc.size)
                total += L * logsumexp(lc + j * u)
        return total
    us = np.linspace(-40, 10, 20001)
    vals = np.array([obj(u) for u in us])
    m = int(np.argmin(vals))
    res = minimize_scalar(obj, bounds=(us[max(m - 1, 0)], us[min(m + 1, us.size - 1)]),
                          method="bounded", options=dict(xatol=1e-12))
    return min(res.fun, vals[m])


def _lc(poly):
    return np.array([log(a) if a > 0 else -np.inf for a in poly])


def test_rho_against_grid_oracle():
    cfg = RS30
    pt = f_alpha(1e-4, cfg).witness
    c, d = cfg.c, cfg.d
    F = [_lc(poly_F(i, c, cfg.c1)) for i in range(4)]
    G0, G1 = _lc(poly_G(0, d, cfg.t)), _lc(poly_G(1, d, cfg.t))
    a, g, dl, ph, om = pt.alpha, pt.gamma, pt.delta, pt.phi, pt.omega
    expect = (_oracle_min([(g, F[0]), (a - g, F[1])], om * c),
              _oracle_min([(dl, F[2]), (1 - a - dl, F[3])], (ph - om) * c),
              _oracle_min([(ph * c / d, G0)], om * c),
              _oracle_min([((1 - ph) * c / d, G1)], (a - om) * c))
    got = rho_parts(pt, cfg)
    for x, y in zip(got, expect):
        assert x == pytest.approx(y, abs=1e-9)


def test_rho_collapse_and_infeasible():
    cfg = RS30
    parts = rho_parts(FractionPoint(1e-3, 0.0, 0.0, 0.0, 0.0), cfg)
    assert parts[0] == pytest.approx(0.0, abs=1e-12) and parts[2] == pytest.approx(0.0, abs=1e-12)
    # omega*c larger than the F0/F1 degree budget
    parts = rho_parts(FractionPoint(1e-3, 0.0, 0.0, 1e-3, 1e-3), cfg)
    assert parts[0] == -math.inf


def test_psi_compositional():
    cfg = RS30
    pt = f_alpha(1e-4, cfg).witness
    c, d = cfg.c, cfg.d
    a, g, dl, ph, om = pt.alpha, pt.gamma, pt.delta, pt.phi, pt.omega
    expect = (entropy_h(g, a - g, dl) + c / d * entropy_h(ph) + math.fsum(rho_parts(pt, cfg))
              - c * entropy_h(om, a - om, ph - om))
    assert psi(pt, cfg) == pytest.approx(expect, abs=1e-15)
    assert psi_tilde(pt, cfg) <= psi(pt, cfg)


@settings(max_examples=80, deadline=None)
@given(st.floats(1e-5, 0.2), st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 1), st.floats(1, 7.5))
def test_psi_tilde_dominated(alpha, gf, df, wf, rf):
    cfg = RS30
    om = wf * alpha
    ph = min(rf * om, 1.0 - alpha + om)
    pt = FractionPoint(alpha, gf * alpha, df * (1 - alpha), ph, om)
    p, pt_ = psi(pt, cfg), psi_tilde(pt, cfg)
    assert pt_ <= p + 1e-15


def test_gamma_equals_alpha_boundary():
    cfg = RS30
    a = 1e-3
    pt = FractionPoint(a, a, 0.0, 2e-3, 1e-3)
    # the split entropy block reduces to alpha h(1) + (1 - alpha) h(0) = 0
    expect = (cfg.c / cfg.d * entropy_h(pt.phi) + math.fsum(rho_parts(pt, cfg))
              - cfg.c * entropy_h(pt.omega, a - pt.omega, pt.phi - pt.omega))
    assert psi_tilde(pt, cfg) == pytest.approx(expect, abs=1e-15)


def test_f_small_alpha_negative():
    assert f_alpha(1e-7, RS30).value < 0


def test_f_tiny_polytope():
    # nu = 1 forces gamma = alpha and delta = 1 - alpha
    cfg = RS30
    r = f_alpha(0.3, cfg, nu=1.0)
    if r.witness is not None:
        assert r.witness.gamma + r.witness.delta == pytest.approx(1.0, abs=1e-9)


def test_root_bracketing(roots):
    for name, cfg in [("rs30", RS30), ("rs40", RS40)]:
        a0 = roots[name].alpha0
        assert f_alpha(0.5 * a0, cfg).value < 0
        assert f_alpha(1.5 * a0, cfg).value > 0
        lo, hi = roots[name].bracket
        assert lo <= a0 <= hi and roots[name].f_left < 0 <= roots[name].f_right


def test_root_values(roots):
    assert 0.8e-4 <= roots["rs30"].alpha0 <= 1.2e-4
    assert 2.1e-4 <= roots["rs40"].alpha0 <= 3.1e-4


def test_root_stable_under_finer_grid(roots):
    fine = BoundConfig(4, 30, 3, 3, grid_w=96, grid_r=72, starts=8)
    assert alpha0(fine).alpha0 == pytest.approx(roots["rs30"].alpha0, rel=2e-3)


def test_witness_feasibility(roots):
    for cfg, a0 in [(RS30, roots["rs30"].alpha0), (RS40, roots["rs40"].alpha0)]:
        for a in (1e-6, 0.3 * a0, a0, 3 * a0, 0.01):
            w = f_alpha(a, cfg).witness
            assert w.max_violation(cfg) <= 1e-12
            w = f_tilde(a, a0, cfg).witness
            if w is not None:
                assert w.max_violation(cfg) <= 1e-12


def test_f_continuity_on_grid():
    # halving the geometric step roughly halves the largest jump
    coarse = np.geomspace(1e-6, 1e-3, 13)
    fine = np.geomspace(1e-6, 1e-3, 25)
    jc = np.abs(np.diff([f_alpha(a, RS30).value for a in coarse])).max()
    jf = np.abs(np.diff([f_alpha(a, RS30).value for a in fine])).max()
    assert jf < 0.6 * jc


def test_condition_check():
    assert condition_check(3, 2, 2)
    assert condition_check(4, 2, 1)
    assert not condition_check(3, 2, 1)
    assert not condition_check(4, 1, 3)
    with pytest.raises(ConditionError, match="must exceed 1"):
        alpha0(BoundConfig(3, 7, 1, 2))


def test_alpha_r(roots):
    for cfg, name in [(RS30, "rs30"), (RS40, "rs40")]:
        a0 = roots[name].alpha0
        aR = alphaR(cfg, a0)
        assert aR >= a0
        # random-mode exponent is negative below and zero above the threshold
        assert f_tilde(0.8 * aR, a0, cfg).value < 0
        tp = typical_point(1.2 * aR, cfg)
        assert tp.gamma + tp.delta > a0
        assert psi_tilde(tp, cfg) == pytest.approx(0.0, abs=1e-10)


def test_typical_point_maximizes_random_exponent():
    cfg = RS30
    a = 0.03
    tp = typical_point(a, cfg)
    r = f_tilde(a, 0.0, cfg)
    assert r.value == pytest.approx(0.0, abs=1e-8)
    assert psi_tilde(tp, cfg) == pytest.approx(0.0, abs=1e-10)
    w = r.witness
    assert (w.gamma, w.delta, w.phi, w.omega) == pytest.approx((tp.gamma, tp.delta, tp.phi, tp.omega), rel=1e-6)


def test_report_invariants(roots):
    rep = compute_report(RS30)
    assert rep.alphaR >= rep.alpha0
    lo = rep.alpha0_bracket[0]
    assert f_alpha(lo, RS30).value < 0
    assert '"alpha0"' in rep.to_json()


# finite length

def test_finite_length_dominance():
    cfg = BoundConfig(9, 127, 1, 5)
    for i in range(1, 8):
        a, _ = stratum_log_pe(i, 1270, cfg, eta="stirling")
        b, _ = stratum_log_pe(i, 1270, cfg, eta="entropy")
        assert a <= b
        e, _ = stratum_log_pe(i, 1270, cfg, denominator="exact")
        s, _ = stratum_log_pe(i, 1270, cfg, denominator="stirling")
        assert e <= s


def test_finite_length_empty_stratum():
    # a single variable cannot put t+1 = 5 edges into one check when c = 4
    lp, _ = stratum_log_pe(1, 1000, RS40)
    assert lp == -math.inf
    assert math.isfinite(stratum_log_pe(2, 1000, RS40)[0])


def test_finite_length_curve_shapes():
    cfg = BoundConfig(9, 127, 1, 5)
    curve = finite_length_bound(1270, 6, cfg)
    assert np.all(np.diff(curve.cumulative) >= 0)
    assert len(curve.rows(stop_at_one=True)) <= 6
    assert finite_length_bound(1270, 0, cfg).rows() == []
    with pytest.raises(ValueError):
        finite_length_bound(1271, 3, cfg)
    with pytest.raises(ValueError):
        finite_length_bound(1270, 3, cfg, eta="nope")


# Gilbert-Varshamov

@pytest.mark.parametrize("R,q,expect,tol", [(0.2, 31, 0.611, 5e-4), (0.2, 41, 0.626, 5e-4),
                                             (0.5, 2, 0.11, 5e-4)])
def test_gv_values(R, q, expect, tol):
    assert gv_distance(R, q) == pytest.approx(expect, abs=tol)


def test_gv_errors():
    for R in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            gv_distance(R, 2)
