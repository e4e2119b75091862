import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps

from tubebound.bounds import (
    BoundCurve,
    bound_curve,
    concentration_bound,
    concentration_bound_optimized,
    curve_to_csv,
    even_moment_bound,
    exit_time_bound,
    exp_dist_bound,
    exp_dist_curve,
    exp_sq_bound,
    exp_sq_curve,
    explosion_time,
    feynman_kac_bound,
    logsob_bound,
    logsob_time_constant,
    radial_R,
    second_moment_bound,
)
from tubebound.errors import DomainError
from tubebound.modelspaces import (
    HyperbolicH3Point,
    LyapunovParams,
    exact_exp_moment,
    exact_moment,
    lyapunov_params,
)

from oracles import (
    cameron_martin_quadratic,
    chi_tail,
    flat_mgf_mpmath,
    flat_radial_moment,
    sup_tail_reflection,
)

FLAT2 = LyapunovParams(nu=2.0, lam=0.0, exact=True)
H3 = LyapunovParams(nu=3.0, lam=2.0 / 3.0)


# ------------------------------------------------------------------ radial_R

def test_radial_r_zero_lambda_exact():
    assert radial_R(0.0, 5.0) == 5.0


def test_radial_r_direct_value():
    assert radial_R(1.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-15)


def test_radial_r_series_branch_matches_formula():
    lam, t = 1e-9, 2.0
    series = radial_R(lam, t)
    direct = -math.expm1(-lam * t) / lam
    assert series == pytest.approx(direct, rel=1e-14)
    assert series == pytest.approx(2.0 - 2e-9, rel=1e-14)


def test_radial_r_high_precision_near_zero_lambda():
    import mpmath as mp

    mp.mp.dps = 40
    for lam in (1e-8, -1e-8, 1e-7, -1e-7, 0.3, -0.3):
        for t in (0.5, 2.0):
            ref = float((1 - mp.e ** (-mp.mpf(lam) * t)) / mp.mpf(lam))
            assert radial_R(lam, t) == pytest.approx(ref, rel=1e-13)


# ------------------------------------------------------- second_moment_bound

def test_second_moment_flat_equality_case():
    assert second_moment_bound(FLAT2, 1.0, 3.0) == pytest.approx(7.0, rel=1e-14)


def test_second_moment_h3_dominates_exact():
    b = second_moment_bound(H3, 0.0, 1.0)
    assert b == pytest.approx(4.5 * (math.exp(2.0 / 3.0) - 1.0), rel=1e-13)
    assert b == pytest.approx(4.2648, abs=1e-4)
    assert b >= exact_moment(HyperbolicH3Point(kappa=-1.0), 1, 1.0)


def test_second_moment_initial_condition():
    for p in (FLAT2, H3, LyapunovParams(nu=1.5, lam=-0.7)):
        assert second_moment_bound(p, 1.3, 0.0) == pytest.approx(1.3**2, rel=1e-15)


def test_second_moment_continuity_across_zero_lambda():
    lo = second_moment_bound(LyapunovParams(nu=2.0, lam=-1e-8), 1.0, 2.0)
    mid = second_moment_bound(LyapunovParams(nu=2.0, lam=0.0), 1.0, 2.0)
    hi = second_moment_bound(LyapunovParams(nu=2.0, lam=1e-8), 1.0, 2.0)
    assert lo <= mid <= hi
    assert hi - lo < 1e-6 * mid


# --------------------------------------------------------- even_moment_bound

@given(
    nu=st.floats(1.0, 6.0),
    lam=st.floats(-1.0, 1.0),
    r0=st.floats(0.0, 3.0),
    t=st.one_of(st.just(0.0), st.floats(1e-6, 4.0)),
)
@settings(max_examples=200)
def test_even_moment_order_one_reduces_to_second_moment(nu, lam, r0, t):
    p = LyapunovParams(nu=nu, lam=lam)
    assert even_moment_bound(p, r0, t, 1) == pytest.approx(
        second_moment_bound(p, r0, t), rel=1e-12, abs=1e-12
    )


def test_even_moment_fourth_moment_r3():
    # E |B_1|^4 in R^3 equals E[chi2_3^2] = 15
    p = LyapunovParams(nu=3.0, lam=0.0)
    assert even_moment_bound(p, 0.0, 1.0, 2) == pytest.approx(15.0, rel=1e-13)
    assert flat_radial_moment(3, 0.0, 1.0, 2) == 15.0


def test_even_moment_shifted_fourth_moment_r1():
    p = LyapunovParams(nu=1.0, lam=0.0)
    got = even_moment_bound(p, 1.0, 1.0, 2)
    assert got == pytest.approx(10.0, rel=1e-13)
    assert flat_radial_moment(1, 1.0, 1.0, 2) == 10.0


def test_even_moment_t_zero_limit():
    p = LyapunovParams(nu=2.0, lam=0.5)
    assert even_moment_bound(p, 1.5, 0.0, 3) == 1.5**6


def test_even_moment_flat_equality_certification():
    for d in (1, 2, 3):
        p = LyapunovParams(nu=float(d), lam=0.0, exact=True)
        for r0 in (0.0, 1.0):
            for t in (0.5, 1.0, 2.0):
                for ord in (1, 2, 3):
                    assert even_moment_bound(p, r0, t, ord) == pytest.approx(
                        flat_radial_moment(d, r0, t, ord), rel=1e-10
                    )


def test_even_moment_dominates_h3_exact_on_grid():
    s = HyperbolicH3Point(kappa=-1.0)
    p = lyapunov_params(s)
    for t in np.linspace(0.01, 5.0, 1000):
        for ord in (1, 2):
            assert even_moment_bound(p, 0.0, float(t), ord) >= exact_moment(s, ord, float(t))


# ----------------------------------------------------------- exp_dist_bound

def test_exp_dist_theta_zero_is_one():
    for nu in (2.0, 3.0, 5.5):
        for lam in (-0.5, 0.0, 1.0):
            p = LyapunovParams(nu=nu, lam=lam)
            assert exp_dist_bound(p, 1.0, 2.0, 0.0) == 1.0


def test_exp_dist_small_time_value_two_routes():
    # nu=2, lam=0, r0=0, t=0.01, theta=1: B = 12 * 0.02 = 0.24
    p = LyapunovParams(nu=2.0, lam=0.0)
    got = exp_dist_bound(p, 0.0, 0.01, 1.0)
    B = 0.24
    route1 = 1.0 + (1.0 + B**-0.5) * (float(sps.hyp1f1(1.0, 0.5, B)) - 1.0)
    terms = [B**k / math.prod(0.5 + j for j in range(k)) for k in range(1, 60)]
    route2 = 1.0 + (1.0 + B**-0.5) * sum(terms)
    assert got == pytest.approx(route1, rel=1e-12)
    assert got == pytest.approx(route2, rel=1e-12)
    assert got == pytest.approx(2.717408962991702, rel=1e-12)


def test_exp_dist_dominates_flat_mc():
    # E exp(theta |B_t|) in R^2, crude Monte Carlo with its own rng
    p = LyapunovParams(nu=2.0, lam=0.0)
    rng = np.random.default_rng(42)
    draws = math.sqrt(0.01) * rng.standard_normal((200_000, 2))
    emp = np.exp(np.linalg.norm(draws, axis=1)).mean()
    assert exp_dist_bound(p, 0.0, 0.01, 1.0) >= emp


def test_exp_dist_nondecreasing_in_time():
    # holds under lam >= 0, the regime the Feynman-Kac construction uses
    rng = np.random.default_rng(5)
    for _ in range(200):
        p = LyapunovParams(nu=rng.uniform(2.0, 6.0), lam=rng.uniform(0.0, 1.0))
        r0 = rng.uniform(0.0, 2.0)
        theta = rng.uniform(0.0, 1.0)
        t1 = rng.uniform(0.0, 3.0)
        t2 = t1 + rng.uniform(0.0, 3.0)
        assert exp_dist_bound(p, r0, t2, theta) >= exp_dist_bound(p, r0, t1, theta) - 1e-12


def test_exp_dist_requires_nu_at_least_two():
    with pytest.raises(DomainError):
        exp_dist_bound(LyapunovParams(nu=1.5, lam=0.0), 0.0, 1.0, 0.5)


def test_exp_dist_large_argument_branch_is_continuous():
    # series vs asymptotic around the switch at B = 24 theta^2 t = 600
    for nu in (2.0, 3.0):
        p = LyapunovParams(nu=nu, lam=0.0)
        lo = exp_dist_bound(p, 0.0, 1.0, math.sqrt(599.9 / 24.0))
        hi = exp_dist_bound(p, 0.0, 1.0, math.sqrt(600.1 / 24.0))
        assert math.isfinite(lo) and math.isfinite(hi)
        assert lo < hi < lo * 1.3


@given(
    nu=st.floats(1.0, 6.0),
    lam=st.floats(-1.0, 1.0),
    r0=st.floats(0.0, 2.0),
    t=st.floats(0.1, 3.0),
    r=st.floats(0.5, 10.0),
    delta=st.floats(0.0, 0.95),
)
@settings(max_examples=200)
def test_concentration_equals_chernoff_combination(nu, lam, r0, t, r, delta):
    # delta parameterizes theta = delta / (R e^(lam t)); the tail bound must
    # equal e^{-theta r^2/2} times the exp-square bound at that theta
    p = LyapunovParams(nu=nu, lam=lam)
    growth = radial_R(lam, t) * math.exp(lam * t)
    theta = delta / growth
    chernoff = math.exp(-theta * r * r / 2.0) * exp_sq_bound(p, r0, t, theta)
    assert concentration_bound(p, r0, t, r, delta) == pytest.approx(chernoff, rel=1e-10)


# ------------------------------------------------------------- exp_sq_bound

def test_exp_sq_theta_zero_is_one():
    assert exp_sq_bound(H3, 1.0, 2.0, 0.0) == 1.0


def test_exp_sq_flat_equality():
    # with nu = m, lam = 0 the bound is the exact noncentral Gaussian MGF
    for m in (1, 2, 3):
        p = LyapunovParams(nu=float(m), lam=0.0, exact=True)
        for x in (0.0, 1.0):
            for tht in (0.1, 0.5, 0.9):
                got = exp_sq_bound(p, x, 1.0, tht)
                want = flat_mgf_mpmath(m, x, 1.0, tht)
                assert got == pytest.approx(want, rel=1e-10)


def test_exp_sq_dominates_h3_exact():
    s = HyperbolicH3Point(kappa=-1.0)
    for theta in (0.05, 0.1):
        for t in (0.5, 1.0):
            assert exp_sq_bound(H3, 0.0, t, theta) >= exact_exp_moment(s, theta, t)


def test_exp_sq_domain_boundary():
    p = LyapunovParams(nu=3.0, lam=1.0 / 3.0)
    tstar = 3.0 * math.log(3.0)
    assert math.isfinite(exp_sq_bound(p, 0.0, tstar - 1e-6, 1.0 / 6.0))
    with pytest.raises(DomainError) as err:
        exp_sq_bound(p, 0.0, tstar + 1e-6, 1.0 / 6.0)
    assert "1.0" in str(err.value)


def test_exp_sq_dominates_h3_exact_on_grid():
    # 1000 points across the joint validity domain per theta sweep
    s = HyperbolicH3Point(kappa=-1.0)
    for theta, tmax in ((0.1, 3.0), (0.3, 1.6)):
        for t in np.linspace(0.01, tmax, 1000):
            bound = exp_sq_bound(H3, 0.0, float(t), theta)
            exact = exact_exp_moment(s, theta, float(t))
            assert bound >= exact


def test_bounds_continuous_in_lambda_at_zero():
    for lam in (1e-8, -1e-8):
        p = LyapunovParams(nu=3.0, lam=lam)
        p0 = LyapunovParams(nu=3.0, lam=0.0)
        for fn in (
            lambda q: second_moment_bound(q, 1.0, 2.0),
            lambda q: even_moment_bound(q, 1.0, 2.0, 2),
            lambda q: exp_sq_bound(q, 1.0, 2.0, 0.2),
            lambda q: exp_dist_bound(q, 1.0, 2.0, 0.2),
        ):
            assert fn(p) == pytest.approx(fn(p0), rel=1e-6)


def test_exp_sq_monotone_in_theta_and_r0():
    rng = np.random.default_rng(6)
    for _ in range(200):
        p = LyapunovParams(nu=rng.uniform(1.0, 5.0), lam=rng.uniform(-1.0, 1.0))
        t = rng.uniform(0.1, 2.0)
        cap = 1.0 / (radial_R(p.lam, t) * math.exp(p.lam * t))
        th1 = rng.uniform(0.0, 0.98 * cap)
        th2 = rng.uniform(th1, 0.99 * cap)
        r1 = rng.uniform(0.0, 2.0)
        r2 = r1 + rng.uniform(0.0, 2.0)
        assert exp_sq_bound(p, r1, t, th2) >= exp_sq_bound(p, r1, t, th1) - 1e-12
        assert exp_sq_bound(p, r2, t, th1) >= exp_sq_bound(p, r1, t, th1) - 1e-12


# ----------------------------------------------------------- explosion_time

def test_explosion_time_flat():
    t = explosion_time(LyapunovParams(nu=3.0, lam=0.0), 1.0 / 6.0)
    assert abs(t - 6.0) <= 1e-8


def test_explosion_time_positive_lambda():
    t = explosion_time(LyapunovParams(nu=3.0, lam=1.0 / 3.0), 1.0 / 6.0)
    assert abs(t - 3.0 * math.log(3.0)) <= 1e-8


def test_explosion_never_for_negative_lambda_small_theta():
    assert explosion_time(LyapunovParams(nu=3.0, lam=-1.0), 0.5) is None


def test_explosion_finite_for_negative_lambda_large_theta():
    t = explosion_time(LyapunovParams(nu=3.0, lam=-1.0), 1.5)
    assert abs(t - math.log(3.0)) <= 1e-8


# ------------------------------------------------------------- logsob_bound

def test_logsob_quadratic_flat_point():
    # m=1, n=0, C1=Lambda=0, r0=0, theta*t=0.5: exp(0.5/(2*0.5)) = e^0.5
    got = logsob_bound("quadratic", 1, 0, 0.0, 0.0, 0.0, 1.0, 0.5)
    assert got == pytest.approx(math.exp(0.5), rel=1e-13)
    assert got >= math.sqrt(2.0)


def test_logsob_linear_theta_zero():
    assert logsob_bound("linear", 3, 1, 0.5, 1.0, 1.0, 2.0, 0.0) == 1.0


def test_logsob_small_c1_time_constant_continuity():
    # series-branch oracle: C(t) -> t as C1 -> 0
    assert abs(logsob_time_constant(3, 1e-8, 1.0) - 1.0) <= 1e-10
    assert logsob_time_constant(5, 0.0, 2.5) == 2.5
    a = logsob_bound("quadratic", 3, 0, 1e-8, 0.0, 0.5, 1.0, 0.3)
    b = logsob_bound("quadratic", 3, 0, 0.0, 0.0, 0.5, 1.0, 0.3)
    assert a == pytest.approx(b, rel=1e-7)


def test_logsob_quadratic_domain_error():
    with pytest.raises(DomainError):
        logsob_bound("quadratic", 1, 0, 0.0, 0.0, 0.0, 2.0, 0.5)


def test_logsob_rejects_bad_mode():
    with pytest.raises(DomainError):
        logsob_bound("cubic", 1, 0, 0.0, 0.0, 0.0, 1.0, 0.1)


def test_logsob_strictly_dominates_flat_mgf():
    for m in (1, 3):
        for x in np.arange(0.1, 0.95, 0.1):
            bound = logsob_bound("quadratic", m, 0, 0.0, 0.0, 0.0, 1.0, float(x))
            exact = (1.0 - x) ** (-m / 2.0)
            assert bound > exact


# ------------------------------------------------------ concentration_bound

def test_concentration_delta_zero_vacuous():
    assert concentration_bound(H3, 1.0, 1.0, 2.0, 0.0) == 1.0


def test_concentration_asymptotic_rate():
    p = LyapunovParams(nu=3.0, lam=0.0)
    opt = concentration_bound_optimized(p, 0.0, 1.0, 1000.0)
    rate = opt.log_value / 1000.0**2
    assert abs(rate - (-0.5)) <= 1e-3


def test_concentration_dominates_chi_tail():
    p = LyapunovParams(nu=3.0, lam=0.0)
    for r in (2.0, 4.0, 6.0):
        opt = concentration_bound_optimized(p, 0.0, 1.0, r)
        assert opt.value >= chi_tail(3, r, 1.0)


def test_concentration_optimized_no_worse_than_grid():
    rng = np.random.default_rng(13)
    for _ in range(50):
        p = LyapunovParams(nu=rng.uniform(1.0, 5.0), lam=rng.uniform(-0.5, 0.5))
        r0 = rng.uniform(0.0, 2.0)
        t = rng.uniform(0.2, 3.0)
        r = rng.uniform(0.5, 8.0)
        opt = concentration_bound_optimized(p, r0, t, r)
        grid_best = min(
            concentration_bound(p, r0, t, r, float(d)) for d in np.linspace(0.0, 0.999999, 500)
        )
        assert opt.value <= grid_best * (1.0 + 1e-6)


# ---------------------------------------------------------- exit_time_bound

def test_exit_time_matches_concentration_expression():
    p = LyapunovParams(nu=2.0, lam=0.3)
    assert exit_time_bound(p, 0.5, 1.0, 3.0, 0.6) == concentration_bound(p, 0.5, 1.0, 3.0, 0.6)


def test_exit_time_dominates_reflection_tail():
    p = LyapunovParams(nu=1.0, lam=0.0)
    opt = concentration_bound_optimized(p, 0.0, 1.0, 5.0)
    assert exit_time_bound(p, 0.0, 1.0, 5.0, opt.delta) >= sup_tail_reflection(5.0, 1.0)


def test_exit_time_requires_nonnegative_lambda():
    with pytest.raises(DomainError):
        exit_time_bound(LyapunovParams(nu=2.0, lam=-0.1), 0.0, 1.0, 2.0, 0.5)


# --------------------------------------------------------- feynman_kac_bound

def test_feynman_kac_zero_potential():
    p = LyapunovParams(nu=2.0, lam=0.0)
    assert feynman_kac_bound("linear", p, 0.5, 1.0, 0.0) == 1.0
    assert feynman_kac_bound("quadratic", p, 0.5, 1.0, 0.0) == 1.0


def test_feynman_kac_quadratic_dominates_cameron_martin():
    p = LyapunovParams(nu=1.0, lam=0.0)
    got = feynman_kac_bound("quadratic", p, 0.0, 1.0, 0.25)
    assert got == pytest.approx(0.75**-0.5 * math.exp(0.25), rel=1e-13)
    assert got >= cameron_martin_quadratic(0.25, 1.0)


def test_feynman_kac_quadratic_domain_boundary_reports_product():
    p = LyapunovParams(nu=1.0, lam=0.0)
    with pytest.raises(DomainError) as err:
        feynman_kac_bound("quadratic", p, 0.0, 1.0, 1.0)
    assert "1.0" in str(err.value)


def test_feynman_kac_linear_needs_nonnegative_lambda_and_nu2():
    with pytest.raises(DomainError):
        feynman_kac_bound("linear", LyapunovParams(nu=2.0, lam=-0.2), 0.0, 1.0, 0.1)
    with pytest.raises(DomainError):
        feynman_kac_bound("linear", LyapunovParams(nu=1.5, lam=0.0), 0.0, 1.0, 0.1)


def test_feynman_kac_linear_composes_exp_dist():
    p = LyapunovParams(nu=3.0, lam=0.2)
    got = feynman_kac_bound("linear", p, 0.5, 1.5, 0.3)
    want = math.exp(0.3 * 1.5) * exp_dist_bound(p, 0.5, 1.5, 0.3 * 1.5)
    assert got == pytest.approx(want, rel=1e-12)


# ------------------------------------------------------------------- curves

def test_curve_valid_iff_finite():
    p = LyapunovParams(nu=3.0, lam=1.0 / 3.0)
    grid = np.linspace(0.01, 8.0, 300)
    curve = exp_sq_curve(p, 0.0, 1.0 / 6.0, grid)
    tstar = 3.0 * math.log(3.0)
    assert curve.explosion_point == pytest.approx(tstar, abs=1e-8)
    for t, v, ok in zip(curve.grid, curve.values, curve.valid):
        assert ok == math.isfinite(v)
        if t < tstar - 1e-6:
            assert ok
        if t > tstar + 1e-6:
            assert not ok


def test_curve_mgf_values_at_least_one():
    p = LyapunovParams(nu=3.0, lam=-1.0 / 3.0)
    grid = np.linspace(0.01, 8.0, 200)
    for curve in (exp_sq_curve(p, 0.0, 1.0 / 6.0, grid), exp_dist_curve(p, 0.0, 1.0 / 6.0, grid)):
        for v, ok in zip(curve.values, curve.valid):
            if ok:
                assert v >= 1.0


def test_curve_csv_format():
    curve = BoundCurve(grid=[0.5, 1.0], values=[1.25, math.nan], valid=[True, False])
    text = curve_to_csv(curve)
    lines = text.strip().split("\n")
    assert lines[0] == "param,value,valid"
    assert lines[1] == "0.5,1.25,true"
    assert lines[2].endswith(",false")


def test_bound_curve_handles_domain_errors():
    p = LyapunovParams(nu=2.0, lam=0.0)
    curve = bound_curve(lambda t: exp_sq_bound(p, 0.0, t, 0.5), [1.0, 1.9, 2.5])
    assert curve.valid == [True, True, False]
