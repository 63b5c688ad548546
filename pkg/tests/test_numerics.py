import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special
from hypothesis import given, settings, strategies as st

from ehcap.model import ChannelParams, derive_channel
from ehcap.numerics import (
    QuadratureSpec,
    alternating_binomial_sum,
    csma_spatial_integral,
    find_root_increasing,
    lambert_w0,
)
from oracles import FROZEN, lambert_bisect, riemann_radial


class TestLambertW0:
    def test_trivial_points(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)

    def test_reference_value(self):
        # bisection oracle run before the fast iteration existed
        assert lambert_bisect(4.826) == pytest.approx(FROZEN["w0_4p826"], abs=1e-12)
        assert lambert_w0(4.826) == pytest.approx(FROZEN["w0_4p826"], abs=1e-12)

    def test_residual_on_log_grid(self):
        for x in np.logspace(-6, 6, 121):
            w = lambert_w0(float(x))
            assert abs(w * math.exp(w) - x) <= 1e-12 * x

    def test_negative_domain(self):
        for x in (-0.05, -0.2, -0.35, -1.0 / math.e + 1e-9):
            w = lambert_w0(x)
            assert w >= -1.0
            assert w * math.exp(w) == pytest.approx(x, abs=1e-13)
        assert lambert_w0(-1.0 / math.e) == pytest.approx(-1.0, abs=1e-6)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lambert_w0(-0.4)

    @given(st.floats(min_value=-0.36, max_value=1e8))
    @settings(max_examples=300)
    def test_identity_property(self, x):
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) <= 1e-12 * max(abs(x), 1e-12)

    def test_matches_scipy(self):
        for x in np.logspace(-8, 10, 50):
            ref = float(scipy.special.lambertw(float(x)).real)
            assert lambert_w0(float(x)) == pytest.approx(ref, rel=1e-12)

    def test_matches_bisection_oracle(self):
        for x in (-0.3, -0.1, 0.5, 2.0, 4.826, 50.0, 12345.0):
            assert lambert_w0(x) == pytest.approx(lambert_bisect(x), abs=1e-11)


class TestFindRootIncreasing:
    def test_identity(self):
        assert find_root_increasing(lambda x: x, 0.5, 0.0, 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_unit_battery_access(self):
        # f_1(q) = p q/(p+q-pq) at p = 0.5; algebraic root of f = 0.23 is 0.115/0.385
        f = lambda q: 0.5 * q / (0.5 + q - 0.5 * q)
        root = find_root_increasing(f, 0.23, 0.0, 1.0)
        assert root == pytest.approx(FROZEN["unit_root_lmax023"], abs=1e-10)

    def test_not_bracketed(self):
        f = lambda q: 0.5 * q / (0.5 + q - 0.5 * q)  # f(1) = 0.5 < 0.6
        assert find_root_increasing(f, 0.6, 0.0, 1.0) is None
        assert find_root_increasing(lambda x: x, -0.1, 0.0, 1.0) is None

    def test_bad_bracket(self):
        with pytest.raises(ValueError):
            find_root_increasing(lambda x: x, 0.5, 1.0, 0.0)

    @given(
        a=st.floats(min_value=0.1, max_value=5.0),
        b=st.floats(min_value=-2.0, max_value=2.0),
        target_t=st.floats(min_value=0.05, max_value=0.95),
    )
    @settings(max_examples=200)
    def test_recovers_known_roots(self, a, b, target_t):
        # strictly increasing cubic-ish map with a known inverse point
        f = lambda x: a * x**3 + x + b
        x_true = -2.0 + 4.0 * target_t
        root = find_root_increasing(f, f(x_true), -2.0, 2.0, tol=1e-12)
        assert root == pytest.approx(x_true, abs=1e-9)


class TestSpatialIntegral:
    def test_zero_cases(self, channel_small):
        assert csma_spatial_integral(0, 0.7, channel_small) == 0.0
        assert csma_spatial_integral(3, 0.0, channel_small) == 0.0

    def test_single_overlap_closed_form(self, channel_small):
        # ell=1 collapses to nu * d^2 theta^(2/alpha) * kappa(alpha)
        value = csma_spatial_integral(1, 1.0, channel_small)
        assert value == pytest.approx(FROZEN["kappa_3"], rel=1e-8)

    @pytest.mark.parametrize(
        "nu,alpha,theta,d",
        [
            (1.0, 3.0, 1.0, 1.0),
            (0.5, 3.0, 2.0, 2.0),
            (0.25, 4.0, 1.0, 1.0),
            (0.9, 2.5, 0.8, 1.5),
            (0.1, 5.0, 3.0, 0.7),
        ],
    )
    def test_closed_form_cross_check(self, nu, alpha, theta, d):
        ch = ChannelParams(alpha, theta, d)
        der = derive_channel(ch)
        closed = nu * d**2 * theta ** (2.0 / alpha) * der.kappa
        assert csma_spatial_integral(1, nu, ch) == pytest.approx(closed, rel=1e-8)

    def test_riemann_oracle_l2(self, channel_small):
        # brute-force Riemann sum (1e7 panels) plus the analytic tail
        alpha = 3.0
        u_max = 200.0
        tail = 2 * 0.5 * u_max ** (2.0 - alpha) / (alpha - 2.0)
        oracle = 2.0 * math.pi * (riemann_radial(2, 0.5, alpha, u_max=u_max) + tail)
        assert oracle == pytest.approx(FROZEN["radial_l2_nu05_ch311"], rel=1e-6)
        value = csma_spatial_integral(2, 0.5, channel_small)
        assert value == pytest.approx(FROZEN["radial_l2_nu05_ch311"], rel=1e-8)
        # forced bound: 1-(1-x)^2 <= 2x pointwise
        assert 0.0 < value < 2.0 * csma_spatial_integral(1, 0.5, channel_small)

    def test_matches_scipy_quad(self, channel_ref):
        for ell, nu in [(2, 1.0), (3, 0.6), (4, 1.0), (5, 0.3)]:
            f = lambda u: u * (1.0 - (1.0 - nu / (1.0 + u**3.0)) ** ell)
            main, _ = scipy.integrate.quad(f, 0.0, 300.0, limit=400)
            tail = ell * nu * 300.0 ** (-1.0) / 1.0
            ref = 2.0 * math.pi * channel_ref.d**2 * channel_ref.theta ** (2.0 / 3.0) * (main + tail)
            assert csma_spatial_integral(ell, nu, channel_ref) == pytest.approx(ref, rel=1e-6)

    def test_full_activity_reference_values(self, channel_ref):
        for ell, key in [(1, "K1_322"), (2, "K2_322"), (3, "K3_322"), (4, "K4_322")]:
            assert csma_spatial_integral(ell, 1.0, channel_ref) == pytest.approx(
                FROZEN[key], rel=1e-8
            )

    @given(
        ell=st.integers(min_value=1, max_value=6),
        nu=st.floats(min_value=0.05, max_value=1.0),
    )
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_ell_and_nu(self, ell, nu):
        ch = ChannelParams(3.0, 1.0, 1.0)
        base = csma_spatial_integral(ell, nu, ch)
        assert csma_spatial_integral(ell + 1, nu, ch) >= base
        if nu <= 0.95:
            assert csma_spatial_integral(ell, min(nu + 0.05, 1.0), ch) >= base

    def test_validation(self, channel_small):
        with pytest.raises(ValueError):
            csma_spatial_integral(-1, 0.5, channel_small)
        with pytest.raises(ValueError):
            csma_spatial_integral(1, 1.5, channel_small)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=2.0)
        with pytest.raises(ValueError):
            QuadratureSpec(truncation_radius_factor=5.0)


class TestAlternatingBinomialSum:
    def test_all_ones_vanishes(self):
        assert alternating_binomial_sum([1.0, 1.0, 1.0, 1.0]) == pytest.approx(0.0, abs=1e-15)

    def test_geometric_terms(self):
        # sum (-1)^l C(2,l) a^l = (1-a)^2
        a = 0.5
        assert alternating_binomial_sum([1.0, a, a**2]) == pytest.approx(0.25, abs=1e-15)

    def test_direct_arithmetic(self):
        assert alternating_binomial_sum([1.0, 0.8, 0.7]) == pytest.approx(0.1, abs=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            alternating_binomial_sum([])

    @given(
        a=st.floats(min_value=0.0, max_value=1.0),
        n=st.integers(min_value=0, max_value=20),
    )
    @settings(max_examples=200)
    def test_binomial_theorem(self, a, n):
        terms = [a**l for l in range(n + 1)]
        expected = (1.0 - a) ** n
        assert alternating_binomial_sum(terms) == pytest.approx(expected, abs=1e-9)
