import math

import pytest
from hypothesis import given, settings, strategies as st

from ehcap.energy_queue import (
    effective_access,
    occupancy,
    occupancy_finite,
    occupancy_finite_oracle,
    occupancy_infinite,
)
from ehcap.model import UNBOUNDED
from oracles import queue_chain_solve

probs = st.floats(min_value=0.01, max_value=0.99)
batteries = st.integers(min_value=1, max_value=60)


class TestInfinite:
    def test_draining_regime(self):
        occ = occupancy_infinite(0.5, 1.0)
        assert occ.r == 0.5
        assert occ.effective_access == 0.5

    def test_filling_regime(self):
        # q <= p: the queue drains slower than it fills
        occ = occupancy_infinite(0.5, 0.3)
        assert occ.r == 1.0
        assert occ.effective_access == 0.3

    def test_fractional_occupancy(self):
        occ = occupancy_infinite(0.2, 0.8)
        assert occ.r == pytest.approx(0.25, abs=1e-15)
        assert occ.effective_access == pytest.approx(0.2, abs=1e-15)

    def test_q_zero_convention(self):
        occ = occupancy_infinite(0.4, 0.0)
        assert occ.r == 1.0
        assert occ.effective_access == 0.0

    @given(p=probs, q=st.floats(min_value=0.0, max_value=1.0))
    def test_access_is_min(self, p, q):
        assert occupancy_infinite(p, q).effective_access == min(p, q)


class TestFinite:
    def test_equal_rates_closed_form(self):
        assert occupancy_finite(0.5, 0.5, 5).r == pytest.approx(5.0 / 5.5, abs=1e-15)
        assert occupancy_finite(0.5, 0.5, 1).r == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_two_state_hand_solve(self):
        # pi_0 * p = pi_1 * q(1-p), pi_0 + pi_1 = 1  at p=q=0.5 gives r = 2/3
        assert occupancy_finite_oracle(0.5, 0.5, 1).r == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_full_attempt_rate(self):
        # q=1: output rate equals input rate, no overflow, r = p exactly
        occ = occupancy_finite(0.5, 1.0, 3)
        assert occ.r == 0.5
        assert occ.effective_access == 0.5

    def test_unit_battery_formula(self):
        p, q = 0.3, 0.7
        assert occupancy_finite(p, q, 1).r == pytest.approx(p / (p + q - p * q), rel=1e-14)

    def test_oracle_matches_closed_form_spot(self):
        a = occupancy_finite(0.3, 0.7, 4).r
        b = occupancy_finite_oracle(0.3, 0.7, 4).r
        assert a == pytest.approx(b, abs=1e-12)

    def test_p_one_short_circuit(self):
        assert occupancy_finite(1.0, 0.6, 4).r == 1.0
        assert occupancy_finite_oracle(1.0, 0.6, 4).r == pytest.approx(1.0, abs=1e-12)

    def test_oracle_rejects_degenerate(self):
        with pytest.raises(ValueError):
            occupancy_finite_oracle(0.0, 0.5, 3)

    @given(p=probs, q=probs, B=batteries)
    @settings(max_examples=250)
    def test_closed_form_vs_oracle(self, p, q, B):
        closed = occupancy_finite(p, q, B).r
        oracle = occupancy_finite_oracle(p, q, B).r
        assert abs(closed - oracle) <= 1e-10

    @given(p=probs, B=st.integers(min_value=1, max_value=20))
    @settings(max_examples=100)
    def test_near_degenerate_matches_oracle(self, p, B):
        for dq in (1e-6, -1e-6, 1e-10, 0.0):
            q = p + dq
            if not (0.0 < q <= 1.0):
                continue
            closed = occupancy_finite(p, q, B).r
            oracle = occupancy_finite_oracle(p, q, B).r
            assert abs(closed - oracle) <= 1e-10

    @given(p=probs, q=probs, B=batteries)
    @settings(max_examples=100)
    def test_balance_recursion_oracle(self, p, q, B):
        closed = occupancy_finite(p, q, B).r
        assert closed == pytest.approx(queue_chain_solve(p, q, B), abs=1e-9)

    def test_continuity_at_equal_rates(self):
        for p in (0.2, 0.5, 0.8):
            for B in (1, 3, 10):
                at = occupancy_finite(p, p, B).r
                near = occupancy_finite(p, p + 1e-7, B).r
                assert abs(at - near) <= 1e-6

    def test_large_B_approaches_unbounded(self):
        for p, q in [(0.3, 0.7), (0.7, 0.3), (0.45, 0.55)]:
            fin = occupancy_finite(p, q, 200).r
            inf = occupancy_infinite(p, q).r
            assert abs(fin - inf) <= 1e-6

    def test_huge_B_no_overflow(self):
        # rho > 1 path exercises the divided form
        assert occupancy_finite(0.9, 0.1, 5000).r == pytest.approx(1.0, abs=1e-12)
        assert occupancy_finite(0.1, 0.9, 5000).r == pytest.approx(1.0 / 9.0, rel=1e-12)


class TestEffectiveAccess:
    def test_energy_conservation_at_full_access(self):
        for B in (1, 2, 7, UNBOUNDED):
            assert effective_access(0.5, 1.0, B) == 0.5

    def test_never_transmits(self):
        assert effective_access(0.5, 0.0, 3) == 0.0

    def test_unit_battery_root_value(self):
        q = 0.2987012987012987
        assert effective_access(0.5, q, 1) == pytest.approx(0.23, abs=1e-12)

    @given(p=probs, q=probs, B=st.one_of(batteries, st.just(UNBOUNDED)))
    @settings(max_examples=200)
    def test_conservation_bound(self, p, q, B):
        f = effective_access(p, q, B)
        assert f <= min(p, q) + 1e-12

    @given(p=probs, B=st.integers(min_value=1, max_value=12))
    @settings(max_examples=60)
    def test_monotone_in_q(self, p, B):
        qs = [i / 200.0 for i in range(201)]
        values = [effective_access(p, q, B) for q in qs]
        assert all(b - a >= -1e-12 for a, b in zip(values, values[1:]))

    def test_dispatch(self):
        assert occupancy(0.5, 0.4, UNBOUNDED).r == 1.0
        assert occupancy(0.5, 0.4, 5).r == occupancy_finite(0.5, 0.4, 5).r
