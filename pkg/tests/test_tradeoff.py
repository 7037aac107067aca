import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacemimo.errors import ValidationError
from spacemimo.tradeoff import (
    inverse_eta,
    optimal_antenna_count,
    optimal_antenna_scan,
    residual,
    shannon_limit,
    solve_xi,
    solve_xi_array,
    tradeoff_curve,
    wideband_slope,
)

LN2 = math.log(2.0)


def brute_force_xi(eta, m, g, k=None):
    """Largest root of the implicit equation by dense sign scan plus bisection."""
    k = m if k is None else k
    f = lambda x: x - k * math.log2(1 + eta * x * g / (m * k))
    xs = np.logspace(-8, 6, 20001)
    vals = np.array([f(x) for x in xs])
    sign_change = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if len(sign_change) == 0:
        return 0.0
    lo, hi = xs[sign_change[-1]], xs[sign_change[-1] + 1]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestShannonLimit:
    def test_siso(self):
        assert shannon_limit(1, 1.0) == pytest.approx(LN2, rel=1e-15)
        assert 10 * math.log10(shannon_limit(1, 1.0)) == pytest.approx(-1.5917, abs=5e-5)

    def test_four(self):
        assert shannon_limit(4, 1.0) == pytest.approx(2.772588722239781, rel=1e-15)
        assert 10 * math.log10(shannon_limit(4, 1.0)) == pytest.approx(4.4289, abs=5e-5)

    @pytest.mark.parametrize("g", [1e-3, 1.0, 7.5])
    def test_linear_in_m(self, g):
        base = shannon_limit(1, g)
        for m in range(1, 65):
            assert shannon_limit(m, g) == m * base


class TestWidebandSlope:
    def test_values(self):
        assert wideband_slope(1) == pytest.approx(0.6643856189774724, rel=1e-15)
        assert wideband_slope(10) == pytest.approx(6.643856189774724, rel=1e-15)

    def test_linear(self):
        for m in range(1, 65):
            assert wideband_slope(m) == pytest.approx(m * wideband_slope(1), rel=1e-15)


class TestSolve:
    def test_unit(self):
        p = solve_xi(1.0, 1, 1.0)
        assert p.xi == pytest.approx(1.0, rel=1e-12)
        assert p.eta_db == 0.0

    def test_two_antennas(self):
        assert solve_xi(2.0, 2, 1.0).xi == pytest.approx(2.0, rel=1e-12)

    def test_below_limit_is_zero(self):
        assert solve_xi(0.5, 1, 1.0).xi == 0.0

    def test_at_limit_is_zero(self):
        assert solve_xi(shannon_limit(3, 2.0), 3, 2.0).xi == 0.0

    @pytest.mark.parametrize("eta,m,g", [(0.8, 1, 1.0), (3.0, 2, 1.0), (50.0, 4, 1.0),
                                         (1e3, 16, 1.0), (30.0, 3, 0.25), (1e4, 64, 1.0)])
    def test_brute_force_oracle(self, eta, m, g):
        assert solve_xi(eta, m, g).xi == pytest.approx(brute_force_xi(eta, m, g), rel=1e-7)

    def test_capped_brute_force_oracle(self):
        assert solve_xi(200.0, 8, 1.0, dof_cap=3).xi == pytest.approx(
            brute_force_xi(200.0, 8, 1.0, k=3), rel=1e-7
        )

    def test_cap_above_m_is_no_cap(self):
        assert solve_xi(200.0, 8, 1.0, dof_cap=100).xi == solve_xi(200.0, 8, 1.0).xi

    def test_residual_within_tol(self):
        for eta in np.logspace(-0.1, 4, 50):
            for m in (1, 3, 10):
                p = solve_xi(float(eta), m, 1.0)
                assert abs(residual(p.xi, p.eta, m, 1.0)) <= 1e-9

    def test_invalid(self):
        with pytest.raises(ValidationError):
            solve_xi(-1.0, 1, 1.0)
        with pytest.raises(ValidationError):
            solve_xi(1.0, 0, 1.0)

    def test_array_matches_scalar(self):
        eta = np.logspace(-0.5, 3, 17)
        arr = solve_xi_array(eta, 5, 1.0)
        assert arr.tolist() == [solve_xi(float(e), 5, 1.0).xi for e in eta]


class TestInverse:
    def test_values(self):
        assert inverse_eta(1.0, 1, 1.0) == pytest.approx(1.0, rel=1e-15)
        assert inverse_eta(2.0, 2, 1.0) == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("m", [1, 4, 32])
    def test_small_xi_approaches_limit(self, m):
        assert inverse_eta(1e-9, m, 1.0) == pytest.approx(shannon_limit(m, 1.0), rel=1e-8)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e3), st.integers(1, 64), st.floats(1e-3, 1e3))
    def test_round_trip(self, xi, m, g):
        eta = inverse_eta(xi, m, g)
        assert solve_xi(eta, m, g).xi == pytest.approx(xi, rel=1e-9)


class TestOptimalCount:
    def test_below_siso_limit(self):
        assert optimal_antenna_count(0.5, 1.0) == (1, 0.0)

    def test_just_above_siso_limit(self):
        m, xi = optimal_antenna_count(LN2 * 1.01, 1.0, m_max=64)
        assert m == 1 and xi > 0

    def test_exhaustive_scan(self):
        m_star, xi_star = optimal_antenna_count(100.0, 1.0, m_max=64)
        values = [solve_xi(100.0, m, 1.0).xi for m in range(1, 65)]
        assert xi_star == max(values)
        assert m_star == values.index(max(values)) + 1
        assert xi_star > solve_xi(100.0, 1, 1.0).xi

    def test_scan_non_decreasing(self):
        m_star, xi_star = optimal_antenna_scan(np.linspace(-2, 30, 65), 1.0, m_max=256)
        assert np.all(np.diff(m_star) >= 0)
        assert np.all(np.diff(xi_star) >= 0)

    def test_scan_matches_pointwise(self):
        grid = np.array([0.0, 10.0, 20.0])
        m_star, xi_star = optimal_antenna_scan(grid, 1.0, m_max=128)
        for e, m, x in zip(grid, m_star, xi_star):
            assert (m, x) == optimal_antenna_count(10 ** (e / 10), 1.0, m_max=128)


class TestCurve:
    def test_onset(self):
        curve = tradeoff_curve(4, 1.0, (0.0, 10.0), 1001)
        onset = 10 * math.log10(shannon_limit(4, 1.0))
        first = next(p for p in curve if p.xi > 0)
        assert onset < first.eta_db <= onset + 0.01 + 1e-12
        assert all(p.xi == 0 for p in curve if p.eta_db <= onset)

    def test_monotone(self):
        xi = [p.xi for p in tradeoff_curve(1, 1.0, (-2.0, 20.0), 221)]
        assert all(b >= a for a, b in zip(xi, xi[1:]))

    @pytest.mark.parametrize("m", [1, 3, 8])
    def test_onset_slope(self, m):
        onset = 10 * math.log10(shannon_limit(m, 1.0))
        xi = solve_xi(10 ** ((onset + 0.01) / 10), m, 1.0).xi
        assert xi / 0.01 == pytest.approx(wideband_slope(m), rel=0.02)

    def test_steps(self):
        assert len(tradeoff_curve(2, 1.0, (0.0, 1.0), 2)) == 2
        with pytest.raises(ValidationError):
            tradeoff_curve(2, 1.0, (0.0, 1.0), 1)
        with pytest.raises(ValidationError):
            tradeoff_curve(2, 1.0, (1.0, 0.0), 5)
