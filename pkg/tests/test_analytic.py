"""Closed-form moments and error curves against independent oracles.

Every non-trivial expected value asserted here is cross-checked in this
file by an oracle that does not share code with the formula under test:
order-statistics sampling for conditional moments, direct trajectory
simulation for unconditional ones, adaptive quadrature for the averaged
error, and series expansions for limits.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad

from maintsim.analytic import (
    ConditionalMomentQuery,
    ErrorQuery,
    cond_interarrival_moment,
    cond_position_second_moment,
    cond_waypoint_time_moment,
    displacement_cross_moment,
    error_asymptote,
    error_at,
    error_avg,
    interarrival_density,
    position_second_moment,
    position_second_moment_given_count,
    waypoint_count_pmf,
    waypoint_time_density,
    waypoint_time_gap_joint_density,
)
from maintsim.errors import ParameterError, UnsupportedMomentError
from maintsim.montecarlo import sample_window_positions


# ---------------------------------------------------------------------------
# conditional waypoint-time moments (k-th of n, window tau)


def _sorted_uniforms(rng, tau, n, samples):
    wp = np.sort(rng.uniform(0.0, tau, (samples, n)), axis=1)
    gaps = np.diff(wp, axis=1, prepend=0.0)
    return wp, gaps


class TestCondWaypointTimeMoment:
    def test_frozen_values(self):
        assert cond_waypoint_time_moment(ConditionalMomentQuery(10.0, 4, 2, 1)) == 4.0
        assert cond_waypoint_time_moment(ConditionalMomentQuery(10.0, 4, 2, 2)) == 20.0
        # single waypoint: uniform on (0, tau), mean by symmetry
        assert cond_waypoint_time_moment(ConditionalMomentQuery(10.0, 1, 1, 1)) == 5.0

    def test_order_statistics_oracle(self):
        rng = np.random.default_rng(2024)
        wp, _ = _sorted_uniforms(rng, 10.0, 4, 200_000)
        t2 = wp[:, 1]
        for sample, expected in ((t2, 4.0), (t2**2, 20.0)):
            se = sample.std(ddof=1) / math.sqrt(sample.size)
            assert abs(sample.mean() - expected) < 3.0 * se

    def test_rejects_bad_order(self):
        with pytest.raises(UnsupportedMomentError):
            cond_waypoint_time_moment(ConditionalMomentQuery(10.0, 4, 2, 3))

    def test_rejects_bad_query(self):
        with pytest.raises(ParameterError):
            ConditionalMomentQuery(10.0, 4, 5, 1)
        with pytest.raises(ParameterError):
            ConditionalMomentQuery(-1.0, 4, 2, 1)


class TestCondInterarrivalMoment:
    def test_frozen_values(self):
        assert cond_interarrival_moment(10.0, 4, 1) == 2.0
        assert cond_interarrival_moment(10.0, 4, 2) == pytest.approx(200.0 / 30.0, rel=1e-15)
        assert cond_interarrival_moment(10.0, 1, 1) == 5.0

    def test_spacings_oracle(self):
        rng = np.random.default_rng(7)
        _, gaps = _sorted_uniforms(rng, 10.0, 4, 200_000)
        for k in range(4):  # the law is the same for every gap index
            g = gaps[:, k]
            se1 = g.std(ddof=1) / math.sqrt(g.size)
            assert abs(g.mean() - 2.0) < 3.0 * se1
            se2 = (g**2).std(ddof=1) / math.sqrt(g.size)
            assert abs((g**2).mean() - 200.0 / 30.0) < 3.0 * se2

    def test_rejects_bad_order(self):
        with pytest.raises(UnsupportedMomentError):
            cond_interarrival_moment(10.0, 4, 0)


class TestCondPositionSecondMoment:
    def test_frozen_values(self):
        assert cond_position_second_moment(10.0, 4, 2, 5.0) == pytest.approx(1000.0 / 3.0, rel=1e-15)
        # k = n = 1: one gap, uniform; sigma^2 tau^2 / 3
        assert cond_position_second_moment(10.0, 1, 1, 5.0) == pytest.approx(2500.0 / 3.0, rel=1e-15)

    def test_weighted_spacings_oracle(self):
        rng = np.random.default_rng(11)
        _, gaps = _sorted_uniforms(rng, 10.0, 4, 200_000)
        vel = 5.0 * rng.standard_normal(gaps.shape)
        x2 = np.cumsum(vel * gaps, axis=1)[:, 1]
        sq = x2**2
        se = sq.std(ddof=1) / math.sqrt(sq.size)
        assert abs(sq.mean() - 1000.0 / 3.0) < 3.0 * se

    def test_first_moment_is_zero(self):
        rng = np.random.default_rng(12)
        _, gaps = _sorted_uniforms(rng, 10.0, 4, 100_000)
        vel = 5.0 * rng.standard_normal(gaps.shape)
        x2 = np.cumsum(vel * gaps, axis=1)[:, 1]
        se = x2.std(ddof=1) / math.sqrt(x2.size)
        assert abs(x2.mean()) < 3.0 * se


class TestPositionSecondMomentGivenCount:
    def test_no_waypoints_is_pure_drift(self):
        assert position_second_moment_given_count(10.0, 0, 5.0) == 2500.0

    def test_frozen_value(self):
        assert position_second_moment_given_count(10.0, 2, 5.0) == 1250.0

    def test_conditioned_oracle(self):
        rng = np.random.default_rng(21)
        t, sigma, i, samples = 10.0, 5.0, 2, 200_000
        wp, gaps = _sorted_uniforms(rng, t, i, samples)
        vel = sigma * rng.standard_normal((samples, i + 1))
        x = (vel[:, :i] * gaps).sum(axis=1) + (t - wp[:, i - 1]) * vel[:, i]
        sq = x**2
        se = sq.std(ddof=1) / math.sqrt(samples)
        assert abs(sq.mean() - 1250.0) < 3.0 * se

    @pytest.mark.parametrize("i", range(0, 8))
    def test_decreasing_in_count(self, i):
        assert position_second_moment_given_count(10.0, i, 5.0) > position_second_moment_given_count(
            10.0, i + 1, 5.0
        )


class TestPositionSecondMoment:
    def test_zero_at_zero(self):
        assert position_second_moment(0.0, 0.1, 5.0) == 0.0

    def test_frozen_value(self):
        # 50 * (100 - 100 + 100/e), cross-checked by the trajectory oracle below
        assert position_second_moment(10.0, 0.1, 5.0) == pytest.approx(1839.3972058572112, rel=1e-12)

    def test_trajectory_oracle(self):
        rng = np.random.default_rng(31)
        xs, ys = sample_window_positions(rng, 0.1, 5.0, 10.0, 150_000, (10.0,))
        sq = np.concatenate([xs[:, 0], ys[:, 0]]) ** 2
        se = sq.std(ddof=1) / math.sqrt(sq.size)
        assert abs(sq.mean() - 1839.3972058572112) < 3.5 * se

    def test_small_time_series(self):
        # sigma^2 t^2 (1 - lambda t / 3) to second order
        t, lam, sigma = 1e-3, 0.1, 5.0
        expected = sigma**2 * t**2 * (1.0 - lam * t / 3.0)
        assert position_second_moment(t, lam, sigma) == pytest.approx(expected, rel=1e-7)


class TestDisplacementCrossMoment:
    def test_endpoints_vanish(self):
        assert displacement_cross_moment(0.0, 10.0, 0.1, 5.0) == 0.0
        assert displacement_cross_moment(10.0, 10.0, 0.1, 5.0) == 0.0

    def test_frozen_value(self):
        # 2500 (1 - 2 e^-1/2 + e^-1), split-window oracle below
        assert displacement_cross_moment(5.0, 10.0, 0.1, 5.0) == pytest.approx(387.0453043654386, rel=1e-12)

    def test_split_window_oracle(self):
        rng = np.random.default_rng(41)
        xs, ys = sample_window_positions(rng, 0.1, 5.0, 10.0, 400_000, (5.0, 10.0))
        before = np.concatenate([xs[:, 0], ys[:, 0]])
        after = np.concatenate([xs[:, 1], ys[:, 1]]) - before
        prod = before * after
        se = prod.std(ddof=1) / math.sqrt(prod.size)
        assert abs(prod.mean() - 387.0453043654386) < 3.5 * se

    @given(
        lam=st.floats(0.02, 2.0),
        T=st.floats(1.0, 100.0),
        frac=st.floats(0.0, 1.0),
        sigma=st.floats(0.5, 20.0),
    )
    def test_bounds_and_symmetry(self, lam, T, frac, sigma):
        t = frac * T
        value = displacement_cross_moment(t, T, lam, sigma)
        assert 0.0 <= value <= sigma**2 / lam**2 * (1 + 1e-12)
        mirrored = displacement_cross_moment(T - t, T, lam, sigma)
        # abs tolerance at the bound's scale: T - t rounds to T for t below an ulp
        assert value == pytest.approx(mirrored, rel=1e-9, abs=1e-12 * sigma**2 / lam**2)


class TestErrorAt:
    def test_endpoints_exactly_zero(self):
        q0 = ErrorQuery(5.0, 0.1, 100.0, t=0.0)
        qT = ErrorQuery(5.0, 0.1, 100.0, t=100.0)
        assert error_at(q0) == 0.0
        assert error_at(qT) == 0.0

    def test_frozen_midpoint_value(self):
        # bracket evaluated term by term; agrees with the protocol-level
        # Monte Carlo oracle below
        assert error_at(ErrorQuery(5.0, 0.1, 100.0, t=50.0)) == pytest.approx(17567.26597016644, rel=1e-10)

    def test_symmetry_is_exact_on_clean_grid(self):
        for t in (10.0, 20.0, 30.0, 40.0):
            left = error_at(ErrorQuery(5.0, 0.1, 100.0, t=t))
            right = error_at(ErrorQuery(5.0, 0.1, 100.0, t=100.0 - t))
            assert left == right

    def test_protocol_simulation_oracle(self):
        rng = np.random.default_rng(51)
        t, T = 50.0, 100.0
        xs, ys = sample_window_positions(rng, 0.1, 5.0, T, 250_000, (t, T))
        frac = t / T
        sq = (xs[:, 0] - xs[:, 1] * frac) ** 2 + (ys[:, 0] - ys[:, 1] * frac) ** 2
        se = sq.std(ddof=1) / math.sqrt(sq.size)
        assert abs(sq.mean() - 17567.26597016644) < 3.5 * se

    @given(
        lam=st.floats(0.02, 2.0),
        T=st.floats(1.0, 100.0),
        frac=st.floats(0.0, 1.0),
        sigma=st.floats(0.5, 20.0),
    )
    @settings(max_examples=200)
    def test_nonnegative_and_symmetric(self, lam, T, frac, sigma):
        t = frac * T
        v = error_at(ErrorQuery(sigma, lam, T, t=t))
        assert v >= 0.0
        mirrored = error_at(ErrorQuery(sigma, lam, T, t=T - t))
        assert v == pytest.approx(mirrored, rel=1e-9, abs=1e-12 * sigma**2 * T * T)

    def test_requires_t(self):
        with pytest.raises(ParameterError):
            error_at(ErrorQuery(5.0, 0.1, 100.0))


class TestErrorAvg:
    def test_frozen_reference_point(self):
        # quadrature of the pointwise curve reproduces this to 1e-8
        assert error_avg(ErrorQuery(5.0, 0.1, 100.0)) == pytest.approx(10133.26674676968, rel=1e-12)

    GRID_SIGMA = (1.0, 5.0, 10.0)
    GRID_LAMBDA = (0.05, 0.1, 0.5)
    GRID_T = (10.0, 50.0, 100.0, 200.0)

    @pytest.mark.parametrize("sigma", GRID_SIGMA)
    @pytest.mark.parametrize("lam", GRID_LAMBDA)
    @pytest.mark.parametrize("T", GRID_T)
    def test_quadrature_identity(self, sigma, lam, T):
        closed = error_avg(ErrorQuery(sigma, lam, T))
        integral, est_err = quad(
            lambda t: error_at(ErrorQuery(sigma, lam, T, t=t)),
            0.0,
            T,
            epsabs=1e-13 * closed * T,
            epsrel=1e-11,
            limit=400,
        )
        assert est_err < 1e-7 * integral
        assert integral / T == pytest.approx(closed, rel=1e-6)

    def test_vanishes_with_the_period(self):
        q = ErrorQuery(5.0, 0.1, 1e-3)
        value = error_avg(q)
        assert 0.0 < value < 1e-4 * q.sigma**2
        # leading term of the series: 2 sigma^2 lambda T^3 / 45
        assert value == pytest.approx(2 * 25.0 * 0.1 * 1e-9 / 45.0, rel=1e-4)

    def test_series_and_direct_branches_agree(self):
        lam = 1.0
        below = error_avg(ErrorQuery(5.0, lam, 0.9999999))
        above = error_avg(ErrorQuery(5.0, lam, 1.0000001))
        assert below == pytest.approx(above, rel=1e-6)

    def test_constant_ratio_value(self):
        # lambda tied to T: T=200, C=50
        assert error_avg(ErrorQuery(10.0, 4.0, 200.0)) == pytest.approx(3312.5624218750004, rel=1e-12)

    def test_rejects_pointwise_query(self):
        with pytest.raises(ParameterError):
            error_avg(ErrorQuery(5.0, 0.1, 100.0, t=3.0))


class TestErrorAsymptote:
    def test_frozen_value(self):
        assert error_asymptote(10.0, 50.0) == pytest.approx(10000.0 / 3.0, rel=1e-15)

    def test_no_motion_no_error(self):
        assert error_asymptote(0.0, 50.0) == 0.0

    def test_constant_ratio_convergence(self):
        limit = error_asymptote(10.0, 50.0)
        gap_200 = abs(error_avg(ErrorQuery(10.0, 200.0 / 50.0, 200.0)) - limit) / limit
        gap_400 = abs(error_avg(ErrorQuery(10.0, 400.0 / 50.0, 400.0)) - limit) / limit
        assert gap_200 < 0.01
        assert gap_400 < gap_200

    def test_rejects_bad_ratio(self):
        with pytest.raises(ParameterError):
            error_asymptote(10.0, 0.0)


# ---------------------------------------------------------------------------
# densities


class TestDensities:
    @pytest.mark.parametrize("n", range(1, 11))
    def test_waypoint_time_density_normalizes(self, n):
        tau = 10.0
        for k in range(1, n + 1):
            integral, _ = quad(
                lambda x: waypoint_time_density(x, tau, n, k), 0.0, tau, epsabs=1e-12, epsrel=1e-12, limit=200
            )
            assert abs(integral - 1.0) <= 1e-8

    @pytest.mark.parametrize("n", range(1, 11))
    def test_interarrival_density_normalizes(self, n):
        tau = 10.0
        integral, _ = quad(lambda y: interarrival_density(y, tau, n), 0.0, tau, epsabs=1e-12, epsrel=1e-12)
        assert abs(integral - 1.0) <= 1e-8

    @pytest.mark.parametrize("n,k", [(2, 2), (4, 3), (6, 2)])
    def test_joint_density_normalizes(self, n, k):
        tau = 10.0
        integral, _ = dblquad(
            lambda y, x: waypoint_time_gap_joint_density(x, y, tau, n, k),
            0.0,
            tau,
            0.0,
            lambda x: tau - x,
            epsabs=1e-10,
            epsrel=1e-10,
        )
        assert integral == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("n,k", [(4, 2), (6, 5), (3, 1)])
    def test_density_moments_match_closed_forms(self, n, k):
        tau = 10.0
        mean, _ = quad(lambda x: x * waypoint_time_density(x, tau, n, k), 0.0, tau, epsabs=1e-12, epsrel=1e-12)
        assert mean == pytest.approx(cond_waypoint_time_moment(ConditionalMomentQuery(tau, n, k, 1)), rel=1e-9)
        second, _ = quad(
            lambda y: y * y * interarrival_density(y, tau, n), 0.0, tau, epsabs=1e-12, epsrel=1e-12
        )
        assert second == pytest.approx(cond_interarrival_moment(tau, n, 2), rel=1e-9)

    def test_density_domains(self):
        assert waypoint_time_density(-1.0, 10.0, 4, 2) == 0.0
        assert waypoint_time_density(11.0, 10.0, 4, 2) == 0.0
        assert interarrival_density(10.0, 10.0, 4) == 0.0
        with pytest.raises(ParameterError):
            waypoint_time_density(1.0, 10.0, 4, 5)
        with pytest.raises(ParameterError):
            waypoint_time_gap_joint_density(1.0, 1.0, 10.0, 4, 1)


class TestWaypointCountPmf:
    def test_matches_scipy(self):
        from scipy.stats import poisson

        ks = np.arange(0, 30)
        ours = waypoint_count_pmf(ks, 10.0, 0.1)
        ref = poisson.pmf(ks, 1.0)
        assert np.allclose(ours, ref, rtol=1e-12)

    def test_sums_to_one(self):
        ks = np.arange(0, 200)
        assert waypoint_count_pmf(ks, 100.0, 0.1).sum() == pytest.approx(1.0, abs=1e-12)

    def test_zero_horizon(self):
        assert waypoint_count_pmf(0, 0.0, 0.1) == 1.0
        assert waypoint_count_pmf(3, 0.0, 0.1) == 0.0
