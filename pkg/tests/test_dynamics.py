"""Glauber dynamics, diagnostics and the zero-mode integrator."""

import math

import numpy as np
import pytest
from scipy import integrate as sci_integrate
from scipy.signal import lfilter

import latticemarket as lm
from latticemarket import dynamics
from latticemarket.lattice import new_lattice

TC = dynamics.CRITICAL_TEMPERATURE_2D


class TestGlauberProbability:
    def test_symmetric_move_is_half(self):
        for t in (0.1, 1.0, 37.0):
            assert lm.glauber_flip_probability(0.0, t) == pytest.approx(0.5)

    def test_infinite_temperature_limit(self):
        assert lm.glauber_flip_probability(1.0, 1e12) == pytest.approx(
            0.5, abs=1e-6)

    def test_reference_value(self):
        expected = 1.0 / (1.0 + math.exp(4.0))
        assert lm.glauber_flip_probability(1.0, 0.25) == pytest.approx(
            expected, rel=1e-12)

    def test_detailed_balance(self):
        for x in np.linspace(-30.0, 30.0, 41):
            p_fwd = lm.glauber_flip_probability(x, 1.0)
            p_bwd = lm.glauber_flip_probability(-x, 1.0)
            assert p_fwd / p_bwd == pytest.approx(math.exp(-x), rel=1e-12)

    def test_overflow_saturates(self):
        assert lm.glauber_flip_probability(1e9, 1.0) == 0.0
        assert lm.glauber_flip_probability(-1e9, 1.0) == 1.0

    def test_bad_temperature(self):
        with pytest.raises(ValueError):
            lm.glauber_flip_probability(1.0, 0.0)


class TestSweep:
    def test_frozen_at_tiny_temperature(self):
        lat = new_lattice(2, 8, "all_up")
        rng = np.random.default_rng(1)
        for _ in range(100):
            lm.sweep(lat, 1e-6, rng)
        assert np.all(lat.occupations == 1)

    def test_infinite_temperature_disorders(self):
        lat = new_lattice(2, 16, "all_up")
        rng = np.random.default_rng(2)
        for _ in range(200):
            lm.sweep(lat, 1e12, rng)
        frac_up = lat.occupations.mean()
        # i.i.d. +-1/2 spins: sd of the fraction is 0.5/sqrt(256)
        assert abs(frac_up - 0.5) < 5 * 0.5 / 16

    def test_replay_is_bit_identical(self):
        runs = []
        for _ in range(2):
            lat = new_lattice(2, 8, "random", seed=5)
            rng = np.random.default_rng(17)
            for _ in range(20):
                lm.sweep(lat, 0.3, rng)
            runs.append(lat.occupations.copy())
        assert np.array_equal(runs[0], runs[1])

    def test_global_flip_mirrors_trajectory(self):
        # dE depends on sigma_site * sum sigma_nbr, which is flip invariant,
        # so the same coins drive the mirrored trajectory
        m_up, m_down = [], []
        for init, store in (("all_up", m_up), ("all_down", m_down)):
            lat = new_lattice(2, 8, init)
            rng = np.random.default_rng(23)
            for _ in range(30):
                lm.sweep(lat, 0.35, rng)
                store.append(lat.magnetization())
        assert m_up == [-m for m in m_down]


class TestRunSimulation:
    def test_recorded_length(self):
        p = lm.SimulationParams(dims=2, side=8, init="random",
                                temperature=1.0, sweeps=103, burn_in=10,
                                thin=4, seed=0)
        series = lm.run_simulation(p)
        assert len(series.values) == (103 - 10) // 4

    def test_reproducible(self):
        p = lm.SimulationParams(dims=2, side=8, init="random",
                                temperature=0.3, sweeps=200, seed=42)
        a = lm.run_simulation(p)
        b = lm.run_simulation(p)
        assert np.array_equal(a.values, b.values)

    def test_high_temperature_mean_zero(self):
        p = lm.SimulationParams(dims=2, side=32, init="random",
                                temperature=10 * TC, sweeps=3000,
                                burn_in=200, seed=7)
        series = lm.run_simulation(p)
        est = dynamics.autocorrelation_time(series.values)
        n_eff = len(series.values) / (2 * est.tau)
        se = series.values.std(ddof=1) / math.sqrt(n_eff)
        assert abs(series.values.mean()) < 3 * se

    def test_low_temperature_plateau(self):
        p = lm.SimulationParams(dims=2, side=32, init="all_up",
                                temperature=0.5 * TC, sweeps=1200,
                                burn_in=200, seed=8)
        series = lm.run_simulation(p)
        n_sites = 32 * 32
        assert series.values.mean() / n_sites > 0.4

    def test_critical_temperature_value(self):
        assert TC == pytest.approx(0.2836481642766277, rel=1e-12)
        # Onsager mapping: J_eff = 1/(4D) rescales the +-1 Ising coupling
        assert TC == pytest.approx((1 / 8) * 2 / math.log(1 + math.sqrt(2)))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            lm.SimulationParams(temperature=-1.0)
        with pytest.raises(ValueError):
            lm.SimulationParams(sweeps=0)
        with pytest.raises(ValueError):
            lm.SimulationParams(sweeps=10, burn_in=10)
        with pytest.raises(ValueError):
            lm.SimulationParams(thin=0)

    def test_replicas_deterministic_and_independent(self):
        p = lm.SimulationParams(dims=2, side=8, init="random",
                                temperature=0.4, sweeps=60, seed=3)
        serial = lm.run_replicas(p, 3)
        threaded = lm.run_replicas(p, 3, max_workers=3)
        for a, b in zip(serial, threaded):
            assert np.array_equal(a.values, b.values)
        assert not np.array_equal(serial[0].values, serial[1].values)


class TestMagnetizationToReturns:
    def test_deterministic_trend_rejected(self):
        series = dynamics.MagnetizationSeries(
            values=np.array([0.0, 1.0, 2.0, 3.0]), params=None)
        with pytest.raises(ValueError):
            lm.magnetization_to_returns(series)

    def test_alternating_series(self):
        series = dynamics.MagnetizationSeries(
            values=np.array([0.0, 1.0, 0.0, 1.0]), params=None)
        rets = lm.magnetization_to_returns(series)
        # raw differences recoverable from the stored normalization
        assert np.allclose(rets.values * rets.sigma, [1.0, -1.0, 1.0])
        assert np.var(rets.values, ddof=1) == pytest.approx(1.0, abs=1e-12)

    def test_high_temperature_return_structure(self):
        p = lm.SimulationParams(dims=2, side=16, init="random",
                                temperature=1e12, sweeps=4000,
                                burn_in=200, seed=9)
        series = lm.run_simulation(p)
        rets = lm.magnetization_to_returns(series)
        assert np.var(rets.values, ddof=1) == pytest.approx(1.0, abs=1e-12)
        # M decorrelates at rate ~1/e per sweep (untouched-site fraction),
        # so returns have lag-1 autocorrelation near -0.5 (1 - 1/e)
        r = rets.values
        lag1 = np.corrcoef(r[:-1], r[1:])[0, 1]
        assert -0.42 < lag1 < -0.20


class TestBinderCumulant:
    def test_gaussian_near_zero(self):
        rng = np.random.default_rng(5)
        u = dynamics.binder_cumulant(rng.standard_normal(50000))
        assert abs(u) < 0.03

    def test_two_point_distribution(self):
        samples = np.array([1.7, -1.7] * 100)
        assert dynamics.binder_cumulant(samples) == pytest.approx(2.0 / 3.0)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            dynamics.binder_cumulant(np.ones(99))

    def test_zero_moment(self):
        with pytest.raises(ValueError):
            dynamics.binder_cumulant(np.zeros(200))


class TestAutocorrelationTime:
    def test_white_noise(self):
        rng = np.random.default_rng(6)
        est = dynamics.autocorrelation_time(rng.standard_normal(100000))
        assert est.reliable
        assert est.tau == pytest.approx(0.5, abs=0.05)

    def test_ar1_matches_decay_constant(self):
        theta = 0.1
        rng = np.random.default_rng(7)
        series = lfilter([1.0], [1.0, -math.exp(-theta)],
                         rng.standard_normal(300000))
        est = dynamics.autocorrelation_time(series)
        assert est.reliable
        assert est.tau == pytest.approx(1.0 / theta, rel=0.10)

    def test_too_short_series(self):
        with pytest.raises(ValueError):
            dynamics.autocorrelation_time(np.arange(8.0))

    def test_critical_slowing_grows_with_size(self):
        # single-run tau estimates at T_c carry ~50% noise, so compare
        # replica means across a 2x size step (expected ratio ~2^z ~ 4.5)
        taus = {}
        for side, sweeps, seed in ((8, 20000, 12), (16, 30000, 13)):
            p = lm.SimulationParams(dims=2, side=side, init="random",
                                    temperature=TC, sweeps=sweeps,
                                    burn_in=sweeps // 10, seed=seed)
            replicas = lm.run_replicas(p, 3)
            taus[side] = np.mean([
                dynamics.autocorrelation_time(r.values).tau
                for r in replicas])
        assert taus[16] > 2.0 * taus[8]


class TestZeroMode:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            lm.ZeroModeParams(r=0.5, g=-1.0, a=0.0, dt=0.01, steps=10)
        with pytest.raises(ValueError):
            lm.ZeroModeParams(r=5.0, g=0.0, a=0.0, dt=0.05, steps=10)
        with pytest.raises(ValueError):
            lm.ZeroModeParams(r=0.5, g=0.0, a=0.0, dt=0.0, steps=10)

    def test_ou_stationary_variance(self):
        params = lm.ZeroModeParams(r=0.5, g=0.0, a=0.0, dt=0.05,
                                   steps=2_000_000, seed=31)
        path = lm.integrate_zero_mode(params).values[10000:]
        assert path.var() == pytest.approx(1.0 / 0.5, rel=0.05)

    def test_ou_autocovariance_closed_form(self):
        params = lm.ZeroModeParams(r=0.5, g=0.0, a=0.0, dt=0.05,
                                   steps=2_000_000, seed=31)
        path = lm.integrate_zero_mode(params).values[10000:]
        for t in (1.0, 2.0, 4.0):
            lag = int(round(t / params.dt))
            emp = np.mean(path[lag:] * path[:-lag])
            assert emp == pytest.approx(2.0 * math.exp(-0.25 * t), rel=0.05)

    def test_brownian_variance_grows_linearly(self):
        ends = []
        for i in range(400):
            params = lm.ZeroModeParams(r=0.0, g=0.0, a=0.0, dt=0.1,
                                       steps=200, seed=1000 + i)
            ends.append(lm.integrate_zero_mode(params).values[-1])
        t_final = 200 * 0.1
        var = np.var(ends)
        assert abs(var - t_final) < 3 * t_final * math.sqrt(2.0 / 400)

    def test_bistable_matches_boltzmann_weight(self):
        r, g = -1.0, 6.0
        params = lm.ZeroModeParams(r=r, g=g, a=0.0, dt=0.01,
                                   steps=2_000_000, seed=32)
        path = lm.integrate_zero_mode(params).values[100000:]
        # minima of the drift potential at +-sqrt(-6 r / g) = +-1
        assert np.mean(np.abs(path)) == pytest.approx(1.0, abs=0.25)

        def potential(x):
            return 0.25 * r * x * x + (g / 48.0) * x ** 4

        norm = sci_integrate.quad(
            lambda x: math.exp(-2 * potential(x)), -10, 10)[0]
        second = sci_integrate.quad(
            lambda x: x * x * math.exp(-2 * potential(x)), -10, 10)[0] / norm
        assert np.mean(path ** 2) == pytest.approx(second, rel=0.10)

    def test_divergence_names_the_step(self):
        params = lm.ZeroModeParams(r=-2.0, g=0.0, a=0.0, dt=0.05,
                                   steps=3000, seed=2)
        with pytest.raises(RuntimeError, match=r"step \d+"):
            lm.integrate_zero_mode(params, initial=1.0)

    def test_reproducible(self):
        params = lm.ZeroModeParams(r=0.5, g=1.0, a=0.1, dt=0.05,
                                   steps=500, seed=77)
        a = lm.integrate_zero_mode(params)
        b = lm.integrate_zero_mode(params)
        assert np.array_equal(a.values, b.values)
