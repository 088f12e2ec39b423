import numpy as np
import pytest
from numpy.testing import assert_allclose

from dickesim import (
    DickeDistribution,
    IntegrationError,
    SystemParams,
    Trajectory,
    analytic_two_level,
    auto_t_end,
    build_generator,
    evolve,
    initial_all_excited,
)
from dickesim._stepper import _cascade_numba, integrate_cascade
from dickesim.cascade import _mu_values


class TestSystemParams:
    def test_j_is_exact(self):
        assert SystemParams(3).j() == 1.5
        assert SystemParams(4).j() == 2.0
        assert SystemParams(1).two_j == 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_emitters=0),
            dict(n_emitters=-2),
            dict(n_emitters=2, gamma=0.0),
            dict(n_emitters=2, gamma=-1.0),
            dict(n_emitters=2, omega=0.0),
            dict(n_emitters=2.5),
            dict(n_emitters=True),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SystemParams(**kwargs)


class TestDickeDistribution:
    def test_clips_tiny_negatives(self):
        d = DickeDistribution(1, [1.0 + 5e-13, -5e-13])
        assert d.populations[1] == 0.0

    def test_rejects_large_negative(self):
        with pytest.raises(ValueError):
            DickeDistribution(1, [1.0, -1e-11])

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError):
            DickeDistribution(1, [0.6, 0.6])

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            DickeDistribution(2, [1.0, 0.0])

    def test_immutable(self):
        d = DickeDistribution(1, [1.0, 0.0])
        with pytest.raises(ValueError):
            d.populations[0] = 0.5

    def test_m_values_half_integer(self):
        assert_allclose(DickeDistribution(3, [1, 0, 0, 0]).m_values,
                        [1.5, 0.5, -0.5, -1.5])


class TestInitialAllExcited:
    @pytest.mark.parametrize("n", [1, 2, 50])
    def test_definition(self, n):
        d = initial_all_excited(SystemParams(n))
        assert d.populations.size == n + 1
        assert d.populations[0] == 1.0
        assert np.all(d.populations[1:] == 0.0)


class TestBuildGenerator:
    def test_n1(self):
        gen = build_generator(SystemParams(1, gamma=1.0))
        assert_allclose(gen.rates, [2.0, 0.0])

    def test_n2(self):
        gen = build_generator(SystemParams(2, gamma=1.0))
        # M = 1, 0, -1
        assert_allclose(gen.rates, [4.0, 4.0, 0.0])

    def test_n4_scaled_gamma(self):
        gen = build_generator(SystemParams(4, gamma=0.5))
        # M = 0 sits at k = 2: 2*0.5*(2)(3) = 6
        assert gen.rates[2] == 6.0

    def test_ground_rate_exactly_zero(self):
        for n in (1, 3, 8, 127):
            assert build_generator(SystemParams(n)).rates[-1] == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 8])
    def test_generator_columns_sum_to_zero(self, n):
        g = build_generator(SystemParams(n)).matrix()
        assert_allclose(g.sum(axis=0), 0.0, atol=1e-12)


class TestEvolve:
    def test_single_emitter_analytic(self):
        params = SystemParams(1, gamma=1.0)
        traj = evolve(params, initial_all_excited(params), 0.5, 6)
        assert abs(traj.states[-1].populations[0] - np.exp(-1.0)) < 1e-8

    def test_t0_returns_initial_unchanged(self):
        params = SystemParams(4)
        init = initial_all_excited(params)
        traj = evolve(params, init, 1.0, 11)
        assert traj.states[0] is init
        assert traj.times[0] == 0.0

    @pytest.mark.parametrize("n", [2, 16, 64, 128])
    def test_raw_probability_drift(self, n):
        # conservation before any renormalization
        rates = 2.0 * _mu_values(n)
        p0 = np.zeros(n + 1)
        p0[0] = 1.0
        t_grid = np.linspace(0.0, auto_t_end(SystemParams(n)), 400)
        raw = integrate_cascade(rates, p0, t_grid, 1e-10, 1e-12)
        assert np.abs(raw.sum(axis=1) - 1.0).max() <= 1e-9

    @pytest.mark.parametrize("n", [3, 16, 50])
    def test_monotone_energy_and_absorbing_ground(self, n):
        params = SystemParams(n)
        traj = evolve(params, initial_all_excited(params), auto_t_end(params), 400)
        jz = np.array([s.jz_mean() for s in traj.states])
        assert np.all(np.diff(jz) < 0)
        ground = np.array([s.populations[-1] for s in traj.states])
        assert np.all(np.diff(ground) >= -1e-12)

    @pytest.mark.parametrize("n", [4, 20])
    def test_long_time_limit(self, n):
        params = SystemParams(n)
        t_end = auto_t_end(params) + 10.0 / n
        traj = evolve(params, initial_all_excited(params), t_end, 50)
        assert traj.states[-1].populations[-1] > 1.0 - 1e-6

    def test_validation_errors(self):
        params = SystemParams(2)
        init = initial_all_excited(params)
        with pytest.raises(ValueError):
            evolve(params, init, 0.0, 10)
        with pytest.raises(ValueError):
            evolve(params, init, 1.0, 1)
        with pytest.raises(ValueError):
            evolve(params, init, 1.0, 10, rel_tol=0.0)
        with pytest.raises(ValueError):
            evolve(params, initial_all_excited(SystemParams(3)), 1.0, 10)


class TestBackends:
    @pytest.mark.skipif(_cascade_numba is None, reason="numba unavailable")
    @pytest.mark.parametrize("n", [4, 64])
    def test_numba_matches_numpy(self, n):
        rates = 2.0 * _mu_values(n)
        p0 = np.zeros(n + 1)
        p0[0] = 1.0
        t_grid = np.linspace(0.0, 0.5, 300)
        a = integrate_cascade(rates, p0, t_grid, 1e-10, 1e-12, backend="numba")
        b = integrate_cascade(rates, p0, t_grid, 1e-10, 1e-12, backend="numpy")
        assert np.abs(a - b).max() < 1e-9


class TestAnalyticTwoLevel:
    def test_identity_at_zero(self):
        assert_allclose(
            analytic_two_level(SystemParams(1), 0.0).populations, [1.0, 0.0]
        )

    def test_absorbing_limit(self):
        d = analytic_two_level(SystemParams(1), 50.0)
        assert_allclose(d.populations, [0.0, 1.0], atol=1e-12)

    def test_scaled_gamma(self):
        d = analytic_two_level(SystemParams(1, gamma=2.0), 0.25)
        assert_allclose(d.populations, [np.exp(-1.0), 1.0 - np.exp(-1.0)])

    def test_requires_single_emitter(self):
        with pytest.raises(ValueError):
            analytic_two_level(SystemParams(2), 0.1)


class TestTrajectory:
    def test_rejects_increasing_jz(self):
        params = SystemParams(1)
        ground = DickeDistribution(1, [0.0, 1.0])
        excited = DickeDistribution(1, [1.0, 0.0])
        with pytest.raises(ValueError):
            Trajectory(params, [0.0, 1.0], (ground, excited))

    def test_rejects_nonzero_start(self):
        params = SystemParams(1)
        d = initial_all_excited(params)
        with pytest.raises(ValueError):
            Trajectory(params, [0.5, 1.0], (d, d))


class TestAutoTEnd:
    @pytest.mark.parametrize("n", [1, 10, 50])
    def test_window_contains_pulse(self, n):
        params = SystemParams(n)
        t_end = auto_t_end(params)
        traj = evolve(params, initial_all_excited(params), t_end, 200)
        assert traj.states[-1].populations[-1] >= 0.999
