import numpy as np
import pytest
from numpy.testing import assert_allclose

from dickesim import (
    SystemParams,
    auto_t_end,
    evolve,
    initial_all_excited,
    lqu,
    wysi_sigma_z_local,
)
from dickesim.oracle import (
    MAX_ORACLE_N,
    SIGMA_M,
    SIGMA_X,
    SIGMA_Z,
    FullState,
    collective_operator,
    compare,
    dicke_vectors,
    full_evolve,
    full_lqu,
    full_wysi,
    local_operator,
)


@pytest.fixture(scope="module")
def full_n2():
    params = SystemParams(2)
    t_end = auto_t_end(params)
    return params, t_end, full_evolve(params, t_end, 61)


class TestDickeVectors:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_orthonormal(self, n):
        v = dicke_vectors(n)
        assert_allclose(v.conj() @ v.T, np.eye(n + 1), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3])
    def test_jz_eigenvalues(self, n):
        v = dicke_vectors(n)
        jz = 0.5 * collective_operator(SIGMA_Z, n)
        m = (n - 2 * np.arange(n + 1)) / 2
        got = np.real(np.einsum("ki,ij,kj->k", v.conj(), jz, v))
        assert_allclose(got, m, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_local_matrix_element_reduction(self, n):
        # full-space matrix elements must equal the symmetric-block formulas
        v = dicke_vectors(n)
        jj = n / 2
        m = (n - 2 * np.arange(n + 1)) / 2
        sz1 = local_operator(SIGMA_Z, 1, n)
        sx1 = local_operator(SIGMA_X, 1, n)
        for k in range(n + 1):
            assert abs(np.real(v[k].conj() @ sz1 @ v[k]) - m[k] / jj) <= 1e-12
        for k in range(1, n + 1):
            mu = jj * (jj + 1) - m[k - 1] * (m[k - 1] - 1)
            got = np.real(v[k - 1].conj() @ sx1 @ v[k])
            assert abs(got - np.sqrt(mu) / n) <= 1e-12


class TestFullEvolve:
    def test_initial_is_projector(self):
        states = full_evolve(SystemParams(2), 0.1, 3)
        rho0 = states[0].matrix
        assert_allclose(rho0[0, 0], 1.0, atol=1e-12)
        assert_allclose(np.abs(rho0).sum(), 1.0, atol=1e-10)

    def test_single_emitter_decay(self):
        states = full_evolve(SystemParams(1), 1.0, 11)
        times = np.linspace(0.0, 1.0, 11)
        for t, state in zip(times, states):
            assert abs(state.matrix[0, 0].real - np.exp(-2 * t)) < 1e-8

    def test_state_validity_along_evolution(self):
        # trace, hermiticity, positivity enforced by the FullState invariants
        states = full_evolve(SystemParams(3), auto_t_end(SystemParams(3)), 41)
        assert len(states) == 41

    @pytest.mark.parametrize("n", [2, 4])
    def test_stays_in_symmetric_subspace(self, n):
        params = SystemParams(n)
        states = full_evolve(params, auto_t_end(params), 31)
        v = dicke_vectors(n)
        for state in states:
            pops = np.real(np.einsum("ki,ij,kj->k", v.conj(), state.matrix, v))
            assert 1.0 - pops.sum() <= 1e-10

    def test_n2_matches_cascade(self):
        params = SystemParams(2)
        t_end = auto_t_end(params)
        traj = evolve(params, initial_all_excited(params), t_end, 41)
        fulls = full_evolve(params, t_end, 41)
        v = dicke_vectors(2)
        for dist, full in zip(traj.states, fulls):
            pops = np.real(np.einsum("ki,ij,kj->k", v.conj(), full.matrix, v))
            assert np.abs(pops - dist.populations).max() < 1e-6

    def test_caps_n(self):
        with pytest.raises(ValueError):
            full_evolve(SystemParams(6), 1.0, 5)


class TestFullWysi:
    def test_pure_state_equals_variance(self):
        rng = np.random.default_rng(4)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
        state = FullState(2, rho)
        k = collective_operator(SIGMA_X, 2)
        var = np.real(psi.conj() @ k @ k @ psi) - np.real(psi.conj() @ k @ psi) ** 2
        assert abs(full_wysi(state, k) - var) < 1e-10

    def test_commuting_observable_gives_zero(self, full_n2):
        _, _, states = full_n2
        jz = 0.5 * collective_operator(SIGMA_Z, 2)
        for state in states[:: len(states) // 6]:
            assert full_wysi(state, jz) <= 1e-12

    def test_matches_symmetric_reduction(self, full_n2):
        params, t_end, states = full_n2
        traj = evolve(params, initial_all_excited(params), t_end, len(states))
        sz1 = local_operator(SIGMA_Z, 1, 2)
        for dist, state in zip(traj.states, states):
            got = full_wysi(state, sz1)
            assert abs(got - wysi_sigma_z_local(dist)) < 1e-6

    def test_dimension_mismatch(self, full_n2):
        _, _, states = full_n2
        with pytest.raises(ValueError):
            full_wysi(states[0], np.eye(2))


class TestFullLqu:
    def test_product_state_at_t0(self, full_n2):
        _, _, states = full_n2
        value, axis = full_lqu(states[0], 1)
        assert value <= 1e-10
        assert axis == "z"

    def test_matches_symmetric_lqu(self, full_n2):
        params, t_end, states = full_n2
        traj = evolve(params, initial_all_excited(params), t_end, len(states))
        for dist, state in zip(traj.states, states):
            got, _ = full_lqu(state, 1)
            want, _ = lqu(dist)
            assert abs(got - want) < 1e-6

    def test_emitter_index_irrelevant(self, full_n2):
        _, _, states = full_n2
        for state in states[:: len(states) // 4]:
            v1, _ = full_lqu(state, 1)
            v2, _ = full_lqu(state, 2)
            assert abs(v1 - v2) <= 1e-12


class TestCompare:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_passes_at_1e6(self, n):
        report = compare(SystemParams(n), n_samples=151, tol=1e-6)
        assert report.passed, report.lines()

    def test_corrupted_rate_fails_populations(self):
        report = compare(SystemParams(2), n_samples=101, tol=1e-6,
                         rate_scale=1.02)
        assert not report.passed
        assert "populations" in report.failing_quantities()

    def test_oracle_agrees_on_peak_time(self):
        # same power maximum from both pipelines, within grid resolution
        from dickesim.observables import power_breakdown
        params = SystemParams(4)
        t_end = auto_t_end(params)
        n_samples = 301
        traj = evolve(params, initial_all_excited(params), t_end, n_samples)
        fulls = full_evolve(params, t_end, n_samples)
        jpjm = (collective_operator(SIGMA_M, 4).conj().T
                @ collective_operator(SIGMA_M, 4))
        p_full = [2.0 * np.trace(s.matrix @ jpjm).real for s in fulls]
        p_sym = [power_breakdown(params, d).p_total for d in traj.states]
        assert np.argmax(p_full) == np.argmax(p_sym)


class TestFullStateValidation:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            FullState(1, np.diag([0.6, 0.6]))

    def test_rejects_non_hermitian(self):
        m = np.array([[1.0, 0.5], [0.0, 0.0]])
        with pytest.raises(ValueError):
            FullState(1, m)

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError):
            FullState(1, np.diag([1.5, -0.5]))

    def test_rejects_large_n(self):
        with pytest.raises(ValueError):
            FullState(6, np.eye(64) / 64)
