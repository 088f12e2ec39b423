import numpy as np
import pytest

from dickesim import SystemParams, auto_t_end, evolve, initial_all_excited


@pytest.fixture(scope="session")
def traj50():
    """Default figure run: N=50, auto window, 2000 samples."""
    params = SystemParams(50)
    t_end = auto_t_end(params)
    return evolve(params, initial_all_excited(params), t_end, 2000)


def make_trajectory(n, n_samples=2000, t_end=None):
    params = SystemParams(n)
    if t_end is None:
        t_end = auto_t_end(params)
    return evolve(params, initial_all_excited(params), t_end, n_samples)


@pytest.fixture(scope="session")
def sweep_trajectories():
    """Scaling-sweep trajectories keyed by N (shared by slow tests)."""
    return {n: make_trajectory(n) for n in (16, 24, 32, 48, 64, 96)}


def random_distributions(two_j, count, seed):
    """Seeded batch of random Dicke population vectors (Dirichlet-flat)."""
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(two_j + 1), size=count)
