"""Superradiant cascade dynamics on the symmetric (Dicke) ladder.

All N emitters share one collective decay channel, so the fully excited
initial state stays diagonal in the Dicke basis |J,M> with J = N/2 and the
populations obey the bidiagonal rate equation

    dp_M/dt = 2*gamma*[mu(M+1) p_{M+1} - mu(M) p_M],
    mu(M) = (J+M)(J-M+1) = J(J+1) - M(M-1).

States are indexed by k = 0..N with M(k) = J - k, so k=0 is |J,J> and k=N
the absorbing ground state |J,-J>.  Time is handled in dimensionless units
gamma*t throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._stepper import IntegrationError, integrate_cascade

__all__ = [
    "CLIP_TOL",
    "SUM_TOL",
    "SystemParams",
    "DickeDistribution",
    "RateGenerator",
    "Trajectory",
    "initial_all_excited",
    "build_generator",
    "evolve",
    "analytic_two_level",
    "auto_t_end",
]

# Negative populations beyond this magnitude are treated as integrator
# failure; anything in [-CLIP_TOL, 0) is clipped to zero.
CLIP_TOL = 1e-12
# Allowed drift of sum(p) before renormalization.
SUM_TOL = 1e-9


@dataclass(frozen=True)
class SystemParams:
    """Ensemble parameters: emitter count N, decay rate, transition frequency."""

    n_emitters: int
    gamma: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n_emitters, (int, np.integer)) or isinstance(
            self.n_emitters, bool
        ):
            raise ValueError("n_emitters must be an integer")
        if self.n_emitters < 1:
            raise ValueError("n_emitters must be >= 1")
        if not (self.gamma > 0):
            raise ValueError("gamma must be > 0")
        if not (self.omega > 0):
            raise ValueError("omega must be > 0")
        object.__setattr__(self, "n_emitters", int(self.n_emitters))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def two_j(self) -> int:
        return self.n_emitters

    def j(self) -> float:
        # N/2 is exactly representable (integer or half-integer).
        return self.n_emitters / 2

    @property
    def dim(self) -> int:
        return self.n_emitters + 1


def _m_values(two_j: int) -> np.ndarray:
    # M(k) = J - k, halves are exact in binary floating point.
    return (two_j - 2 * np.arange(two_j + 1)) / 2.0


def _mu_values(two_j: int) -> np.ndarray:
    # mu(k) = (J+M)(J-M+1) = (2J-k)(k+1); exactly 0 at the ground level.
    k = np.arange(two_j + 1)
    return ((two_j - k) * (k + 1)).astype(np.float64)


@dataclass(frozen=True)
class DickeDistribution:
    """Populations over the N+1 Dicke states |J,M> at one instant."""

    two_j: int
    populations: np.ndarray

    def __post_init__(self):
        p = np.array(self.populations, dtype=np.float64)
        if p.ndim != 1 or p.size != self.two_j + 1:
            raise ValueError(
                f"expected {self.two_j + 1} populations, got shape {p.shape}"
            )
        low = p.min()
        if low < -CLIP_TOL:
            raise ValueError(f"population {low:.3e} below -{CLIP_TOL:.0e}")
        np.clip(p, 0.0, None, out=p)
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"populations sum to {total!r}, expected 1")
        p.flags.writeable = False
        object.__setattr__(self, "populations", p)

    @classmethod
    def from_raw(cls, two_j: int, raw) -> "DickeDistribution":
        """Clip tiny negatives and renormalize (integrator output path)."""
        p = np.array(raw, dtype=np.float64)
        low = p.min()
        if low < -CLIP_TOL:
            raise IntegrationError(
                f"population {low:.3e} below the -{CLIP_TOL:.0e} clip tolerance"
            )
        np.clip(p, 0.0, None, out=p)
        return cls(two_j, p / p.sum())

    @property
    def m_values(self) -> np.ndarray:
        return _m_values(self.two_j)

    def jz_mean(self) -> float:
        return float(self.populations @ self.m_values)


@dataclass(frozen=True)
class RateGenerator:
    """Per-level outflow rates 2*gamma*mu(M) of the cascade generator."""

    two_j: int
    rates: np.ndarray

    def __post_init__(self):
        r = np.array(self.rates, dtype=np.float64)
        if r.ndim != 1 or r.size != self.two_j + 1:
            raise ValueError("rates length must be 2J+1")
        if r.min() < 0:
            raise ValueError("rates must be nonnegative")
        if r[-1] != 0.0:
            raise ValueError("ground-state rate must be exactly 0")
        r.flags.writeable = False
        object.__setattr__(self, "rates", r)

    def matrix(self) -> np.ndarray:
        """Dense generator G with dp/dt = G p (columns sum to zero)."""
        n = self.two_j + 1
        g = np.zeros((n, n))
        g[np.arange(n), np.arange(n)] = -self.rates
        g[np.arange(1, n), np.arange(n - 1)] = self.rates[:-1]
        return g


@dataclass(frozen=True)
class Trajectory:
    """Time grid (in gamma*t) plus the distribution at each sample."""

    params: SystemParams
    times: np.ndarray
    states: tuple

    def __post_init__(self):
        t = np.array(self.times, dtype=np.float64)
        states = tuple(self.states)
        if t.ndim != 1 or t.size != len(states):
            raise ValueError("times and states must have equal length")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and strictly increase")
        for s in states:
            if s.two_j != self.params.two_j:
                raise ValueError("state dimension does not match params")
        jz = np.array([s.jz_mean() for s in states])
        if np.any(np.diff(jz) > 1e-12):
            raise ValueError("<Jz> must be non-increasing along a decay trajectory")
        t.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", states)

    def populations_matrix(self) -> np.ndarray:
        """(n_samples, N+1) array of populations, one row per time."""
        return np.array([s.populations for s in self.states])


def initial_all_excited(params: SystemParams) -> DickeDistribution:
    """All emitters excited: p_{J,J} = 1."""
    p = np.zeros(params.dim)
    p[0] = 1.0
    return DickeDistribution(params.two_j, p)


def build_generator(params: SystemParams) -> RateGenerator:
    """Cascade rates 2*gamma*(J+M)(J-M+1) for each ladder level."""
    return RateGenerator(params.two_j, 2.0 * params.gamma * _mu_values(params.two_j))


def evolve(
    params: SystemParams,
    initial: DickeDistribution,
    t_end: float,
    n_samples: int,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> Trajectory:
    """Integrate the cascade to dimensionless time t_end (= gamma*t).

    Sampling is on a uniform grid; the stepper lands on each sample exactly
    (no interpolation of populations).  Each returned state is clipped and
    renormalized; raw probability drift beyond 1e-9 raises IntegrationError.
    """
    if initial.two_j != params.two_j:
        raise ValueError("initial distribution does not match params")
    if not (t_end > 0):
        raise ValueError("t_end must be > 0")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")

    t_grid = np.linspace(0.0, float(t_end), int(n_samples))
    # Dimensionless rates 2*mu(M): gamma scales out of tau = gamma*t.
    rates = 2.0 * _mu_values(params.two_j)
    raw = integrate_cascade(rates, initial.populations, t_grid, rel_tol, abs_tol)

    drift = np.abs(raw.sum(axis=1) - 1.0).max()
    if drift > SUM_TOL:
        raise IntegrationError(
            f"probability drift {drift:.3e} exceeds {SUM_TOL:.0e}; "
            "tolerance not achievable"
        )

    states = [initial]
    states += [DickeDistribution.from_raw(params.two_j, row) for row in raw[1:]]
    return Trajectory(params, t_grid, tuple(states))


def analytic_two_level(params: SystemParams, t: float) -> DickeDistribution:
    """Closed-form single-emitter solution [exp(-2*gamma*t), 1 - exp(...)]."""
    if params.n_emitters != 1:
        raise ValueError("analytic_two_level requires N = 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    e = np.exp(-2.0 * params.gamma * t)
    return DickeDistribution(1, np.array([e, 1.0 - e]))


def auto_t_end(
    params: SystemParams,
    threshold: float = 0.999,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> float:
    """First sampled time at which the ground population exceeds `threshold`.

    Bracketed by coarse pre-integration with a doubling horizon, so a window
    of this length always contains the full superradiant pulse.
    """
    if not (0 < threshold < 1):
        raise ValueError("threshold must be in (0, 1)")
    rates = 2.0 * _mu_values(params.two_j)
    p0 = np.zeros(params.dim)
    p0[0] = 1.0
    horizon = 1.0
    for _ in range(40):
        t_grid = np.linspace(0.0, horizon, 513)
        raw = integrate_cascade(rates, p0, t_grid, rel_tol, abs_tol)
        ground = raw[:, -1]
        hits = np.nonzero(ground >= threshold)[0]
        if hits.size:
            return float(t_grid[hits[0]])
        horizon *= 2.0
    raise IntegrationError("pulse did not complete within the search horizon")
