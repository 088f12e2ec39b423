"""Skew information, local quantum uncertainty, and event detectors.

For a state diagonal in the Dicke basis, rho = sum_M p_M |J,M><J,M|, the
skew information of a Hermitian K reduces to

    I(rho, K) = Tr(rho K^2) - sum_{M,M'} sqrt(p_M p_M') |K_{MM'}|^2,

with sqrt(rho) = sum_M sqrt(p_M) |J,M><J,M|.  Single-emitter Pauli
operators enter through their symmetric-subspace blocks: sigma_z has
diagonal M/J, and sigma_x / sigma_y couple neighboring ladder states with
weight sqrt(J(J+1) - M(M-1))/N, one N-th of the collective matrix element.
Because sigma^2 = 1 on the full space, the local skew information is
1 - W_aa where W is the 3x3 matrix W_ab = Tr(sqrt(rho) sigma_a sqrt(rho)
sigma_b); minimizing over local observables gives the local quantum
uncertainty 1 - lambda_max(W).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cascade import (
    DickeDistribution,
    SystemParams,
    Trajectory,
    _m_values,
    _mu_values,
    evolve,
)

__all__ = [
    "SymmetricOperator",
    "WMatrix",
    "SuddenChangeReport",
    "ExtremaReport",
    "DetectionError",
    "SuddenChangeError",
    "build_jx",
    "build_jy",
    "build_jz",
    "local_sigma_matrix_elements",
    "wysi_symmetric",
    "wysi_sigma_z_local",
    "wysi_local_pauli",
    "w_matrix",
    "lqu",
    "eigvals_sym3",
    "detect_double_sudden_change",
    "locate_extrema",
]

AXES = ("x", "y", "z")

# W_xx == W_zz ties resolve to "z"; also the floor below which a computed
# skew information is treated as numerically zero.
TIE_TOL = 1e-12


class DetectionError(RuntimeError):
    """An event detector could not produce the expected structure."""


class SuddenChangeError(DetectionError):
    """Wrong number of minimizer switches; carries the observed count."""

    def __init__(self, message: str, crossing_count: int):
        super().__init__(message)
        self.crossing_count = crossing_count


@dataclass(frozen=True)
class SymmetricOperator:
    """Hermitian matrix in the Dicke-basis ordering of DickeDistribution."""

    two_j: int
    entries: np.ndarray

    def __post_init__(self):
        k = np.array(self.entries)
        n = self.two_j + 1
        if k.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {k.shape}")
        if np.abs(k - k.conj().T).max() > 1e-14:
            raise ValueError("operator is not Hermitian within 1e-14")
        k.flags.writeable = False
        object.__setattr__(self, "entries", k)


@dataclass(frozen=True)
class WMatrix:
    """3x3 real symmetric W_ab = Tr(sqrt(rho) sigma_a sqrt(rho) sigma_b)."""

    entries: np.ndarray

    def __post_init__(self):
        w = np.array(self.entries, dtype=np.float64)
        if w.shape != (3, 3):
            raise ValueError("W must be 3x3")
        if np.abs(w - w.T).max() > 1e-12:
            raise ValueError("W must be symmetric")
        if np.any(np.diagonal(w) < -1e-9) or np.any(np.diagonal(w) > 1.0 + 1e-9):
            raise ValueError("W diagonal entries must lie in [0, 1]")
        w.flags.writeable = False
        object.__setattr__(self, "entries", w)

    def lambda_max(self) -> float:
        return float(eigvals_sym3(self.entries)[0])

    def dominant_direction(self) -> np.ndarray:
        """Unit eigenvector of the largest eigenvalue (axes order x, y, z)."""
        vals, vecs = np.linalg.eigh(self.entries)
        return vecs[:, -1]


@dataclass(frozen=True)
class SuddenChangeReport:
    """Times of the two LQU minimizer switches and the window between them."""

    t_initial: float
    t_final: float
    width: float
    minimizer_sequence: tuple


@dataclass(frozen=True)
class ExtremaReport:
    """Peak-emission time vs. the minimum of the global J_x skew information."""

    t_max_power: float
    t_min_wysi_jx: float
    gap: float


# ---------------------------------------------------------------------------
# operator construction (cached per ladder size; arrays are read-only)

@lru_cache(maxsize=128)
def _jx_entries(two_j: int) -> np.ndarray:
    n = two_j + 1
    k = np.arange(1, n)
    c = 0.5 * np.sqrt((two_j - k + 1.0) * k)
    m = np.zeros((n, n))
    m[k - 1, k] = c
    m[k, k - 1] = c
    m.flags.writeable = False
    return m


@lru_cache(maxsize=128)
def _jy_entries(two_j: int) -> np.ndarray:
    n = two_j + 1
    k = np.arange(1, n)
    c = 0.5 * np.sqrt((two_j - k + 1.0) * k)
    m = np.zeros((n, n), dtype=np.complex128)
    m[k - 1, k] = -1j * c
    m[k, k - 1] = 1j * c
    m.flags.writeable = False
    return m


@lru_cache(maxsize=128)
def _jz_entries(two_j: int) -> np.ndarray:
    m = np.diag(_m_values(two_j))
    m.flags.writeable = False
    return m


@lru_cache(maxsize=128)
def _local_block(two_j: int, axis: str) -> np.ndarray:
    n = two_j + 1
    if axis == "z":
        m = np.diag(_m_values(two_j) / (two_j / 2.0))
    elif axis in ("x", "y"):
        k = np.arange(1, n)
        c = np.sqrt((two_j - k + 1.0) * k) / two_j
        if axis == "x":
            m = np.zeros((n, n))
            m[k - 1, k] = c
            m[k, k - 1] = c
        else:
            m = np.zeros((n, n), dtype=np.complex128)
            m[k - 1, k] = -1j * c
            m[k, k - 1] = 1j * c
    else:
        raise ValueError(f"invalid axis {axis!r}, expected one of x, y, z")
    m.flags.writeable = False
    return m


def build_jx(two_j: int) -> SymmetricOperator:
    """Collective J_x = (J+ + J-)/2 on the spin-J ladder."""
    if two_j < 1:
        raise ValueError("two_j must be >= 1")
    return SymmetricOperator(two_j, _jx_entries(two_j))


def build_jy(two_j: int) -> SymmetricOperator:
    if two_j < 1:
        raise ValueError("two_j must be >= 1")
    return SymmetricOperator(two_j, _jy_entries(two_j))


def build_jz(two_j: int) -> SymmetricOperator:
    if two_j < 1:
        raise ValueError("two_j must be >= 1")
    return SymmetricOperator(two_j, _jz_entries(two_j))


def local_sigma_matrix_elements(two_j: int, axis: str) -> SymmetricOperator:
    """Symmetric-subspace block of one emitter's Pauli operator.

    Only this block enters W because sqrt(rho) projects onto the Dicke
    states; note the block does not square to the identity even though the
    full-space operator does.
    """
    if two_j < 1:
        raise ValueError("two_j must be >= 1")
    return SymmetricOperator(two_j, _local_block(two_j, axis))


# ---------------------------------------------------------------------------
# skew information

def wysi_symmetric(dist: DickeDistribution, op: SymmetricOperator) -> float:
    """Skew information of a symmetric-subspace observable (maps Dicke to
    Dicke states), via Tr(rho K^2) - Tr(sqrt(rho) K sqrt(rho) K)."""
    if op.two_j != dist.two_j:
        raise ValueError("operator dimension does not match distribution")
    a = np.abs(op.entries) ** 2
    p = dist.populations
    s = np.sqrt(p)
    val = float(p @ a.sum(axis=1) - s @ a @ s)
    if val < -TIE_TOL:
        raise ArithmeticError(f"skew information {val:.3e} below -1e-12")
    return max(val, 0.0)


def wysi_sigma_z_local(dist: DickeDistribution) -> float:
    """I(rho, sigma_z on one emitter) = (J^2 - <Jz^2>)/J^2."""
    jj = dist.two_j / 2.0
    m = dist.m_values
    second = float(dist.populations @ (m * m))
    val = (jj * jj - second) / (jj * jj)
    return max(val, 0.0)


def wysi_local_pauli(dist: DickeDistribution, axis: str) -> float:
    """Skew information of one emitter's sigma_axis, i.e. 1 - W_aa.

    The first moment uses sigma^2 = 1 on the full space; only the second
    term reduces to the symmetric block.
    """
    block = local_sigma_matrix_elements(dist.two_j, axis).entries
    s = np.sqrt(dist.populations)
    val = 1.0 - float(s @ (np.abs(block) ** 2) @ s)
    if val < -TIE_TOL:
        raise ArithmeticError(f"local skew information {val:.3e} below -1e-12")
    return max(val, 0.0)


def w_matrix(dist: DickeDistribution) -> WMatrix:
    """W_ab = sum_{M,M'} sqrt(p_M p_M') <M|sigma_a|M'><M'|sigma_b|M>."""
    s = np.sqrt(dist.populations)
    blocks = [local_sigma_matrix_elements(dist.two_j, ax).entries for ax in AXES]
    w = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            val = complex(s @ (blocks[i] * blocks[j].T) @ s)
            if abs(val.imag) > 1e-12:
                raise ArithmeticError("W entry has a non-vanishing imaginary part")
            w[i, j] = w[j, i] = val.real
    return WMatrix(w)


def eigvals_sym3(mat: np.ndarray) -> tuple[float, float, float]:
    """Closed-form (trigonometric) eigenvalues of a symmetric 3x3 matrix,
    sorted descending."""
    a = np.asarray(mat, dtype=np.float64)
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if p1 == 0.0:
        d = np.sort(np.diagonal(a))[::-1]
        return float(d[0]), float(d[1]), float(d[2])
    q = float(np.trace(a)) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    det_b = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    )
    r = min(1.0, max(-1.0, det_b / 2.0))
    phi = np.arccos(r) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return float(e1), float(e2), float(e3)


def lqu(dist: DickeDistribution) -> tuple[float, str]:
    """Local quantum uncertainty 1 - lambda_max(W) and the minimizing axis.

    For the diagonal W of this model the minimizer is z when W_zz >= W_xx
    (ties within 1e-12 resolve to z), else x.
    """
    w = w_matrix(dist)
    value = 1.0 - w.lambda_max()
    if value < 0.0:
        value = 0.0 if value > -TIE_TOL else value
    if value < 0.0:
        raise ArithmeticError(f"LQU {value:.3e} below -1e-12")
    d = w.entries[0, 0] - w.entries[2, 2]
    minimizer = "x" if d > TIE_TOL else "z"
    return value, minimizer


# ---------------------------------------------------------------------------
# vectorized per-row diagnostics (batched forms of the functions above;
# cross-checked against them in the test suite)

def w_diag_rows(pops: np.ndarray, two_j: int) -> tuple[np.ndarray, np.ndarray]:
    """(W_xx, W_zz) for each row of a (T, N+1) population matrix."""
    pops = np.atleast_2d(pops)
    jj = two_j / 2.0
    m = _m_values(two_j)
    mu = _mu_values(two_j)
    w_zz = pops @ ((m / jj) ** 2)
    geo = np.sqrt(pops[:, :-1] * pops[:, 1:])
    w_xx = (2.0 / two_j**2) * (geo @ mu[:-1])
    return w_xx, w_zz


def wysi_jx_rows(pops: np.ndarray, two_j: int) -> np.ndarray:
    """I(rho, J_x) for each row of a (T, N+1) population matrix."""
    pops = np.atleast_2d(pops)
    jj = two_j / 2.0
    m = _m_values(two_j)
    mu = _mu_values(two_j)
    diag_jx2 = (jj * (jj + 1.0) - m * m) / 2.0
    geo = np.sqrt(pops[:, :-1] * pops[:, 1:])
    vals = pops @ diag_jx2 - 0.5 * (geo @ mu[:-1])
    return np.clip(vals, 0.0, None)


def power_total_rows(pops: np.ndarray, two_j: int) -> np.ndarray:
    """P/(gamma*omega) = 2<J+J-> for each population row."""
    pops = np.atleast_2d(pops)
    return 2.0 * (pops @ _mu_values(two_j))


# ---------------------------------------------------------------------------
# event detectors

def _advance(params: SystemParams, dist: DickeDistribution, dt: float,
             rel_tol: float, abs_tol: float) -> DickeDistribution:
    if dt <= 0.0:
        return dist
    return evolve(params, dist, dt, 2, rel_tol, abs_tol).states[-1]


def _sign_crossings(d: np.ndarray) -> list:
    """Indices i such that d changes sign strictly between samples i, i+1.

    Exact zeros are skipped over: the bracket spans to the next nonzero
    sample (a zero sample alone is a touch, not a crossing).
    """
    nz = np.nonzero(d)[0]
    crossings = []
    for a, b in zip(nz[:-1], nz[1:]):
        if d[a] * d[b] < 0.0:
            crossings.append((int(a), int(b)))
    return crossings


def detect_double_sudden_change(
    traj: Trajectory,
    refine_tol: float = 1e-6,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> SuddenChangeReport:
    """Locate the two switches of the LQU minimizer along a trajectory.

    The switch condition is the sign change of D(t) = W_xx(t) - W_zz(t);
    each grid bracket is refined by bisection on freshly evolved states
    (populations are never interpolated) down to `refine_tol` in gamma*t.
    Raises SuddenChangeError when the crossing count is not exactly two.
    """
    pops = traj.populations_matrix()
    two_j = traj.params.two_j
    w_xx, w_zz = w_diag_rows(pops, two_j)
    d = w_xx - w_zz
    crossings = _sign_crossings(d)
    if len(crossings) != 2:
        tail = " (window may not contain the full pulse)" if d[-1] > 0 else ""
        raise SuddenChangeError(
            f"expected 2 minimizer switches, found {len(crossings)}{tail}",
            crossing_count=len(crossings),
        )

    def refine(bracket):
        ia, ib = bracket
        t_a, t_b = traj.times[ia], traj.times[ib]
        left_state = traj.states[ia]
        d_a = d[ia]
        while t_b - t_a > refine_tol:
            t_mid = 0.5 * (t_a + t_b)
            p_mid = _advance(
                traj.params, left_state, t_mid - traj.times[ia], rel_tol, abs_tol
            )
            w_xx_m, w_zz_m = w_diag_rows(p_mid.populations, two_j)
            d_mid = float(w_xx_m[0] - w_zz_m[0])
            if d_a * d_mid < 0.0:
                t_b = t_mid
            else:
                t_a = t_mid
                d_a = d_mid if d_mid != 0.0 else d_a
        return 0.5 * (t_a + t_b)

    t_i = refine(crossings[0])
    t_f = refine(crossings[1])

    # Segment labels from the sign of D between consecutive crossings.
    seg_bounds = [0, crossings[0][1], crossings[1][1], len(d)]
    sequence = []
    for lo, hi in zip(seg_bounds[:-1], seg_bounds[1:]):
        seg = d[lo:hi]
        pos = seg[seg != 0.0]
        sequence.append("x" if pos.size and pos[0] > 0 else "z")

    return SuddenChangeReport(
        t_initial=float(t_i),
        t_final=float(t_f),
        width=float(t_f - t_i),
        minimizer_sequence=tuple(sequence),
    )


def _quadratic_vertex(times: np.ndarray, values: np.ndarray, idx: int) -> float:
    h = times[idx + 1] - times[idx]
    f0, f1, f2 = values[idx - 1], values[idx], values[idx + 1]
    denom = f0 - 2.0 * f1 + f2
    if denom == 0.0:
        return float(times[idx])
    return float(times[idx] + 0.5 * h * (f0 - f2) / denom)


def locate_extrema(traj: Trajectory) -> ExtremaReport:
    """Time of maximum radiated power vs. minimum of I(rho, J_x).

    Each discrete extremum is refined by a 3-point quadratic fit; an
    extremum on the window boundary raises DetectionError.
    """
    pops = traj.populations_matrix()
    two_j = traj.params.two_j
    p_tot = power_total_rows(pops, two_j)
    i_jx = wysi_jx_rows(pops, two_j)

    i_max = int(np.argmax(p_tot))
    i_min = int(np.argmin(i_jx))
    last = len(traj.times) - 1
    if i_max in (0, last):
        raise DetectionError("power maximum sits on the window boundary")
    if i_min in (0, last):
        raise DetectionError("J_x skew-information minimum sits on the window boundary")

    t_max = _quadratic_vertex(traj.times, p_tot, i_max)
    t_min = _quadratic_vertex(traj.times, i_jx, i_min)
    return ExtremaReport(
        t_max_power=t_max, t_min_wysi_jx=t_min, gap=abs(t_max - t_min)
    )
