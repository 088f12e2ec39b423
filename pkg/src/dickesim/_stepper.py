"""Adaptive Dormand-Prince 5(4) integration of the cascade rate equation.

The stepping loop exists twice with the same tableau and the same step
controller: a scalar-loop kernel compiled by numba, and a vectorized
pure-numpy fallback.  The environment variable ``DICKESIM_BACKEND``
selects between them (``numba`` | ``numpy`` | ``auto``, default auto);
``benchmarks/bench_stepper.py`` times one against the other.

The ODE is the bidiagonal cascade dp_k/dtau = r_{k-1} p_{k-1} - r_k p_k
with r the per-level decay rates in units of the independent variable
(r_last must be 0 so the bottom level is absorbing).
"""

import os

import numpy as np

__all__ = [
    "BACKEND",
    "IntegrationError",
    "integrate_cascade",
]


class IntegrationError(RuntimeError):
    """Adaptive stepping failed (stiffness, unreachable tolerance, NaN)."""


_STATUS_OK = 0
_STATUS_UNDERFLOW = 1
_STATUS_NAN = 2

# Dormand-Prince 5(4) tableau (FSAL).
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
# 5th-order propagating weights (b2 = b7 = 0).
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
# Error weights b - b* (e2 = 0).
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_MIN_FAC = 0.2
_MAX_FAC = 5.0
# Real-axis stability cap for the explicit pair; keeps decayed tail
# components from oscillating negative once accuracy no longer limits h.
_STAB_MARGIN = 2.8
_EPS = float(np.finfo(np.float64).eps)


def _cascade_kernel(rates, p0, t_grid, rtol, atol):
    # Scalar-loop form of the stepper; compiled with numba when available.
    n = p0.shape[0]
    n_out = t_grid.shape[0]
    out = np.empty((n_out, n))
    y = p0.copy()
    for j in range(n):
        out[0, j] = y[j]

    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)
    yt = np.empty(n)
    y5 = np.empty(n)

    span = t_grid[n_out - 1] - t_grid[0]
    r_max = 0.0
    for j in range(n):
        if rates[j] > r_max:
            r_max = rates[j]
    h_stab = _STAB_MARGIN / r_max if r_max > 0.0 else span

    # k1 = f(y0)
    k1[0] = -rates[0] * y[0]
    for j in range(1, n):
        k1[j] = rates[j - 1] * y[j - 1] - rates[j] * y[j]

    # Starting step from the usual norm heuristic.
    d0 = 0.0
    d1 = 0.0
    for j in range(n):
        sc = atol + rtol * abs(y[j])
        d0 += (y[j] / sc) ** 2
        d1 += (k1[j] / sc) ** 2
    d0 = np.sqrt(d0 / n)
    d1 = np.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6 * span if span < 1.0 else 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if h0 > span:
        h0 = span
    yt[0] = y[0] + h0 * k1[0]
    for j in range(1, n):
        yt[j] = y[j] + h0 * k1[j]
    k2[0] = -rates[0] * yt[0]
    for j in range(1, n):
        k2[j] = rates[j - 1] * yt[j - 1] - rates[j] * yt[j]
    d2 = 0.0
    for j in range(n):
        sc = atol + rtol * abs(y[j])
        d2 += ((k2[j] - k1[j]) / sc) ** 2
    d2 = np.sqrt(d2 / n) / h0
    dm = d1 if d1 > d2 else d2
    if dm <= 1e-15:
        h1 = h0 * 1e-3 if h0 * 1e-3 > 1e-6 else 1e-6
    else:
        h1 = (0.01 / dm) ** 0.2
    h = 100.0 * h0
    if h1 < h:
        h = h1
    if span < h:
        h = span
    if h > h_stab:
        h = h_stab

    t = t_grid[0]
    h_min = 16.0 * _EPS * (abs(t_grid[n_out - 1]) + span)

    for i_out in range(1, n_out):
        t_target = t_grid[i_out]
        while t_target - t > h_min:
            clamped = False
            h_try = h
            if h_try > t_target - t:
                h_try = t_target - t
                clamped = True
            if h_try < h_min:
                return _STATUS_UNDERFLOW, out, t

            for j in range(n):
                yt[j] = y[j] + h_try * _A21 * k1[j]
            k2[0] = -rates[0] * yt[0]
            for j in range(1, n):
                k2[j] = rates[j - 1] * yt[j - 1] - rates[j] * yt[j]

            for j in range(n):
                yt[j] = y[j] + h_try * (_A31 * k1[j] + _A32 * k2[j])
            k3[0] = -rates[0] * yt[0]
            for j in range(1, n):
                k3[j] = rates[j - 1] * yt[j - 1] - rates[j] * yt[j]

            for j in range(n):
                yt[j] = y[j] + h_try * (_A41 * k1[j] + _A42 * k2[j] + _A43 * k3[j])
            k4[0] = -rates[0] * yt[0]
            for j in range(1, n):
                k4[j] = rates[j - 1] * yt[j - 1] - rates[j] * yt[j]

            for j in range(n):
                yt[j] = y[j] + h_try * (
                    _A51 * k1[j] + _A52 * k2[j] + _A53 * k3[j] + _A54 * k4[j]
                )
            k5[0] = -rates[0] * yt[0]
            for j in range(1, n):
                k5[j] = rates[j - 1] * yt[j - 1] - rates[j] * yt[j]

            for j in range(n):
                yt[j] = y[j] + h_try * (
                    _A61 * k1[j]
                    + _A62 * k2[j]
                    + _A63 * k3[j]
                    + _A64 * k4[j]
                    + _A65 * k5[j]
                )
            k6[0] = -rates[0] * yt[0]
            for j in range(1, n):
                k6[j] = rates[j - 1] * yt[j - 1] - rates[j] * yt[j]

            for j in range(n):
                y5[j] = y[j] + h_try * (
                    _B1 * k1[j]
                    + _B3 * k3[j]
                    + _B4 * k4[j]
                    + _B5 * k5[j]
                    + _B6 * k6[j]
                )
            k7[0] = -rates[0] * y5[0]
            for j in range(1, n):
                k7[j] = rates[j - 1] * y5[j - 1] - rates[j] * y5[j]

            err = 0.0
            for j in range(n):
                e = h_try * (
                    _E1 * k1[j]
                    + _E3 * k3[j]
                    + _E4 * k4[j]
                    + _E5 * k5[j]
                    + _E6 * k6[j]
                    + _E7 * k7[j]
                )
                ay = abs(y[j])
                ay5 = abs(y5[j])
                sc = atol + rtol * (ay if ay > ay5 else ay5)
                err += (e / sc) ** 2
            err = np.sqrt(err / n)

            if not np.isfinite(err):
                h = h_try * _MIN_FAC
                continue

            if err <= 1.0:
                t = t + h_try
                for j in range(n):
                    yj = y5[j]
                    if not np.isfinite(yj):
                        return _STATUS_NAN, out, t
                    y[j] = yj
                    k1[j] = k7[j]
                if err == 0.0:
                    fac = _MAX_FAC
                else:
                    fac = _SAFETY * err ** -0.2
                    if fac > _MAX_FAC:
                        fac = _MAX_FAC
                    elif fac < _MIN_FAC:
                        fac = _MIN_FAC
                h_new = h_try * fac
                if clamped and h_new < h:
                    h_new = h
                if h_new > h_stab:
                    h_new = h_stab
                h = h_new
            else:
                fac = _SAFETY * err ** -0.2
                if fac < _MIN_FAC:
                    fac = _MIN_FAC
                h = h_try * fac
        t = t_target
        for j in range(n):
            out[i_out, j] = y[j]
    return _STATUS_OK, out, t


def _cascade_numpy(rates, p0, t_grid, rtol, atol):
    # Vectorized rendition of the same pair and controller.
    n = p0.shape[0]
    n_out = t_grid.shape[0]
    out = np.empty((n_out, n))
    y = p0.copy()
    out[0] = y

    r = rates
    r_shift = rates[:-1]

    def rhs(p):
        f = -r * p
        f[1:] += r_shift * p[:-1]
        return f

    span = t_grid[-1] - t_grid[0]
    r_max = float(r.max()) if n else 0.0
    h_stab = _STAB_MARGIN / r_max if r_max > 0.0 else span

    k1 = rhs(y)
    scale0 = atol + rtol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale0) ** 2)))
    d1 = float(np.sqrt(np.mean((k1 / scale0) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6 * span if span < 1.0 else 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    k2 = rhs(y + h0 * k1)
    d2 = float(np.sqrt(np.mean(((k2 - k1) / scale0) ** 2))) / h0
    dm = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if dm <= 1e-15 else (0.01 / dm) ** 0.2
    h = min(100.0 * h0, h1, span, h_stab)

    t = t_grid[0]
    h_min = 16.0 * _EPS * (abs(t_grid[-1]) + span)

    for i_out in range(1, n_out):
        t_target = t_grid[i_out]
        while t_target - t > h_min:
            clamped = h > t_target - t
            h_try = min(h, t_target - t)
            if h_try < h_min:
                return _STATUS_UNDERFLOW, out, t

            k2 = rhs(y + (h_try * _A21) * k1)
            k3 = rhs(y + h_try * (_A31 * k1 + _A32 * k2))
            k4 = rhs(y + h_try * (_A41 * k1 + _A42 * k2 + _A43 * k3))
            k5 = rhs(y + h_try * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
            k6 = rhs(
                y
                + h_try
                * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
            )
            y5 = y + h_try * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
            k7 = rhs(y5)

            e = h_try * (
                _E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
            )
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
            err = float(np.sqrt(np.mean((e / scale) ** 2)))

            if not np.isfinite(err):
                h = h_try * _MIN_FAC
                continue

            if err <= 1.0:
                t = t + h_try
                if not np.isfinite(y5).all():
                    return _STATUS_NAN, out, t
                y = y5
                k1 = k7
                fac = _MAX_FAC if err == 0.0 else min(
                    _MAX_FAC, max(_MIN_FAC, _SAFETY * err ** -0.2)
                )
                h_new = h_try * fac
                if clamped and h_new < h:
                    h_new = h
                h = min(h_new, h_stab)
            else:
                h = h_try * max(_MIN_FAC, _SAFETY * err ** -0.2)
        t = t_target
        out[i_out] = y
    return _STATUS_OK, out, t


def _resolve_backend():
    requested = os.environ.get("DICKESIM_BACKEND", "auto").strip().lower()
    if requested not in ("auto", "numba", "numpy"):
        raise IntegrationError(
            f"DICKESIM_BACKEND must be auto|numba|numpy, got {requested!r}"
        )
    if requested == "numpy":
        return "numpy", None
    try:
        from numba import njit
    except ImportError:
        if requested == "numba":
            raise IntegrationError("DICKESIM_BACKEND=numba but numba is not importable")
        return "numpy", None
    return "numba", njit(cache=True)(_cascade_kernel)


BACKEND, _cascade_numba = _resolve_backend()


def integrate_cascade(rates, p0, t_grid, rtol, atol, backend=None):
    """Integrate the cascade ODE, returning populations at the grid times.

    `rates` are the per-level outflow coefficients in the units of the grid
    (last entry must be 0).  Raises IntegrationError on step-size underflow
    or non-finite state.  `backend` overrides the module default ("numba" or
    "numpy"), which benchmarks and equivalence tests use.
    """
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    p0 = np.ascontiguousarray(p0, dtype=np.float64)
    t_grid = np.ascontiguousarray(t_grid, dtype=np.float64)
    if rates.shape != p0.shape:
        raise ValueError("rates and p0 must have the same length")
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with >= 2 points")
    if not (rtol > 0 and atol > 0):
        raise ValueError("tolerances must be positive")

    which = BACKEND if backend is None else backend
    if which == "numba":
        if _cascade_numba is None:
            raise IntegrationError("numba backend requested but unavailable")
        status, out, t_fail = _cascade_numba(rates, p0, t_grid, rtol, atol)
    elif which == "numpy":
        status, out, t_fail = _cascade_numpy(rates, p0, t_grid, rtol, atol)
    else:
        raise ValueError(f"unknown backend {which!r}")

    if status == _STATUS_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow near t={t_fail:.6g} (stiffness failure or "
            "tolerance not achievable)"
        )
    if status == _STATUS_NAN:
        raise IntegrationError(f"non-finite state detected near t={t_fail:.6g}")
    return out
