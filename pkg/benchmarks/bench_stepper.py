"""Time the numba cascade kernel against the pure-numpy fallback.

Run as: python3 benchmarks/bench_stepper.py
"""

import time

import numpy as np

from dickesim._stepper import _cascade_numba, integrate_cascade
from dickesim.cascade import SystemParams, _mu_values, auto_t_end


def run_case(n_emitters, backend, repeats):
    rates = 2.0 * _mu_values(n_emitters)
    p0 = np.zeros(n_emitters + 1)
    p0[0] = 1.0
    t_end = auto_t_end(SystemParams(n_emitters))
    t_grid = np.linspace(0.0, t_end, 2000)
    # warm-up (JIT compilation on the numba path)
    integrate_cascade(rates, p0, t_grid, 1e-10, 1e-12, backend=backend)
    tic = time.perf_counter()
    for _ in range(repeats):
        integrate_cascade(rates, p0, t_grid, 1e-10, 1e-12, backend=backend)
    return (time.perf_counter() - tic) / repeats


def main():
    if _cascade_numba is None:
        print("numba unavailable; nothing to compare")
        return
    print(f"{'N':>5s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}")
    for n in (16, 32, 64, 128):
        repeats = 5 if n >= 64 else 10
        t_np = run_case(n, "numpy", repeats)
        t_nb = run_case(n, "numba", repeats)
        print(f"{n:5d} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} {t_np / t_nb:9.1f}")


if __name__ == "__main__":
    main()
