"""Compare the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
The numba path is what `import ptvortex` picks up when numba is available;
setting PTVORTEX_DISABLE_NUMBA=1 forces the numpy path package-wide.  Here
both implementations are imported explicitly so one process measures both.
"""

import time

import numpy as np

from ptvortex import _kernels
from ptvortex.basis import GridSpec
from ptvortex.dynamics import Propagator
from ptvortex.potential import PotentialSpec


def timeit(fn, *args, repeat=200):
    fn(*args)  # warm up (and JIT-compile)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat * 1e3  # ms


def bench_hermite():
    rows = []
    for n_points in (128, 512, 2048):
        x = np.linspace(-9, 9, n_points)
        args = (12, x)
        t_np = timeit(_kernels.hermite_table_numpy, *args)
        rows.append(("hermite_table n_max=12", n_points, t_np,
                     timeit(_kernels.hermite_table, *args) if _kernels.BACKEND == "numba" else None))
    return rows


def bench_potential_phase():
    rows = []
    rng = np.random.default_rng(0)
    for n in (128, 256):
        psi = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        vr = rng.standard_normal((n, n))
        vi = 0.3 * rng.standard_normal((n, n))
        args = (psi, vr, vi, 1.0, 1e-3)
        t_np = timeit(_kernels.apply_potential_phase_numpy, *args)
        t_nb = timeit(_kernels.apply_potential_phase, *args) if _kernels.BACKEND == "numba" else None
        rows.append((f"potential_phase {n}x{n}", n * n, t_np, t_nb))
    return rows


def bench_split_step():
    rows = []
    for n, half in ((128, 5.0), (256, 10.0)):
        grid = GridSpec(-half, half, -half, half, n, n)
        prop = Propagator(grid, 1.0, PotentialSpec("A", gamma=1.0), 1e-3)
        X, Y = grid.meshgrid()
        psi = ((X + 1j * Y) * np.exp(-0.5 * (X**2 + Y**2))).astype(complex)
        rows.append((f"full split step {n}x{n}", n * n,
                     timeit(prop.step, psi, repeat=100), None))
    return rows


def main():
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'kernel':<28} {'size':>8} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for rows in (bench_hermite(), bench_potential_phase(), bench_split_step()):
        for name, size, t_np, t_nb in rows:
            if t_nb is None:
                print(f"{name:<28} {size:>8} {t_np:>10.4f} {'-':>10} {'-':>8}")
            else:
                print(f"{name:<28} {size:>8} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.2f}x")


if __name__ == "__main__":
    main()
