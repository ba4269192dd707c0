"""Time the Dormand-Prince kernel compiled with numba against the interpreted path.

    python3 benchmarks/bench_integrator.py [--t-final 1000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from collcoh import _jit
from collcoh._kernels import dopri_integrate_jit, dopri_integrate_py
from collcoh.dynamics import assemble_reduced
from collcoh.model import RateSet, initial_state


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--t-final", type=float, default=1000.0)
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rates = RateSet.simplified(1.0, 1.0, 3.0, r_e=1.0, r_uv=0.1, p=1.0, delta=0.2)
    G = np.ascontiguousarray(assemble_reduced(rates).matrix)
    x0 = initial_state("ground_d").to_vector()
    call = (G, x0, args.t_final, np.inf, args.tol, 1e-14 * args.t_final, 50_000_000, 1)

    py_s, py_out = best_of(dopri_integrate_py, call, args.repeat)
    print(f"interpreted: {py_s:8.4f} s  ({py_out[3]} accepted, {py_out[4]} rejected steps)")
    if not _jit.NUMBA_AVAILABLE:
        print("numba not installed; skipping the compiled path")
        return
    start = time.perf_counter()
    dopri_integrate_jit(*call)
    print(f"first jit call (includes compile or cache load): {time.perf_counter() - start:.4f} s")
    jit_s, jit_out = best_of(dopri_integrate_jit, call, args.repeat)
    print(f"numba:       {jit_s:8.4f} s  ({jit_out[3]} accepted, {jit_out[4]} rejected steps)")
    print(f"speed-up:    {py_s / jit_s:8.1f}x")
    print(f"max |state difference|: {np.abs(jit_out[1][-1] - py_out[1][-1]).max():.2e}")


if __name__ == "__main__":
    main()
