"""Compare the compiled and NumPy stepper cores.

Times the right-hand-side kernel and a full integration on the same
inputs. Run from the repository root:

    python3 benchmarks/bench_backends.py [--t-end 10] [--reps 2000]
"""

from __future__ import annotations

import argparse
import math
import time

from homolab import _core_py
from homolab.central import known_seeds, solve_central_config
from homolab.homographic import make_relative_equilibrium
from homolab.integrate import sample_times
from homolab.system import BodySystem


def _cores():
    cores = [_core_py]
    try:
        from homolab import _core_cy
    except ImportError:
        print("compiled core not built; benchmarking the NumPy core alone")
    else:
        cores.insert(0, _core_cy)
    return cores


def bench_rhs(core, masses, alpha, y, n, dim, reps):
    core.rhs(masses, alpha, y, n, dim)
    start = time.perf_counter()
    for _ in range(reps):
        core.rhs(masses, alpha, y, n, dim)
    return (time.perf_counter() - start) / reps


def bench_integrate(core, masses, alpha, dim, y0, targets, coll):
    start = time.perf_counter()
    out = core.integrate_raw(
        masses, alpha, dim, y0.copy(), 0.0, targets,
        1e-12, 1e-14, math.inf, coll, 1e-4, 20_000_000,
    )
    elapsed = time.perf_counter() - start
    return elapsed, out[3], out[6]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--t-end", type=float, default=10.0)
    parser.add_argument("--reps", type=int, default=2000)
    args = parser.parse_args()

    system = BodySystem(masses=(1.0, 1.0, 1.0), alpha=0.5)
    cc = solve_central_config(system, known_seeds("equilateral", 3))
    state = make_relative_equilibrium(cc)
    y0 = state.flat()
    masses = system.masses_array
    targets = sample_times(0.0, args.t_end, 0.01)
    coll = 1e-8

    print(f"equilateral relative equilibrium, alpha=0.5, t_end={args.t_end}")
    header = f"{'core':<8} {'rhs (us)':>10} {'integrate (s)':>14} {'steps':>8} {'nfev':>9} {'us/step':>9}"
    print(header)
    print("-" * len(header))
    for core in _cores():
        rhs_t = bench_rhs(core, masses, system.alpha, y0, system.n, system.dim, args.reps)
        total, steps, nfev = bench_integrate(
            core, masses, system.alpha, system.dim, y0, targets, coll
        )
        print(
            f"{core.NAME:<8} {rhs_t * 1e6:>10.2f} {total:>14.4f} "
            f"{steps:>8d} {nfev:>9d} {total / steps * 1e6:>9.2f}"
        )


if __name__ == "__main__":
    main()
