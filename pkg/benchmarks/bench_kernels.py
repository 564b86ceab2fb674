#!/usr/bin/env python3
"""Benchmark the compiled hanging-point kernels against the numpy fallback.

Three workloads:
  scalar   one lowest-point solve per call (equilibrium validation pattern)
  grid     batched solves sharing the ball centers (oracle scan pattern)
  oracle   a full brute-force equilibrium solve at 1e-3 resolution

Run: python benchmarks/bench_kernels.py [--repeats N]
"""
import argparse
import time

import numpy as np

from sheetplan import _hangcore_py
from sheetplan.equilibrium import oracle_equilibrium
from sheetplan.geometry import Formation, SheetLayout

try:
    from sheetplan import _hangcore
except ImportError:
    _hangcore = None


def make_cases(rng, n, count):
    cases = []
    while len(cases) < count:
        ang = np.sort(rng.uniform(0, 2 * np.pi, n))
        if np.min(np.diff(ang, append=ang[0] + 2 * np.pi)) < 0.4:
            continue
        v = np.column_stack([np.cos(ang), np.sin(ang)]) * rng.uniform(0.7, 1.0, (n, 1))
        r = 0.75 * v + rng.normal(0, 0.01, (n, 2))
        u = v.mean(axis=0) + rng.uniform(-0.1, 0.1, 2)
        rho = np.linalg.norm(v - u, axis=1)
        cases.append((r, rho))
    return cases


def bench_scalar(impl, cases, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        for r, rho in cases:
            impl.lowest_point(r, 0.79, rho)
    return (time.perf_counter() - t0) / (repeats * len(cases))


def bench_grid(impl, r, rho_grid, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        impl.lowest_point_grid(r, 0.79, rho_grid)
    return (time.perf_counter() - t0) / repeats


def bench_oracle(monkey, repeats):
    """Time oracle_equilibrium with the kernel backend monkeypatched."""
    from sheetplan import equilibrium, kernels

    saved = (kernels.lowest_point, kernels.lowest_point_grid,
             equilibrium.kernels.lowest_point_grid)
    kernels.lowest_point = monkey.lowest_point
    kernels.lowest_point_grid = monkey.lowest_point_grid
    try:
        rng = np.random.default_rng(3)
        ang = np.linspace(0, 2 * np.pi, 6, endpoint=False) + np.pi / 2
        v = np.column_stack([np.cos(ang), np.sin(ang)]) * 0.9
        layout = SheetLayout(v, 0.79)
        f = Formation(0.7 * v, layout)
        t0 = time.perf_counter()
        for _ in range(repeats):
            oracle_equilibrium(f, grid_resolution=1e-3)
        return (time.perf_counter() - t0) / repeats
    finally:
        kernels.lowest_point, kernels.lowest_point_grid = saved[0], saved[1]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(1)

    backends = [("python", _hangcore_py)]
    if _hangcore is not None:
        backends.append(("compiled", _hangcore))
    else:
        print("compiled extension not built; benchmarking the fallback only")

    print(f"{'workload':<26}" + "".join(f"{name:>14}" for name, _ in backends)
          + ("{:>10}".format("speedup") if len(backends) == 2 else ""))

    for n in (3, 6):
        cases = make_cases(rng, n, 200)
        times = [bench_scalar(impl, cases, args.repeats) for _, impl in backends]
        row = f"scalar lowest_point n={n:<4}" + "".join(
            f"{t * 1e6:>11.1f} us" for t in times
        )
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    for n in (3, 6):
        cases = make_cases(rng, n, 1)
        r, _ = cases[0]
        pts = rng.uniform(-0.5, 0.5, (4000, 2))
        rho_grid = np.linalg.norm(pts[:, None, :] - r[None, :, :], axis=2) * 1.3
        times = [bench_grid(impl, r, rho_grid, args.repeats) for _, impl in backends]
        row = f"grid 4000 pts n={n:<9}" + "".join(
            f"{t * 1e3:>11.2f} ms" for t in times
        )
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    times = [bench_oracle(impl, max(args.repeats // 2, 1)) for _, impl in backends]
    row = f"{'oracle 6 robots @1e-3':<26}" + "".join(
        f"{t * 1e3:>11.1f} ms" for t in times
    )
    if len(times) == 2:
        row += f"{times[0] / times[1]:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
