"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the two hot kernels on workloads of the size the CLI uses: the
friction/diffusion grid behind a 101 x 101 detuning map (one Simpson pass of
257 positions) and 2000 Euler-Maruyama steps of 1000 trajectories with
position-resolved coefficient tables. Each backend's result is checked
against the other before timing.
"""
import argparse
import math
import time

import numpy as np

from cavcool import _kernels, cmsim, thermo
from cavcool.modes import ModeSet, coupling_sums
from cavcool.params import SystemParams


def grid_workload():
    ms = ModeSet(8, 3.0)
    z = np.linspace(0.0, 2 * math.pi, 257)
    s = coupling_sums(ms, z)
    v = np.linspace(-10, 10, 101)
    A, C = np.meshgrid(v, v, indexing="ij")
    args = (1.0, 1.0, 0.01, A.ravel().copy(), C.ravel().copy(),
            np.ascontiguousarray(s.G), np.ascontiguousarray(s.dG_dz),
            np.ascontiguousarray(s.sum_dg_sq))
    return lambda kern: kern.motion_grid(*args)


def em_workload(n_traj=1000, n_steps=2000):
    p = SystemParams(eta=0.1, recoil_freq=0.01)
    ms = thermo.effective_mode(3.0)
    tables = cmsim.coefficient_tables(p, ms, cmsim.TrajectoryConfig())
    rng = np.random.default_rng(0)
    normals = rng.standard_normal((n_traj, n_steps))
    x0 = rng.uniform(0, 2 * math.pi, n_traj)
    p0 = rng.normal(0, 6.0, n_traj)

    def run(kern):
        x, pp = x0.copy(), p0.copy()
        acc2, acc4 = np.zeros(n_steps), np.zeros(n_steps)
        traj = np.zeros(n_traj)
        kern.em_run(x, pp, normals, *tables, 0.0, 2 * math.pi, 0.4, 1 / p.mass,
                    acc2, acc4, traj, 0)
        return x, pp, acc2
    return run


def best_time(func, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy backend is available")
    workloads = {"motion_grid 10201 nodes x 257 z": grid_workload(),
                 "em_run 1000 traj x 2000 steps": em_workload()}
    print(f"{'kernel':<34s}" + "".join(f"{b:>12s}" for b in backends) + "     speed-up")
    for name, work in workloads.items():
        results = {b: work(_kernels.get_backend(b)) for b in backends}
        ref = results[backends[-1]]
        for b in backends:
            for u, v in zip(results[b], ref):
                np.testing.assert_allclose(u, v, rtol=1e-9)
        times = {b: best_time(lambda: work(_kernels.get_backend(b)), args.repeat)
                 for b in backends}
        row = f"{name:<34s}" + "".join(f"{times[b]:>11.4f}s" for b in backends)
        if "cython" in times:
            row += f"   {times['python'] / times['cython']:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
