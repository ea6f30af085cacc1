"""Head-to-head timing of the two stepper implementations.

Runs the same Crank-Nicolson segment (a radial fundamental-solution-style
problem) through the compiled loop and the pure numpy/scipy banded-solve
twin, reports wall time per path, their speed ratio, and the worst
disagreement between the two final states.  The compiled path is warmed
once before timing so jit compilation is not billed to the measurement.

    python3 benchmarks/bench_kernels.py --nodes 3000 --steps 2000
"""

import argparse
import time

import numpy as np

from harnacklab._kernels import HAS_NUMBA, _evolve_segment_loops, _evolve_segment_py


def make_problem(nodes, steps):
    r = np.linspace(0.0, 12.0, nodes)
    h = r[1] - r[0]
    cell_vol = (r + 0.25 * h) ** 2 * h
    cell_vol[0] = (0.5 * h) ** 3 / 3.0
    face_coef = (r[:-1] + 0.5 * h) ** 2 / h
    u0 = np.exp(-(r**2) / 0.5)
    dts = np.full(steps, 4e-4)
    scales = np.ones(steps + 1)
    return u0, cell_vol, face_coef, dts, scales


def time_path(segment, u0, cv, fc, dts, scales, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        u = u0.copy()
        t0 = time.perf_counter()
        status = segment(u, cv, fc, scales, dts)
        best = min(best, time.perf_counter() - t0)
        if status != 0:
            raise RuntimeError("benchmark problem lost positivity at step %d" % status)
        out = u
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=3000)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    prob = make_problem(args.nodes, args.steps)
    u0, cv, fc, dts, scales = prob
    print("problem: %d nodes x %d steps, best of %d" % (args.nodes, args.steps, args.repeats))

    t_py, u_py = time_path(_evolve_segment_py, u0, cv, fc, dts, scales, args.repeats)
    rate_py = args.steps / t_py
    print("numpy/scipy banded : %8.3f s   %10.0f steps/s" % (t_py, rate_py))

    if not HAS_NUMBA:
        print("numba             : unavailable in this environment")
        return

    import numba

    jit = numba.njit(cache=True)(_evolve_segment_loops)
    warm = u0.copy()
    jit(warm, cv, fc, scales[:2], dts[:1])  # compile outside the timer
    t_nb, u_nb = time_path(jit, u0, cv, fc, dts, scales, args.repeats)
    rate_nb = args.steps / t_nb
    print("numba compiled loop: %8.3f s   %10.0f steps/s" % (t_nb, rate_nb))
    print("speed ratio        : %8.2fx" % (t_py / t_nb))
    print("max |difference|   : %8.2e" % np.max(np.abs(u_py - u_nb)))


if __name__ == "__main__":
    main()
