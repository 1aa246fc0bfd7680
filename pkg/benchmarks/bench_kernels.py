"""Time the numba kernels against their numpy fallbacks.

Run with ``python benchmarks/bench_kernels.py``. Both paths are called
directly, so the ``METAGAME_DISABLE_NUMBA`` flag does not matter here. The
numba timings exclude the first (compiling) call, which is reported separately.
"""

import argparse
import time

import numpy as np

from metagame import fixtures, kernels
from metagame.blotto import distinct_arrangements
from metagame.dynamics import default_starts, single_population_field


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_rk4(repeat, horizon):
    field = single_population_field(fixtures.load("alphago_table5"))
    Z0 = np.ascontiguousarray(default_starts(3, 5))
    n_steps = int(round(horizon / 0.01))
    args = (Z0, field.targets, field.coefs, field.expos, field.presence,
            field.pop, len(field.dims), 0.01, n_steps)

    def run(fn):
        paths = np.empty((Z0.shape[0], n_steps + 1, Z0.shape[1]))
        fn(*args, paths)
        return paths

    t0 = time.perf_counter()
    run(kernels._rk4_many_nb)
    compile_s = time.perf_counter() - t0
    t_nb, p_nb = timed(lambda: run(kernels._rk4_many_nb), repeat)
    t_np, p_np = timed(lambda: run(kernels._rk4_many_np), repeat)
    return compile_s, t_nb, t_np, float(np.abs(p_nb - p_np).max())


def bench_blotto(repeat):
    P = distinct_arrangements((36, 35, 24, 3, 2))
    Q = distinct_arrangements((35, 35, 26, 2, 2))
    t0 = time.perf_counter()
    kernels._blotto_nb(P, Q)
    compile_s = time.perf_counter() - t0
    t_nb, a = timed(lambda: kernels._blotto_nb(P, Q), repeat)
    t_np, b = timed(lambda: kernels._blotto_np(P, Q), repeat)
    return compile_s, t_nb, t_np, tuple(int(v) for v in a) == b, (len(P), len(Q))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--horizon", type=float, default=200.0)
    args = ap.parse_args(argv)
    c, nb, npy, err = bench_rk4(args.repeat, args.horizon)
    print(f"rk4 (7 starts, t={args.horizon:g}):  compile {c:.2f}s  numba {nb * 1e3:.1f} ms  "
          f"numpy {npy * 1e3:.1f} ms  speedup {npy / nb:.1f}x  max|diff| {err:.2e}")
    c, nb, npy, same, (n1, n2) = bench_blotto(args.repeat)
    print(f"blotto ({n1}x{n2} arrangements):  compile {c:.2f}s  numba {nb * 1e3:.3f} ms  "
          f"numpy {npy * 1e3:.3f} ms  speedup {npy / nb:.1f}x  identical {same}")


if __name__ == "__main__":
    main()
