"""Time each hot kernel with numba and with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are checked to give the same answer before timing. The first
numba call (compilation, or loading the on-disk cache) is excluded.
"""

import argparse
import os
import statistics
import time

import numpy as np

from bpwmc import catalog, kernels
from bpwmc._accel import ENV_FLAG, use_numba


def cases():
    g14 = catalog.fig6(7, 2)  # 14 vertices
    fig1 = catalog.fixture("fig1").graph
    rng = np.random.default_rng(0)
    steps = 200_000
    up, ua = rng.random(steps), rng.random(steps)
    k = 16
    pi = rng.random(k)
    pi /= pi.sum()
    a = rng.random((k, k))
    flow = (a + a.T) / (a + a.T).sum()
    return {
        "independent_masks (n=14)": lambda: np.sort(kernels.independent_masks(g14.adj, g14.n)),
        "vertex_separation (n=14)": lambda: kernels.vertex_separation(g14.adj, g14.n),
        f"run_chain (fig1, {steps} steps)": lambda: kernels.run_chain(fig1.adj, [1] * fig1.n, 1.0, 0, up, ua),
        f"min_cut_ratio ({k} states)": lambda: kernels.min_cut_ratio(pi, flow),
    }


def timed(fn, repeat):
    out = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, float):
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    saved = os.environ.pop(ENV_FLAG, None)
    try:
        print(f"{'kernel':38s} {'numba s':>10s} {'numpy s':>10s} {'speed-up':>9s}")
        for name, fn in cases().items():
            os.environ.pop(ENV_FLAG, None)
            assert use_numba()
            ref = fn()  # warm-up
            t_nb = timed(fn, args.repeat)
            os.environ[ENV_FLAG] = "1"
            if not same(ref, fn()):
                raise SystemExit(f"{name}: numba and numpy results differ")
            t_np = timed(fn, args.repeat)
            print(f"{name:38s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}x")
    finally:
        if saved is None:
            os.environ.pop(ENV_FLAG, None)
        else:
            os.environ[ENV_FLAG] = saved


if __name__ == "__main__":
    main()
