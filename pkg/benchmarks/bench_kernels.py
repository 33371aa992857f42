"""Compare the compiled kernels against the fallback path.

Runs the grid classifier and the continuation walk twice: once in the current
interpreter (numba if available) and once in a subprocess with
PETALLAB_NO_NUMBA=1.  Usage: python benchmarks/bench_kernels.py [pixels]
"""

import os
import subprocess
import sys
import time

import numpy as np


def bench_once(n_side):
    import petallab as pl
    from petallab import _kernels as K

    m = pl.map_by_id("sine_newton")
    xs = np.linspace(-6.0, 6.0, n_side)
    grid = (xs[None, :] + 1j * xs[:, None]).ravel()
    attractors = pl.sine_attractors(-4, 4)

    # warm-up (jit compilation)
    pl.classify_grid(m, grid[:64], attractors)

    t0 = time.perf_counter()
    codes, _, _, _ = pl.classify_grid(m, grid, attractors, max_iter=200)
    t_classify = time.perf_counter() - t0

    curve = pl.seed_curve(m, 0j, 0.5, 1024)
    t0 = time.perf_counter()
    c = curve
    for _ in range(4):
        c = pl.pullback_curve(m, c)
    t_trace = time.perf_counter() - t0

    label = "numba" if K.NUMBA_ENABLED else "fallback"
    print(f"{label:>8}  classify {n_side}x{n_side}: {t_classify:8.3f} s   "
          f"trace 4 levels: {t_trace:8.3f} s   "
          f"converged {int((codes == K.CONVERGED).sum())}", flush=True)


def main():
    n_side = int(sys.argv[1]) if len(sys.argv) > 1 else 512
    bench_once(n_side)
    env = dict(os.environ, PETALLAB_NO_NUMBA="1")
    subprocess.run([sys.executable, __file__, str(n_side), "--child"],
                   env=env, check=True)


if __name__ == "__main__":
    if "--child" in sys.argv:
        bench_once(int(sys.argv[1]))
    else:
        main()
