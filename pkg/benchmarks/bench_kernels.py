"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both versions are imported directly, so the result does not depend on
SLICEBALL_PURE_NUMPY.
"""
import argparse
import time

import numpy as np

from sliceball import kernels


def best_of(func, *args, repeat=5):
    func(*args)  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    coeffs = rng.standard_normal((65, 4)) * 0.5
    for m in (1_000, 100_000, 1_000_000):
        pts = rng.standard_normal((m, 4)) * 0.2
        yield f"horner order=64 points={m}", kernels.horner_np, kernels.horner_nb, (coeffs, pts)
    a = rng.standard_normal((1_000_000, 4))
    b = rng.standard_normal((1_000_000, 4))
    yield "qmul 1e6 pairs", kernels.qmul_np, kernels.qmul_nb, (a, b)
    for n in (64, 512):
        s = rng.standard_normal((n + 1, 4))
        yield f"star order={n}", kernels.star_np, kernels.star_nb, (s, s, n)
    c = np.r_[1.0, rng.standard_normal(64) * 0.1]
    yield "invert_real order=512", kernels.invert_real_np, kernels.invert_real_nb, (c, 512)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<32}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}{'max diff':>12}")
    for name, f_np, f_nb, fargs in cases(rng):
        t_np = best_of(f_np, *fargs, repeat=args.repeat)
        t_nb = best_of(f_nb, *fargs, repeat=args.repeat)
        diff = np.max(np.abs(f_np(*fargs) - f_nb(*fargs)))
        print(f"{name:<32}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>9.1f}x{diff:>12.2e}")


if __name__ == "__main__":
    main()
