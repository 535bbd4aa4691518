"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--pairs N] [--repeat R]

Reports the best wall time per call and the speedup of each backend over
the numpy one, for batch ratios and for refinement chains.
"""
import argparse
import math
import timeit

import numpy as np

from njclab import kernels, product, zoo


def spaces():
    absval = zoo.make_norm_induced(1, 2)
    return [
        zoo.make_euclidean(2),
        zoo.make_norm_induced(4, 3.0),
        zoo.make_truncated(2),
        zoo.make_fractional_power(2, 0.2),
        zoo.make_asymmetric_sum(3),
        product.make_product([absval, absval], product.make_psi_p(2, 1.5)),
    ]


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=100_000)
    ap.add_argument("--chains", type=int, default=256)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'space':34s} {'op':8s} " + " ".join(f"{b + ' (ms)':>14s}" for b in backends) + f" {'speedup':>8s}")
    rng = np.random.default_rng(0)
    for sp in spaces():
        k = sp.kernel
        X = rng.standard_normal((args.pairs, sp.dim))
        Y = rng.standard_normal((args.pairs, sp.dim))
        delta = np.full(args.pairs, 1e-12)
        X0, Y0 = X[: args.chains], Y[: args.chains]
        noise = rng.standard_normal((args.chains, args.steps, 2 * sp.dim))
        d0, s0 = delta[: args.chains], np.full(args.chains, 0.1)
        rows = {"ratio": [], "refine": []}
        for b in backends:
            impl = kernels.load_backend(b)
            prm = k.array()
            rows["ratio"].append(bench(lambda: impl.ratio_batch(k.kind, prm, X, Y, 2.0, delta), args.repeat))
            rows["refine"].append(
                bench(lambda: impl.refine_pairs(k.kind, prm, X0, Y0, 2.0, d0, noise, s0, 0.9), args.repeat)
            )
        for op, times in rows.items():
            ref = times[backends.index("python")]
            speed = ref / times[0] if times[0] > 0 else math.inf
            cells = " ".join(f"{1e3 * t:14.2f}" for t in times)
            print(f"{sp.name[:34]:34s} {op:8s} {cells} {speed:8.1f}x")


if __name__ == "__main__":
    main()
