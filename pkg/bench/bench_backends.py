"""Time the compiled and pure-Python kernels on the same inputs.

Usage: python3 bench/bench_backends.py [--repeat 5] [--samples 2000] [--iterations 1000]

Each case is checked for identical output across backends before timing.
"""
import argparse
import sys
import timeit

import numpy as np

from discrim import _backend
from discrim.predict.tree import presort


def bootstrap_case(n, k, iterations):
    rng = np.random.default_rng(0)
    correct = (rng.random((n, k)) < 0.8).astype(np.uint8)
    m = int(np.ceil(0.8 * n - 1e-9))
    key = _backend.stream_key(42)
    return lambda b: b.bootstrap_sums(correct, m, iterations, key, True)


def split_case(n, f):
    rng = np.random.default_rng(1)
    X = rng.normal(size=(n, f))
    y = X @ rng.normal(size=f) + rng.normal(size=n)
    order = presort(X)
    mask = np.ones(n, dtype=np.uint8)
    return lambda b: b.best_split(X, y - y.mean(), order, mask, 2, 0.0)


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=2000, help="test-set size for the bootstrap case")
    ap.add_argument("--iterations", type=int, default=1000, help="bootstrap iterations")
    args = ap.parse_args(argv)

    backends = _backend.backends()
    if "compiled" not in backends:
        print("compiled kernels are not built; only the python backend is available", file=sys.stderr)
    cases = {
        f"bootstrap_sums n={args.samples} k=4 T={args.iterations}": bootstrap_case(args.samples, 4, args.iterations),
        "best_split n=700 f=28": split_case(700, 28),
    }
    print(f"{'case':<42} {'backend':<9} {'best of ' + str(args.repeat):>12} {'speedup':>8}")
    status = 0
    for name, run in cases.items():
        outputs = {b: run(mod) for b, mod in backends.items()}
        if len(outputs) == 2 and not same(outputs["python"], outputs["compiled"]):
            print(f"{name}: backends disagree", file=sys.stderr)
            status = 1
        times = {b: min(timeit.repeat(lambda m=mod: run(m), number=1, repeat=args.repeat))
                 for b, mod in backends.items()}
        for b, t in times.items():
            speedup = times["python"] / t if "python" in times else float("nan")
            print(f"{name:<42} {b:<9} {t * 1e3:>10.2f}ms {speedup:>7.1f}x")
    return status


if __name__ == "__main__":
    sys.exit(main())
