"""Compare the compiled and pure-Python SGD kernels.

    python benchmarks/bench_kernels.py [--pairs N] [--dim D] [--repeat R]

Both backends run the same seeded workload on fresh copies of the tables;
the script reports the best wall time per backend, the speedup, and the
largest difference between the resulting tables.
"""
import argparse
import time

import numpy as np

from transembed import kernels
from transembed.bicvm import _csr


def sgns_workload(rng, pairs, dim, vocab=5000, k=5):
    cue = rng.uniform(-0.5 / dim, 0.5 / dim, (vocab, dim))
    ctx = rng.normal(scale=0.01, size=(vocab, dim))
    return (cue, ctx, rng.integers(1, vocab, pairs), rng.integers(1, vocab, pairs),
            rng.integers(1, vocab, (pairs, k)), np.full(pairs, 0.025))


def bicvm_workload(rng, pairs, dim, vocab=5000):
    src = rng.normal(scale=0.1, size=(vocab, dim))
    tgt = rng.normal(scale=0.1, size=(vocab, dim))
    sources = [rng.integers(1, vocab, rng.integers(3, 20)) for _ in range(pairs)]
    targets = [rng.integers(1, vocab, rng.integers(3, 20)) for _ in range(pairs)]
    so, si = _csr(sources)
    to, ti = _csr(targets)
    order = rng.permutation(pairs)
    noise = (order + rng.integers(1, pairs, pairs)) % pairs
    return src, tgt, so, si, to, ti, order, noise, np.full(pairs, 0.01), 1.0


def run(backend, name, workload, repeat):
    fn = getattr(kernels.get_backend(backend), name)
    best, tables = float("inf"), None
    for _ in range(repeat):
        args = [a.copy() if isinstance(a, np.ndarray) else a for a in workload]
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
        tables = args[:2]
    return best, tables


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--pairs", type=int, default=20_000)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the Python backend is available")
    print(f"{'kernel':<12}{'backend':<10}{'seconds':>10}{'pairs/s':>14}")
    for name, make, n in (("sgns_pass", sgns_workload, args.pairs),
                          ("bicvm_pass", bicvm_workload, max(2, args.pairs // 4))):
        workload = make(np.random.default_rng(args.seed), n, args.dim)
        results = {b: run(b, name, workload, args.repeat) for b in backends}
        for b, (sec, _) in results.items():
            print(f"{name:<12}{b:<10}{sec:>10.3f}{n / sec:>14,.0f}")
        if len(results) == 2:
            (fast, ft), (slow, st) = results["cython"], results["python"]
            gap = max(np.abs(a - b).max() for a, b in zip(ft, st))
            print(f"{'':<12}speedup {slow / fast:.1f}x, max table difference {gap:.1e}")


if __name__ == "__main__":
    main()
