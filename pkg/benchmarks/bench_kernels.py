"""Time the compiled PPR affinity kernel against the numpy fallback.

    python benchmarks/bench_kernels.py [--orders 10 25 50 100] [--repeat 20]
"""
import argparse
import statistics
import sys
import timeit

import numpy as np

from inetsim import _pure
from inetsim.netsim import _csr

try:
    from inetsim import _kernels
except ImportError:
    _kernels = None


def random_graph(order, density, seed):
    rng = np.random.default_rng(seed)
    index = tuple(f"Q{k}" for k in range(order))
    arcs = {(u, v) for u in index for v in index if u != v and rng.random() < density}
    return index, arcs


def bench(impl, n, indptr, indices, repeat):
    call = lambda: impl.ppr_affinity(n, indptr, indices, 0.85, 1e-10, 1000)  # noqa: E731
    call()
    return statistics.median(timeit.repeat(call, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--orders", type=int, nargs="+", default=[10, 25, 50, 100, 200])
    parser.add_argument("--density", type=float, default=0.1)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; only the fallback is available", file=sys.stderr)
    print(f"{'order':>6} {'arcs':>6} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for order in args.orders:
        index, arcs = random_graph(order, args.density, order)
        indptr, indices = _csr(index, arcs)
        t_py = bench(_pure, order, indptr, indices, args.repeat)
        if _kernels is None:
            print(f"{order:>6} {len(arcs):>6} {t_py * 1e3:>10.3f} {'-':>10} {'-':>8}")
            continue
        a, _ = _kernels.ppr_affinity(order, indptr, indices, 0.85, 1e-10, 1000)
        b, _ = _pure.ppr_affinity(order, indptr, indices, 0.85, 1e-10, 1000)
        assert np.allclose(a, b, atol=1e-12)
        t_cy = bench(_kernels, order, indptr, indices, args.repeat)
        print(f"{order:>6} {len(arcs):>6} {t_py * 1e3:>10.3f} {t_cy * 1e3:>10.3f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
