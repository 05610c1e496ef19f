"""Compiled versus numpy fallback kernels.

    python3 benchmarks/bench_kernels.py [--n 2048] [--d 32] [--p 125] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from gfsc import SimplifiedSbm, _backend, design, draw_signals, fast_filter, laplacian
from gfsc import sample_adjacency


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--d", type=int, default=32)
    ap.add_argument("--p", type=int, default=125)
    ap.add_argument("--jacobi-n", type=int, default=96)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    g = sample_adjacency(SimplifiedSbm(4, args.n // 4, 0.3, 0.1).population(), 0)
    r = draw_signals(g.n, args.d, 0).matrix
    f = design(0.3, args.p)
    a = np.random.default_rng(0).standard_normal((args.jacobi_n, args.jacobi_n))
    a = a + a.T
    print(f"graph n={g.n} edges={g.n_edges}, signals d={args.d}, order p={args.p}")
    print(f"{'kernel':<28}" + "".join(f"{b:>12}" for b in _backend.AVAILABLE))

    rows = {}
    for name in _backend.AVAILABLE:
        lap = laplacian(g, backend=name)
        mod = _backend.resolve(name)
        rows.setdefault("lap_matmat", []).append(best_of(lambda: lap.matmat(r), args.repeat))
        rows.setdefault(f"fast_filter (p={args.p})", []).append(
            best_of(lambda: fast_filter(lap, f, r), args.repeat))
        rows.setdefault(f"jacobi_eigh (n={args.jacobi_n})", []).append(
            best_of(lambda: mod.jacobi_eigh(a.copy()), args.repeat))
    for label, times in rows.items():
        line = f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"   x{times[1] / times[0]:.1f}"
        print(line)


if __name__ == "__main__":
    main()
