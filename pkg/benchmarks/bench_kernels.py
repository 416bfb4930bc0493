"""Time the numba and numpy graph kernels on seeded random networks.

    python3 benchmarks/bench_kernels.py --nodes 4000 --edges 20000 --repeat 3
"""

import argparse
import time

import numpy as np

from vcnet.kernels import _numba, _numpy


def random_csr(n, m, seed):
    rng = np.random.default_rng(seed)
    pairs = set()
    while len(pairs) < m:
        a, b = rng.integers(n, size=2)
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    src, dst = np.array(sorted(pairs)).T
    w = rng.integers(1, 4, size=len(src)).astype(np.float64)
    rows = np.concatenate([src, dst])
    cols = np.concatenate([dst, src])
    vals = np.concatenate([w, w])
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr), cols.astype(np.int64), vals


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=4000)
    ap.add_argument("--edges", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    indptr, indices, weights = random_csr(args.nodes, args.edges, args.seed)
    keep = np.diff(indptr) > 0
    print(f"graph: {args.nodes} nodes, {args.edges} edges, {int((~keep).sum())} isolates")

    # warm-up triggers (or loads cached) JIT compilation
    t0 = time.perf_counter()
    _numba.bfs_centrality(indptr, indices, True)
    print(f"numba first call (incl. compile/cache load): {time.perf_counter() - t0:.2f}s")

    results = {}
    for name, mod in (("numba", _numba), ("numpy", _numpy)):
        t_bfs, (harm, bc) = best_of(lambda: mod.bfs_centrality(indptr, indices, True), args.repeat)
        if keep.all():
            t_con, con = best_of(lambda: mod.burt_constraint(indptr, indices, weights), args.repeat)
        else:
            t_con, con = float("nan"), None
        results[name] = (harm, bc, con)
        print(f"{name:>6}: closeness+betweenness {t_bfs:7.3f}s   constraint {t_con:7.3f}s")

    a, b = results["numba"], results["numpy"]
    diff = max(np.max(np.abs(a[0] - b[0])), np.max(np.abs(a[1] - b[1]) / max(1.0, np.max(np.abs(a[1])))))
    print(f"max backend disagreement: {diff:.1e}")


if __name__ == "__main__":
    main()
