#!/usr/bin/env python3
"""Benchmark the compiled sampling/enumeration kernels against pure Python.

Both backends consume the identical PRNG stream, so besides timing, the
script asserts that the tallies agree bit-for-bit for every method.

Usage:
    python3 bench/benchmark_backends.py [--nodes 300] [--budget 200000]
"""

import argparse
import random
import time

from mosskit import _backend
from mosskit.catalog import build_catalog
from mosskit.graph import build_total_order, load_edge_list
from mosskit.oracle import enumerate_cis
from mosskit.rng import Xoshiro256, derive_stream_seed
from mosskit.samplers import run_sampler
from mosskit.weights import build_weight_index


def ba_graph(n: int, m: int, seed: int):
    rng = random.Random(seed)
    targets = list(range(m))
    repeated = []
    edges = set()
    for v in range(m, n):
        for t in set(targets):
            edges.add((min(v, t), max(v, t)))
        repeated.extend(targets)
        repeated.extend([v] * m)
        targets = [rng.choice(repeated) for _ in range(m)]
    text = "\n".join(f"{a} {b}" for a, b in sorted(edges)) + "\n"
    return load_edge_list(text)


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nodes", type=int, default=300)
    ap.add_argument("--budget", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    if not _backend.HAVE_KERNELS:
        raise SystemExit("compiled kernels are not built; run "
                         "`pip install -e . --no-build-isolation` first")

    g = ba_graph(args.nodes, 3, args.seed)
    order = build_total_order(g)
    idx = build_weight_index(g, order)
    catalog = build_catalog()
    print(f"graph: preferential attachment, {g.node_count} nodes, "
          f"{g.edge_count} edges; budget {args.budget} trials/method")
    print()
    print(f"{'task':<16}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")

    for k, method in enumerate(("moss4", "moss4min", "t5", "path5")):
        seed = derive_stream_seed(args.seed, k)
        py, t_py = timed(lambda: run_sampler(
            method, g, idx, catalog, args.budget, Xoshiro256(seed),
            backend="python"))
        cy, t_cy = timed(lambda: run_sampler(
            method, g, idx, catalog, args.budget, Xoshiro256(seed),
            backend="cython"))
        assert py.to_json_obj() == cy.to_json_obj(), method
        print(f"{method:<16}{t_py:>12.3f}{t_cy:>12.3f}{t_py / t_cy:>9.1f}x")

    py, t_py = timed(lambda: enumerate_cis(g, 4, catalog, backend="python"))
    cy, t_cy = timed(lambda: enumerate_cis(g, 4, catalog, backend="cython"))
    assert py.counts == cy.counts
    print(f"{'enumerate k=4':<16}{t_py:>12.3f}{t_cy:>12.3f}{t_py / t_cy:>9.1f}x")
    py, t_py = timed(lambda: enumerate_cis(g, 5, catalog, backend="python"))
    cy, t_cy = timed(lambda: enumerate_cis(g, 5, catalog, backend="cython"))
    assert py.counts == cy.counts
    print(f"{'enumerate k=5':<16}{t_py:>12.3f}{t_cy:>12.3f}{t_py / t_cy:>9.1f}x")
    print("\nall tallies and counts identical across backends")


if __name__ == "__main__":
    main()
