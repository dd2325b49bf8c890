"""Backend selection: compiled kernels when available, pure Python otherwise.

The compiled extension implements the hot trial loops and the CIS
enumeration inner loop with the same PRNG and draw sequence as the Python
code, so both backends produce identical results for a fixed seed.
"""

from __future__ import annotations

import numpy as np

try:
    from . import _kernels
    HAVE_KERNELS = True
except ImportError:
    _kernels = None
    HAVE_KERNELS = False


_METHOD_CODES = {"moss4": 0, "moss4min": 1, "t5": 2, "path5": 3}


def run_kernel(method, graph, index, catalog, budget, rng):
    from .samplers import Tally
    code = _METHOD_CODES[method]
    hits = np.zeros(22, dtype=np.int64)
    counters = np.zeros(2, dtype=np.int64)   # degenerate, non_credited
    state = np.array(rng.state, dtype=np.uint64)
    _kernels.run_sampler(
        code, budget,
        graph.indptr, graph.indices, graph.degrees,
        index.order.order_adj, index.order.order_adj_rank, index.order.rank,
        index.acc_gamma, index.acc_gamma_check, index.acc_gamma1, index.acc_gamma2,
        index.acc_sigma, index.acc_sigma_check,
        index.sigma_sum, index.gamma_check, index.gamma2,
        index.tau_fallback.astype(np.uint8),
        np.uint64(index.total_gamma), np.uint64(index.total_gamma_check),
        np.uint64(index.total_gamma1), np.uint64(index.total_gamma2),
        catalog.mask_to_id4, catalog.mask_to_id5,
        state, hits, counters)
    rng.state = tuple(int(x) for x in state)
    tally = Tally(method, budget,
                  {i: int(hits[i]) for i in range(22) if hits[i]},
                  int(counters[0]), int(counters[1]))
    tally.check_budget()
    return tally


def enumerate_kernel(graph, k, catalog, cap):
    """Returns (per-class counts array, total). Raises if count exceeds cap."""
    counts = np.zeros(22, dtype=np.int64)
    n_found = _kernels.enumerate_cis(
        k, graph.indptr, graph.indices,
        catalog.mask_to_id4, catalog.mask_to_id5, np.int64(cap), counts)
    return counts, int(n_found)
