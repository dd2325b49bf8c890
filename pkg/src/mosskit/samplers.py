"""The four weighted CIS samplers: MOSS-4, MOSS-4Min, T-5, and Path-5.

Every trial consumes a fixed sequence of labeled integer draws, so runs
can be taped and replayed bit-for-bit (see vertexsim), and the compiled
kernels consume the identical stream for the same seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .catalog import MotifCatalog
from .errors import InapplicableMethodError
from .graph import Graph, TotalOrder
from .rng import TapeRecorder, Xoshiro256, derive_stream_seed, make_draw
from .weights import (WeightIndex, sample_neighbor_mu_excluding,
                      sample_neighbor_sigma, sample_neighbor_sigma_check,
                      sample_neighbor_tau, sample_node_by_weight,
                      sample_position_excluding)

CREDITED_MIN_CLASSES = (3, 5, 6)


@dataclass
class Tally:
    method: str
    budget: int
    hits: dict[int, int] = field(default_factory=dict)
    degenerate: int = 0
    non_credited: int = 0   # MOSS-4Min: valid 4-node CIS outside classes {3,5,6}

    def record_hit(self, motif_id: int) -> None:
        self.hits[motif_id] = self.hits.get(motif_id, 0) + 1

    def total_hits(self) -> int:
        return sum(self.hits.values())

    def check_budget(self) -> None:
        assert self.total_hits() + self.degenerate + self.non_credited == self.budget

    def __add__(self, other: "Tally") -> "Tally":
        if self.method != other.method:
            raise ValueError("cannot merge tallies from different methods")
        merged = Tally(self.method, self.budget + other.budget,
                       dict(self.hits), self.degenerate + other.degenerate,
                       self.non_credited + other.non_credited)
        for i, c in other.hits.items():
            merged.hits[i] = merged.hits.get(i, 0) + c
        return merged

    def to_json_obj(self) -> dict:
        return {"method": self.method, "budget": self.budget,
                "hits": {str(i): c for i, c in sorted(self.hits.items())},
                "degenerate": self.degenerate, "non_credited": self.non_credited}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Tally":
        return cls(obj["method"], obj["budget"],
                   {int(i): c for i, c in obj["hits"].items()},
                   obj["degenerate"], obj.get("non_credited", 0))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _mask4(g: Graph, v, u, w, r) -> int:
    # slots (v,u,w,r); pair bit order (01,02,03,12,13,23)
    mask = (1 << 0) | (1 << 1) | (1 << 4)  # v-u, v-w, u-r present by construction
    if g.has_edge(v, r):
        mask |= 1 << 2
    if g.has_edge(u, w):
        mask |= 1 << 3
    if g.has_edge(w, r):
        mask |= 1 << 5
    return mask


def _run_loop(graph, index, catalog, budget, rng, tape, trial_fn, method):
    tally = Tally(method, budget)
    for _ in range(budget):
        if tape is not None:
            tape.begin_trial()
        draw = make_draw(rng, tape)
        trial_fn(graph, index, catalog, draw, tally)
    tally.check_budget()
    return tally


def _moss4_trial(g: Graph, index: WeightIndex, catalog: MotifCatalog, draw, tally):
    v = sample_node_by_weight(index, "gamma", draw)
    u, u_pos = sample_neighbor_sigma(index, v, draw)
    lo_v, lo_u = g.indptr[v], g.indptr[u]
    w_pos = sample_position_excluding(int(g.degrees[v]), (u_pos,), draw, "w")
    w = int(g.indices[lo_v + w_pos])
    v_pos_in_u = g.neighbor_position(u, v)
    r_pos = sample_position_excluding(int(g.degrees[u]), (v_pos_in_u,), draw, "r")
    r = int(g.indices[lo_u + r_pos])
    if r == w:
        tally.degenerate += 1
        return
    tally.record_hit(catalog.classify4_mask(_mask4(g, v, u, w, r)))


def _moss4min_trial(g: Graph, index: WeightIndex, catalog: MotifCatalog, draw, tally):
    order = index.order
    v = sample_node_by_weight(index, "gamma_check", draw)
    u, u_pos = sample_neighbor_sigma_check(index, v, draw)   # pos in rank-sorted list
    lo_v, hi_v = g.indptr[v], g.indptr[v + 1]
    d_vu = int(hi_v - lo_v) - 1 - u_pos
    j = draw("w", d_vu)
    w = int(order.order_adj[lo_v + u_pos + j])
    lo_u, hi_u = g.indptr[u], g.indptr[u + 1]
    pos_v = int(np.searchsorted(order.order_adj_rank[lo_u:hi_u],
                                order.rank[v], side="right"))
    d_uv = int(hi_u - lo_u) - pos_v
    j = draw("r", d_uv)
    r = int(order.order_adj[lo_u + pos_v + j - 1])
    if r == w:
        tally.degenerate += 1
        return
    mask = _mask4(g, v, u, w, r)
    motif = catalog.classify4_mask(mask)
    # credit only when the sampled w-r pair is adjacent: cycles and cliques
    # always are, and this keeps each diamond's number of crediting tuples
    # at exactly 2 under any node order
    if motif in CREDITED_MIN_CLASSES and (mask >> 5) & 1:
        tally.record_hit(motif)
    else:
        tally.non_credited += 1


def _mask5_t5(g: Graph, v, u, w, r, t) -> int:
    # slots (v,u,w,r,t); pair bits (01,02,03,04,12,13,14,23,24,34)
    mask = (1 << 0) | (1 << 1) | (1 << 2) | (1 << 6)  # v-u, v-w, v-r, u-t
    if g.has_edge(v, t):
        mask |= 1 << 3
    if g.has_edge(u, w):
        mask |= 1 << 4
    if g.has_edge(u, r):
        mask |= 1 << 5
    if g.has_edge(w, r):
        mask |= 1 << 7
    if g.has_edge(w, t):
        mask |= 1 << 8
    if g.has_edge(r, t):
        mask |= 1 << 9
    return mask


def _t5_trial(g: Graph, index: WeightIndex, catalog: MotifCatalog, draw, tally):
    v = sample_node_by_weight(index, "gamma1", draw)
    u, u_pos = sample_neighbor_sigma(index, v, draw)
    lo_v = g.indptr[v]
    w_pos = sample_position_excluding(int(g.degrees[v]), (u_pos,), draw, "w")
    w = int(g.indices[lo_v + w_pos])
    r_pos = sample_position_excluding(int(g.degrees[v]), (u_pos, w_pos), draw, "r")
    r = int(g.indices[lo_v + r_pos])
    v_pos_in_u = g.neighbor_position(u, v)
    t_pos = sample_position_excluding(int(g.degrees[u]), (v_pos_in_u,), draw, "t")
    t = int(g.indices[g.indptr[u] + t_pos])
    if t == w or t == r:
        tally.degenerate += 1
        return
    tally.record_hit(catalog.classify5_mask(_mask5_t5(g, v, u, w, r, t)))


def _mask5_path5(g: Graph, v, u, w, r, t) -> int:
    mask = (1 << 0) | (1 << 1) | (1 << 5) | (1 << 8)  # v-u, v-w, u-r, w-t
    if g.has_edge(v, r):
        mask |= 1 << 2
    if g.has_edge(v, t):
        mask |= 1 << 3
    if g.has_edge(u, w):
        mask |= 1 << 4
    if g.has_edge(u, t):
        mask |= 1 << 6
    if g.has_edge(w, r):
        mask |= 1 << 7
    if g.has_edge(r, t):
        mask |= 1 << 9
    return mask


def _path5_trial(g: Graph, index: WeightIndex, catalog: MotifCatalog, draw, tally):
    v = sample_node_by_weight(index, "gamma2", draw)
    u, u_pos = sample_neighbor_tau(index, v, draw)
    w, _ = sample_neighbor_mu_excluding(index, v, u_pos, draw)
    v_pos_in_u = g.neighbor_position(u, v)
    r_pos = sample_position_excluding(int(g.degrees[u]), (v_pos_in_u,), draw, "r")
    r = int(g.indices[g.indptr[u] + r_pos])
    v_pos_in_w = g.neighbor_position(w, v)
    t_pos = sample_position_excluding(int(g.degrees[w]), (v_pos_in_w,), draw, "t")
    t = int(g.indices[g.indptr[w] + t_pos])
    if t == u or r == w or t == r:
        tally.degenerate += 1
        return
    tally.record_hit(catalog.classify5_mask(_mask5_path5(g, v, u, w, r, t)))


_METHODS = {
    "moss4": ("gamma", "graph contains no 3-path", _moss4_trial),
    "moss4min": ("gamma_check", "graph contains no centered 3-path under the node order",
                 _moss4min_trial),
    "t5": ("gamma1", "graph contains no fork-tree", _t5_trial),
    "path5": ("gamma2", "graph contains no 5-path center", _path5_trial),
}


def run_sampler(method: str, graph: Graph, index: WeightIndex, catalog: MotifCatalog,
                budget: int, rng: Xoshiro256, tape: TapeRecorder | None = None,
                backend: str = "auto") -> Tally:
    """Run `budget` independent trials of one sampling method."""
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    which, err, trial_fn = _METHODS[method]
    _, total = index.weight_array(which)
    if total == 0:
        raise InapplicableMethodError(err)
    use_kernel = (backend == "cython" or
                  (backend == "auto" and _backend.HAVE_KERNELS)) and tape is None
    if backend == "cython" and not _backend.HAVE_KERNELS:
        raise RuntimeError("compiled kernels are not available")
    if use_kernel:
        return _backend.run_kernel(method, graph, index, catalog, budget, rng)
    return _run_loop(graph, index, catalog, budget, rng, tape, trial_fn, method)


def moss4_run(graph, index, catalog, budget, rng, **kw) -> Tally:
    return run_sampler("moss4", graph, index, catalog, budget, rng, **kw)


def moss4min_run(graph, index, order: TotalOrder, catalog, budget, rng, **kw) -> Tally:
    if order is not index.order:
        raise ValueError("order does not match the one the index was built with")
    return run_sampler("moss4min", graph, index, catalog, budget, rng, **kw)


def t5_run(graph, index, catalog, budget, rng, **kw) -> Tally:
    return run_sampler("t5", graph, index, catalog, budget, rng, **kw)


def path5_run(graph, index, catalog, budget, rng, **kw) -> Tally:
    return run_sampler("path5", graph, index, catalog, budget, rng, **kw)


def run_partitioned(method: str, graph: Graph, index: WeightIndex, catalog: MotifCatalog,
                    budget: int, master_seed: int, workers: int = 1,
                    backend: str = "auto") -> Tally:
    """Partition trials over `workers` RNG streams and merge the tallies.

    The result depends only on (master_seed, workers, budget), not on how
    the partitions are scheduled.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base, rem = divmod(budget, workers)
    parts = [base + (1 if i < rem else 0) for i in range(workers)]
    tallies = []
    for worker_id, part in enumerate(parts):
        if part == 0:
            continue
        rng = Xoshiro256(derive_stream_seed(master_seed, worker_id))
        tallies.append(run_sampler(method, graph, index, catalog, part, rng,
                                   backend=backend))
    out = tallies[0]
    for t in tallies[1:]:
        out = out + t
    return out
