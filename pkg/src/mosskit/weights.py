"""Per-node sampling weights, cumulative arrays, and sampling primitives.

All weights are exact unsigned 64-bit integers and every draw is a uniform
integer in [1, total] resolved by binary search, so the sampling path
contains no floating point.  Accumulation overflow raises instead of
wrapping.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (EmptySupportError, NoEligibleStructureError,
                     WeightOverflowError)
from .graph import Graph, TotalOrder

_U64_MAX = (1 << 64) - 1


@dataclass
class WeightIndex:
    graph: Graph
    order: TotalOrder

    # per-node weights (int64 arrays; globals kept as exact Python ints)
    gamma: np.ndarray          # (d_v-1) * sum_{x in N_v}(d_x-1)
    gamma_check: np.ndarray    # sum_{x in N_v} d_{v,x} d_{x,v}
    gamma1: np.ndarray         # (d_v-1)(d_v-2) * sum(d_x-1)
    gamma2: np.ndarray         # (sum(d_x-1))^2 - sum((d_x-1)^2)
    sigma_sum: np.ndarray      # sum_{x in N_v}(d_x-1)
    sigma_max: np.ndarray      # max_{x in N_v}(d_x-1)

    total_gamma: int
    total_gamma_check: int
    total_gamma1: int
    total_gamma2: int
    lambda3: int
    lambda4: int

    # global cumulative arrays over nodes (uint64)
    acc_gamma: np.ndarray
    acc_gamma_check: np.ndarray
    acc_gamma1: np.ndarray
    acc_gamma2: np.ndarray

    # per-node cumulative arrays, CSR-aligned with graph.indptr
    acc_sigma: np.ndarray        # prefix sums of d_x-1 over index-sorted adjacency
    acc_sigma_check: np.ndarray  # prefix sums of d_{u,v}*d_{v,u} over rank-sorted adjacency

    # neighbor weights used by the tau rejection sampler
    tau_fallback: np.ndarray     # bool: one neighbor holds more than half the sigma weight

    def weight_array(self, which: str) -> tuple[np.ndarray, int]:
        table = {"gamma": (self.acc_gamma, self.total_gamma),
                 "gamma_check": (self.acc_gamma_check, self.total_gamma_check),
                 "gamma1": (self.acc_gamma1, self.total_gamma1),
                 "gamma2": (self.acc_gamma2, self.total_gamma2)}
        if which not in table:
            raise ValueError(f"unknown weight family {which!r}")
        return table[which]

    def constants(self) -> dict:
        return {"gamma": self.total_gamma, "gamma_check": self.total_gamma_check,
                "gamma1": self.total_gamma1, "gamma2": self.total_gamma2,
                "lambda3": self.lambda3, "lambda4": self.lambda4}


def _segment_sums(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    cs = np.concatenate(([0], np.cumsum(values, dtype=np.int64)))
    return cs[indptr[1:]] - cs[indptr[:-1]]


def _checked_total(per_node: np.ndarray, name: str) -> int:
    total = int(sum(int(x) for x in per_node))
    if total > _U64_MAX:
        raise WeightOverflowError(name)
    return total


def _acc_u64(per_node: np.ndarray, name: str) -> np.ndarray:
    total = _checked_total(per_node, name)
    acc = np.cumsum(per_node.astype(np.uint64, copy=False), dtype=np.uint64)
    if int(acc[-1]) != total:
        raise WeightOverflowError(name)
    return acc


def build_weight_index(graph: Graph, order: TotalOrder) -> WeightIndex:
    deg = graph.degrees
    n = graph.node_count
    indptr, indices = graph.indptr, graph.indices

    # Per-node sums stay well inside int64 at desk scale; verify loudly.
    w = deg[indices] - 1                       # d_x - 1 per adjacency slot
    sigma_sum = _segment_sums(w, indptr)
    if sigma_sum.size and int(sigma_sum.max()) > 3_000_000_000:
        raise WeightOverflowError("per-node sigma sums (graph too large for int64 squares)")
    sq_sum = _segment_sums(w * w, indptr)
    sigma_max = np.zeros(n, dtype=np.int64)
    for v in range(n):
        lo, hi = indptr[v], indptr[v + 1]
        if hi > lo:
            sigma_max[v] = int(w[lo:hi].max())

    gamma = (deg - 1) * sigma_sum
    gamma1 = (deg - 1) * (deg - 2) * sigma_sum
    gamma1[deg < 2] = 0
    gamma2 = sigma_sum * sigma_sum - sq_sum

    # Centered weights d_{u,v} * d_{v,u} per rank-sorted adjacency slot.
    rank_adj, rank_adj_rank = order.order_adj, order.order_adj_rank
    rank = order.rank
    d_vu = np.empty_like(indices)   # d_{v,u}: suffix length after u in v's list
    for v in range(n):
        lo, hi = indptr[v], indptr[v + 1]
        d_vu[lo:hi] = (hi - lo) - 1 - np.arange(hi - lo)
    d_uv = np.empty_like(indices)   # d_{u,v}: rank[v] position in u's list
    for v in range(n):
        lo, hi = indptr[v], indptr[v + 1]
        for k in range(lo, hi):
            u = rank_adj[k]
            lu, hu = indptr[u], indptr[u + 1]
            pos = np.searchsorted(rank_adj_rank[lu:hu], rank[v], side="right")
            d_uv[k] = (hu - lu) - pos
    check_w = d_uv * d_vu
    gamma_check = _segment_sums(check_w, indptr)

    lambda3 = sum(comb(int(d), 3) for d in deg)
    lambda4 = sum(comb(int(d), 4) for d in deg)
    if lambda3 > _U64_MAX:
        raise WeightOverflowError("Lambda_3")
    if lambda4 > _U64_MAX:
        raise WeightOverflowError("Lambda_4")

    index = WeightIndex(
        graph=graph, order=order,
        gamma=gamma, gamma_check=gamma_check, gamma1=gamma1, gamma2=gamma2,
        sigma_sum=sigma_sum, sigma_max=sigma_max,
        total_gamma=_checked_total(gamma, "Gamma"),
        total_gamma_check=_checked_total(gamma_check, "Gamma_check"),
        total_gamma1=_checked_total(gamma1, "Gamma^(1)"),
        total_gamma2=_checked_total(gamma2, "Gamma^(2)"),
        lambda3=lambda3, lambda4=lambda4,
        acc_gamma=_acc_u64(gamma, "ACC_Gamma"),
        acc_gamma_check=_acc_u64(gamma_check, "ACC_Gamma_check"),
        acc_gamma1=_acc_u64(gamma1, "ACC_Gamma^(1)"),
        acc_gamma2=_acc_u64(gamma2, "ACC_Gamma^(2)"),
        acc_sigma=_csr_cumsum(w, indptr),
        acc_sigma_check=_csr_cumsum(check_w, indptr),
        tau_fallback=(2 * sigma_max > sigma_sum),
    )
    return index


def _csr_cumsum(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    acc = np.cumsum(values.astype(np.uint64, copy=False), dtype=np.uint64)
    # make each block's prefix sums local by subtracting the block base
    out = acc.copy()
    for v in range(len(indptr) - 1):
        lo, hi = indptr[v], indptr[v + 1]
        if hi > lo and lo > 0:
            out[lo:hi] -= acc[lo - 1]
    return out


# ---------------------------------------------------------------------------
# Sampling primitives.  Each takes `draw(label, n) -> int in [1, n]` so the
# same code path serves fresh RNG draws, tape recording, and tape replay.
# ---------------------------------------------------------------------------

def sample_node_by_weight(index: WeightIndex, which: str, draw) -> int:
    acc, total = index.weight_array(which)
    if total == 0:
        raise NoEligibleStructureError(
            f"global weight {which} is zero: the motif family has frequency 0")
    rnd = draw("root", total)
    return int(np.searchsorted(acc, np.uint64(rnd), side="left"))


def sample_neighbor_sigma(index: WeightIndex, v: int, draw) -> tuple[int, int]:
    """Neighbor u of v with probability (d_u-1)/sigma_sum[v]; returns (u, pos)."""
    total = int(index.sigma_sum[v])
    if total == 0:
        raise EmptySupportError(f"all neighbors of {v} have degree 1")
    g = index.graph
    lo, hi = g.indptr[v], g.indptr[v + 1]
    rnd = draw("u", total)
    pos = int(np.searchsorted(index.acc_sigma[lo:hi], np.uint64(rnd), side="left"))
    return int(g.indices[lo + pos]), pos


def sample_neighbor_sigma_check(index: WeightIndex, v: int, draw) -> tuple[int, int]:
    """Neighbor u of v with probability d_{u,v} d_{v,u} / gamma_check[v].

    Position is into the rank-sorted adjacency of v.
    """
    total = int(index.gamma_check[v])
    if total == 0:
        raise EmptySupportError(f"node {v} has zero centered weight")
    g = index.graph
    lo, hi = g.indptr[v], g.indptr[v + 1]
    rnd = draw("u", total)
    pos = int(np.searchsorted(index.acc_sigma_check[lo:hi], np.uint64(rnd), side="left"))
    return int(index.order.order_adj[lo + pos]), pos


def sample_neighbor_tau(index: WeightIndex, v: int, draw) -> tuple[int, int]:
    """Neighbor u with probability (d_u-1)(sigma_sum - (d_u-1)) / gamma2[v].

    Rejection on the sigma distribution; falls back to a linear scan when a
    single neighbor holds more than half the sigma weight.
    """
    g2 = int(index.gamma2[v])
    if g2 == 0:
        raise EmptySupportError(f"node {v} has zero two-step weight")
    g = index.graph
    total = int(index.sigma_sum[v])
    lo, hi = g.indptr[v], g.indptr[v + 1]
    if index.tau_fallback[v]:
        rnd = draw("u_scan", g2)
        running = 0
        for pos in range(hi - lo):
            wx = int(g.degrees[g.indices[lo + pos]]) - 1
            running += wx * (total - wx)
            if rnd <= running:
                return int(g.indices[lo + pos]), pos
        raise AssertionError("tau scan fell off the end")
    while True:
        rnd = draw("u", total)
        pos = int(np.searchsorted(index.acc_sigma[lo:hi], np.uint64(rnd), side="left"))
        wu = int(g.degrees[g.indices[lo + pos]]) - 1
        if draw("u_accept", total) > wu:
            return int(g.indices[lo + pos]), pos


def sample_neighbor_mu_excluding(index: WeightIndex, v: int, u_pos: int, draw) -> tuple[int, int]:
    """Neighbor w != u with probability (d_w-1)/(sigma_sum - (d_u-1)).

    Draws from the cumulative range with u's sub-interval excluded.
    """
    g = index.graph
    lo, hi = g.indptr[v], g.indptr[v + 1]
    wu = int(g.degrees[g.indices[lo + u_pos]]) - 1
    total = int(index.sigma_sum[v]) - wu
    if total <= 0:
        raise EmptySupportError(f"no positive-weight neighbor of {v} besides the excluded one")
    rnd = draw("w", total)
    hole_lo = int(index.acc_sigma[lo + u_pos - 1]) if u_pos > 0 else 0
    if rnd > hole_lo:
        rnd += wu
    pos = int(np.searchsorted(index.acc_sigma[lo:hi], np.uint64(rnd), side="left"))
    return int(g.indices[lo + pos]), pos


def sample_position_excluding(d: int, excluded_positions, draw, label: str) -> int:
    """Uniform 0-based position in [0, d) avoiding the excluded positions."""
    excl = sorted(set(excluded_positions))
    m = len(excl)
    if d - m <= 0:
        raise EmptySupportError("no neighbor left to sample after exclusions")
    j = draw(label, d - m) - 1
    for p in excl:
        if j >= p:
            j += 1
    return j


def sample_uniform_excluding(graph: Graph, v: int, excluded_nodes, draw, label: str = "x") -> int:
    """Uniform node from N_v minus the excluded nodes (at most two)."""
    lo = graph.indptr[v]
    excl_pos = [graph.neighbor_position(v, int(x)) for x in excluded_nodes
                if graph.has_edge(v, int(x))]
    pos = sample_position_excluding(int(graph.degrees[v]), excl_pos, draw, label)
    return int(graph.indices[lo + pos])


# ---------------------------------------------------------------------------
# Binary cache: magic header, version byte, then little-endian u64 arrays.
# ---------------------------------------------------------------------------

_CACHE_MAGIC = b"MOSSWIDX"
_CACHE_VERSION = 1


def save_index_cache(index: WeightIndex, path: str) -> None:
    g = index.graph
    arrays = [
        g.indptr.astype("<u8"), g.indices.astype("<u8"),
        g.degrees.astype("<u8"), g.external_ids.astype("<u8"),
        index.order.rank.astype("<u8"),
        index.acc_gamma.astype("<u8"), index.acc_gamma_check.astype("<u8"),
        index.acc_gamma1.astype("<u8"), index.acc_gamma2.astype("<u8"),
        index.acc_sigma.astype("<u8"), index.acc_sigma_check.astype("<u8"),
    ]
    content_hash = bytes.fromhex(g.content_hash())
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<B", _CACHE_VERSION))
        fh.write(content_hash)
        fh.write(struct.pack("<QQ", g.node_count, g.edge_count))
        fh.write(struct.pack("<B", len(arrays)))
        for arr in arrays:
            fh.write(struct.pack("<Q", arr.size))
            fh.write(arr.tobytes())


def load_index_cache(path: str, expected_hash: str | None = None):
    """Returns (content_hash_hex, list of uint64 arrays); validates header."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _CACHE_MAGIC:
            raise ValueError("not a weight-index cache file")
        (version,) = struct.unpack("<B", fh.read(1))
        if version != _CACHE_VERSION:
            raise ValueError(f"unsupported cache version {version}")
        content_hash = fh.read(32).hex()
        if expected_hash is not None and content_hash != expected_hash:
            raise ValueError("cache content hash does not match the graph")
        node_count, edge_count = struct.unpack("<QQ", fh.read(16))
        (narr,) = struct.unpack("<B", fh.read(1))
        arrays = []
        for _ in range(narr):
            (size,) = struct.unpack("<Q", fh.read(8))
            arrays.append(np.frombuffer(fh.read(8 * size), dtype="<u8").copy())
    return content_hash, (node_count, edge_count), arrays
