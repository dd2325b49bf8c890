"""Undirected simple graph in CSR form, plus the degree-then-ID total order.

Node IDs from the input file are remapped to dense internal indices in
first-appearance order.  Adjacency lists are stored sorted by internal
index; the total order keeps a second copy of each list sorted by rank so
that the order-restricted neighbor set N_{u,v} is a contiguous suffix.
"""

from __future__ import annotations

import hashlib
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGraphError, GraphParseError


@dataclass
class Graph:
    node_count: int
    edge_count: int
    indptr: np.ndarray       # int64, len node_count + 1
    indices: np.ndarray      # int64, len 2 * edge_count, sorted per block
    degrees: np.ndarray      # int64
    external_ids: np.ndarray  # int64, internal index -> original file ID
    _adj_sets: list | None = field(default=None, repr=False)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        if self.degrees[u] > self.degrees[v]:
            u, v = v, u
        lo, hi = self.indptr[u], self.indptr[u + 1]
        i = np.searchsorted(self.indices[lo:hi], v)
        return i < hi - lo and self.indices[lo + i] == v

    def neighbor_position(self, v: int, u: int) -> int:
        """Index of u inside the sorted adjacency list of v."""
        lo, hi = self.indptr[v], self.indptr[v + 1]
        i = int(np.searchsorted(self.indices[lo:hi], u))
        if i >= hi - lo or self.indices[lo + i] != u:
            raise ValueError(f"{u} is not a neighbor of {v}")
        return i

    def adjacency_sets(self) -> list:
        """Per-node Python sets, built lazily; used by the enumeration oracle."""
        if self._adj_sets is None:
            self._adj_sets = [set(self.neighbors(v).tolist())
                              for v in range(self.node_count)]
        return self._adj_sets

    def edges(self):
        """Iterate undirected edges as (u, v) with u < v, sorted."""
        for u in range(self.node_count):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def write_normalized(self, stream) -> None:
        """One 'a b' pair per line in external IDs, a < b, lines sorted.

        Depends only on the labeled edge set, so the content hash is
        invariant to input line order and survives a reload.
        """
        pairs = sorted(tuple(sorted((int(self.external_ids[u]),
                                     int(self.external_ids[v]))))
                       for u, v in self.edges())
        for a, b in pairs:
            stream.write(f"{a} {b}\n")

    def normalized_text(self) -> str:
        buf = io.StringIO()
        self.write_normalized(buf)
        return buf.getvalue()

    def content_hash(self) -> str:
        return hashlib.sha256(self.normalized_text().encode()).hexdigest()

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        assert int(self.degrees.sum()) == 2 * self.edge_count
        for v in range(self.node_count):
            adj = self.neighbors(v)
            assert np.all(np.diff(adj) > 0), f"adjacency of {v} not strictly sorted"
            assert v not in adj, f"self-loop at {v}"
        for v in range(self.node_count):
            for u in self.neighbors(v):
                assert self.has_edge(int(u), v), f"asymmetric edge ({v},{u})"


def from_edges(pairs, external_ids=None) -> Graph:
    """Build a Graph from an iterable of (u, v) internal-index pairs.

    Self-loops and duplicates are dropped.  If external_ids is None the
    identity mapping over the referenced index range is used.
    """
    edge_set = set()
    max_node = -1
    for u, v in pairs:
        if u == v:
            continue
        if u > v:
            u, v = v, u
        edge_set.add((int(u), int(v)))
        max_node = max(max_node, v)
    n = max_node + 1
    if external_ids is not None:
        n = max(n, len(external_ids))
    return _assemble(n, edge_set,
                     np.arange(n, dtype=np.int64) if external_ids is None
                     else np.asarray(external_ids, dtype=np.int64))


def _assemble(n: int, edge_set: set, external_ids: np.ndarray) -> Graph:
    m = len(edge_set)
    deg = np.zeros(n, dtype=np.int64)
    for u, v in edge_set:
        deg[u] += 1
        deg[v] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(2 * m, dtype=np.int64)
    cursor = indptr[:-1].copy()
    for u, v in sorted(edge_set):
        indices[cursor[u]] = v
        cursor[u] += 1
        indices[cursor[v]] = u
        cursor[v] += 1
    for v in range(n):
        block = indices[indptr[v]:indptr[v + 1]]
        block.sort()
    return Graph(node_count=n, edge_count=m, indptr=indptr, indices=indices,
                 degrees=deg, external_ids=external_ids)


def load_edge_list(source) -> Graph:
    """Parse a SNAP-style edge list (path, text stream, or string content).

    Lines starting with '#' are comments; data lines hold two integer IDs.
    Directions, duplicates, and self-loops are removed; internal indices
    are assigned densely in first-appearance order.
    """
    if isinstance(source, str) and "\n" not in source:
        with open(source, "r") as fh:
            return load_edge_list(fh)
    if isinstance(source, str):
        source = io.StringIO(source)

    remap: dict[int, int] = {}
    external: list[int] = []
    edge_set: set[tuple[int, int]] = set()

    def intern(ext: int) -> int:
        idx = remap.get(ext)
        if idx is None:
            idx = len(external)
            remap[ext] = idx
            external.append(ext)
        return idx

    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected two fields, got {len(parts)}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer token in {line!r}", lineno) from None
        u, v = intern(a), intern(b)
        if u == v:
            continue
        edge_set.add((min(u, v), max(u, v)))

    if not external or not edge_set:
        raise EmptyGraphError("edge list contains no usable edges")
    return _assemble(len(external), edge_set,
                     np.asarray(external, dtype=np.int64))


@dataclass
class TotalOrder:
    """Degree-then-internal-ID total order, with rank-sorted adjacency."""

    rank: np.ndarray             # int64 permutation values; u > v iff rank[u] > rank[v]
    order_adj: np.ndarray        # neighbors re-sorted by ascending rank, CSR-aligned
    order_adj_rank: np.ndarray   # ranks of order_adj entries

    def succ(self, u: int, v: int) -> bool:
        return self.rank[u] > self.rank[v]


def build_total_order(graph: Graph) -> TotalOrder:
    """u > v iff d_u > d_v, ties broken by larger internal index."""
    perm = np.lexsort((np.arange(graph.node_count), graph.degrees))
    rank = np.empty(graph.node_count, dtype=np.int64)
    rank[perm] = np.arange(graph.node_count)

    order_adj = np.empty_like(graph.indices)
    order_adj_rank = np.empty_like(graph.indices)
    for v in range(graph.node_count):
        lo, hi = graph.indptr[v], graph.indptr[v + 1]
        block = graph.indices[lo:hi]
        r = rank[block]
        o = np.argsort(r)
        order_adj[lo:hi] = block[o]
        order_adj_rank[lo:hi] = r[o]
    return TotalOrder(rank=rank, order_adj=order_adj, order_adj_rank=order_adj_rank)


def restricted_neighbors(graph: Graph, order: TotalOrder, u: int, v: int) -> np.ndarray:
    """N_{u,v}: neighbors of u with rank above v, ascending by rank."""
    if not (0 <= u < graph.node_count and 0 <= v < graph.node_count):
        raise IndexError("node index out of range")
    lo, hi = graph.indptr[u], graph.indptr[u + 1]
    i = np.searchsorted(order.order_adj_rank[lo:hi], order.rank[v], side="right")
    return order.order_adj[lo + i:hi]


def restricted_degree(graph: Graph, order: TotalOrder, u: int, v: int) -> int:
    """d_{u,v} = |N_{u,v}| in O(log d_u)."""
    if not (0 <= u < graph.node_count and 0 <= v < graph.node_count):
        raise IndexError("node index out of range")
    lo, hi = graph.indptr[u], graph.indptr[u + 1]
    i = np.searchsorted(order.order_adj_rank[lo:hi], order.rank[v], side="right")
    return int(hi - lo - i)
