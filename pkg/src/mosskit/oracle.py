"""Exact ground truth: CIS enumeration and non-induced pattern counts.

The enumerator uses exclusion-ordered expansion (each connected induced
subgraph is discovered exactly once from its minimum-index root), with an
all-subsets checker retained as its own oracle for tiny graphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from . import _backend
from .catalog import MotifCatalog
from .errors import ScaleCapError
from .graph import Graph

DEFAULT_CIS_CAP = 100_000_000


@dataclass
class ExactCounts:
    k: int
    counts: dict[int, int] = field(default_factory=dict)  # motif id -> frequency
    total: int = 0

    def as_array(self) -> np.ndarray:
        n = 6 if self.k == 4 else 21
        out = np.zeros(n + 1, dtype=np.int64)
        for i, c in self.counts.items():
            out[i] = c
        return out

    def to_json_obj(self) -> dict:
        return {"k": self.k, "total": self.total,
                "counts": {str(i): c for i, c in sorted(self.counts.items())}}

    @classmethod
    def from_json_obj(cls, obj) -> "ExactCounts":
        return cls(obj["k"], {int(i): c for i, c in obj["counts"].items()},
                   obj["total"])

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _mask_of(adj_sets, nodes) -> int:
    k = len(nodes)
    mask = 0
    bit = 0
    for i in range(k):
        for j in range(i + 1, k):
            if nodes[j] in adj_sets[nodes[i]]:
                mask |= 1 << bit
            bit += 1
    return mask


def enumerate_cis(graph: Graph, k: int, catalog: MotifCatalog,
                  cap: int = DEFAULT_CIS_CAP, backend: str = "auto") -> ExactCounts:
    """Count every connected induced k-node subgraph by motif class.

    Aborts with ScaleCapError once more than `cap` CISes have been seen,
    which bounds the runtime of the enumeration directly.
    """
    if k not in (4, 5):
        raise ValueError("k must be 4 or 5")
    use_kernel = (backend == "cython" or (backend == "auto" and _backend.HAVE_KERNELS))
    if backend == "cython" and not _backend.HAVE_KERNELS:
        raise RuntimeError("compiled kernels are not available")
    if use_kernel:
        counts, found = _backend.enumerate_kernel(graph, k, catalog, cap)
        if found < 0:
            raise ScaleCapError(
                f"more than {cap} connected induced {k}-node subgraphs; "
                f"raise the cap to continue", projection=cap)
        return ExactCounts(k, {i: int(c) for i, c in enumerate(counts) if c},
                           found)
    return _enumerate_python(graph, k, catalog, cap)


def _enumerate_python(graph: Graph, k: int, catalog: MotifCatalog, cap: int) -> ExactCounts:
    adj = graph.adjacency_sets()
    table = catalog.mask_to_id4 if k == 4 else catalog.mask_to_id5
    counts = [0] * 22
    found = 0

    def extend(sub, ext, blocked):
        nonlocal found
        if len(sub) == k - 1:
            for w in ext:
                found += 1
                if found > cap:
                    raise ScaleCapError(
                        f"more than {cap} connected induced {k}-node subgraphs; "
                        f"raise the cap to continue", projection=cap)
                counts[table[_mask_of(adj, sub + [w])]] += 1
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            new_blocked = blocked | {w}
            new_ext = list(ext)
            for x in adj[w]:
                if x > sub[0] and x not in new_blocked:
                    new_ext.append(x)
                    new_blocked.add(x)
            extend(sub + [w], new_ext, new_blocked)

    for v in range(graph.node_count):
        ext = [x for x in adj[v] if x > v]
        extend([v], ext, {v} | set(ext))
    return ExactCounts(k, {i: c for i, c in enumerate(counts) if c}, found)


def naive_counts(graph: Graph, k: int, catalog: MotifCatalog) -> ExactCounts:
    """All-subsets checker; the enumeration oracle's own oracle (n <= ~12)."""
    adj = graph.adjacency_sets()
    table = catalog.mask_to_id4 if k == 4 else catalog.mask_to_id5
    counts = [0] * 22
    total = 0
    for nodes in combinations(range(graph.node_count), k):
        mask = _mask_of(adj, list(nodes))
        motif = table[mask]
        if motif:
            counts[motif] += 1
            total += 1
    return ExactCounts(k, {i: c for i, c in enumerate(counts) if c}, total)


def triangle_count(graph: Graph) -> int:
    adj = graph.adjacency_sets()
    t = 0
    for u, v in graph.edges():
        t += len(adj[u] & adj[v])
    return t // 3


def count_noninduced_patterns(graph: Graph) -> dict[str, int]:
    """Direct exact counts of the non-induced tree patterns and triangles.

    Enumeration-based (independent of the weight formulas); 5-path counting
    walks all simple 4-step paths, so keep this to small and medium graphs.
    """
    adj = graph.adjacency_sets()
    deg = graph.degrees

    triangles = triangle_count(graph)

    path4 = 0
    for v, w in graph.edges():
        for u in adj[v]:
            if u == w:
                continue
            for x in adj[w]:
                if x != v and x != u:
                    path4 += 1
    # both directions of each labeled path were counted once via its middle edge
    # (middle edge is unordered here, so the count is exact already)

    path5 = 0
    for a in range(graph.node_count):
        stack = [(a, frozenset([a]), 0)]
        while stack:
            x, visited, depth = stack.pop()
            if depth == 4:
                path5 += 1
                continue
            for y in adj[x]:
                if y not in visited:
                    stack.append((y, visited | {y}, depth + 1))
    path5 //= 2

    fork = 0
    for c in range(graph.node_count):
        for d in adj[c]:
            for e in adj[d]:
                if e == c:
                    continue
                m = int(deg[c]) - 1 - (1 if e in adj[c] else 0)
                fork += comb(m, 2)

    star3 = sum(comb(int(d), 3) for d in deg)
    star4 = sum(comb(int(d), 4) for d in deg)
    return {"triangles": triangles, "path4": path4, "star3": star3,
            "path5": path5, "fork": fork, "star4": star4}


def projected_cis_upper_bound(graph: Graph, k: int) -> int:
    """Cheap spanning-tree upper bound on the k-node CIS count."""
    deg = graph.degrees.astype(object)
    w = graph.degrees[graph.indices] - 1
    cs = np.concatenate(([0], np.cumsum(w, dtype=np.int64)))
    S = cs[graph.indptr[1:]] - cs[graph.indptr[:-1]]
    if k == 4:
        gamma = int(sum(int((d - 1) * s) for d, s in zip(graph.degrees, S)))
        lam3 = sum(comb(int(d), 3) for d in graph.degrees)
        return gamma // 2 + lam3
    sq = cs = None
    sq_sum = [sum((int(graph.degrees[x]) - 1) ** 2 for x in graph.neighbors(v))
              for v in range(graph.node_count)]
    g1 = sum(max(int(d) - 1, 0) * max(int(d) - 2, 0) * int(s)
             for d, s in zip(graph.degrees, S))
    g2 = sum(int(s) ** 2 - q for s, q in zip(S, sq_sum))
    lam4 = sum(comb(int(d), 4) for d in graph.degrees)
    return g1 // 2 + g2 // 2 + lam4
