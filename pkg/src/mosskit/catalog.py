"""Canonical 4-node and 5-node motif classes and their coefficient tables.

Motif IDs are assigned operationally: every connected graph on 4 or 5
nodes is generated by exhaustive enumeration, its non-induced tree-pattern
counts are computed by brute force, and the resulting coefficient tuple is
matched against the published tables.  Classification then uses the key
(edge_count, sorted degree sequence, triangle_count), which is verified
collision-free at build time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

# Expected coefficient tables: index 1..6 for 4-node, 1..21 for 5-node.
PHI4_1 = [None, 1, 0, 4, 2, 6, 12]
PHI4_2 = [None, 0, 1, 0, 1, 2, 4]
PHI5_1 = [None, 0, 0, 1, 1, 2, 0, 2, 2, 4, 4, 5, 4, 6, 10, 9, 12, 10, 20, 20, 36, 60]
PHI5_2 = [None, 1, 0, 0, 2, 2, 5, 1, 0, 4, 7, 2, 4, 6, 10, 6, 6, 14, 24, 18, 36, 60]
PHI5_3 = [None, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1, 2, 0, 1, 2, 3, 5]

# Tree patterns used by the weighted samplers (node 0-based edge lists).
PATTERNS = {
    "path4": [(0, 1), (1, 2), (2, 3)],
    "star3": [(0, 1), (0, 2), (0, 3)],
    "path5": [(0, 1), (1, 2), (2, 3), (3, 4)],
    "fork": [(0, 1), (0, 2), (0, 3), (3, 4)],
    "star4": [(0, 1), (0, 2), (0, 3), (0, 4)],
}

_PAIRS = {k: list(combinations(range(k), 2)) for k in (4, 5)}


class CatalogBuildError(Exception):
    pass


def _edges_to_matrix(k, edges):
    a = np.zeros((k, k), dtype=np.int8)
    for u, v in edges:
        a[u, v] = a[v, u] = 1
    return a


def _mask_to_matrix(k, mask):
    a = np.zeros((k, k), dtype=np.int8)
    for bit, (i, j) in enumerate(_PAIRS[k]):
        if mask >> bit & 1:
            a[i, j] = a[j, i] = 1
    return a


def matrix_to_mask(adj) -> int:
    a = np.asarray(adj)
    k = a.shape[0]
    mask = 0
    for bit, (i, j) in enumerate(_PAIRS[k]):
        if a[i, j]:
            mask |= 1 << bit
    return mask


def _is_connected_mask(k, mask) -> bool:
    a = _mask_to_matrix(k, mask)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in range(k):
            if a[x, y] and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == k


def _canonical_mask(k, mask) -> int:
    a = _mask_to_matrix(k, mask)
    best = None
    for perm in permutations(range(k)):
        m = 0
        for bit, (i, j) in enumerate(_PAIRS[k]):
            if a[perm[i], perm[j]]:
                m |= 1 << bit
        if best is None or m < best:
            best = m
    return best


def _triangle_count(a) -> int:
    k = a.shape[0]
    return sum(1 for i, j, l in combinations(range(k), 3)
               if a[i, j] and a[j, l] and a[i, l])


def _classification_key(a) -> tuple:
    k = a.shape[0]
    deg = tuple(sorted(int(a[i].sum()) for i in range(k)))
    edges = int(a.sum()) // 2
    return (edges, deg, _triangle_count(a))


def _count_injective_maps(host, pattern_edges, k_pat) -> int:
    """Injective maps pattern -> host preserving pattern edges."""
    n = host.shape[0]
    count = 0
    for subset in permutations(range(n), k_pat):
        if all(host[subset[u], subset[v]] for u, v in pattern_edges):
            count += 1
    return count


def count_pattern_subgraphs(host_adj, pattern: str) -> int:
    """Exact non-induced copies of a tree pattern inside a small host graph."""
    if pattern not in PATTERNS:
        raise ValueError(f"unsupported pattern {pattern!r}")
    edges = PATTERNS[pattern]
    k_pat = max(max(e) for e in edges) + 1
    host = np.asarray(host_adj)
    if host.shape[0] < k_pat:
        return 0
    pat_matrix = _edges_to_matrix(k_pat, edges)
    aut = _count_injective_maps(pat_matrix, edges, k_pat)
    return _count_injective_maps(host, edges, k_pat) // aut


@dataclass
class MotifCatalog:
    adjacency4: dict = field(default_factory=dict)   # id -> 4x4 matrix
    adjacency5: dict = field(default_factory=dict)   # id -> 5x5 matrix
    key_to_id4: dict = field(default_factory=dict)
    key_to_id5: dict = field(default_factory=dict)
    mask_to_id4: np.ndarray = None   # len 64; 0 = not connected
    mask_to_id5: np.ndarray = None   # len 1024; 0 = not connected
    omega1: frozenset = frozenset()
    omega2: frozenset = frozenset()
    omega3: frozenset = frozenset()
    omega3_star: frozenset = frozenset()

    def classify4(self, adj) -> int | None:
        a = np.asarray(adj)
        _check_adj(a, 4)
        i = int(self.mask_to_id4[matrix_to_mask(a)])
        return i if i else None

    def classify5(self, adj) -> int | None:
        a = np.asarray(adj)
        _check_adj(a, 5)
        i = int(self.mask_to_id5[matrix_to_mask(a)])
        return i if i else None

    def classify4_mask(self, mask: int) -> int:
        return int(self.mask_to_id4[mask])

    def classify5_mask(self, mask: int) -> int:
        return int(self.mask_to_id5[mask])

    def to_json(self) -> str:
        def dump(adj_map, phis):
            out = {}
            for i, a in sorted(adj_map.items()):
                k = a.shape[0]
                key = _classification_key(a)
                out[str(i)] = {
                    "edges": [[u, v] for u, v in _PAIRS[k] if a[u, v]],
                    "key": [key[0], list(key[1]), key[2]],
                    "phi": [int(p[i]) for p in phis],
                }
            return out
        return json.dumps({
            "motifs4": dump(self.adjacency4, (PHI4_1, PHI4_2)),
            "motifs5": dump(self.adjacency5, (PHI5_1, PHI5_2, PHI5_3)),
        }, indent=2)


def _check_adj(a, k):
    if a.shape != (k, k):
        raise ValueError(f"expected {k}x{k} adjacency matrix")
    if np.any(np.diag(a)):
        raise ValueError("adjacency matrix has nonzero diagonal")
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency matrix is not symmetric")


def _connected_representatives(k):
    reps = {}
    nbits = len(_PAIRS[k])
    for mask in range(1 << nbits):
        if not _is_connected_mask(k, mask):
            continue
        canon = _canonical_mask(k, mask)
        reps.setdefault(canon, mask)
    return sorted(reps)


def build_catalog() -> MotifCatalog:
    cat = MotifCatalog()

    # 4-node classes: match (path4, star3) counts against the table.
    expected4 = {(PHI4_1[i], PHI4_2[i]): i for i in range(1, 7)}
    reps4 = _connected_representatives(4)
    if len(reps4) != 6:
        raise CatalogBuildError(f"expected 6 connected 4-node classes, got {len(reps4)}")
    for mask in reps4:
        a = _mask_to_matrix(4, mask)
        pair = (count_pattern_subgraphs(a, "path4"), count_pattern_subgraphs(a, "star3"))
        if pair not in expected4:
            raise CatalogBuildError(f"4-node coefficient pair {pair} not in table")
        i = expected4.pop(pair)
        cat.adjacency4[i] = a
    if expected4:
        raise CatalogBuildError(f"unmatched 4-node table entries: {expected4}")

    # 5-node classes: match (fork, path5, star4) triples against the table.
    expected5 = {(PHI5_1[i], PHI5_2[i], PHI5_3[i]): i for i in range(1, 22)}
    if len(expected5) != 21:
        raise CatalogBuildError("5-node coefficient triples are not pairwise distinct")
    reps5 = _connected_representatives(5)
    if len(reps5) != 21:
        raise CatalogBuildError(f"expected 21 connected 5-node classes, got {len(reps5)}")
    for mask in reps5:
        a = _mask_to_matrix(5, mask)
        triple = (count_pattern_subgraphs(a, "fork"),
                  count_pattern_subgraphs(a, "path5"),
                  count_pattern_subgraphs(a, "star4"))
        if triple not in expected5:
            raise CatalogBuildError(f"5-node coefficient triple {triple} not in table")
        i = expected5.pop(triple)
        cat.adjacency5[i] = a
    if expected5:
        raise CatalogBuildError(f"unmatched 5-node table entries: {expected5}")

    # Classification keys must be collision-free within each size.
    for adj_map, key_map in ((cat.adjacency4, cat.key_to_id4),
                             (cat.adjacency5, cat.key_to_id5)):
        for i, a in adj_map.items():
            key = _classification_key(a)
            if key in key_map:
                raise CatalogBuildError(f"classification key collision: {key}")
            key_map[key] = i

    # Mask lookup tables; cross-check key classification against the
    # canonical representatives for every connected labeled graph.
    canon_id4 = {_canonical_mask(4, matrix_to_mask(a)): i for i, a in cat.adjacency4.items()}
    cat.mask_to_id4 = np.zeros(64, dtype=np.int8)
    for mask in range(64):
        if not _is_connected_mask(4, mask):
            continue
        i = cat.key_to_id4[_classification_key(_mask_to_matrix(4, mask))]
        if i != canon_id4[_canonical_mask(4, mask)]:
            raise CatalogBuildError(f"4-node key classification disagrees at mask {mask}")
        cat.mask_to_id4[mask] = i
    canon_id5 = {_canonical_mask(5, matrix_to_mask(a)): i for i, a in cat.adjacency5.items()}
    cat.mask_to_id5 = np.zeros(1024, dtype=np.int8)
    for mask in range(1024):
        if not _is_connected_mask(5, mask):
            continue
        i = cat.key_to_id5[_classification_key(_mask_to_matrix(5, mask))]
        if i != canon_id5[_canonical_mask(5, mask)]:
            raise CatalogBuildError(f"5-node key classification disagrees at mask {mask}")
        cat.mask_to_id5[mask] = i

    cat.omega1 = frozenset(i for i in range(1, 22) if PHI5_1[i] > 0)
    cat.omega2 = frozenset(i for i in range(1, 22) if PHI5_2[i] > 0)
    cat.omega3 = frozenset(i for i in range(1, 22) if PHI5_3[i] > 0)
    cat.omega3_star = cat.omega3 - {2}
    return cat
