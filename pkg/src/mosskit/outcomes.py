"""Exact outcome-tree enumeration of the samplers, in rational arithmetic.

For a small graph, every weighted branch of a single sampling trial is
enumerated and the exact probability of each outcome is accumulated as a
Fraction.  This is the independent oracle for the per-trial inclusion
probabilities: nothing here touches the cumulative-array sampling path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .catalog import MotifCatalog
from .graph import Graph, TotalOrder, restricted_neighbors


@dataclass
class OutcomeDistribution:
    """Exact per-trial law of one sampler on one graph."""
    class_probability: dict[int, Fraction] = field(default_factory=dict)
    cis_probability: dict[frozenset, Fraction] = field(default_factory=dict)
    degenerate: Fraction = Fraction(0)
    non_credited: Fraction = Fraction(0)

    def _add(self, motif_id, nodes, p, credited=True):
        if credited:
            self.class_probability[motif_id] = \
                self.class_probability.get(motif_id, Fraction(0)) + p
            key = frozenset(nodes)
            self.cis_probability[key] = self.cis_probability.get(key, Fraction(0)) + p
        else:
            self.non_credited += p

    def total(self) -> Fraction:
        return (sum(self.class_probability.values(), Fraction(0))
                + self.degenerate + self.non_credited)


def _classify(catalog: MotifCatalog, graph: Graph, nodes) -> int:
    import numpy as np
    k = len(nodes)
    a = np.zeros((k, k), dtype=np.int8)
    for i in range(k):
        for j in range(i + 1, k):
            if graph.has_edge(nodes[i], nodes[j]):
                a[i, j] = a[j, i] = 1
    return (catalog.classify4(a) if k == 4 else catalog.classify5(a))


def moss4_distribution(graph: Graph, catalog: MotifCatalog) -> OutcomeDistribution:
    deg = graph.degrees
    S = {v: sum(int(deg[x]) - 1 for x in graph.neighbors(v))
         for v in range(graph.node_count)}
    gamma = {v: (int(deg[v]) - 1) * S[v] for v in range(graph.node_count)}
    total = sum(gamma.values())
    dist = OutcomeDistribution()
    for v in range(graph.node_count):
        if gamma[v] == 0:
            continue
        pv = Fraction(gamma[v], total)
        for u in graph.neighbors(v):
            u = int(u)
            if deg[u] < 2:
                continue
            pu = pv * Fraction(int(deg[u]) - 1, S[v])
            for w in graph.neighbors(v):
                w = int(w)
                if w == u:
                    continue
                pw = pu * Fraction(1, int(deg[v]) - 1)
                for r in graph.neighbors(u):
                    r = int(r)
                    if r == v:
                        continue
                    p = pw * Fraction(1, int(deg[u]) - 1)
                    if r == w:
                        dist.degenerate += p
                    else:
                        dist._add(_classify(catalog, graph, (v, u, w, r)),
                                  (v, u, w, r), p)
    return dist


def moss4min_distribution(graph: Graph, order: TotalOrder,
                          catalog: MotifCatalog) -> OutcomeDistribution:
    n = graph.node_count

    def d_restricted(a, b):
        return len(restricted_neighbors(graph, order, a, b))

    weight = {}
    for v in range(n):
        weight[v] = {int(u): d_restricted(int(u), v) * d_restricted(v, int(u))
                     for u in graph.neighbors(v)}
    gamma_check = {v: sum(weight[v].values()) for v in range(n)}
    total = sum(gamma_check.values())
    dist = OutcomeDistribution()
    for v in range(n):
        if gamma_check[v] == 0:
            continue
        pv = Fraction(gamma_check[v], total)
        for u, wu in weight[v].items():
            if wu == 0:
                continue
            pu = pv * Fraction(wu, gamma_check[v])
            n_vu = [int(x) for x in restricted_neighbors(graph, order, v, u)]
            n_uv = [int(x) for x in restricted_neighbors(graph, order, u, v)]
            for w in n_vu:
                for r in n_uv:
                    p = pu * Fraction(1, len(n_vu)) * Fraction(1, len(n_uv))
                    if r == w:
                        dist.degenerate += p
                    else:
                        motif = _classify(catalog, graph, (v, u, w, r))
                        # diamonds sampled with a non-adjacent w-r pair are
                        # surplus tuples and stay non-credited (see samplers)
                        credited = motif in (3, 5, 6) and graph.has_edge(w, r)
                        dist._add(motif, (v, u, w, r), p, credited=credited)
    return dist


def t5_distribution(graph: Graph, catalog: MotifCatalog) -> OutcomeDistribution:
    deg = graph.degrees
    S = {v: sum(int(deg[x]) - 1 for x in graph.neighbors(v))
         for v in range(graph.node_count)}
    gamma1 = {v: (int(deg[v]) - 1) * (int(deg[v]) - 2) * S[v] if deg[v] >= 2 else 0
              for v in range(graph.node_count)}
    total = sum(gamma1.values())
    dist = OutcomeDistribution()
    for v in range(graph.node_count):
        if gamma1[v] == 0:
            continue
        pv = Fraction(gamma1[v], total)
        dv = int(deg[v])
        for u in graph.neighbors(v):
            u = int(u)
            if deg[u] < 2:
                continue
            pu = pv * Fraction(int(deg[u]) - 1, S[v])
            for w in graph.neighbors(v):
                w = int(w)
                if w == u:
                    continue
                for r in graph.neighbors(v):
                    r = int(r)
                    if r == u or r == w:
                        continue
                    pwr = pu * Fraction(1, dv - 1) * Fraction(1, dv - 2)
                    for t in graph.neighbors(u):
                        t = int(t)
                        if t == v:
                            continue
                        p = pwr * Fraction(1, int(deg[u]) - 1)
                        if t == w or t == r:
                            dist.degenerate += p
                        else:
                            dist._add(_classify(catalog, graph, (v, u, w, r, t)),
                                      (v, u, w, r, t), p)
    return dist


def path5_distribution(graph: Graph, catalog: MotifCatalog) -> OutcomeDistribution:
    deg = graph.degrees
    S = {v: sum(int(deg[x]) - 1 for x in graph.neighbors(v))
         for v in range(graph.node_count)}
    sq = {v: sum((int(deg[x]) - 1) ** 2 for x in graph.neighbors(v))
          for v in range(graph.node_count)}
    gamma2 = {v: S[v] ** 2 - sq[v] for v in range(graph.node_count)}
    total = sum(gamma2.values())
    dist = OutcomeDistribution()
    for v in range(graph.node_count):
        if gamma2[v] == 0:
            continue
        pv = Fraction(gamma2[v], total)
        for u in graph.neighbors(v):
            u = int(u)
            wu = int(deg[u]) - 1
            tau_num = wu * (S[v] - wu)
            if tau_num == 0:
                continue
            pu = pv * Fraction(tau_num, gamma2[v])
            for w in graph.neighbors(v):
                w = int(w)
                if w == u or deg[w] < 2:
                    continue
                pw = pu * Fraction(int(deg[w]) - 1, S[v] - wu)
                for r in graph.neighbors(u):
                    r = int(r)
                    if r == v:
                        continue
                    for t in graph.neighbors(w):
                        t = int(t)
                        if t == v:
                            continue
                        p = pw * Fraction(1, wu) * Fraction(1, int(deg[w]) - 1)
                        if t == u or r == w or t == r:
                            dist.degenerate += p
                        else:
                            dist._add(_classify(catalog, graph, (v, u, w, r, t)),
                                      (v, u, w, r, t), p)
    return dist


DISTRIBUTIONS = {
    "moss4": moss4_distribution,
    "t5": t5_distribution,
    "path5": path5_distribution,
}
