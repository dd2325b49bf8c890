"""Superstep message-passing execution of the four samplers.

Single-process simulator of a vertex-centric engine: a root phase assigns
per-node trial counts, then each trial advances one hop per superstep via
messages carrying a partial adjacency record that is resolved only at the
nodes that own the edges.  Replaying a direct run's decision tape yields a
bitwise-identical tally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .catalog import MotifCatalog
from .errors import InapplicableMethodError
from .graph import Graph
from .rng import TapeRecorder, TrialReplay, Xoshiro256, make_draw
from .samplers import CREDITED_MIN_CLASSES, Tally
from .weights import (WeightIndex, sample_neighbor_mu_excluding,
                      sample_neighbor_sigma, sample_neighbor_sigma_check,
                      sample_neighbor_tau, sample_node_by_weight,
                      sample_position_excluding)

UNKNOWN = None

_SLOTS4 = ("v", "u", "w", "r")
_SLOTS5 = ("v", "u", "w", "r", "t")

# hops whose recipient is not drawn from the sender's neighborhood; the
# programming model needs them to finish classification, so message
# locality cannot be asserted there
_NONLOCAL_HOPS = {("t5", 3), ("path5", 2), ("path5", 4)}

MESSAGE_SUPERSTEPS = {"moss4": 2, "moss4min": 2, "t5": 3, "path5": 4}


@dataclass
class VertexMessage:
    trial: int
    hop: int                      # 1-based message hop index within the trial
    sender: int
    dest: int
    slots: dict[str, int | None]
    adj: dict[tuple[str, str], bool | None]
    seq: int = 0

    def known(self) -> dict[str, int]:
        return {s: x for s, x in self.slots.items() if x is not None}


def _new_adj(slot_names) -> dict:
    return {(a, b): UNKNOWN
            for i, a in enumerate(slot_names) for b in slot_names[i + 1:]}


def _update(graph: Graph, node: int, my_slot: str, slots, adj) -> None:
    """Resolve every unknown adjacency entry between `my_slot` and a known slot."""
    for (a, b), val in adj.items():
        if val is not UNKNOWN:
            continue
        if a == my_slot and slots[b] is not None:
            adj[(a, b)] = bool(graph.has_edge(node, slots[b]))
        elif b == my_slot and slots[a] is not None:
            adj[(a, b)] = bool(graph.has_edge(node, slots[a]))


def _classify(catalog: MotifCatalog, slot_names, adj) -> int | None:
    mask = 0
    bit = 0
    for i, a in enumerate(slot_names):
        for b in slot_names[i + 1:]:
            val = adj[(a, b)]
            assert val is not UNKNOWN, f"unresolved pair {a}-{b} at classification"
            if val:
                mask |= 1 << bit
            bit += 1
    table = catalog.mask_to_id4 if len(slot_names) == 4 else catalog.mask_to_id5
    motif = int(table[mask])
    return motif if motif else None


class SuperstepEngine:
    """Runs one sampling method through the message-passing formulation."""

    def __init__(self, graph: Graph, index: WeightIndex, catalog: MotifCatalog,
                 method: str, trace=None):
        if method not in MESSAGE_SUPERSTEPS:
            raise ValueError(f"unknown method {method!r}")
        self.graph = graph
        self.index = index
        self.catalog = catalog
        self.method = method
        self.slot_names = _SLOTS4 if method in ("moss4", "moss4min") else _SLOTS5
        self.trace = trace
        self.superstep = 0
        self._seq = 0
        self.node_value = {}          # k_v: trials rooted at each node
        self._trial_draw = {}

    def _send(self, trial, hop, sender, dest, slots, adj, outbox) -> None:
        if (self.method, hop) not in _NONLOCAL_HOPS:
            assert self.graph.has_edge(sender, dest), \
                f"non-local send {sender}->{dest} on hop {hop}"
        known = [s for s, x in slots.items() if x is not None]
        assert len({slots[s] for s in known}) == len(known), \
            "duplicate node in message slots"
        msg = VertexMessage(trial, hop, sender, dest, dict(slots), dict(adj),
                            self._seq)
        self._seq += 1
        outbox.append(msg)
        if self.trace is not None:
            self.trace.write(json.dumps({
                "superstep": self.superstep, "trial": trial, "hop": hop,
                "sender": sender, "dest": dest,
                "slots": {s: x for s, x in slots.items()},
                "adj": {f"{a}-{b}": val for (a, b), val in adj.items()},
            }) + "\n")

    def run(self, budget: int, rng: Xoshiro256 | None = None,
            tape: TapeRecorder | None = None) -> Tally:
        if budget < 1:
            raise ValueError("budget must be >= 1")
        if (rng is None) == (tape is None):
            raise ValueError("provide exactly one of rng or tape")
        which = {"moss4": "gamma", "moss4min": "gamma_check",
                 "t5": "gamma1", "path5": "gamma2"}[self.method]
        _, total = self.index.weight_array(which)
        if total == 0:
            raise InapplicableMethodError(
                f"method {self.method} has zero total weight on this graph")

        if tape is not None:
            if len(tape.trials) < budget:
                raise ValueError("tape holds fewer trials than the budget")
            self._trial_draw = {k: TrialReplay(tape.trials[k])
                                for k in range(budget)}
        else:
            shared = make_draw(rng, None)
            self._trial_draw = {k: shared for k in range(budget)}

        tally = Tally(self.method, budget)
        # root phase: sample the K roots and set the node values
        roots = []
        for k in range(budget):
            v = sample_node_by_weight(self.index, which, self._trial_draw[k])
            roots.append(v)
            self.node_value[v] = self.node_value.get(v, 0) + 1
        assert sum(self.node_value.values()) == budget

        outbox: list[VertexMessage] = []
        self.superstep = 0
        for k, v in enumerate(roots):
            self._root_compute(k, v, tally, outbox)

        while outbox:
            self.superstep += 1
            inbox = sorted(outbox, key=lambda m: (m.sender, m.seq))
            outbox = []
            for msg in inbox:
                self._handle(msg, tally, outbox)

        tally.check_budget()
        return tally

    # root-phase compute at node v, one call per trial

    def _root_compute(self, trial, v, tally, outbox) -> None:
        g, index = self.graph, self.index
        draw = self._trial_draw[trial]
        slots = {s: None for s in self.slot_names}
        slots["v"] = v
        adj = _new_adj(self.slot_names)
        if self.method == "moss4":
            u, u_pos = sample_neighbor_sigma(index, v, draw)
            w_pos = sample_position_excluding(int(g.degrees[v]), (u_pos,), draw, "w")
            slots["u"] = u
            slots["w"] = int(g.indices[g.indptr[v] + w_pos])
        elif self.method == "moss4min":
            order = index.order
            u, u_pos = sample_neighbor_sigma_check(index, v, draw)
            lo_v, hi_v = g.indptr[v], g.indptr[v + 1]
            d_vu = int(hi_v - lo_v) - 1 - u_pos
            j = draw("w", d_vu)
            slots["u"] = u
            slots["w"] = int(order.order_adj[lo_v + u_pos + j])
        elif self.method == "t5":
            u, u_pos = sample_neighbor_sigma(index, v, draw)
            w_pos = sample_position_excluding(int(g.degrees[v]), (u_pos,), draw, "w")
            r_pos = sample_position_excluding(int(g.degrees[v]), (u_pos, w_pos),
                                              draw, "r")
            slots["u"] = u
            slots["w"] = int(g.indices[g.indptr[v] + w_pos])
            slots["r"] = int(g.indices[g.indptr[v] + r_pos])
        else:
            u, u_pos = sample_neighbor_tau(index, v, draw)
            w, _ = sample_neighbor_mu_excluding(index, v, u_pos, draw)
            slots["u"] = u
            slots["w"] = w
        u = slots["u"]
        slots_for_msg = dict(slots)
        slots_for_msg["u"] = None    # the paper's (v,*,w,...) wildcard shape
        _update(self.graph, v, "v", slots, adj)
        self._send(trial, 1, v, u, slots_for_msg, adj, outbox)

    # message handlers

    def _handle(self, msg: VertexMessage, tally: Tally, outbox) -> None:
        handler = {
            ("moss4", 1): self._moss4_at_u, ("moss4", 2): self._terminal4,
            ("moss4min", 1): self._moss4_at_u, ("moss4min", 2): self._terminal4,
            ("t5", 1): self._t5_at_u, ("t5", 2): self._t5_at_t,
            ("t5", 3): self._terminal5,
            ("path5", 1): self._path5_at_u, ("path5", 2): self._path5_at_w,
            ("path5", 3): self._path5_at_t, ("path5", 4): self._terminal5,
        }[(self.method, msg.hop)]
        handler(msg, tally, outbox)

    def _moss4_at_u(self, msg, tally, outbox) -> None:
        g = self.graph
        u = msg.dest
        slots = dict(msg.slots)
        slots["u"] = u
        draw = self._trial_draw[msg.trial]
        if self.method == "moss4":
            v_pos = g.neighbor_position(u, msg.slots["v"])
            r_pos = sample_position_excluding(int(g.degrees[u]), (v_pos,), draw, "r")
            r = int(g.indices[g.indptr[u] + r_pos])
        else:
            order = self.index.order
            v = msg.slots["v"]
            lo_u, hi_u = g.indptr[u], g.indptr[u + 1]
            pos_v = int(np.searchsorted(order.order_adj_rank[lo_u:hi_u],
                                        order.rank[v], side="right"))
            d_uv = int(hi_u - lo_u) - pos_v
            j = draw("r", d_uv)
            r = int(order.order_adj[lo_u + pos_v + j - 1])
        if r == slots["w"]:
            tally.degenerate += 1
            return
        slots["r"] = r
        adj = dict(msg.adj)
        _update(g, u, "u", slots, adj)
        self._send(msg.trial, 2, u, r, slots, adj, outbox)

    def _terminal4(self, msg, tally, outbox) -> None:
        slots = dict(msg.slots)
        adj = dict(msg.adj)
        _update(self.graph, msg.dest, "r", slots, adj)
        motif = _classify(self.catalog, self.slot_names, adj)
        assert motif is not None
        if self.method == "moss4min" and (motif not in CREDITED_MIN_CLASSES
                                          or not adj[("w", "r")]):
            tally.non_credited += 1
        else:
            tally.record_hit(motif)

    def _t5_at_u(self, msg, tally, outbox) -> None:
        g = self.graph
        u = msg.dest
        slots = dict(msg.slots)
        slots["u"] = u
        draw = self._trial_draw[msg.trial]
        v_pos = g.neighbor_position(u, msg.slots["v"])
        t_pos = sample_position_excluding(int(g.degrees[u]), (v_pos,), draw, "t")
        t = int(g.indices[g.indptr[u] + t_pos])
        if t == slots["w"] or t == slots["r"]:
            tally.degenerate += 1
            return
        adj = dict(msg.adj)
        _update(g, u, "u", slots, adj)
        # t stays unknown in the message; the destination is its own identity
        self._send(msg.trial, 2, u, t, slots, adj, outbox)

    def _t5_at_t(self, msg, tally, outbox) -> None:
        t = msg.dest
        slots = dict(msg.slots)
        slots["t"] = t
        adj = dict(msg.adj)
        _update(self.graph, t, "t", slots, adj)
        self._send(msg.trial, 3, t, slots["w"], slots, adj, outbox)

    def _path5_at_u(self, msg, tally, outbox) -> None:
        g = self.graph
        u = msg.dest
        slots = dict(msg.slots)
        slots["u"] = u
        draw = self._trial_draw[msg.trial]
        v_pos = g.neighbor_position(u, msg.slots["v"])
        r_pos = sample_position_excluding(int(g.degrees[u]), (v_pos,), draw, "r")
        r = int(g.indices[g.indptr[u] + r_pos])
        slots["r"] = r
        adj = dict(msg.adj)
        _update(g, u, "u", slots, adj)
        # forward to w with the w slot left unknown: r may coincide with w,
        # and the guard at w resolves that before any slot duplication shows
        w = slots["w"]
        fwd = dict(slots)
        fwd["w"] = None
        self._send(msg.trial, 2, u, w, fwd, adj, outbox)

    def _path5_at_w(self, msg, tally, outbox) -> None:
        g = self.graph
        w = msg.dest
        slots = dict(msg.slots)
        slots["w"] = w
        draw = self._trial_draw[msg.trial]
        v_pos = g.neighbor_position(w, msg.slots["v"])
        t_pos = sample_position_excluding(int(g.degrees[w]), (v_pos,), draw, "t")
        t = int(g.indices[g.indptr[w] + t_pos])
        if t == slots["u"] or slots["r"] == w or t == slots["r"]:
            tally.degenerate += 1
            return
        slots["t"] = t
        adj = dict(msg.adj)
        _update(g, w, "w", slots, adj)
        fwd = dict(slots)
        fwd["t"] = None
        self._send(msg.trial, 3, w, t, fwd, adj, outbox)

    def _path5_at_t(self, msg, tally, outbox) -> None:
        t = msg.dest
        slots = dict(msg.slots)
        slots["t"] = t
        adj = dict(msg.adj)
        _update(self.graph, t, "t", slots, adj)
        self._send(msg.trial, 4, t, slots["r"], slots, adj, outbox)

    def _terminal5(self, msg, tally, outbox) -> None:
        my_slot = "w" if self.method == "t5" else "r"
        slots = dict(msg.slots)
        adj = dict(msg.adj)
        _update(self.graph, msg.dest, my_slot, slots, adj)
        motif = _classify(self.catalog, self.slot_names, adj)
        assert motif is not None
        tally.record_hit(motif)


def run_vertex_sampler(graph: Graph, index: WeightIndex, catalog: MotifCatalog,
                       method: str, budget: int, rng: Xoshiro256 | None = None,
                       tape: TapeRecorder | None = None, trace=None) -> Tally:
    engine = SuperstepEngine(graph, index, catalog, method, trace=trace)
    return engine.run(budget, rng=rng, tape=tape)
