import collections

import numpy as np
import pytest
from scipy import stats

from mosskit.errors import EmptySupportError
from mosskit.oracle import count_noninduced_patterns
from mosskit.rng import Xoshiro256, make_draw
from mosskit.weights import (build_weight_index, load_index_cache,
                             sample_neighbor_mu_excluding,
                             sample_neighbor_sigma,
                             sample_neighbor_sigma_check, sample_neighbor_tau,
                             sample_node_by_weight, sample_position_excluding,
                             save_index_cache)

from conftest import FIXTURE_EDGES, graph_with_index, random_gnp
from mosskit.graph import build_total_order


def test_k4_constants(k4):
    _, _, idx = k4
    c = idx.constants()
    assert c["gamma"] == 48
    assert c["gamma_check"] == 14
    assert c["gamma1"] == 48
    assert c["gamma2"] == 96
    assert c["lambda3"] == 4
    assert c["lambda4"] == 0


def test_k5_constants(k5):
    _, _, idx = k5
    assert idx.constants()["lambda4"] == 5


def test_path3_zero_gamma():
    _, _, idx = graph_with_index(FIXTURE_EDGES["path3"])
    assert idx.total_gamma == 0
    assert idx.total_gamma1 == 0


def test_gamma_identities_vs_direct_counts():
    # each global weight double-counts a spanning pattern of the trials
    for seed in (1, 2, 3):
        g = random_gnp(11, 0.4, seed)
        order = build_total_order(g)
        idx = build_weight_index(g, order)
        pats = count_noninduced_patterns(g)
        assert idx.total_gamma == 2 * pats["path4"] + 6 * pats["triangles"]
        assert idx.lambda3 == pats["star3"]
        assert idx.lambda4 == pats["star4"]
        assert idx.total_gamma2 == _gamma2_direct(g)


def _gamma2_direct(g):
    # Gamma^(2) = sum over ordered neighbor pairs (u, w) of v, u != w, of
    # (d_u - 1)(d_w - 1); recomputed here without the vectorized path
    total = 0
    for v in range(g.node_count):
        ws = [int(g.degrees[x]) - 1 for x in g.neighbors(v)]
        s = sum(ws)
        total += s * s - sum(x * x for x in ws)
    return total


def test_sampling_distributions_chi_square(medium_graph):
    g, order, idx = medium_graph
    rng = Xoshiro256(17)
    draw = make_draw(rng, None)
    n_draws = 100_000

    counts = collections.Counter(
        sample_node_by_weight(idx, "gamma", draw) for _ in range(n_draws))
    expected = {v: n_draws * int(idx.gamma[v]) / idx.total_gamma
                for v in range(g.node_count) if idx.gamma[v] > 0}
    _assert_gof(counts, expected)

    v = max(range(g.node_count), key=lambda x: int(g.degrees[x]))
    counts = collections.Counter(
        sample_neighbor_sigma(idx, v, draw)[0] for _ in range(n_draws))
    expected = {int(u): n_draws * (int(g.degrees[u]) - 1) / int(idx.sigma_sum[v])
                for u in g.neighbors(v) if g.degrees[u] > 1}
    _assert_gof(counts, expected)

    counts = collections.Counter(
        sample_neighbor_tau(idx, v, draw)[0] for _ in range(n_draws))
    s = int(idx.sigma_sum[v])
    expected = {}
    for u in g.neighbors(v):
        wu = int(g.degrees[u]) - 1
        if wu * (s - wu) > 0:
            expected[int(u)] = n_draws * wu * (s - wu) / int(idx.gamma2[v])
    _assert_gof(counts, expected)

    u_pos = 0
    wu = int(g.degrees[g.neighbors(v)[u_pos]]) - 1
    counts = collections.Counter(
        sample_neighbor_mu_excluding(idx, v, u_pos, draw)[0]
        for _ in range(n_draws))
    expected = {}
    for pos, w in enumerate(g.neighbors(v)):
        if pos == u_pos or g.degrees[w] < 2:
            continue
        expected[int(w)] = n_draws * (int(g.degrees[w]) - 1) / (s - wu)
    _assert_gof(counts, expected)


def _assert_gof(counts, expected):
    assert set(counts) <= set(expected)
    obs = [counts.get(k, 0) for k in sorted(expected)]
    exp = [expected[k] for k in sorted(expected)]
    _, p = stats.chisquare(obs, exp)
    assert p > 0.001, f"chi-square GOF rejected (p={p})"


def test_sigma_check_distribution(medium_graph):
    g, order, idx = medium_graph
    from mosskit.graph import restricted_degree
    rng = Xoshiro256(23)
    draw = make_draw(rng, None)
    v = max(range(g.node_count), key=lambda x: int(idx.gamma_check[x]))
    n_draws = 50_000
    counts = collections.Counter(
        sample_neighbor_sigma_check(idx, v, draw)[0] for _ in range(n_draws))
    expected = {}
    for u in g.neighbors(v):
        u = int(u)
        w = restricted_degree(g, order, u, v) * restricted_degree(g, order, v, u)
        if w:
            expected[u] = n_draws * w / int(idx.gamma_check[v])
    _assert_gof(counts, expected)


def test_position_excluding_covers_support():
    rng = Xoshiro256(3)
    draw = make_draw(rng, None)
    seen = {sample_position_excluding(5, (1, 3), draw, "x") for _ in range(500)}
    assert seen == {0, 2, 4}
    with pytest.raises(EmptySupportError):
        sample_position_excluding(2, (0, 1), draw, "x")


def test_index_cache_roundtrip(tmp_path, k4):
    g, order, idx = k4
    path = tmp_path / "cache.bin"
    save_index_cache(idx, str(path))
    content_hash, (n, m), arrays = load_index_cache(str(path),
                                                    expected_hash=g.content_hash())
    assert (n, m) == (g.node_count, g.edge_count)
    assert np.array_equal(arrays[5], idx.acc_gamma)
    with pytest.raises(ValueError):
        load_index_cache(str(path), expected_hash="0" * 64)
