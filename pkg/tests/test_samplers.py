import pytest
from scipy import stats

from mosskit import _backend
from mosskit.errors import InapplicableMethodError
from mosskit.outcomes import (moss4_distribution, moss4min_distribution,
                              path5_distribution, t5_distribution)
from mosskit.rng import TapeRecorder, Xoshiro256
from mosskit.samplers import Tally, run_partitioned, run_sampler

from conftest import FIXTURE_EDGES, graph_with_index, random_gnp
from mosskit.graph import build_total_order
from mosskit.weights import build_weight_index

METHODS = ("moss4", "moss4min", "t5", "path5")


def _gnp_case(seed=41, n=12, p=0.45):
    g = random_gnp(n, p, seed)
    order = build_total_order(g)
    return g, order, build_weight_index(g, order)


def test_tape_replays_identically(catalog):
    g, order, idx = _gnp_case()
    for method in METHODS:
        tape = TapeRecorder()
        a = run_sampler(method, g, idx, catalog, 500, Xoshiro256(9), tape=tape)
        b = run_sampler(method, g, idx, catalog, 500, Xoshiro256(9),
                        backend="python")
        assert a.to_json_obj() == b.to_json_obj()
        assert len(tape.trials) == 500


@pytest.mark.skipif(not _backend.HAVE_KERNELS, reason="kernels not built")
def test_backends_bitwise_identical(catalog):
    for seed in (1, 2):
        g, order, idx = _gnp_case(seed=seed)
        for method in METHODS:
            ra, rb = Xoshiro256(777), Xoshiro256(777)
            a = run_sampler(method, g, idx, catalog, 2000, ra, backend="cython")
            b = run_sampler(method, g, idx, catalog, 2000, rb, backend="python")
            assert a.to_json_obj() == b.to_json_obj()
            assert ra.state == rb.state   # identical draw consumption


def test_budget_accounting(catalog):
    g, order, idx = _gnp_case()
    for method in METHODS:
        tally = run_sampler(method, g, idx, catalog, 300, Xoshiro256(4))
        tally.check_budget()
        assert tally.budget == 300


def test_inapplicable_methods_raise(catalog):
    _, _, idx3 = graph_with_index(FIXTURE_EDGES["path3"])
    g3 = idx3.graph
    for method in METHODS:
        with pytest.raises(InapplicableMethodError):
            run_sampler(method, g3, idx3, catalog, 10, Xoshiro256(1))
    # path4 supports moss4 but has no fork-tree for t5
    _, _, idx4 = graph_with_index(FIXTURE_EDGES["path4"])
    run_sampler("moss4", idx4.graph, idx4, catalog, 10, Xoshiro256(1))
    with pytest.raises(InapplicableMethodError):
        run_sampler("t5", idx4.graph, idx4, catalog, 10, Xoshiro256(1))


def test_bad_arguments(catalog):
    g, order, idx = _gnp_case()
    with pytest.raises(ValueError):
        run_sampler("nope", g, idx, catalog, 10, Xoshiro256(1))
    with pytest.raises(ValueError):
        run_sampler("moss4", g, idx, catalog, 0, Xoshiro256(1))


def test_empirical_frequencies_match_exact_law(catalog):
    g, order, idx = _gnp_case(seed=14, n=11, p=0.5)
    dists = {"moss4": moss4_distribution(g, catalog),
             "moss4min": moss4min_distribution(g, order, catalog),
             "t5": t5_distribution(g, catalog),
             "path5": path5_distribution(g, catalog)}
    budget = 60_000
    for method, dist in dists.items():
        tally = run_sampler(method, g, idx, catalog, budget, Xoshiro256(100))
        cells, expected = [], []
        for i, p in sorted(dist.class_probability.items()):
            cells.append(tally.hits.get(i, 0))
            expected.append(budget * float(p))
        other = budget - sum(cells)
        other_p = budget * float(dist.degenerate + dist.non_credited)
        if other_p > 0:
            cells.append(other)
            expected.append(other_p)
        keep = [(o, e) for o, e in zip(cells, expected) if e >= 5]
        obs = [o for o, _ in keep]
        exp = [e for _, e in keep]
        exp = [e * sum(obs) / sum(exp) for e in exp]
        _, p_val = stats.chisquare(obs, exp)
        assert p_val > 0.001, f"{method}: GOF rejected (p={p_val})"


def test_partitioned_runs_are_schedule_independent(catalog):
    g, order, idx = _gnp_case()
    a = run_partitioned("moss4", g, idx, catalog, 1000, master_seed=55, workers=4)
    b = run_partitioned("moss4", g, idx, catalog, 1000, master_seed=55, workers=4)
    assert a.to_json_obj() == b.to_json_obj()
    c = run_partitioned("moss4", g, idx, catalog, 1000, master_seed=55, workers=7)
    assert c.budget == 1000
    c.check_budget()


def test_tally_merge_and_serialization():
    a = Tally("t5", 10, {1: 4, 5: 2}, degenerate=4)
    b = Tally("t5", 5, {1: 1}, degenerate=4)
    m = a + b
    assert m.budget == 15 and m.hits == {1: 5, 5: 2} and m.degenerate == 8
    assert Tally.from_json_obj(m.to_json_obj()).to_json_obj() == m.to_json_obj()
    with pytest.raises(ValueError):
        a + Tally("moss4", 1)
