import time
from itertools import permutations

import numpy as np
import pytest

from mosskit.catalog import (PHI4_1, PHI4_2, PHI5_1, PHI5_2, PHI5_3,
                             build_catalog, count_pattern_subgraphs,
                             matrix_to_mask)


def test_build_runtime_under_one_second():
    start = time.perf_counter()
    build_catalog()
    assert time.perf_counter() - start < 1.0


def test_phi_tables_recomputed_from_adjacency(catalog):
    for i, a in catalog.adjacency4.items():
        assert count_pattern_subgraphs(a, "path4") == PHI4_1[i]
        assert count_pattern_subgraphs(a, "star3") == PHI4_2[i]
    for i, a in catalog.adjacency5.items():
        assert count_pattern_subgraphs(a, "fork") == PHI5_1[i]
        assert count_pattern_subgraphs(a, "path5") == PHI5_2[i]
        assert count_pattern_subgraphs(a, "star4") == PHI5_3[i]


def test_phi_triples_pairwise_distinct():
    triples = [(PHI5_1[i], PHI5_2[i], PHI5_3[i]) for i in range(1, 22)]
    assert len(set(triples)) == 21
    pairs = [(PHI4_1[i], PHI4_2[i]) for i in range(1, 7)]
    assert len(set(pairs)) == 6


def test_class_counts(catalog):
    assert len(catalog.adjacency4) == 6
    assert len(catalog.adjacency5) == 21
    assert catalog.mask_to_id4.shape == (64,)
    assert catalog.mask_to_id5.shape == (1024,)


def _iso_class_by_brute_force(mask, k, representatives):
    nbits = k * (k - 1) // 2
    from mosskit.catalog import _PAIRS
    pairs = _PAIRS[k]
    pair_index = {p: b for b, p in enumerate(pairs)}
    for rep_id, rep_mask in representatives.items():
        for perm in permutations(range(k)):
            permuted = 0
            for b, (i, j) in enumerate(pairs):
                if mask >> b & 1:
                    a, c = sorted((perm[i], perm[j]))
                    permuted |= 1 << pair_index[(a, c)]
            if permuted == rep_mask:
                return rep_id
    return None


def test_mask_table_agrees_with_brute_force_isomorphism(catalog):
    reps4 = {i: matrix_to_mask(a) for i, a in catalog.adjacency4.items()}
    for mask in range(64):
        want = _iso_class_by_brute_force(mask, 4, reps4)
        got = int(catalog.mask_to_id4[mask])
        assert got == (want or 0), f"mask {mask:06b}: {got} != {want}"


def test_mask_table5_spot_checked_against_brute_force(catalog):
    # full 1024-mask agreement is checked through the sampled masks in the
    # classify-vs-permutation test; here a deterministic stride covers 128
    reps5 = {i: matrix_to_mask(a) for i, a in catalog.adjacency5.items()}
    for mask in range(0, 1024, 8):
        want = _iso_class_by_brute_force(mask, 5, reps5)
        got = int(catalog.mask_to_id5[mask])
        assert got == (want or 0)


def test_classification_is_permutation_invariant(catalog):
    rng = np.random.default_rng(7)
    for _ in range(200):
        k = int(rng.integers(4, 6))
        a = np.zeros((k, k), dtype=np.int8)
        for i in range(k):
            for j in range(i + 1, k):
                a[i, j] = a[j, i] = int(rng.integers(0, 2))
        base = catalog.classify4(a) if k == 4 else catalog.classify5(a)
        perm = rng.permutation(k)
        b = a[np.ix_(perm, perm)]
        other = catalog.classify4(b) if k == 4 else catalog.classify5(b)
        assert base == other


def test_classify_rejects_bad_matrices(catalog):
    with pytest.raises(ValueError):
        catalog.classify4(np.zeros((3, 3), dtype=np.int8))
    bad = np.zeros((4, 4), dtype=np.int8)
    bad[0, 1] = 1   # asymmetric
    with pytest.raises(ValueError):
        catalog.classify4(bad)


def test_omega_sets(catalog):
    assert catalog.omega1 | catalog.omega2 == frozenset(range(1, 22)) - {2}
    assert catalog.omega1 - catalog.omega2 == frozenset({3, 8})
    assert catalog.omega2 - catalog.omega1 == frozenset({1, 6})
    assert 2 in catalog.omega3 and 2 not in catalog.omega3_star


def test_to_json_roundtrips(catalog):
    import json
    obj = json.loads(catalog.to_json())
    assert set(obj) == {"motifs4", "motifs5"}
    assert len(obj["motifs4"]) == 6 and len(obj["motifs5"]) == 21
    assert obj["motifs5"]["21"]["phi"] == [60, 60, 5]
