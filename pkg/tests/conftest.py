import os
import random

import pytest

from mosskit.catalog import build_catalog
from mosskit.graph import build_total_order, load_edge_list
from mosskit.weights import build_weight_index

# optional real-world dataset; the tests that need it skip when absent
CA_GRQC_PATH = os.environ.get("MOSSKIT_CA_GRQC",
                              os.path.join(os.path.dirname(__file__), "data",
                                           "ca-GrQc.txt"))

FIXTURE_EDGES = {
    "k4": [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    "k5": [(i, j) for i in range(5) for j in range(i + 1, 5)],
    "cycle4": [(0, 1), (1, 2), (2, 3), (3, 0)],
    "path3": [(0, 1), (1, 2)],
    "path4": [(0, 1), (1, 2), (2, 3)],
    "path5": [(0, 1), (1, 2), (2, 3), (3, 4)],
    "star3": [(0, 1), (0, 2), (0, 3)],
    "fork": [(0, 1), (0, 2), (0, 3), (3, 4)],
    "banner": [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)],
    "tadpole": [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)],
}


def edges_to_text(edges) -> str:
    return "\n".join(f"{a} {b}" for a, b in edges) + "\n"


def make_graph(edges):
    return load_edge_list(edges_to_text(edges))


def random_gnp(n: int, p: float, seed: int):
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    if not edges:
        edges = [(0, 1)]
    return make_graph(edges)


def graph_with_index(edges):
    g = make_graph(edges)
    order = build_total_order(g)
    return g, order, build_weight_index(g, order)


@pytest.fixture(scope="session")
def catalog():
    return build_catalog()


@pytest.fixture(scope="session")
def k4():
    return graph_with_index(FIXTURE_EDGES["k4"])


@pytest.fixture(scope="session")
def k5():
    return graph_with_index(FIXTURE_EDGES["k5"])


@pytest.fixture(scope="session")
def cycle4():
    return graph_with_index(FIXTURE_EDGES["cycle4"])


@pytest.fixture(scope="session")
def medium_graph():
    """A fixed G(n, p) graph big enough for sampling statistics."""
    g = random_gnp(30, 0.25, seed=2024)
    order = build_total_order(g)
    return g, order, build_weight_index(g, order)
