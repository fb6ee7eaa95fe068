import numpy as np
import pytest

from shapesig import TriMesh, VertexEdgeGraph
from shapesig.synthetic import make_demo_corpus

TETRA_OFF = """OFF
4 4 6
0 0 0
1 0 0
0 1 0
0 0 1
3 0 1 2
3 0 1 3
3 0 2 3
3 1 2 3
"""


@pytest.fixture
def tetra_off():
    return TETRA_OFF


@pytest.fixture
def tetra():
    return TriMesh(
        [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
    )


def random_connected_graph(rng, n, extra_edges=None):
    """Random spanning tree plus a few extra edges; always connected."""
    edges = set()
    order = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        a, b = int(order[i]), int(order[j])
        edges.add((min(a, b), max(a, b)))
    if extra_edges is None:
        extra_edges = int(rng.integers(0, n))
    for _ in range(extra_edges):
        a, b = rng.integers(0, n, size=2)
        if a != b:
            edges.add((min(int(a), int(b)), max(int(a), int(b))))
    return VertexEdgeGraph(n, sorted(edges))


@pytest.fixture
def make_graph():
    return random_connected_graph


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """The 3-class, 15-mesh synthetic retrieval corpus."""
    directory = tmp_path_factory.mktemp("corpus")
    make_demo_corpus(directory, per_class=5, noise_amplitude=0.02, seed=0)
    return directory


def diagrams_equal(a, b):
    """Exact multiset equality of two persistence diagrams."""
    return (
        np.array_equal(a.points, b.points)
        and np.array_equal(a.essential_births, b.essential_births)
        and a.cap_value == b.cap_value
    )
