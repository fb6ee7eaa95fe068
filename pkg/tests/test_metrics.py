import numpy as np
import pytest

from shapesig import (
    PersistenceDiagram,
    bottleneck,
    brute_force_distance,
    matching_instance,
    wasserstein,
)

EMPTY = np.zeros((0, 2))


def random_diagram(rng, max_points=3):
    k = int(rng.integers(0, max_points + 1))
    births = rng.uniform(0.0, 2.0, size=k)
    lifetimes = rng.uniform(0.0, 2.0, size=k)
    return np.column_stack([births, births + lifetimes]) if k else EMPTY.copy()


class TestMatchingInstance:
    def test_sizes_and_projections(self):
        inst = matching_instance([[0.0, 2.0]], [[1.0, 3.0], [0.0, 1.0]])
        assert inst.size == 3
        assert inst.left.shape == (3, 2)
        assert inst.right.shape == (3, 2)
        # projection of (0, 2) is (1, 1)
        assert inst.right[-1].tolist() == [1.0, 1.0]

    def test_cost_symmetric_blocks(self):
        inst = matching_instance([[0.0, 2.0]], [[0.0, 3.0]])
        # direct: max(0, 1) = 1; x to own projection: 1; y to own projection: 1.5
        assert inst.cost[0, 0] == 1.0
        assert inst.cost[0, 1] == 1.0
        assert inst.cost[1, 0] == 1.5
        assert inst.cost[1, 1] == 0.0  # projection to projection

    def test_diagonal_input_points_dropped(self):
        inst = matching_instance([[1.0, 1.0]], EMPTY)
        assert inst.size == 0


class TestBottleneck:
    def test_identity(self):
        assert bottleneck([[0.0, 2.0]], [[0.0, 2.0]]) == 0.0

    def test_single_point_to_empty(self):
        assert bottleneck([[0.0, 2.0]], EMPTY) == 1.0

    def test_direct_match_beats_diagonal(self):
        assert bottleneck([[0.0, 4.0]], [[0.0, 3.0]]) == 1.0

    def test_both_empty(self):
        assert bottleneck(EMPTY, EMPTY) == 0.0

    def test_accepts_diagram_objects(self):
        diagram = PersistenceDiagram(np.array([[1.0, 2.0]]), np.array([0.0]), 2.0)
        assert bottleneck(diagram, diagram) == 0.0

    def test_output_is_realized_cost(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            x, y = random_diagram(rng), random_diagram(rng)
            d = bottleneck(x, y)
            inst = matching_instance(x, y)
            if inst.size:
                assert d in np.unique(inst.cost)


class TestWasserstein:
    def test_identity(self):
        rng = np.random.default_rng(3)
        x = random_diagram(rng)
        assert wasserstein(x, x, 2.0) == 0.0

    def test_two_matchings_frozen(self):
        # min( 1^2 , 2^2 + 1.5^2 )^(1/2) = 1
        assert wasserstein([[0.0, 4.0]], [[0.0, 3.0]], 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_single_point_to_empty(self):
        assert wasserstein([[0.0, 2.0]], EMPTY, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_q_below_one_rejected(self):
        with pytest.raises(ValueError, match="at least 1"):
            wasserstein(EMPTY, EMPTY, 0.5)

    def test_w1_additivity(self):
        # two independent points each pay their own diagonal cost under q=1
        x = np.array([[0.0, 2.0], [5.0, 7.0]])
        assert wasserstein(x, EMPTY, 1.0) == pytest.approx(2.0, abs=1e-12)


class TestBruteForceOracle:
    @pytest.mark.parametrize("mode,q", [("bottleneck", 2.0), ("wasserstein", 1.0), ("wasserstein", 2.0)])
    def test_matches_fast_paths(self, mode, q):
        rng = np.random.default_rng(11)
        for _ in range(40):
            x, y = random_diagram(rng), random_diagram(rng)
            slow = brute_force_distance(x, y, mode, q)
            fast = bottleneck(x, y) if mode == "bottleneck" else wasserstein(x, y, q)
            assert fast == pytest.approx(slow, abs=1e-12)

    def test_size_guard(self):
        big = np.column_stack([np.zeros(4), np.ones(4)])
        with pytest.raises(ValueError, match="limited to 6"):
            brute_force_distance(big, big)

    def test_empty(self):
        assert brute_force_distance(EMPTY, EMPTY) == 0.0


class TestMetricAxioms:
    def test_symmetry_exact(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            x, y = random_diagram(rng, 5), random_diagram(rng, 5)
            assert bottleneck(x, y) == bottleneck(y, x)
            assert wasserstein(x, y, 2.0) == wasserstein(y, x, 2.0)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            x, y, z = (random_diagram(rng, 4) for _ in range(3))
            assert bottleneck(x, z) <= bottleneck(x, y) + bottleneck(y, z) + 1e-9
            w = lambda a, b: wasserstein(a, b, 2.0)
            assert w(x, z) <= w(x, y) + w(y, z) + 1e-9

    def test_bottleneck_below_wasserstein(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            x, y = random_diagram(rng, 4), random_diagram(rng, 4)
            b = bottleneck(x, y)
            assert b <= wasserstein(x, y, 1.0) + 1e-12
            assert b <= wasserstein(x, y, 2.0) + 1e-12

    def test_scale_equivariance(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            x, y = random_diagram(rng, 4), random_diagram(rng, 4)
            s = float(rng.uniform(0.1, 10.0))
            assert bottleneck(s * x, s * y) == pytest.approx(s * bottleneck(x, y), rel=1e-12)
            assert wasserstein(s * x, s * y, 2.0) == pytest.approx(
                s * wasserstein(x, y, 2.0), rel=1e-12
            )


class TestInputValidation:
    def test_bad_shape(self):
        with pytest.raises(ValueError, match=r"\(m, 2\)"):
            bottleneck([[1.0, 2.0, 3.0]], EMPTY)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            bottleneck([[0.0, np.inf]], EMPTY)

    def test_birth_after_death_rejected(self):
        with pytest.raises(ValueError, match="birth > death"):
            bottleneck([[2.0, 1.0]], EMPTY)
