import numpy as np
import pytest

from shapesig import (
    DisconnectedMeshError,
    ScalarField,
    TriMesh,
    VertexEdgeGraph,
    canonicalize,
    cotangent_laplacian,
    fiedler_field,
    fix_sign,
    graph_laplacian,
    smallest_nonzero_eigenpairs,
)
from shapesig.spectral import eigenfunction_field
from shapesig.synthetic import icosphere, perturb_vertices


def path_graph(n):
    return VertexEdgeGraph(n, [(i, i + 1) for i in range(n - 1)])


def path_eigenvalue(n, j):
    return 2.0 - 2.0 * np.cos(np.pi * j / n)


class TestSmallestNonzeroEigenpairs:
    @pytest.mark.parametrize("n", [4, 10, 50])
    def test_path_graph_spectrum(self, n):
        pairs = smallest_nonzero_eigenpairs(graph_laplacian(path_graph(n)), 3)
        for j, pair in enumerate(pairs, start=1):
            assert pair.value == pytest.approx(path_eigenvalue(n, j), rel=1e-6)

    def test_p4_fiedler_value(self):
        pairs = smallest_nonzero_eigenpairs(graph_laplacian(path_graph(4)), 1)
        assert pairs[0].value == pytest.approx(2.0 - np.sqrt(2.0), rel=1e-9)

    def test_complete_graph_k4(self):
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        pairs = smallest_nonzero_eigenpairs(graph_laplacian(VertexEdgeGraph(4, edges)), 3)
        assert np.allclose([p.value for p in pairs], 4.0, rtol=1e-8)

    def test_connected_mesh_positive_fiedler_value(self, tetra):
        pairs = smallest_nonzero_eigenpairs(graph_laplacian(tetra), 1)
        assert pairs[0].value > 0

    def test_disconnected_raises(self):
        graph = VertexEdgeGraph(4, [(0, 1), (2, 3)])
        with pytest.raises(DisconnectedMeshError):
            smallest_nonzero_eigenpairs(graph_laplacian(graph), 1)

    def test_deflation_against_constants(self):
        op = cotangent_laplacian(icosphere(2))
        for pair in smallest_nonzero_eigenpairs(op, 3):
            assert abs(pair.vector @ op.mass) <= 1e-8

    def test_mass_normalization(self):
        op = cotangent_laplacian(icosphere(2))
        for pair in smallest_nonzero_eigenpairs(op, 2):
            assert np.sum(op.mass * pair.vector**2) == pytest.approx(1.0, abs=1e-8)

    def test_residual_certificate_recheck(self):
        op = cotangent_laplacian(icosphere(2))
        tol = 1e-8
        for pair in smallest_nonzero_eigenpairs(op, 3, tol=tol):
            direct = np.linalg.norm(op.apply(pair.vector) - pair.value * op.mass * pair.vector)
            assert direct == pytest.approx(pair.residual, rel=1e-6, abs=1e-14)
            assert direct <= tol * (1.0 + pair.value)

    def test_sparse_path_matches_closed_form(self):
        # above the dense cutoff this exercises the ARPACK shift-invert branch
        n = 3000
        pairs = smallest_nonzero_eigenpairs(graph_laplacian(path_graph(n)), 2, tol=1e-8)
        for j, pair in enumerate(pairs, start=1):
            assert pair.value == pytest.approx(path_eigenvalue(n, j), rel=1e-6)

    def test_k_bounds(self):
        op = graph_laplacian(path_graph(4))
        with pytest.raises(ValueError):
            smallest_nonzero_eigenpairs(op, 0)
        with pytest.raises(ValueError):
            smallest_nonzero_eigenpairs(op, 4)

    def test_eigenvalues_sorted_and_nonnegative(self):
        pairs = smallest_nonzero_eigenpairs(cotangent_laplacian(icosphere(1)), 4)
        values = [p.value for p in pairs]
        assert values == sorted(values)
        assert all(v >= -1e-10 for v in values)


class TestFiedlerField:
    def test_p5_monotone(self):
        field = fiedler_field(path_graph(5), variant="graph")
        diffs = np.diff(field.values)
        assert (diffs > 0).all() or (diffs < 0).all()

    def test_two_component_mesh_raises(self):
        verts = np.arange(18, dtype=float).reshape(6, 3)
        mesh = TriMesh(verts, [[0, 1, 2], [3, 4, 5]])
        with pytest.raises(DisconnectedMeshError):
            fiedler_field(mesh, variant="graph")

    def test_k4_degenerate_eigenspace_contract(self):
        edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        graph = VertexEdgeGraph(4, edges)
        pairs = smallest_nonzero_eigenpairs(graph_laplacian(graph), 1)
        phi = pairs[0].vector
        assert abs(phi.sum()) <= 1e-8  # orthogonal to constants
        assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-8)

    def test_vertex_permutation_equivariance(self):
        rng = np.random.default_rng(5)
        mesh = perturb_vertices(icosphere(1), 0.05, 1)  # noise splits symmetric eigenvalues
        perm = rng.permutation(mesh.vertex_count)
        permuted = TriMesh(mesh.vertices[np.argsort(perm)], perm[mesh.triangles])
        a = smallest_nonzero_eigenpairs(cotangent_laplacian(mesh), 1)[0]
        b = smallest_nonzero_eigenpairs(cotangent_laplacian(permuted), 1)[0]
        assert a.value == pytest.approx(b.value, rel=1e-10)
        fa = fix_sign(ScalarField(a.vector)).values
        fb = fix_sign(ScalarField(b.vector)).values
        # the permuted mesh stores vertex i of the original at slot perm[i]
        assert np.allclose(fb[perm], fa, atol=1e-7)

    def test_provenance_tag(self):
        field = eigenfunction_field(icosphere(1), 2, variant="cotangent")
        assert field.provenance == "cotangent-eigenfunction-2"


class TestCanonicalize:
    def test_positive_skew_kept(self):
        out = canonicalize(ScalarField(np.array([-1.0, 0.0, 3.0])))
        assert np.allclose(out.values, [0.0, 0.25, 1.0], atol=1e-15)

    def test_negative_skew_flipped(self):
        out = canonicalize(ScalarField(np.array([1.0, 0.0, -3.0])))
        assert np.allclose(out.values, [0.0, 0.25, 1.0], atol=1e-15)

    def test_idempotent(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            field = ScalarField(rng.standard_normal(30))
            once = canonicalize(field)
            assert np.array_equal(canonicalize(once).values, once.values)

    def test_range_exact(self):
        out = canonicalize(ScalarField(np.array([3.7, -1.2, 0.4, 9.9])))
        assert out.values.min() == 0.0
        assert out.values.max() == 1.0

    def test_sign_invariance_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            values = rng.standard_normal(40)
            a = canonicalize(ScalarField(values))
            b = canonicalize(ScalarField(-values))
            assert np.array_equal(a.values, b.values)

    def test_constant_field_rejected(self):
        with pytest.raises(ValueError, match="constant field"):
            canonicalize(ScalarField(np.ones(5)))

    def test_fallback_tiebreak(self):
        # symmetric values: skew is exactly zero, largest-magnitude entry decides
        out = fix_sign(ScalarField(np.array([-2.0, 0.0, 2.0])))
        assert out.values[np.argmax(np.abs(out.values))] > 0
        flipped = fix_sign(ScalarField(np.array([2.0, 0.0, -2.0])))
        assert np.array_equal(out.values, flipped.values)


class TestScalarField:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            ScalarField(np.array([1.0, np.nan]))

    def test_rejects_2d(self):
        with pytest.raises(ValueError, match="1-D"):
            ScalarField(np.zeros((2, 2)))
