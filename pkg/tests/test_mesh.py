import numpy as np
import pytest

from shapesig import (
    MeshParseError,
    TriMesh,
    largest_component,
    merge_close_vertices,
    parse_obj,
    parse_off,
    serialize_off,
    validate,
)
from shapesig.synthetic import icosphere, torus


class TestParseOff:
    def test_tetrahedron(self, tetra_off):
        mesh = parse_off(tetra_off)
        assert mesh.vertex_count == 4
        assert mesh.triangle_count == 4
        assert len(mesh.edges) == 6

    def test_quad_is_fan_triangulated(self):
        text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"
        mesh = parse_off(text)
        assert mesh.triangle_count == 2
        assert len(mesh.edges) == 5
        assert mesh.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]

    def test_index_out_of_range_names_line(self):
        text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 9\n"
        with pytest.raises(MeshParseError, match="line 7") as err:
            parse_off(text)
        assert err.value.line == 7
        assert "out of range" in str(err.value)

    def test_missing_header(self):
        with pytest.raises(MeshParseError, match="OFF"):
            parse_off("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")

    def test_truncated_stream(self):
        with pytest.raises(MeshParseError, match="end of file"):
            parse_off("OFF\n4 4 6\n0 0 0\n1 0 0\n")

    def test_face_arity_error(self):
        text = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n2 0 1\n"
        with pytest.raises(MeshParseError, match="face with 2 vertices"):
            parse_off(text)

    def test_comments_and_blank_lines(self, tetra_off):
        commented = "# a comment\n\n" + tetra_off.replace("3 0 1 2", "3 0 1 2 # face")
        mesh = parse_off(commented)
        assert mesh.triangle_count == 4

    def test_reads_stream(self, tetra_off, tmp_path):
        path = tmp_path / "tetra.off"
        path.write_text(tetra_off)
        with open(path) as handle:
            mesh = parse_off(handle)
        assert mesh.vertex_count == 4


class TestParseObj:
    def test_single_face(self):
        mesh = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        assert mesh.vertex_count == 3
        assert mesh.triangle_count == 1
        assert len(mesh.edges) == 3

    def test_negative_indices(self):
        absolute = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        relative = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n")
        assert np.array_equal(absolute.triangles, relative.triangles)

    def test_face_arity_error(self):
        with pytest.raises(MeshParseError, match="face with 2 vertices"):
            parse_obj("v 0 0 0\nv 1 0 0\nf 1 2\n")

    def test_slash_forms_and_ignored_records(self):
        text = (
            "mtllib scene.mtl\no thing\nvn 0 0 1\nvt 0 0\n"
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\n"
            "f 1/1 2/2/1 3//1\nf 2 4 3\n"
        )
        mesh = parse_obj(text)
        assert mesh.triangle_count == 2

    def test_out_of_range_index(self):
        with pytest.raises(MeshParseError, match="out of range"):
            parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n")


class TestValidate:
    def test_tetrahedron(self, tetra):
        report = validate(tetra)
        assert report.is_manifold
        assert report.component_count == 1
        assert report.boundary_edge_count == 0
        assert report.non_manifold_edge_count == 0

    def test_two_disjoint_triangles(self):
        mesh = TriMesh(np.arange(18, dtype=float).reshape(6, 3), [[0, 1, 2], [3, 4, 5]])
        assert validate(mesh).component_count == 2

    def test_single_triangle_boundary(self):
        mesh = TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        report = validate(mesh)
        assert report.boundary_edge_count == 3
        assert report.is_manifold

    def test_non_manifold_edge(self):
        verts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0]]
        mesh = TriMesh(verts, [[0, 1, 2], [0, 1, 3], [0, 1, 4]])
        report = validate(mesh)
        assert report.non_manifold_edge_count == 1
        assert not report.is_manifold

    def test_duplicate_vertices_warned(self):
        mesh = TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 0]], [[0, 1, 2]])
        assert validate(mesh).duplicate_vertex_warnings == 1

    def test_pure(self, tetra):
        assert validate(tetra) == validate(tetra)

    def test_isolated_vertex_counts_as_component(self):
        mesh = TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 5, 5]], [[0, 1, 2]])
        assert validate(mesh).component_count == 2


class TestRoundTripAndInvariants:
    def test_serialize_parse_round_trip(self):
        mesh = icosphere(subdivisions=1, radius=1.2345678901)
        back = parse_off(serialize_off(mesh))
        assert np.array_equal(back.triangles, mesh.triangles)
        original = [f"{c:.9g}" for c in mesh.vertices.ravel()]
        reparsed = [f"{c:.9g}" for c in back.vertices.ravel()]
        assert original == reparsed

    @pytest.mark.parametrize("mesh", [icosphere(1), icosphere(2), torus(1.0, 0.35, 12, 6)])
    def test_closed_manifold_edge_count(self, mesh):
        assert 3 * mesh.triangle_count == 2 * len(mesh.edges)

    def test_edges_unique_and_sorted(self, tetra):
        edges = tetra.edges
        assert (edges[:, 0] < edges[:, 1]).all()
        assert len(np.unique(edges, axis=0)) == len(edges)


class TestConstruction:
    def test_rejects_out_of_range_triangle(self):
        with pytest.raises(ValueError, match="out of range"):
            TriMesh([[0, 0, 0], [1, 0, 0]], [[0, 1, 2]])

    def test_rejects_repeated_index(self):
        with pytest.raises(ValueError, match="repeats"):
            TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 1]])

    def test_empty_mesh(self):
        mesh = TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=int))
        assert mesh.vertex_count == 0
        assert len(mesh.edges) == 0


class TestRepair:
    def test_merge_close_vertices(self):
        verts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1e-9, 0, 0], [1, 1, 0]]
        mesh = TriMesh(verts, [[0, 1, 2], [3, 1, 4]])
        merged = merge_close_vertices(mesh, 1e-6)
        assert merged.vertex_count == 4
        assert merged.triangle_count == 2
        assert validate(merged).component_count == 1

    def test_merge_drops_collapsed_triangles(self):
        verts = [[0, 0, 0], [1e-9, 0, 0], [0, 1, 0]]
        mesh = TriMesh(verts, [[0, 1, 2]])
        merged = merge_close_vertices(mesh, 1e-6)
        assert merged.triangle_count == 0

    def test_largest_component(self):
        verts = np.array(
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [9, 9, 9], [10, 9, 9], [9, 10, 9]],
            dtype=float,
        )
        tris = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [4, 5, 6]]
        kept = largest_component(TriMesh(verts, tris))
        assert kept.vertex_count == 4
        assert kept.triangle_count == 4
        assert validate(kept).component_count == 1
