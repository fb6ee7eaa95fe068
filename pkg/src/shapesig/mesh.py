"""Triangle mesh containers, OFF/OBJ parsing, and combinatorial validation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._unionfind import UnionFind

__all__ = [
    "MeshParseError",
    "TriMesh",
    "ValidationReport",
    "VertexEdgeGraph",
    "largest_component",
    "merge_close_vertices",
    "parse_obj",
    "parse_off",
    "serialize_off",
    "validate",
]


class MeshParseError(ValueError):
    """Malformed mesh file. Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TriMesh:
    """Indexed triangle mesh with derived edge connectivity.

    Parameters
    ----------
    vertices : array_like
        Vertex positions, shape (n, 3), float.
    triangles : array_like
        Vertex index triples, shape (m, 3), int. Every triangle must
        reference three distinct, in-range vertices.

    Notes
    -----
    Instances are treated as immutable after construction (the unique edge
    list is derived lazily and cached); do not mutate the arrays in place.
    Safe for concurrent read access.
    """

    def __init__(self, vertices, triangles):
        v = np.array(vertices, dtype=float)
        if v.size == 0:
            v = v.reshape(0, 3)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must be an (n, 3) array")
        if not np.isfinite(v).all():
            raise ValueError("vertex coordinates must be finite")
        t = np.array(triangles, dtype=int)
        if t.size == 0:
            t = t.reshape(0, 3)
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError("triangles must be an (m, 3) array")
        if t.size:
            if t.min() < 0 or t.max() >= len(v):
                raise ValueError("triangle vertex index out of range")
            repeated = (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])
            if repeated.any():
                bad = int(np.flatnonzero(repeated)[0])
                raise ValueError(f"triangle {bad} repeats a vertex index")
        self.vertices = v
        self.triangles = t
        self._edges: np.ndarray | None = None

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    @property
    def edges(self) -> np.ndarray:
        """Unique undirected edges as an (e, 2) array with edge[i, 0] < edge[i, 1]."""
        if self._edges is None:
            self._edges, _ = _undirected_edges(self.triangles)
        return self._edges

    def __repr__(self) -> str:
        return f"TriMesh({self.vertex_count} vertices, {self.triangle_count} triangles)"


class VertexEdgeGraph:
    """Bare 1-skeleton: a vertex count plus undirected edges, no geometry.

    Graph Laplacians and lower-star persistence only consume the 1-skeleton,
    so they accept either a :class:`TriMesh` or this lighter container
    (handy for path graphs, cycles, and random test graphs).
    """

    def __init__(self, vertex_count: int, edges):
        n = int(vertex_count)
        if n < 0:
            raise ValueError("vertex_count must be nonnegative")
        e = np.array(edges, dtype=int)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must be an (e, 2) array")
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge vertex index out of range")
            if (e[:, 0] == e[:, 1]).any():
                raise ValueError("self-loop edge")
            e = np.unique(np.sort(e, axis=1), axis=0)
        self.vertex_count = n
        self.edges = e

    def __repr__(self) -> str:
        return f"VertexEdgeGraph({self.vertex_count} vertices, {len(self.edges)} edges)"


@dataclass(frozen=True)
class ValidationReport:
    """Findings of :func:`validate`. Carries counts, never raises."""

    is_manifold: bool
    component_count: int
    boundary_edge_count: int
    non_manifold_edge_count: int
    duplicate_vertex_warnings: int


def _undirected_edges(triangles: np.ndarray):
    """Unique sorted undirected edges of a triangle list, with multiplicities."""
    if triangles.size == 0:
        return np.zeros((0, 2), dtype=int), np.zeros(0, dtype=int)
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    e = np.sort(e, axis=1)
    return np.unique(e, axis=0, return_counts=True)


# ---------------------------------------------------------------------------
# parsing

def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    return source


def _tokenize(text: str):
    """Split into whitespace tokens tagged with 1-based line numbers.

    `#` starts a comment running to end of line; blank lines are skipped.
    """
    tokens = []
    last_line = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = line.split("#", 1)[0]
        for tok in body.split():
            tokens.append((tok, lineno))
    return tokens, last_line


class _TokenCursor:
    def __init__(self, tokens, last_line):
        self._tokens = tokens
        self._last_line = last_line
        self._i = 0

    def next(self, what: str):
        if self._i >= len(self._tokens):
            raise MeshParseError(f"unexpected end of file while reading {what}", self._last_line)
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def next_int(self, what: str) -> tuple[int, int]:
        tok, line = self.next(what)
        try:
            return int(tok), line
        except ValueError:
            raise MeshParseError(f"expected an integer for {what}, got {tok!r}", line) from None

    def next_float(self, what: str) -> tuple[float, int]:
        tok, line = self.next(what)
        try:
            return float(tok), line
        except ValueError:
            raise MeshParseError(f"expected a number for {what}, got {tok!r}", line) from None


def _fan_triangulate(indices: list[int], line: int) -> list[tuple[int, int, int]]:
    """Split a polygon into triangles fanned from its first vertex."""
    if len(indices) < 3:
        raise MeshParseError(f"face with {len(indices)} vertices (need at least 3)", line)
    tris = []
    for a, b in zip(indices[1:-1], indices[2:]):
        tri = (indices[0], a, b)
        if len(set(tri)) != 3:
            raise MeshParseError("face repeats a vertex index", line)
        tris.append(tri)
    return tris


def parse_off(source) -> TriMesh:
    """Parse an ASCII OFF document into a :class:`TriMesh`.

    Expected layout: the literal header ``OFF``, then vertex/face/edge
    counts, then the vertex coordinates, then the faces (``k i0 ... ik-1``).
    Faces with more than three sides are fan-triangulated from their first
    vertex. Comments (``#``) and blank lines are ignored.

    Parameters
    ----------
    source : str or file-like
        Document text or a readable stream.

    Raises
    ------
    MeshParseError
        Malformed header, bad count/coordinate/index fields, face arity
        below 3, out-of-range indices, or a truncated document. The error
        message names the offending line.
    """
    tokens, last_line = _tokenize(_read_text(source))
    cur = _TokenCursor(tokens, last_line)
    header, line = cur.next("header")
    if header != "OFF":
        raise MeshParseError(f"expected 'OFF' header, got {header!r}", line)
    nv, _ = cur.next_int("vertex count")
    nf, _ = cur.next_int("face count")
    cur.next_int("edge count")  # declared edge count is ignored
    if nv < 0 or nf < 0:
        raise MeshParseError("negative vertex or face count", line)
    vertices = np.empty((nv, 3), dtype=float)
    for i in range(nv):
        for axis in range(3):
            vertices[i, axis], _ = cur.next_float(f"coordinate of vertex {i}")
    triangles: list[tuple[int, int, int]] = []
    for f in range(nf):
        k, kline = cur.next_int(f"vertex count of face {f}")
        if k < 3:
            raise MeshParseError(f"face with {k} vertices (need at least 3)", kline)
        indices = []
        for _ in range(k):
            idx, iline = cur.next_int(f"vertex index of face {f}")
            if idx < 0 or idx >= nv:
                raise MeshParseError(f"vertex index {idx} out of range (mesh has {nv} vertices)", iline)
            indices.append(idx)
        triangles.extend(_fan_triangulate(indices, kline))
    return TriMesh(vertices, triangles)


def parse_obj(source) -> TriMesh:
    """Parse a Wavefront OBJ subset into a :class:`TriMesh`.

    Only ``v`` and ``f`` records are consumed; normals, texture
    coordinates, materials, groups, and free-form records are ignored.
    Face entries of the forms ``i``, ``i/j``, ``i/j/k``, and ``i//k`` are
    accepted (only the position index is used); indices are 1-based, and
    negative indices count back from the most recently defined vertex.
    Polygonal faces are fan-triangulated from their first vertex.
    """
    text = _read_text(source)
    vertices: list[tuple[float, float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        if key == "v":
            if len(parts) < 4:
                raise MeshParseError("vertex record needs 3 coordinates", lineno)
            try:
                vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError:
                raise MeshParseError(f"bad vertex coordinate in {raw.strip()!r}", lineno) from None
        elif key == "f":
            entries = parts[1:]
            if len(entries) < 3:
                raise MeshParseError(f"face with {len(entries)} vertices (need at least 3)", lineno)
            indices = []
            for entry in entries:
                field = entry.split("/", 1)[0]
                try:
                    idx = int(field)
                except ValueError:
                    raise MeshParseError(f"bad face index {entry!r}", lineno) from None
                if idx == 0:
                    raise MeshParseError("face index 0 is invalid (OBJ indices are 1-based)", lineno)
                resolved = len(vertices) + idx if idx < 0 else idx - 1
                if resolved < 0 or resolved >= len(vertices):
                    raise MeshParseError(
                        f"face index {idx} out of range ({len(vertices)} vertices defined)", lineno
                    )
                indices.append(resolved)
            triangles.extend(_fan_triangulate(indices, lineno))
        # all other record types are ignored
    return TriMesh(np.array(vertices, dtype=float).reshape(-1, 3), triangles)


def serialize_off(mesh: TriMesh) -> str:
    """Render a mesh as an ASCII OFF document.

    Coordinates are written with 9 significant digits, so parsing the
    output reproduces the 9-digit decimal rendering of the input exactly.
    """
    lines = ["OFF", f"{mesh.vertex_count} {mesh.triangle_count} {len(mesh.edges)}"]
    for x, y, z in mesh.vertices:
        lines.append(f"{x:.9g} {y:.9g} {z:.9g}")
    for a, b, c in mesh.triangles:
        lines.append(f"3 {a} {b} {c}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation and repair

def validate(mesh: TriMesh) -> ValidationReport:
    """Compute combinatorial health findings for a mesh.

    Pure function of the mesh: repeated calls return identical reports.
    ``is_manifold`` means no edge is shared by more than two triangles;
    connectivity is reported separately as ``component_count`` (union-find
    over the 1-skeleton, counting isolated vertices as components).
    """
    edges, counts = _undirected_edges(mesh.triangles)
    boundary = int((counts == 1).sum())
    non_manifold = int((counts > 2).sum())
    uf = UnionFind(mesh.vertex_count)
    for a, b in edges:
        uf.union(int(a), int(b))
    components = uf.component_count()
    n_unique = len(np.unique(mesh.vertices, axis=0)) if mesh.vertex_count else 0
    return ValidationReport(
        is_manifold=(non_manifold == 0),
        component_count=components,
        boundary_edge_count=boundary,
        non_manifold_edge_count=non_manifold,
        duplicate_vertex_warnings=mesh.vertex_count - n_unique,
    )


def merge_close_vertices(mesh: TriMesh, epsilon: float) -> TriMesh:
    """Merge vertices closer than ``epsilon``; an explicit topology change.

    Clusters are merged onto their lowest-index member. Triangles that
    collapse (fewer than three distinct vertices after merging) are
    dropped; unreferenced duplicate vertices are removed.
    """
    from scipy.spatial import cKDTree

    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    n = mesh.vertex_count
    if n == 0:
        return mesh
    uf = UnionFind(n)
    for a, b in cKDTree(mesh.vertices).query_pairs(epsilon):
        uf.union(int(a), int(b))
    root = np.fromiter((uf.find(i) for i in range(n)), dtype=int, count=n)
    # lowest index of each cluster becomes its representative
    rep_of_root: dict[int, int] = {}
    for i in range(n):
        rep_of_root.setdefault(int(root[i]), i)
    rep = np.fromiter((rep_of_root[int(r)] for r in root), dtype=int, count=n)
    keep = np.unique(rep)
    new_index = np.full(n, -1, dtype=int)
    new_index[keep] = np.arange(len(keep))
    remapped = new_index[rep[mesh.triangles]] if mesh.triangle_count else mesh.triangles
    if len(remapped):
        ok = (
            (remapped[:, 0] != remapped[:, 1])
            & (remapped[:, 1] != remapped[:, 2])
            & (remapped[:, 0] != remapped[:, 2])
        )
        remapped = remapped[ok]
    return TriMesh(mesh.vertices[keep], remapped)


def largest_component(mesh: TriMesh) -> TriMesh:
    """Restrict a mesh to its largest connected component.

    Components are measured by vertex count over the 1-skeleton; ties go
    to the component containing the lowest vertex index. Vertices outside
    the chosen component are removed and indices compacted.
    """
    n = mesh.vertex_count
    if n == 0:
        return mesh
    uf = UnionFind(n)
    for a, b in mesh.edges:
        uf.union(int(a), int(b))
    roots = np.fromiter((uf.find(i) for i in range(n)), dtype=int, count=n)
    labels, first_index, sizes = np.unique(roots, return_index=True, return_counts=True)
    best = np.flatnonzero(sizes == sizes.max())
    chosen = labels[best[np.argmin(first_index[best])]]
    keep = np.flatnonzero(roots == chosen)
    new_index = np.full(n, -1, dtype=int)
    new_index[keep] = np.arange(len(keep))
    tri_keep = np.all(np.isin(mesh.triangles, keep), axis=1) if mesh.triangle_count else []
    triangles = new_index[mesh.triangles[tri_keep]] if mesh.triangle_count else mesh.triangles
    return TriMesh(mesh.vertices[keep], triangles)
