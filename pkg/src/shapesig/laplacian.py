"""Sparse symmetric Laplacian operators on the mesh 1-skeleton and surface.

Two discretizations are provided: the combinatorial graph Laplacian
``L = D - A`` of the 1-skeleton, and the cotangent (piecewise-linear FEM)
Laplacian with barycentric lumped-mass weights. Both are symmetric,
positive semi-definite, and annihilate constant vectors.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

__all__ = [
    "SparseSymOperator",
    "build_laplacian",
    "cotangent_laplacian",
    "graph_laplacian",
]

# triangles thinner than this fraction of the squared bounding-box diagonal
# are rejected: silently skipping them would change the operator's domain
DEGENERATE_AREA_FACTOR = 1e-14


class SparseSymOperator:
    """Symmetric positive semi-definite sparse operator with optional mass.

    Parameters
    ----------
    matrix : scipy.sparse matrix
        Square symmetric matrix (stored as CSR).
    mass : array_like or None
        Strictly positive lumped-mass diagonal of matching length, or None
        for an implied identity mass.

    Notes
    -----
    Immutable after construction; :meth:`apply` is pure and reentrant.
    """

    def __init__(self, matrix, mass=None):
        m = sparse.csr_matrix(matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        asym = abs(m - m.T)
        scale = max(abs(m).max(), 1.0) if m.nnz else 1.0
        if asym.nnz and asym.max() > 1e-12 * scale:
            raise ValueError("operator matrix is not symmetric")
        if mass is not None:
            mass = np.asarray(mass, dtype=float)
            if mass.shape != (m.shape[0],):
                raise ValueError("mass diagonal length must equal the dimension")
            if not (mass > 0).all():
                raise ValueError("mass entries must be strictly positive")
        self.matrix = m
        self.mass = mass

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v) -> np.ndarray:
        """Exact sparse product ``L @ v`` (the mass diagonal is not applied)."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dimension,):
            raise ValueError(f"vector length {v.shape} does not match dimension {self.dimension}")
        return self.matrix @ v

    def __repr__(self) -> str:
        kind = "mass-weighted" if self.mass is not None else "unit-mass"
        return f"SparseSymOperator(n={self.dimension}, nnz={self.matrix.nnz}, {kind})"


def graph_laplacian(mesh) -> SparseSymOperator:
    """Combinatorial Laplacian ``L = D - A`` of the 1-skeleton.

    Accepts any object with ``vertex_count`` and ``edges`` attributes
    (:class:`~shapesig.mesh.TriMesh` or
    :class:`~shapesig.mesh.VertexEdgeGraph`). The diagonal holds vertex
    degrees, off-diagonals are -1 on edges; no mass diagonal is attached.
    """
    n = int(mesh.vertex_count)
    if n < 1:
        raise ValueError("mesh must have at least one vertex")
    edges = np.asarray(mesh.edges, dtype=int).reshape(-1, 2)
    if len(edges) == 0:
        return SparseSymOperator(sparse.csr_matrix((n, n)))
    i, j = edges[:, 0], edges[:, 1]
    deg = np.bincount(edges.ravel(), minlength=n).astype(float)
    rows = np.concatenate([i, j, np.arange(n)])
    cols = np.concatenate([j, i, np.arange(n)])
    data = np.concatenate([-np.ones(2 * len(edges)), deg])
    return SparseSymOperator(sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr())


def cotangent_laplacian(mesh) -> SparseSymOperator:
    """Cotangent Laplacian with barycentric lumped-mass diagonal.

    The off-diagonal weight of edge {i, j} is ``-(cot a + cot b) / 2`` over
    the angles opposite the edge in its one or two incident triangles; the
    diagonal makes every row sum to zero. ``mass[i]`` is one third of the
    total area of the triangles incident to vertex i. Negative weights on
    obtuse triangles are kept: the FEM construction is positive
    semi-definite regardless, and clamping would change the spectrum.

    Raises
    ------
    ValueError
        If the mesh has no triangles, a triangle is degenerate (area below
        ``1e-14`` times the squared bounding-box diagonal), or some vertex
        has no incident triangle area (mass must stay strictly positive).
    """
    v = mesh.vertices
    t = mesh.triangles
    n = mesh.vertex_count
    if len(t) == 0:
        raise ValueError("cotangent Laplacian needs a triangulated mesh (no triangles found)")
    p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    cross = np.cross(p1 - p0, p2 - p0)
    double_area = np.linalg.norm(cross, axis=1)
    bbox_diag_sq = float(np.sum((v.max(axis=0) - v.min(axis=0)) ** 2))
    degenerate = 0.5 * double_area < DEGENERATE_AREA_FACTOR * bbox_diag_sq
    if degenerate.any():
        bad = int(np.flatnonzero(degenerate)[0])
        raise ValueError(f"degenerate triangle {bad} (area below tolerance)")
    # cot of the angle at each corner = dot of adjacent edges / twice the area
    cot0 = np.einsum("ij,ij->i", p1 - p0, p2 - p0) / double_area
    cot1 = np.einsum("ij,ij->i", p0 - p1, p2 - p1) / double_area
    cot2 = np.einsum("ij,ij->i", p0 - p2, p1 - p2) / double_area
    # corner k contributes half its cot to the opposite edge
    ei = np.concatenate([t[:, 1], t[:, 0], t[:, 0]])
    ej = np.concatenate([t[:, 2], t[:, 2], t[:, 1]])
    w = 0.5 * np.concatenate([cot0, cot1, cot2])
    rows = np.concatenate([ei, ej, ei, ej])
    cols = np.concatenate([ej, ei, ei, ej])
    data = np.concatenate([-w, -w, w, w])
    matrix = sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    area = 0.5 * double_area
    mass = np.bincount(t.ravel(), weights=np.repeat(area / 3.0, 3), minlength=n)
    if not (mass > 0).all():
        bad = int(np.flatnonzero(mass <= 0)[0])
        raise ValueError(f"vertex {bad} has no incident triangle area; mass would be singular")
    return SparseSymOperator(matrix, mass)


def build_laplacian(mesh, variant: str) -> SparseSymOperator:
    """Dispatch on ``variant`` ("graph" or "cotangent")."""
    if variant == "graph":
        return graph_laplacian(mesh)
    if variant == "cotangent":
        return cotangent_laplacian(mesh)
    raise ValueError(f"unknown laplacian variant {variant!r} (expected 'graph' or 'cotangent')")
