"""Synthetic closed test surfaces: icospheres, tori, ellipsoids, noise."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .mesh import TriMesh, serialize_off

__all__ = [
    "ellipsoid",
    "icosphere",
    "make_demo_corpus",
    "perturb_vertices",
    "torus",
]


def icosphere(subdivisions: int = 2, radius: float = 1.0) -> TriMesh:
    """Sphere from repeated midpoint subdivision of an icosahedron.

    Vertex counts: 12, 42, 162, 642, ... for 0, 1, 2, 3 subdivisions.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
            (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
            (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
        ],
        dtype=float,
    )
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = list(verts / np.linalg.norm(verts[0]))
    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in midpoint:
                p = verts[a] + verts[b]
                verts.append(p / np.linalg.norm(p))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        next_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            next_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = next_faces
    return TriMesh(np.asarray(verts) * radius, faces)


def torus(
    major_radius: float = 1.0,
    minor_radius: float = 0.35,
    n_major: int = 24,
    n_minor: int = 12,
) -> TriMesh:
    """Closed torus from a triangulated parametric grid."""
    if n_major < 3 or n_minor < 3:
        raise ValueError("torus grid needs at least 3 samples per direction")
    theta = 2.0 * np.pi * np.arange(n_major) / n_major
    phi = 2.0 * np.pi * np.arange(n_minor) / n_minor
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ring = major_radius + minor_radius * np.cos(pp)
    verts = np.column_stack(
        [
            (ring * np.cos(tt)).ravel(),
            (ring * np.sin(tt)).ravel(),
            (minor_radius * np.sin(pp)).ravel(),
        ]
    )
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [(a, b, c), (a, c, d)]
    return TriMesh(verts, faces)


def ellipsoid(semi_axes=(1.5, 0.5, 0.5), subdivisions: int = 2) -> TriMesh:
    """Ellipsoid as an anisotropically scaled icosphere."""
    base = icosphere(subdivisions=subdivisions, radius=1.0)
    return TriMesh(base.vertices * np.asarray(semi_axes, dtype=float), base.triangles)


def perturb_vertices(mesh: TriMesh, amplitude: float, seed: int) -> TriMesh:
    """Displace vertices by i.i.d. uniform noise per coordinate.

    ``amplitude`` is relative to the bounding-box diagonal; each coordinate
    moves by uniform[-a, a] with ``a = amplitude * diagonal``.
    """
    diag = float(np.linalg.norm(mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)))
    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-1.0, 1.0, size=mesh.vertices.shape) * amplitude * diag
    return TriMesh(mesh.vertices + offsets, mesh.triangles)


def make_demo_corpus(
    directory,
    per_class: int = 5,
    noise_amplitude: float = 0.02,
    seed: int = 0,
) -> list[Path]:
    """Write a labeled OFF corpus of noisy spheres, tori, and ellipsoids.

    Classes are encoded in the file names (``sphere_00.off`` etc.) so
    retrieval experiments can score themselves. Returns the written paths.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    bases = {
        "sphere": icosphere(subdivisions=3),
        "torus": torus(major_radius=1.0, minor_radius=0.35, n_major=24, n_minor=12),
        "ellipsoid": ellipsoid(semi_axes=(1.5, 0.5, 0.5), subdivisions=2),
    }
    paths = []
    for class_index, (name, base) in enumerate(sorted(bases.items())):
        for i in range(per_class):
            noisy = perturb_vertices(base, noise_amplitude, seed + 1000 * class_index + i)
            path = directory / f"{name}_{i:02d}.off"
            path.write_text(serialize_off(noisy))
            paths.append(path)
    return paths
