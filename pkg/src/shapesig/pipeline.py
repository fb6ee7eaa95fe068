"""Corpus pipeline: descriptors, pairwise distance matrices, 2-D embedding.

A mesh descriptor is the set of 0-persistence diagrams of the configured
Laplacian eigenfunctions (by default just the Fiedler vector). The fields
are sign-fixed but kept at their mass-normalized amplitude: the amplitude
reflects intrinsic geometry and carries much of the signature's
discriminative power (the flip side is that uniformly rescaling a mesh
rescales its diagram). Descriptor distances aggregate per-eigenfunction
diagram distances. The corpus driver computes every descriptor once
(optionally cached on disk, keyed by mesh content hash and configuration
fingerprint), evaluates all pairs, and the embedding step projects the
distance matrix to the plane with classical multidimensional scaling,
which keeps runs deterministic.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .laplacian import build_laplacian
from .mesh import MeshParseError, largest_component, merge_close_vertices, parse_obj, parse_off, validate
from .persistence import (
    PersistenceDiagram,
    diagram_from_dict,
    diagram_to_dict,
    finitize,
    zero_persistence,
)
from .metrics import bottleneck, wasserstein
from .spectral import ScalarField, fix_sign, smallest_nonzero_eigenpairs

__all__ = [
    "DescriptorConfig",
    "DistanceMatrix",
    "Embedding",
    "MeshDescriptor",
    "compute_descriptor",
    "corpus_matrix",
    "descriptor_distance",
    "mds_embed",
]

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "SHAPESIG_THREADS"

DESCRIPTOR_SCHEMA = "shapesig.descriptor/1"

MESH_SUFFIXES = (".off", ".obj")


@dataclass(frozen=True)
class DescriptorConfig:
    """All user-facing knobs of the descriptor pipeline.

    Parameters
    ----------
    laplacian_variant : {"cotangent", "graph"}
        Operator discretization; cotangent is the geometry-aware default.
    eigenfunction_indices : tuple of int
        1-based indices into the nonzero spectrum; (1,) is the Fiedler
        vector. Stored sorted and deduplicated.
    eigensolver_tol : float
        Residual certificate passed to the eigensolver.
    metric : {"bottleneck", "wasserstein"}
        Diagram distance used for descriptor comparison.
    wasserstein_q : float
        Order of the Wasserstein distance (>= 1); ignored for bottleneck.
    aggregation : {"sum", "max"}
        How per-eigenfunction distances combine for multi-index descriptors.
    merge_epsilon : float or None
        If set, merge vertices closer than this before validation (an
        explicit topology change, off by default).
    allow_multicomponent : bool
        If set, multi-component meshes are reduced to their largest
        component instead of rejected.
    """

    laplacian_variant: str = "cotangent"
    eigenfunction_indices: tuple[int, ...] = (1,)
    eigensolver_tol: float = 1e-8
    metric: str = "bottleneck"
    wasserstein_q: float = 2.0
    aggregation: str = "sum"
    merge_epsilon: float | None = None
    allow_multicomponent: bool = False

    def __post_init__(self):
        if self.laplacian_variant not in ("graph", "cotangent"):
            raise ValueError(f"unknown laplacian variant {self.laplacian_variant!r}")
        indices = tuple(sorted({int(i) for i in self.eigenfunction_indices}))
        if not indices or indices[0] < 1:
            raise ValueError("eigenfunction indices must be a nonempty set of integers >= 1")
        object.__setattr__(self, "eigenfunction_indices", indices)
        if not self.eigensolver_tol > 0:
            raise ValueError("eigensolver_tol must be positive")
        if self.metric not in ("bottleneck", "wasserstein"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.wasserstein_q < 1:
            raise ValueError("wasserstein_q must be at least 1")
        if self.aggregation not in ("sum", "max"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        if self.merge_epsilon is not None and self.merge_epsilon < 0:
            raise ValueError("merge_epsilon must be nonnegative")

    def fingerprint(self) -> str:
        """Stable short hash of the configuration, stamped on descriptors."""
        payload = {
            "laplacian_variant": self.laplacian_variant,
            "eigenfunction_indices": list(self.eigenfunction_indices),
            "eigensolver_tol": self.eigensolver_tol,
            "metric": self.metric,
            "wasserstein_q": self.wasserstein_q,
            "aggregation": self.aggregation,
            "merge_epsilon": self.merge_epsilon,
            "allow_multicomponent": self.allow_multicomponent,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class MeshDescriptor:
    """Per-mesh signature: one persistence diagram per eigenfunction index."""

    mesh_id: str
    diagrams: dict[int, PersistenceDiagram]
    config_fingerprint: str

    def to_dict(self) -> dict:
        return {
            "schema": DESCRIPTOR_SCHEMA,
            "mesh_id": self.mesh_id,
            "config_fingerprint": self.config_fingerprint,
            "diagrams": {str(i): diagram_to_dict(d) for i, d in sorted(self.diagrams.items())},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MeshDescriptor":
        return cls(
            mesh_id=doc["mesh_id"],
            diagrams={int(i): diagram_from_dict(d) for i, d in doc["diagrams"].items()},
            config_fingerprint=doc["config_fingerprint"],
        )


@dataclass
class DistanceMatrix:
    """Symmetric nonnegative distance matrix over a corpus.

    ``failures`` lists (mesh_id, reason) for meshes that were excluded;
    the matrix covers the survivors only.
    """

    ids: list[str]
    values: np.ndarray
    failures: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        n = len(self.ids)
        if values.shape != (n, n):
            raise ValueError("matrix shape does not match id count")
        if not np.array_equal(values, values.T):
            raise ValueError("distance matrix must be exactly symmetric")
        if n and (np.diag(values) != 0).any():
            raise ValueError("distance matrix diagonal must be zero")
        if values.size and (values < 0).any():
            raise ValueError("distances must be nonnegative")
        self.values = values

    def to_csv(self) -> str:
        """Header ``id,<id1>,...`` then one full-precision row per mesh."""
        for mesh_id in self.ids:
            if "," in mesh_id or "\n" in mesh_id:
                raise ValueError(f"mesh id {mesh_id!r} cannot be written to CSV")
        lines = ["id," + ",".join(self.ids)]
        for mesh_id, row in zip(self.ids, self.values):
            lines.append(mesh_id + "," + ",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ValueError("empty distance matrix document")
        header = lines[0].split(",")
        if header[0] != "id":
            raise ValueError("distance matrix header must start with 'id'")
        ids = header[1:]
        if len(lines) - 1 != len(ids):
            raise ValueError("distance matrix row count does not match header")
        values = np.zeros((len(ids), len(ids)))
        for r, line in enumerate(lines[1:]):
            cells = line.split(",")
            if cells[0] != ids[r]:
                raise ValueError(f"row id {cells[0]!r} does not match header order")
            if len(cells) - 1 != len(ids):
                raise ValueError(f"row {cells[0]!r} has wrong cell count")
            values[r] = [float(c) for c in cells[1:]]
        return cls(ids=ids, values=values)


# ---------------------------------------------------------------------------
# descriptors

def _parse_any(name: str, text: str):
    suffix = Path(name).suffix.lower()
    if suffix == ".off":
        return parse_off(text)
    if suffix == ".obj":
        return parse_obj(text)
    raise ValueError(f"unsupported mesh format {suffix!r} (expected .off or .obj)")


def _descriptor_from_text(mesh_id: str, name: str, text: str, config: DescriptorConfig) -> MeshDescriptor:
    try:
        mesh = _parse_any(name, text)
        if config.merge_epsilon is not None:
            mesh = merge_close_vertices(mesh, config.merge_epsilon)
        report = validate(mesh)
        if report.non_manifold_edge_count:
            raise ValueError(
                f"{report.non_manifold_edge_count} non-manifold edges (more than 2 incident triangles)"
            )
        if report.duplicate_vertex_warnings:
            logger.warning(
                "%s: %d duplicate vertex positions (pass merge_epsilon to merge)",
                mesh_id,
                report.duplicate_vertex_warnings,
            )
        if report.component_count > 1:
            if not config.allow_multicomponent:
                raise ValueError(
                    f"mesh has {report.component_count} connected components; the Fiedler "
                    "vector needs a connected mesh (enable multi-component handling to "
                    "use the largest component)"
                )
            mesh = largest_component(mesh)
        op = build_laplacian(mesh, config.laplacian_variant)
        k = max(config.eigenfunction_indices)
        pairs = smallest_nonzero_eigenpairs(op, k, config.eigensolver_tol)
        diagrams = {}
        for index in config.eigenfunction_indices:
            raw = ScalarField(
                pairs[index - 1].vector,
                provenance=f"{config.laplacian_variant}-eigenfunction-{index}",
            )
            # sign-fixed but not range-normalized: the mass-normalized
            # amplitude of the eigenfunction is part of the signature
            diagrams[index] = zero_persistence(mesh, fix_sign(raw))
        return MeshDescriptor(
            mesh_id=mesh_id, diagrams=diagrams, config_fingerprint=config.fingerprint()
        )
    except MeshParseError as exc:
        raise ValueError(f"{mesh_id}: parse error: {exc}") from exc
    except ValueError as exc:
        msg = str(exc)
        raise ValueError(msg if msg.startswith(f"{mesh_id}:") else f"{mesh_id}: {msg}") from exc


def compute_descriptor(mesh_path, config: DescriptorConfig) -> MeshDescriptor:
    """Parse, validate, and summarize one mesh file into a descriptor.

    Errors from parsing, validation, and the eigensolver are re-raised
    with the mesh id prefixed.
    """
    path = Path(mesh_path)
    return _descriptor_from_text(path.stem, path.name, path.read_text(), config)


def descriptor_distance(a: MeshDescriptor, b: MeshDescriptor, config: DescriptorConfig) -> float:
    """Configured distance between two descriptors.

    Per-eigenfunction diagram distances are aggregated by sum or max; with
    a single configured index this is exactly the plain diagram distance.
    """
    expected = config.fingerprint()
    if a.config_fingerprint != expected or b.config_fingerprint != expected:
        raise ValueError(
            "descriptor fingerprints do not match this configuration; "
            "recompute descriptors with the same settings"
        )
    per_index = []
    for index in config.eigenfunction_indices:
        da = finitize(a.diagrams[index])
        db = finitize(b.diagrams[index])
        if config.metric == "bottleneck":
            per_index.append(bottleneck(da, db))
        else:
            per_index.append(wasserstein(da, db, q=config.wasserstein_q))
    return float(sum(per_index)) if config.aggregation == "sum" else float(max(per_index))


# ---------------------------------------------------------------------------
# corpus driver

def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV_VAR, "1"))
    if threads < 1:
        raise ValueError("thread count must be at least 1")
    return threads


def _cache_load(cache_dir: Path, key: str) -> MeshDescriptor | None:
    path = cache_dir / f"{key}.json"
    if not path.is_file():
        return None
    try:
        doc = json.loads(path.read_text())
        if doc.get("schema") != DESCRIPTOR_SCHEMA:
            return None
        return MeshDescriptor.from_dict(doc)
    except (ValueError, KeyError):
        logger.warning("ignoring unreadable cache entry %s", path)
        return None


def _cache_store(cache_dir: Path, key: str, descriptor: MeshDescriptor, mesh_sha: str) -> None:
    cache_dir.mkdir(parents=True, exist_ok=True)
    doc = descriptor.to_dict()
    doc["mesh_sha256"] = mesh_sha
    (cache_dir / f"{key}.json").write_text(json.dumps(doc, indent=2) + "\n")


def corpus_matrix(
    directory,
    config: DescriptorConfig,
    threads: int | None = None,
    use_cache: bool = True,
    cache_dir=None,
) -> DistanceMatrix:
    """Pairwise descriptor distances over every mesh file in a directory.

    Files with suffix .off or .obj are processed in name order; meshes
    that fail to parse, validate, or solve are logged, recorded in
    ``failures``, and excluded from the matrix. Needs at least two
    survivors. Descriptor computation and pair evaluation parallelize
    over ``threads`` (default: the SHAPESIG_THREADS environment variable,
    else 1); results do not depend on the thread count.

    Descriptors are cached on disk under ``cache_dir`` (default
    ``<directory>/.shapesig-cache``) keyed by mesh content hash and
    configuration fingerprint; pass ``use_cache=False`` to recompute.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"{directory} is not a directory")
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in MESH_SUFFIXES)
    if len(files) < 2:
        raise ValueError(f"need at least 2 mesh files in {directory}, found {len(files)}")
    stems = [p.stem for p in files]
    ids = stems if len(set(stems)) == len(stems) else [p.name for p in files]
    cache_dir = Path(cache_dir) if cache_dir is not None else directory / ".shapesig-cache"
    fingerprint = config.fingerprint()
    threads = _resolve_threads(threads)

    def load_one(item) -> tuple[str, MeshDescriptor | None, str | None]:
        mesh_id, path = item
        try:
            data = path.read_bytes()
            key = f"{hashlib.sha256(data).hexdigest()[:24]}-{fingerprint}"
            if use_cache:
                cached = _cache_load(cache_dir, key)
                if cached is not None:
                    return mesh_id, cached, None
            descriptor = _descriptor_from_text(
                mesh_id, path.name, data.decode("utf-8", errors="replace"), config
            )
            if use_cache:
                _cache_store(cache_dir, key, descriptor, hashlib.sha256(data).hexdigest())
            return mesh_id, descriptor, None
        except (ValueError, OSError) as exc:
            return mesh_id, None, str(exc)

    items = list(zip(ids, files))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            loaded = list(pool.map(load_one, items))
    else:
        loaded = [load_one(item) for item in items]

    descriptors: list[MeshDescriptor] = []
    kept_ids: list[str] = []
    failures: list[tuple[str, str]] = []
    for mesh_id, descriptor, error in loaded:
        if descriptor is None:
            logger.error("excluding %s: %s", mesh_id, error)
            failures.append((mesh_id, error))
        else:
            descriptors.append(descriptor)
            kept_ids.append(mesh_id)
    if len(descriptors) < 2:
        raise ValueError(
            f"fewer than 2 meshes survived ({len(descriptors)} of {len(files)}); "
            "cannot build a distance matrix"
        )

    n = len(descriptors)
    values = np.zeros((n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def eval_pair(pair):
        i, j = pair
        return i, j, descriptor_distance(descriptors[i], descriptors[j], config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(eval_pair, pairs))
    else:
        results = [eval_pair(pair) for pair in pairs]
    for i, j, dist in results:
        values[i, j] = dist
        values[j, i] = dist
    return DistanceMatrix(ids=kept_ids, values=values, failures=failures)


# ---------------------------------------------------------------------------
# embedding

@dataclass
class Embedding:
    """Classical MDS embedding plus its normalized stress."""

    ids: list[str]
    coords: np.ndarray
    stress: float

    def __iter__(self):
        return iter(zip(self.ids, self.coords))

    def to_csv(self) -> str:
        names = ["x", "y", "z"] + [f"c{i}" for i in range(3, self.coords.shape[1])]
        lines = ["id," + ",".join(names[: self.coords.shape[1]])]
        for mesh_id, row in zip(self.ids, self.coords):
            lines.append(mesh_id + "," + ",".join(repr(float(c)) for c in row))
        return "\n".join(lines) + "\n"


def mds_embed(matrix: DistanceMatrix, dim: int = 2) -> Embedding:
    """Classical multidimensional scaling of a distance matrix.

    Double-centers ``-0.5 * J D^2 J``, takes the top ``dim`` eigenvectors
    scaled by the square roots of their (nonnegative-clamped) eigenvalues.
    Deterministic; each axis's sign is fixed by making its largest-magnitude
    coordinate positive. ``dim`` must be smaller than the matrix size.

    The normalized stress ``sqrt(sum (d_emb - d_in)^2 / sum d_in^2)`` over
    distinct pairs is reported alongside the coordinates.
    """
    n = len(matrix.ids)
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if dim >= n:
        raise ValueError(f"dim={dim} must be smaller than the matrix size {n}")
    d_sq = matrix.values**2
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    gram = -0.5 * centering @ d_sq @ centering
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    top = np.argsort(eigenvalues)[::-1][:dim]
    scale = np.sqrt(np.clip(eigenvalues[top], 0.0, None))
    coords = eigenvectors[:, top] * scale
    for axis in range(dim):
        column = coords[:, axis]
        if column.any() and column[np.argmax(np.abs(column))] < 0:
            coords[:, axis] = -column
    iu = np.triu_indices(n, k=1)
    emb_dist = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2))
    denom = float((matrix.values[iu] ** 2).sum())
    if denom > 0:
        stress = float(np.sqrt(((emb_dist[iu] - matrix.values[iu]) ** 2).sum() / denom))
    else:
        stress = 0.0
    logger.info("mds embedding stress: %.6g", stress)
    return Embedding(ids=list(matrix.ids), coords=coords, stress=stress)
