"""Topological shape signatures for triangulated meshes.

The method: compute a low eigenfunction of a mesh Laplacian (by default
the Fiedler vector of the cotangent operator), take the 0-dimensional
persistence diagram of its lower-star filtration, and compare shapes by
bottleneck or Wasserstein distances between those diagrams.
"""

from .laplacian import SparseSymOperator, build_laplacian, cotangent_laplacian, graph_laplacian
from .mesh import (
    MeshParseError,
    TriMesh,
    ValidationReport,
    VertexEdgeGraph,
    largest_component,
    merge_close_vertices,
    parse_obj,
    parse_off,
    serialize_off,
    validate,
)
from .metrics import MatchingInstance, bottleneck, brute_force_distance, matching_instance, wasserstein
from .persistence import (
    FiltrationOrder,
    PersistenceDiagram,
    diagram_from_json,
    diagram_to_json,
    finitize,
    lower_star_order,
    sublevel_betti_oracle,
    zero_persistence,
)
from .pipeline import (
    DescriptorConfig,
    DistanceMatrix,
    Embedding,
    MeshDescriptor,
    compute_descriptor,
    corpus_matrix,
    descriptor_distance,
    mds_embed,
)
from .spectral import (
    DisconnectedMeshError,
    EigenPair,
    EigensolverError,
    ScalarField,
    canonicalize,
    eigenfunction_field,
    fiedler_field,
    fix_sign,
    smallest_nonzero_eigenpairs,
)

__version__ = "0.1.0"

__all__ = [
    "DescriptorConfig",
    "DisconnectedMeshError",
    "DistanceMatrix",
    "EigenPair",
    "EigensolverError",
    "Embedding",
    "FiltrationOrder",
    "MatchingInstance",
    "MeshDescriptor",
    "MeshParseError",
    "PersistenceDiagram",
    "ScalarField",
    "SparseSymOperator",
    "TriMesh",
    "ValidationReport",
    "VertexEdgeGraph",
    "bottleneck",
    "brute_force_distance",
    "build_laplacian",
    "canonicalize",
    "compute_descriptor",
    "corpus_matrix",
    "cotangent_laplacian",
    "descriptor_distance",
    "diagram_from_json",
    "diagram_to_json",
    "eigenfunction_field",
    "fiedler_field",
    "finitize",
    "fix_sign",
    "graph_laplacian",
    "largest_component",
    "lower_star_order",
    "matching_instance",
    "mds_embed",
    "merge_close_vertices",
    "parse_obj",
    "parse_off",
    "serialize_off",
    "smallest_nonzero_eigenpairs",
    "sublevel_betti_oracle",
    "validate",
    "wasserstein",
    "zero_persistence",
]
