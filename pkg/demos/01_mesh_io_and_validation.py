"""Reading, validating, and writing triangle meshes.

Walks through the OFF/OBJ parsers, the derived connectivity, and the
validation report, including what happens on malformed input.
"""

import numpy as np

from shapesig import (
    MeshParseError,
    merge_close_vertices,
    parse_obj,
    parse_off,
    serialize_off,
    validate,
)

# An OFF document: header, counts, vertices, faces. Comments are allowed.
tetra_off = """OFF
# a tetrahedron
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

mesh = parse_off(tetra_off)
print("parsed:", mesh)
print("edges (derived, unique):")
print(mesh.edges)

# The validation report is pure data; it never raises.
report = validate(mesh)
print("\nvalidation:", report)
print("closed manifold obeys 3F = 2E:", 3 * mesh.triangle_count == 2 * len(mesh.edges))

# The OBJ subset: v/f records, 1-based and negative (relative) indices.
obj = """
v 0 0 0
v 1 0 0
v 0 1 0
f -3 -2 -1
"""
print("\nOBJ triangle:", parse_obj(obj).triangles.tolist())

# Quads and larger faces are fan-triangulated from their first vertex.
quad = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"
print("quad becomes:", parse_off(quad).triangles.tolist())

# Parse errors carry the offending line number.
try:
    parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n")
except MeshParseError as err:
    print("\nexpected failure:", err)

# Exact duplicates are reported but never merged implicitly; merging is an
# explicit, topology-changing request.
doubled = parse_off(
    "OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n0 0 0\n3 0 1 2\n3 3 1 2\n"
)
print("\nduplicate warnings:", validate(doubled).duplicate_vertex_warnings)
merged = merge_close_vertices(doubled, 1e-9)
print("after merge:", merged, "| components:", validate(merged).component_count)

# Serialization renders 9 significant digits and round-trips.
text = serialize_off(mesh)
assert np.array_equal(parse_off(text).triangles, mesh.triangles)
print("\nround-trip OK; first lines of the OFF output:")
print("\n".join(text.splitlines()[:4]))
