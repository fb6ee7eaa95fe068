"""0-dimensional persistence of lower-star filtrations on the 1-skeleton.

Vertices are swept in non-decreasing field order (ties broken by vertex
index, simulating distinct values). A vertex with no earlier neighbor
births a component at its field value; a vertex whose earlier neighbors
lie in several components merges them under the elder rule, and every
non-surviving component emits a (birth, death) point. Components that
survive the sweep are essential and recorded by birth value; metric
comparisons finitize them at the field maximum (the cap).

A brute-force oracle that rebuilds every filtration prefix from scratch is
included for testing; it must agree with the union-find sweep exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._unionfind import UnionFind

__all__ = [
    "FiltrationOrder",
    "PersistenceDiagram",
    "diagram_from_dict",
    "diagram_from_json",
    "diagram_to_dict",
    "diagram_to_json",
    "finitize",
    "lower_star_order",
    "sublevel_betti_oracle",
    "zero_persistence",
]

ORACLE_MAX_VERTICES = 64


@dataclass(frozen=True)
class FiltrationOrder:
    """Vertex permutation sorted by (field value, vertex index) ascending."""

    permutation: np.ndarray

    def __len__(self) -> int:
        return len(self.permutation)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) pairs plus essential births and a cap.

    ``points`` holds the finite pairs, including zero-persistence points
    (birth == death), which are retained here but ignored by the metrics
    (they sit on the diagonal and are dropped by :func:`finitize`).
    ``essential_births`` holds one birth per connected component;
    ``cap_value`` is the field maximum used to finitize essential classes.
    """

    points: np.ndarray
    essential_births: np.ndarray
    cap_value: float
    provenance: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        ess = np.asarray(self.essential_births, dtype=float).reshape(-1)
        if pts.size and (pts[:, 0] > pts[:, 1]).any():
            raise ValueError("diagram point with birth > death")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "essential_births", ess)
        object.__setattr__(self, "cap_value", float(self.cap_value))


def _field_values(field) -> np.ndarray:
    return np.asarray(getattr(field, "values", field), dtype=float)


def lower_star_order(field) -> FiltrationOrder:
    """Sweep order of the lower-star filtration: by value, ties by index."""
    values = _field_values(field)
    return FiltrationOrder(np.argsort(values, kind="stable"))


def _adjacency(n: int, edges: np.ndarray) -> list[np.ndarray]:
    """Neighbor lists from an undirected edge array."""
    if len(edges) == 0:
        return [np.zeros(0, dtype=int)] * n
    both = np.concatenate([edges, edges[:, ::-1]])
    order = np.argsort(both[:, 0], kind="stable")
    src = both[order, 0]
    dst = both[order, 1]
    counts = np.bincount(src, minlength=n)
    return np.split(dst, np.cumsum(counts)[:-1])


def zero_persistence(mesh, field) -> PersistenceDiagram:
    """0-persistence diagram of the lower-star filtration, by union-find.

    ``mesh`` is anything with ``vertex_count`` and ``edges`` (only the
    1-skeleton matters in dimension 0); ``field`` is a ScalarField or a
    plain value array of matching length.
    """
    values = _field_values(field)
    n = int(mesh.vertex_count)
    if len(values) != n:
        raise ValueError(f"field length {len(values)} does not match vertex count {n}")
    provenance = getattr(field, "provenance", "")
    if n == 0:
        return PersistenceDiagram(
            np.zeros((0, 2)), np.zeros(0), 0.0, provenance=provenance
        )
    order = lower_star_order(values).permutation
    pos = np.empty(n, dtype=int)
    pos[order] = np.arange(n)
    adj = _adjacency(n, np.asarray(mesh.edges, dtype=int).reshape(-1, 2))

    uf = UnionFind(n)
    birth_vertex = np.arange(n)  # creator (earliest) vertex of each root's component
    births: list[float] = []
    deaths: list[float] = []
    for p in range(n):
        v = int(order[p])
        roots = {uf.find(int(u)) for u in adj[v] if pos[u] < p}
        if not roots:
            continue  # v births its own component
        by_age = sorted(roots, key=lambda r: pos[birth_vertex[r]])
        elder = by_age[0]
        elder_creator = birth_vertex[elder]
        for r in by_age[1:]:
            births.append(values[birth_vertex[r]])
            deaths.append(values[v])
            elder = uf.union(elder, r)
        elder = uf.union(elder, v)
        birth_vertex[elder] = elder_creator

    essential = sorted(values[birth_vertex[r]] for r in {uf.find(i) for i in range(n)})
    points = np.column_stack([births, deaths]) if births else np.zeros((0, 2))
    points = points[np.lexsort((points[:, 1], points[:, 0]))]
    return PersistenceDiagram(
        points=points,
        essential_births=np.asarray(essential, dtype=float),
        cap_value=float(values.max()),
        provenance=provenance,
    )


def sublevel_betti_oracle(mesh, field) -> PersistenceDiagram:
    """Brute-force diagram from explicit filtration prefixes (test oracle).

    For every prefix of the sweep order the connected components of the
    induced subgraph are recomputed from scratch; a component is identified
    by its earliest-in-order member (the elder rule representative), and a
    representative that stops representing at step i died at the value of
    the vertex added at step i. Guarded to at most 64 vertices.
    """
    values = _field_values(field)
    n = int(mesh.vertex_count)
    if len(values) != n:
        raise ValueError(f"field length {len(values)} does not match vertex count {n}")
    if n > ORACLE_MAX_VERTICES:
        raise ValueError(f"oracle is limited to {ORACLE_MAX_VERTICES} vertices, got {n}")
    provenance = getattr(field, "provenance", "")
    if n == 0:
        return PersistenceDiagram(np.zeros((0, 2)), np.zeros(0), 0.0, provenance=provenance)
    order = lower_star_order(values).permutation
    pos = np.empty(n, dtype=int)
    pos[order] = np.arange(n)
    edges = np.asarray(mesh.edges, dtype=int).reshape(-1, 2)

    births: list[float] = []
    deaths: list[float] = []
    prev_reps: set[int] = set()
    reps: set[int] = set()
    for i in range(1, n + 1):
        included = order[:i]
        uf = UnionFind(n)
        for a, b in edges:
            if pos[a] < i and pos[b] < i:
                uf.union(int(a), int(b))
        component_rep: dict[int, int] = {}
        for v in included:  # scanned in sweep order, first member seen is eldest
            component_rep.setdefault(uf.find(int(v)), int(v))
        reps = set(component_rep.values())
        newcomer = int(order[i - 1])
        for r in prev_reps - reps:
            births.append(values[r])
            deaths.append(values[newcomer])
        prev_reps = reps

    essential = sorted(values[r] for r in reps)
    points = np.column_stack([births, deaths]) if births else np.zeros((0, 2))
    points = points[np.lexsort((points[:, 1], points[:, 0]))]
    return PersistenceDiagram(
        points=points,
        essential_births=np.asarray(essential, dtype=float),
        cap_value=float(values.max()),
        provenance=provenance,
    )


def finitize(diagram: PersistenceDiagram, cap: float | None = None) -> np.ndarray:
    """Finite (birth, death) pairs ready for metric comparison.

    Essential births become (birth, cap); zero-persistence points (birth
    == death) are dropped; finite points pass through. ``cap`` overrides
    ``diagram.cap_value`` when two diagrams must share one cap.
    """
    cap = diagram.cap_value if cap is None else float(cap)
    pts = diagram.points
    finite = pts[pts[:, 0] != pts[:, 1]] if pts.size else pts.reshape(0, 2)
    if len(diagram.essential_births):
        capped = np.column_stack(
            [diagram.essential_births, np.full(len(diagram.essential_births), cap)]
        )
        finite = np.concatenate([finite, capped])
    return finite


# ---------------------------------------------------------------------------
# serialization (text interchange format for diagrams)

def diagram_to_dict(diagram: PersistenceDiagram) -> dict:
    return {
        "points": [[float(b), float(d)] for b, d in diagram.points],
        "essential_births": [float(b) for b in diagram.essential_births],
        "cap_value": float(diagram.cap_value),
        "provenance": diagram.provenance,
    }


def diagram_from_dict(doc: dict) -> PersistenceDiagram:
    return PersistenceDiagram(
        points=np.asarray(doc["points"], dtype=float).reshape(-1, 2),
        essential_births=np.asarray(doc["essential_births"], dtype=float),
        cap_value=float(doc["cap_value"]),
        provenance=doc.get("provenance", ""),
    )


def diagram_to_json(diagram: PersistenceDiagram) -> str:
    """JSON rendering with round-trip float precision."""
    return json.dumps(diagram_to_dict(diagram), indent=2) + "\n"


def diagram_from_json(text: str) -> PersistenceDiagram:
    return diagram_from_dict(json.loads(text))
