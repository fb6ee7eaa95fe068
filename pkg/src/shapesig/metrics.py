"""Bottleneck and q-Wasserstein distances between finitized diagrams.

Both distances are computed on the diagonally augmented matching instance:
the left side holds X's points plus the diagonal projections of Y's, the
right side Y's points plus the projections of X's, with L-infinity ground
cost and zero cost between two projections. The bottleneck distance binary
searches the realized pairwise costs with a Hopcroft-Karp feasibility
check, so the result is exact; the Wasserstein distance solves the
assignment problem exactly. A permutation-enumeration oracle is included
for small instances.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .persistence import PersistenceDiagram, finitize

__all__ = [
    "MatchingInstance",
    "bottleneck",
    "brute_force_distance",
    "matching_instance",
    "wasserstein",
]

BRUTE_FORCE_MAX_POINTS = 6


@dataclass(frozen=True)
class MatchingInstance:
    """Diagonally augmented bipartite instance for two diagrams.

    ``left`` is X plus the projections of Y onto the diagonal, ``right`` is
    Y plus the projections of X; ``cost[i, j]`` is the L-infinity distance
    between left[i] and right[j], except projection-to-projection pairs,
    which cost 0. A perfect matching always exists (both sides have
    |X| + |Y| entries).
    """

    left: np.ndarray
    right: np.ndarray
    cost: np.ndarray

    @property
    def size(self) -> int:
        return len(self.left)


def _as_points(diagram) -> np.ndarray:
    """Coerce input to finite (m, 2) points, dropping diagonal points."""
    if isinstance(diagram, PersistenceDiagram):
        pts = finitize(diagram)
    else:
        pts = np.asarray(diagram, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("diagram must be an (m, 2) array of (birth, death) pairs")
    if not np.isfinite(pts).all():
        raise ValueError("diagram points must be finite (cap essential classes first)")
    if pts.size and (pts[:, 0] > pts[:, 1]).any():
        raise ValueError("diagram point with birth > death")
    return pts[pts[:, 0] != pts[:, 1]] if pts.size else pts


def _canonical_pair(x: np.ndarray, y: np.ndarray):
    """Order the two diagrams deterministically so distances are exactly symmetric."""
    kx = (len(x), x.tobytes())
    ky = (len(y), y.tobytes())
    return (x, y) if kx <= ky else (y, x)


def matching_instance(x, y) -> MatchingInstance:
    """Build the augmented matching instance for two finitized diagrams."""
    xp = _as_points(x)
    yp = _as_points(y)
    mid_x = 0.5 * (xp[:, 0] + xp[:, 1])
    mid_y = 0.5 * (yp[:, 0] + yp[:, 1])
    left = np.concatenate([xp, np.column_stack([mid_y, mid_y])])
    right = np.concatenate([yp, np.column_stack([mid_x, mid_x])])
    nx, ny = len(xp), len(yp)
    m = nx + ny
    cost = np.zeros((m, m))
    if nx and ny:
        cost[:nx, :ny] = np.maximum(
            np.abs(xp[:, 0, None] - yp[None, :, 0]),
            np.abs(xp[:, 1, None] - yp[None, :, 1]),
        )
    if nx:
        cost[:nx, ny:] = np.maximum(
            np.abs(xp[:, 0, None] - mid_x[None, :]),
            np.abs(xp[:, 1, None] - mid_x[None, :]),
        )
    if ny:
        cost[nx:, :ny] = np.maximum(
            np.abs(mid_y[:, None] - yp[None, :, 0]),
            np.abs(mid_y[:, None] - yp[None, :, 1]),
        )
    # projection-to-projection entries stay 0
    return MatchingInstance(left=left, right=right, cost=cost)


def _has_perfect_matching(cost: np.ndarray, threshold: float) -> bool:
    """Hopcroft-Karp feasibility: can every left vertex be matched using
    only edges with cost <= threshold?"""
    m = cost.shape[0]
    adj = []
    for i in range(m):
        nbrs = np.flatnonzero(cost[i] <= threshold)
        if len(nbrs) == 0:
            return False
        adj.append(nbrs)
    inf = m + 1
    match_left = [-1] * m
    match_right = [-1] * m
    dist = [0] * m

    def bfs() -> bool:
        queue = deque()
        for u in range(m):
            if match_left[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        reachable_free = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_right[v]
                if w == -1:
                    reachable_free = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return reachable_free

    def augment(u0: int) -> bool:
        # iterative DFS along the BFS layering; frame = [vertex, iterator, chosen v]
        stack = [[u0, iter(adj[u0]), -1]]
        while stack:
            frame = stack[-1]
            u, it = frame[0], frame[1]
            descended = False
            for v in it:
                w = match_right[v]
                if w == -1:
                    match_left[u] = v
                    match_right[v] = u
                    stack.pop()
                    while stack:
                        pu, _, pv = stack.pop()
                        match_left[pu] = pv
                        match_right[pv] = pu
                    return True
                if dist[w] == dist[u] + 1:
                    frame[2] = v
                    stack.append([w, iter(adj[w]), -1])
                    descended = True
                    break
            if not descended:
                dist[u] = inf
                stack.pop()
        return False

    matched = 0
    while bfs():
        for u in range(m):
            if match_left[u] == -1 and augment(u):
                matched += 1
        if matched == m:
            return True
    return matched == m


def bottleneck(x, y) -> float:
    """Exact bottleneck distance between two finitized diagrams.

    Inputs are (m, 2) arrays of finite (birth, death) pairs, or
    :class:`~shapesig.persistence.PersistenceDiagram` objects (finitized
    with their own cap). The result is always one of the realized pairwise
    costs of the matching instance; two empty diagrams have distance 0.
    """
    a, b = _canonical_pair(_as_points(x), _as_points(y))
    inst = matching_instance(a, b)
    if inst.size == 0:
        return 0.0
    candidates = np.unique(inst.cost)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(inst.cost, float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def wasserstein(x, y, q: float = 2.0) -> float:
    """Exact q-Wasserstein distance (L-infinity ground cost) for q >= 1.

    Solved as an optimal assignment on the augmented instance with edge
    weights ``cost**q``; the result is ``(sum of matched weights)**(1/q)``.
    """
    if q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    a, b = _canonical_pair(_as_points(x), _as_points(y))
    inst = matching_instance(a, b)
    if inst.size == 0:
        return 0.0
    weights = inst.cost**q
    rows, cols = linear_sum_assignment(weights)
    return float(weights[rows, cols].sum() ** (1.0 / q))


def brute_force_distance(x, y, mode: str = "bottleneck", q: float = 2.0) -> float:
    """Exact distance by enumerating every perfect matching (test oracle).

    Guarded to |X| + |Y| <= 6 points.
    """
    if mode not in ("bottleneck", "wasserstein"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "wasserstein" and q < 1:
        raise ValueError(f"q must be at least 1, got {q}")
    a, b = _canonical_pair(_as_points(x), _as_points(y))
    if len(a) + len(b) > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_MAX_POINTS} total points")
    inst = matching_instance(a, b)
    m = inst.size
    if m == 0:
        return 0.0
    best = np.inf
    rows = np.arange(m)
    for perm in itertools.permutations(range(m)):
        matched = inst.cost[rows, list(perm)]
        if mode == "bottleneck":
            val = matched.max()
        else:
            val = (matched**q).sum() ** (1.0 / q)
        best = min(best, float(val))
    return best
