"""Passage times, geodesics with minimal hop count, and rectangle crossings.

The search key is the pair (passage time, hops) ordered lexicographically, so
the returned path is a passage-time minimizer of minimal length, and N is
exactly the minimal hop count among all geodesics between the query sets.
Ties beyond (T, hops) are broken by a fixed deterministic rule (heap order by
vertex coordinates, first relaxation wins), so results are reproducible.
"""

import heapq
from typing import NamedTuple

import numpy as np

from .lattice import EAST, NORTH, PRIMAL, Edge, Vertex, edge_between

_NBR_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class LatticePath:
    """A self-avoiding path on one layer, with passage time and hop count."""

    def __init__(self, vertices, passage_time=None, env=None):
        self.vertices = tuple(vertices)
        seen = set(self.vertices)
        if len(seen) != len(self.vertices):
            raise ValueError("path is not self-avoiding")
        self.edges = tuple(
            edge_between(u, v) for u, v in zip(self.vertices, self.vertices[1:])
        )
        if passage_time is None:
            if env is not None:
                passage_time = sum(env.weight(e) for e in self.edges)
            else:
                passage_time = 0.0
        self.passage_time = passage_time

    @property
    def hops(self):
        return len(self.edges)

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, LatticePath) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "LatticePath(%d hops, T=%g)" % (self.hops, self.passage_time)

    def to_json(self):
        return {
            "layer": "dual" if (self.vertices and self.vertices[0].layer) else "primal",
            "vertices": [[v.x, v.y] for v in self.vertices],
            "passage_time": self.passage_time,
            "hops": self.hops,
        }


class GeodesicResult(NamedTuple):
    T: float
    path: LatticePath
    N: int


class GridWindow:
    """A rectangular primal window [x0, x0+nx) x [y0, y0+ny) with cached
    edge weights and open statuses for one environment."""

    def __init__(self, env, x0, y0, nx, ny):
        self.env = env
        self.x0, self.y0, self.nx, self.ny = x0, y0, nx, ny
        self.weights = env.weight_grid(x0, y0, nx, ny)
        # edges leaving the window are unusable
        self.weights[EAST, :, nx - 1] = np.inf
        self.weights[NORTH, ny - 1, :] = np.inf

    @classmethod
    def box(cls, env, R, center=(0, 0)):
        cx, cy = center
        return cls(env, cx - R, cy - R, 2 * R + 1, 2 * R + 1)

    def contains(self, v):
        return (
            v.layer == PRIMAL
            and self.x0 <= v.x < self.x0 + self.nx
            and self.y0 <= v.y < self.y0 + self.ny
        )

    def index(self, v):
        return (v.y - self.y0) * self.nx + (v.x - self.x0)

    def vertex(self, idx):
        return Vertex(self.x0 + idx % self.nx, self.y0 + idx // self.nx, PRIMAL)

    def edge_weight(self, ix, iy, direction):
        # (ix, iy) are window-local coordinates of the edge base
        return self.weights[direction, iy, ix]


def grid_geodesic(window, sources, targets, allowed=None):
    """Lexicographic (T, hops) Dijkstra on a window.

    sources/targets are vertex iterables; allowed, if given, is a set of
    vertices the path may use (both endpoints of every edge must be allowed).
    Returns (T, hops, vertex list) or None when unreachable.
    """
    src = [v for v in sources if window.contains(v)]
    tgt = {v for v in targets if window.contains(v)}
    if allowed is not None:
        src = [v for v in src if v in allowed]
        tgt = {v for v in tgt if v in allowed}
    if not src or not tgt:
        return None
    hit = sorted(set(src) & tgt, key=lambda v: (v.y, v.x))
    if hit:
        return (0.0, 0, [hit[0]])

    dist = {}
    pred = {}
    heap = []
    for v in sorted(set(src), key=lambda v: (v.y, v.x)):
        dist[v] = (0.0, 0)
        heapq.heappush(heap, (0.0, 0, v.y, v.x))
    best = None
    while heap:
        t, hops, vy, vx = heapq.heappop(heap)
        v = Vertex(vx, vy, PRIMAL)
        if dist.get(v) != (t, hops):
            continue
        if v in tgt:
            best = v
            break
        ix, iy = vx - window.x0, vy - window.y0
        for dx, dy in _NBR_STEPS:
            ux, uy = vx + dx, vy + dy
            if not (
                window.x0 <= ux < window.x0 + window.nx
                and window.y0 <= uy < window.y0 + window.ny
            ):
                continue
            u = Vertex(ux, uy, PRIMAL)
            if allowed is not None and u not in allowed:
                continue
            if dx == 1:
                w = window.edge_weight(ix, iy, EAST)
            elif dx == -1:
                w = window.edge_weight(ix - 1, iy, EAST)
            elif dy == 1:
                w = window.edge_weight(ix, iy, NORTH)
            else:
                w = window.edge_weight(ix, iy - 1, NORTH)
            if not np.isfinite(w):
                continue
            cand = (t + w, hops + 1)
            if u not in dist or cand < dist[u]:
                dist[u] = cand
                pred[u] = v
                heapq.heappush(heap, (cand[0], cand[1], uy, ux))
    if best is None:
        return None
    path = [best]
    while path[-1] in pred:
        path.append(pred[path[-1]])
    path.reverse()
    t, hops = dist[best]
    return (t, hops, path)


def _boundary_box_of(A, B):
    """If B is exactly the boundary of a box containing A, return (R, center)."""
    xs = sorted(v.x for v in B)
    ys = sorted(v.y for v in B)
    cx = (xs[0] + xs[-1]) // 2
    cy = (ys[0] + ys[-1]) // 2
    R = xs[-1] - cx
    if R <= 0:
        return None
    shell = {
        Vertex(x, y, PRIMAL)
        for x in range(cx - R, cx + R + 1)
        for y in range(cy - R, cy + R + 1)
        if max(abs(x - cx), abs(y - cy)) == R
    }
    if set(B) == shell and all(
        max(abs(v.x - cx), abs(v.y - cy)) < R for v in A
    ):
        return (R, (cx, cy))
    return None


def passage_time(env, A, B, max_window=4096):
    """T(A, B) with a geodesic of minimal hop count.

    When B is the boundary of a box around A the search is confined to the
    box, which is exact (any path meets the boundary no later than it
    leaves). Otherwise the window is doubled until the best in-window value
    beats every path that leaves the window: such a path pays at least the
    in-window cost of reaching the rim and spends at least (window radius -
    endpoint spread) hops, so once the candidate is lexicographically below
    that bound, all geodesics and the minimal hop count are captured exactly.
    """
    A = [v if isinstance(v, Vertex) else Vertex(*v) for v in A]
    B = [v if isinstance(v, Vertex) else Vertex(*v) for v in B]
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    if set(A) & set(B):
        v = sorted(set(A) & set(B), key=lambda v: (v.y, v.x))[0]
        return GeodesicResult(0.0, LatticePath([v], 0.0), 0)

    boxed = _boundary_box_of(A, B)
    if boxed is not None:
        R, center = boxed
        window = GridWindow.box(env, R, center)
        res = grid_geodesic(window, A, B)
        if res is None:
            raise RuntimeError("boundary unreachable inside its own box")
        t, hops, path = res
        return GeodesicResult(t, LatticePath(path, t), hops)

    pts = A + B
    cx = (min(v.x for v in pts) + max(v.x for v in pts)) // 2
    cy = (min(v.y for v in pts) + max(v.y for v in pts)) // 2
    spread = max(max(abs(v.x - cx), abs(v.y - cy)) for v in pts)
    M = max(2 * spread + 8, 16)
    while M <= max_window:
        window = GridWindow(env, cx - M, cy - M, 2 * M + 1, 2 * M + 1)
        res = grid_geodesic(window, A, B)
        rim = {
            Vertex(x, y)
            for x in range(cx - M, cx + M + 1)
            for y in range(cy - M, cy + M + 1)
            if max(abs(x - cx), abs(y - cy)) == M
        }
        exit_res = grid_geodesic(window, A, rim)
        # any path escaping the window pays >= (rim cost, M - spread)
        bound = (np.inf, 0) if exit_res is None else (exit_res[0], M - spread)
        if res is not None and (res[0], res[1]) < bound:
            t, hops, path = res
            return GeodesicResult(t, LatticePath(path, t), hops)
        M *= 2
    raise RuntimeError("window cap reached without a confinement certificate")


def fast_boundary_TN(env, R, center=(0, 0)):
    """(T, N) from center to dB_R for integer-weight distributions, via
    scipy Dijkstra on composite weights T * 2^22 + hops (exact in float64)."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra

    if not env.distribution.integer_weights:
        raise ValueError("fast path needs integer weights")
    M = 1 << 22
    cx, cy = center
    n = 2 * R + 1
    w = env.weight_grid(cx - R, cy - R, n, n)
    comp = w * M + 1.0

    def vid(ix, iy):
        return iy * n + ix

    rows, cols, data = [], [], []
    ix = np.arange(n - 1)
    iy = np.arange(n)
    # east edges
    IX, IY = np.meshgrid(ix, iy)
    rows.append((IY * n + IX).ravel())
    cols.append((IY * n + IX + 1).ravel())
    data.append(comp[EAST, IY, IX].ravel())
    # north edges
    IX2, IY2 = np.meshgrid(np.arange(n), np.arange(n - 1))
    rows.append((IY2 * n + IX2).ravel())
    cols.append(((IY2 + 1) * n + IX2).ravel())
    data.append(comp[NORTH, IY2, IX2].ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.concatenate(data)
    nv = n * n
    g = csr_matrix((data, (rows, cols)), shape=(nv, nv))
    dist = dijkstra(g, directed=False, indices=vid(R, R), min_only=False)
    bidx = []
    for k in range(n):
        bidx.extend([vid(k, 0), vid(k, n - 1), vid(0, k), vid(n - 1, k)])
    best = np.min(dist[np.array(sorted(set(bidx)))])
    T = int(best) // M
    N = int(best) % M
    return (float(T), N)


def rectangle_crossing_time(env, x0, y0, x1, y1):
    """Minimal passage time between the left and right sides of the
    rectangle [x0, x1] x [y0, y1], over paths staying in the rectangle."""
    if x1 <= x0 or y1 < y0:
        raise ValueError("degenerate rectangle")
    window = GridWindow(env, x0, y0, x1 - x0 + 1, y1 - y0 + 1)
    left = [Vertex(x0, y, PRIMAL) for y in range(y0, y1 + 1)]
    right = [Vertex(x1, y, PRIMAL) for y in range(y0, y1 + 1)]
    res = grid_geodesic(window, left, right)
    if res is None:
        raise RuntimeError("rectangle sides not connected")
    return res[0]
