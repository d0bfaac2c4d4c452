"""Circuits as discrete Jordan curves, cluster detection and circuit algebra.

A circuit is a self-avoiding closed lattice path of length >= 4 on one layer,
stored counterclockwise starting at its lexicographically smallest vertex.
Interior arithmetic is exact: the interior is represented as the set of
opposite-layer vertices strictly inside the curve (each such vertex owns the
unit cell centered on it), and the public interior_test additionally runs an
even-odd ray cast in doubled integer coordinates. The boundary-tracing
primitive turns a blocked cluster into the circuit that separates it, which
is the engine behind the whole geodesic construction.
"""

from typing import NamedTuple

from .lattice import (
    DUAL,
    EAST,
    NORTH,
    PRIMAL,
    Box,
    Edge,
    Vertex,
    dual_edge,
    edge_between,
    edges_of_region,
)

_TURNS = {
    (1, 0): ((0, -1), (1, 0), (0, 1)),
    (0, 1): ((1, 0), (0, 1), (-1, 0)),
    (-1, 0): ((0, 1), (-1, 0), (0, -1)),
    (0, -1): ((-1, 0), (0, -1), (1, 0)),
}  # right turn, straight, left turn


class Circuit:
    def __init__(self, vertices):
        verts = [v if isinstance(v, Vertex) else Vertex(*v) for v in vertices]
        if verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 4:
            raise ValueError("a circuit has at least 4 edges")
        if len(set(verts)) != len(verts):
            raise ValueError("circuit is not self-avoiding")
        layer = verts[0].layer
        if any(v.layer != layer for v in verts):
            raise ValueError("circuit vertices must share a layer")
        # counterclockwise orientation via the shoelace sum
        area2 = 0
        for u, v in zip(verts, verts[1:] + verts[:1]):
            area2 += u.x * v.y - v.x * u.y
        if area2 == 0:
            raise ValueError("degenerate circuit")
        if area2 < 0:
            verts.reverse()
        # canonical rotation: start at the lexicographically smallest vertex
        k = verts.index(min(verts))
        verts = verts[k:] + verts[:k]
        self.layer = layer
        self.vertices = tuple(verts)
        self.edges = frozenset(
            edge_between(u, v) for u, v in zip(verts, verts[1:] + verts[:1])
        )
        self.vertex_set = frozenset(verts)
        self._cells = None

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, Circuit) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "Circuit(%s, %d edges, area %d)" % (
            "primal" if self.layer == PRIMAL else "dual",
            len(self.vertices),
            self.area,
        )

    @property
    def cells(self):
        """Opposite-layer vertices strictly inside the curve; each owns one
        unit cell, so the interior area equals len(cells) (a positive integer)."""
        if self._cells is None:
            rows = {}
            for e in self.edges:
                if e.direction == NORTH:
                    rows.setdefault(e.base.y, []).append(e.base.x)
            cells = set()
            other = DUAL if self.layer == PRIMAL else PRIMAL
            for j, xs in rows.items():
                xs.sort()
                for k in range(0, len(xs), 2):
                    for i in range(xs[k], xs[k + 1]):
                        if self.layer == PRIMAL:
                            cells.add(Vertex(i, j, other))
                        else:
                            cells.add(Vertex(i + 1, j + 1, other))
            self._cells = frozenset(cells)
        return self._cells

    @property
    def area(self):
        return len(self.cells)

    # -- point classification -------------------------------------------

    def _on_curve_doubled(self, q):
        qx, qy = q
        for u, v in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            ux, uy = u.doubled()
            vx, vy = v.doubled()
            if ux == vx == qx and min(uy, vy) <= qy <= max(uy, vy):
                return True
            if uy == vy == qy and min(ux, vx) <= qx <= max(ux, vx):
                return True
        return False

    def interior_test(self, q):
        """Classify a Vertex (either layer) or an Edge (by its midpoint) as
        'interior', 'on-curve' or 'exterior' by even-odd ray casting."""
        if isinstance(q, Edge):
            qd = q.midpoint_doubled()
        elif isinstance(q, Vertex):
            qd = q.doubled()
        else:
            qd = q
        if self._on_curve_doubled(qd):
            return "on-curve"
        qx, qy = qd
        crossings = 0
        for u, v in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            ux, uy = u.doubled()
            vx, vy = v.doubled()
            if ux == vx and ux > qx:
                if min(uy, vy) <= qy < max(uy, vy):
                    crossings += 1
        return "interior" if crossings % 2 else "exterior"

    def encloses_vertex(self, v):
        if v.layer != self.layer:
            return v in self.cells
        return self.interior_test(v) == "interior"

    def encloses_circuit(self, other):
        """int(other) strictly inside: other's curve in int(self)."""
        if other.layer == self.layer:
            return other.cells <= self.cells and self.edges.isdisjoint(other.edges) \
                and all(self.interior_test(v) != "exterior" for v in other.vertices) \
                and other.cells != self.cells
        # cross-layer curves never intersect, so one sample point decides
        return self.interior_test(other.vertices[0]) == "interior"

    def inner_outer_dual_neighbors(self, e):
        """For a circuit edge, its dual edge has one endpoint inside and one
        outside the curve; returns (inner, outer)."""
        a, b = dual_edge(e).endpoints()
        if a in self.cells:
            return (a, b)
        if b in self.cells:
            return (b, a)
        raise ValueError("edge is not on the circuit")

    def arc(self, x, y, avoid_edge=None):
        """A path along the circuit from vertex x to vertex y; prefers an arc
        avoiding avoid_edge, then the shorter one, then the ccw one."""
        vs = self.vertices
        i, j = vs.index(x), vs.index(y)
        n = len(vs)
        fwd = [vs[(i + k) % n] for k in range(0, (j - i) % n + 1)]
        bwd = [vs[(i - k) % n] for k in range(0, (i - j) % n + 1)]
        cands = [fwd, bwd]
        if avoid_edge is not None:
            ok = [
                p
                for p in cands
                if avoid_edge not in {edge_between(u, v) for u, v in zip(p, p[1:])}
            ]
            if ok:
                cands = ok
        cands.sort(key=len)
        return cands[0]

    def to_json(self):
        return {
            "layer": "dual" if self.layer == DUAL else "primal",
            "vertices": [[v.x, v.y] for v in self.vertices],
            "area": self.area,
        }


# -- status windows and cluster growth ------------------------------------


class StatusWindow:
    """Open/closed statuses of all edges in a primal window, with forced
    overrides applied; answers queries for both layers."""

    def __init__(self, env, x0, y0, nx, ny):
        self.x0, self.y0, self.nx, self.ny = x0, y0, nx, ny
        self.open = env.open_grid(x0, y0, nx, ny)

    @classmethod
    def box(cls, env, M, center=(0, 0)):
        cx, cy = center
        return cls(env, cx - M, cy - M, 2 * M + 1, 2 * M + 1)

    def has_primal_edge(self, e):
        bx, by = e.base.x - self.x0, e.base.y - self.y0
        if not (0 <= bx < self.nx and 0 <= by < self.ny):
            return False
        if e.direction == EAST:
            return bx + 1 < self.nx
        return by + 1 < self.ny

    def primal_partner(self, e):
        return e if e.layer == PRIMAL else dual_edge(e)

    def edge_open(self, e):
        e = self.primal_partner(e)
        if not self.has_primal_edge(e):
            raise KeyError("edge outside window: %r" % (e,))
        return bool(self.open[e.direction, e.base.y - self.y0, e.base.x - self.x0])

    def has_edge(self, e):
        return self.has_primal_edge(self.primal_partner(e))

    def contains_vertex(self, v):
        if v.layer == PRIMAL:
            return (
                self.x0 <= v.x < self.x0 + self.nx
                and self.y0 <= v.y < self.y0 + self.ny
            )
        return (
            self.x0 <= v.x < self.x0 + self.nx - 1
            and self.y0 <= v.y < self.y0 + self.ny - 1
        )

    def at_rim(self, v):
        if v.layer == PRIMAL:
            return (
                v.x <= self.x0
                or v.x >= self.x0 + self.nx - 1
                or v.y <= self.y0
                or v.y >= self.y0 + self.ny - 1
            )
        return (
            v.x <= self.x0
            or v.x >= self.x0 + self.nx - 2
            or v.y <= self.y0
            or v.y >= self.y0 + self.ny - 2
        )

    def incident_edges(self, v):
        if v.layer == PRIMAL:
            cands = (
                Edge(v, EAST),
                Edge(v, NORTH),
                Edge(Vertex(v.x - 1, v.y, PRIMAL), EAST),
                Edge(Vertex(v.x, v.y - 1, PRIMAL), NORTH),
            )
        else:
            cands = (
                Edge(v, EAST),
                Edge(v, NORTH),
                Edge(Vertex(v.x - 1, v.y, DUAL), EAST),
                Edge(Vertex(v.x, v.y - 1, DUAL), NORTH),
            )
        return [e for e in cands if self.has_edge(e)]


class ClusterGrowth(NamedTuple):
    vertices: frozenset
    edges: frozenset
    escaped: bool


class WindowEscape(Exception):
    """The grown cluster reached the window rim; retry with a larger window."""


def grow_cluster(sw, seeds, want_open, extra_edges=(), raise_on_escape=False):
    """BFS from seed vertices over same-layer edges whose status matches
    want_open, plus the extra edges (treated traversable regardless).

    All seeds join the cluster even when isolated. Deterministic order.
    """
    extra = set(extra_edges)
    seen = set()
    edges = set()
    escaped = False
    stack = sorted(set(seeds), key=lambda v: (v.y, v.x))
    seen.update(stack)
    while stack:
        v = stack.pop()
        if sw.at_rim(v):
            escaped = True
            if raise_on_escape:
                raise WindowEscape()
            continue
        for e in sw.incident_edges(v):
            if e in extra or sw.edge_open(e) == want_open:
                u = e.base if e.tip == v else e.tip
                edges.add(e)
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return ClusterGrowth(frozenset(seen), frozenset(edges), escaped)


# -- boundary tracing -------------------------------------------------------


def _cell_corner(cell, di, dj):
    # the cell of a dual vertex (a, b) is [a, a+1]^2 with primal corners;
    # the cell of a primal vertex (x, y) is [x-1/2, x+1/2]^2 with dual corners
    if cell.layer == DUAL:
        return Vertex(cell.x + di, cell.y + dj, PRIMAL)
    return Vertex(cell.x - 1 + di, cell.y - 1 + dj, DUAL)


def _boundary_segments(cells):
    """Directed unit segments of the cell-union boundary, interior on the
    left (counterclockwise outer walks, clockwise hole walks)."""
    cellset = set(cells)
    segs = set()
    for c in cellset:
        L = c.layer
        if Vertex(c.x, c.y + 1, L) not in cellset:  # top: heading -x
            segs.add((_cell_corner(c, 1, 1), _cell_corner(c, 0, 1)))
        if Vertex(c.x, c.y - 1, L) not in cellset:  # bottom: heading +x
            segs.add((_cell_corner(c, 0, 0), _cell_corner(c, 1, 0)))
        if Vertex(c.x - 1, c.y, L) not in cellset:  # left: heading -y
            segs.add((_cell_corner(c, 0, 1), _cell_corner(c, 0, 0)))
        if Vertex(c.x + 1, c.y, L) not in cellset:  # right: heading +y
            segs.add((_cell_corner(c, 1, 0), _cell_corner(c, 1, 1)))
    return segs


def trace_boundaries(cells):
    """All boundary cycles of a nonempty cell union, as vertex cycles on the
    corner layer. At pinch corners the walk takes the sharpest right turn,
    which keeps every cycle self-avoiding. Returns (outer, holes)."""
    segs = _boundary_segments(cells)
    if not segs:
        raise ValueError("no boundary (empty cell set)")
    unused = set(segs)
    cycles = []
    while unused:
        start = min(unused, key=lambda s: (s[0].y, s[0].x, s[1].y, s[1].x))
        walk = [start[0]]
        cur = start
        while True:
            unused.discard(cur)
            frm, to = cur
            walk.append(to)
            d = (to.x - frm.x, to.y - frm.y)
            nxt = None
            for dd in _TURNS[d]:
                cand = (to, Vertex(to.x + dd[0], to.y + dd[1], to.layer))
                if cand in segs:
                    nxt = cand
                    break
            if nxt is None:
                raise RuntimeError("boundary walk broke off")
            if nxt == start:
                break
            cur = nxt
        cycles.append(Circuit(walk))
    # the outer cycle owns the globally smallest corner
    lowest = min(
        (v for seg in segs for v in seg), key=lambda v: (v.y, v.x)
    )
    outer = [c for c in cycles if lowest in c.vertex_set]
    if len(outer) != 1:
        raise RuntimeError("could not identify the outer boundary")
    outer = outer[0]
    holes = [c for c in cycles if c is not outer]
    return outer, holes


def cluster_cells(growth_or_vertices):
    vs = (
        growth_or_vertices.vertices
        if isinstance(growth_or_vertices, ClusterGrowth)
        else growth_or_vertices
    )
    return set(vs)


# -- the public cluster API ------------------------------------------------


class Cluster(NamedTuple):
    edges: frozenset
    vertices: frozenset
    layer: int
    status: str  # open or closed
    bounded: bool


def clusters(env, region, status):
    """Maximal connected components of same-status edges in a Box region.

    Open clusters live on the primal lattice, closed clusters on the dual
    (the duals of closed primal edges). Components touching the region rim
    are flagged unbounded.
    """
    if status not in ("open", "closed"):
        raise ValueError("status must be open or closed")
    want_open = status == "open"
    layer = PRIMAL if want_open else DUAL
    R = region.radius
    cx, cy = region.center.x, region.center.y
    sw = StatusWindow(env, cx - R - 1, cy - R - 1, 2 * R + 3, 2 * R + 3)

    if layer == PRIMAL:
        cand = [
            e
            for e in edges_of_region(region, "both-endpoints-in")
            if sw.edge_open(e) == want_open
        ]
    else:
        cand = []
        for a in range(cx - R, cx + R):
            for b in range(cy - R, cy + R):
                for d in (EAST, NORTH):
                    e = Edge(Vertex(a, b, DUAL), d)
                    if sw.has_edge(e) and not sw.edge_open(e):
                        # both dual endpoints strictly inside B_R (geometric
                        # sup norm < R, checked in doubled coordinates)
                        ok = all(
                            max(abs(2 * u.x + 1 - 2 * cx), abs(2 * u.y + 1 - 2 * cy))
                            < 2 * R
                            for u in e.endpoints()
                        )
                        if ok:
                            cand.append(e)

    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in cand:
        for v in e.endpoints():
            parent.setdefault(v, v)
        a, b = find(e.base), find(e.tip)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups = {}
    for e in cand:
        groups.setdefault(find(e.base), []).append(e)
    out = []
    for root in sorted(groups):
        edges = groups[root]
        verts = {v for e in edges for v in e.endpoints()}
        if layer == PRIMAL:
            rim = any(max(abs(v.x - cx), abs(v.y - cy)) >= R for v in verts)
        else:
            rim = any(
                max(abs(2 * v.x + 1 - 2 * cx), abs(2 * v.y + 1 - 2 * cy)) >= 2 * R - 1
                for v in verts
            )
        out.append(
            Cluster(frozenset(edges), frozenset(verts), layer, status, not rim)
        )
    return out


def separating_circuit(cluster, pad=4):
    """The closed dual circuit enclosing a bounded open primal cluster (or
    the open primal circuit enclosing a bounded closed dual cluster): the
    outer boundary trace of the cluster's cells."""
    if not cluster.bounded:
        raise ValueError("cluster is unbounded; enlarge the window")
    if not cluster.vertices:
        raise ValueError("empty cluster")
    outer, _ = trace_boundaries(set(cluster.vertices))
    return outer


def isolated_vertex_circuit(v):
    """The 4-edge circuit around a single vertex (all incident edges of the
    other status)."""
    outer, _ = trace_boundaries({v})
    return outer


# -- seed-set connectors ----------------------------------------------------


def _l_path(u, v):
    """A deterministic L-shaped vertex path from u to v on one layer."""
    path = [u]
    x, y = u.x, u.y
    step = 1 if v.x > x else -1
    while x != v.x:
        x += step
        path.append(Vertex(x, y, u.layer))
    step = 1 if v.y > y else -1
    while y != v.y:
        y += step
        path.append(Vertex(x, y, u.layer))
    return path


def _connector_edges(vertex_groups):
    """Edges of L-paths chaining one representative per group; used to make
    multi-component seed sets connected before growing a cluster."""
    reps = sorted((min(g) for g in vertex_groups if g))
    edges = set()
    for u, v in zip(reps, reps[1:]):
        p = _l_path(u, v)
        edges.update(edge_between(a, b) for a, b in zip(p, p[1:]))
    return edges


# -- circuit algebra (join / meet) -----------------------------------------


def _poke_point(c_probe, c_ref, side):
    """A point (vertex or edge) of c_probe strictly on the given side
    ('interior'/'exterior') of c_ref, or None."""
    for v in c_probe.vertices:
        if c_ref.interior_test(v) == side:
            return v
    for e in sorted(
        c_probe.edges, key=lambda e: (e.base.y, e.base.x, e.direction)
    ):
        if c_ref.interior_test(e) == side:
            return e
    return None


def _splice_arcs(c_moving, c_fixed, z):
    """Walk c_moving from z in both directions to the first vertices on
    c_fixed; returns (x, phi, y): phi is the strictly one-sided arc."""
    vs = list(c_moving.vertices)
    n = len(vs)
    if isinstance(z, Edge):
        u, w = z.endpoints()
        i = vs.index(u)
        # orient so that w follows u
        if vs[(i + 1) % n] != w:
            vs.reverse()
            i = vs.index(u)
        j = (i + 1) % n
    else:
        i = j = vs.index(z)
    onfix = c_fixed.vertex_set
    fwd = [vs[j]]
    k = j
    while vs[k] not in onfix:
        k = (k + 1) % n
        fwd.append(vs[k])
    bwd = [vs[i]]
    k = i
    while vs[k] not in onfix:
        k = (k - 1) % n
        bwd.append(vs[k])
    if i == j:
        # z is a vertex: both walks start there, drop the duplicate
        phi = list(reversed(bwd)) + fwd[1:]
    else:
        # z is an edge: the walks start at its two endpoints
        phi = list(reversed(bwd)) + fwd
    # phi runs x .. y with interior strictly off-curve
    return phi[0], phi, phi[-1]


def _candidate_circuits(phi, c_fixed):
    """The two Jordan curves made of phi plus either arc of c_fixed."""
    x, y = phi[0], phi[-1]
    vs = c_fixed.vertices
    i, j = vs.index(y), vs.index(x)
    n = len(vs)
    arc1 = [vs[(i + k) % n] for k in range(0, (j - i) % n + 1)]
    arc2 = [vs[(i - k) % n] for k in range(0, (i - j) % n + 1)]
    out = []
    for arc in (arc1, arc2):
        cycle = phi + arc[1:-1]
        if len(set(cycle)) == len(cycle) and len(cycle) >= 4:
            try:
                out.append(Circuit(cycle))
            except ValueError:
                pass
    return out


def join(c1, c2):
    """The unique circuit C with int(c1) u int(c2) in int(C) and C a subset
    of the edges of c1 and c2 (interiors must overlap). Built by repeated
    outward splices; the interior grows strictly at every step."""
    if c1.layer != c2.layer:
        raise ValueError("circuits on different layers")
    # closed interiors must meet: overlapping cells, or a shared edge
    # (curves running together with interiors on either side)
    if not (c1.cells & c2.cells) and not (c1.edges & c2.edges):
        raise ValueError("interiors are disjoint")
    base_cells = c1.cells | c2.cells
    cur = c1
    guard = 0
    while not (c2.cells <= cur.cells):
        if cur.cells <= c2.cells and _poke_point(cur, c2, "exterior") is None:
            cur = c2
            continue
        z = _poke_point(c2, cur, "exterior")
        if z is None:
            break  # c2 fully inside-or-on cur
        x, phi, y = _splice_arcs(c2, cur, z)
        grew = None
        for cand in _candidate_circuits(phi, cur):
            if cur.cells <= cand.cells and len(cand.cells) > len(cur.cells):
                grew = cand
                break
        if grew is None:
            raise RuntimeError("join splice found no expanding completion")
        cur = grew
        guard += 1
        if guard > 4 * len(base_cells) + 16:
            raise RuntimeError("join failed to terminate")
    assert c1.cells <= cur.cells and c2.cells <= cur.cells
    assert cur.edges <= (c1.edges | c2.edges)
    return cur


def meet(S, circuits_list):
    """The unique innermost circuit C with S in int(C) in every int(C_i),
    edges drawn from the union of the inputs. Built by repeated inward
    splices; the interior shrinks strictly at every step."""
    if not circuits_list:
        raise ValueError("need at least one circuit")
    S = [v if isinstance(v, Vertex) else Vertex(*v) for v in S]
    for c in circuits_list:
        for v in S:
            if c.interior_test(v) != "interior":
                raise ValueError("S is not enclosed by every input circuit")
    cur = circuits_list[0]
    for other in circuits_list[1:]:
        guard = 0
        while not (cur.cells <= other.cells):
            if other.cells <= cur.cells and _poke_point(other, cur, "exterior") is None:
                cur = other
                continue
            z = _poke_point(other, cur, "interior")
            if z is None:
                raise RuntimeError("meet splice found no inward point")
            x, phi, y = _splice_arcs(other, cur, z)
            shrunk = None
            for cand in _candidate_circuits(phi, cur):
                if len(cand.cells) < len(cur.cells) and all(
                    cand.interior_test(v) == "interior" for v in S
                ):
                    shrunk = cand
                    break
            if shrunk is None:
                raise RuntimeError("meet splice found no shrinking completion")
            cur = shrunk
            guard += 1
            if guard > 4 * len(circuits_list[0].cells) + 16:
                raise RuntimeError("meet failed to terminate")
    return cur
