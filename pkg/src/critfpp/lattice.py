"""Deterministic geometry of the square lattice, its dual, edges, boxes and annuli.

The primal lattice is Z^2. The dual lattice is Z^2 + (1/2, 1/2); a dual
vertex is stored at integer coordinates (a, b) meaning the point
(a + 1/2, b + 1/2), so all topology predicates stay in exact integer
arithmetic. Doubled coordinates (every length scaled by 2) are used
whenever midpoints enter the picture.
"""

from typing import NamedTuple, Union

PRIMAL = 0
DUAL = 1

EAST = 0
NORTH = 1

# unit steps for the two edge directions
_STEP = {EAST: (1, 0), NORTH: (0, 1)}


class Vertex(NamedTuple):
    x: int
    y: int
    layer: int = PRIMAL

    def doubled(self):
        """Geometric position in doubled coordinates (exact integers)."""
        if self.layer == PRIMAL:
            return (2 * self.x, 2 * self.y)
        return (2 * self.x + 1, 2 * self.y + 1)


class Edge(NamedTuple):
    base: Vertex
    direction: int  # EAST or NORTH

    @property
    def layer(self):
        return self.base.layer

    @property
    def tip(self):
        dx, dy = _STEP[self.direction]
        return Vertex(self.base.x + dx, self.base.y + dy, self.base.layer)

    def endpoints(self):
        return (self.base, self.tip)

    def midpoint_doubled(self):
        bx, by = self.base.doubled()
        dx, dy = _STEP[self.direction]
        return (bx + dx, by + dy)


def edge_between(u: Vertex, v: Vertex) -> Edge:
    """The edge joining two adjacent same-layer vertices, in canonical form."""
    if u.layer != v.layer:
        raise ValueError("endpoints on different layers")
    dx, dy = v.x - u.x, v.y - u.y
    if (dx, dy) == (1, 0):
        return Edge(u, EAST)
    if (dx, dy) == (-1, 0):
        return Edge(v, EAST)
    if (dx, dy) == (0, 1):
        return Edge(u, NORTH)
    if (dx, dy) == (0, -1):
        return Edge(v, NORTH)
    raise ValueError("vertices are not adjacent: %r, %r" % (u, v))


def dual_edge(e: Edge) -> Edge:
    """The unique edge on the other layer that bisects e (an involution)."""
    b = e.base
    if b.layer == PRIMAL:
        if e.direction == EAST:
            # primal (x,y)-(x+1,y) is bisected by the vertical dual edge
            # from (x+1/2, y-1/2) to (x+1/2, y+1/2)
            return Edge(Vertex(b.x, b.y - 1, DUAL), NORTH)
        # primal (x,y)-(x,y+1) is bisected by the horizontal dual edge
        # from (x-1/2, y+1/2) to (x+1/2, y+1/2)
        return Edge(Vertex(b.x - 1, b.y, DUAL), EAST)
    if e.direction == NORTH:
        return Edge(Vertex(b.x, b.y + 1, PRIMAL), EAST)
    return Edge(Vertex(b.x + 1, b.y, PRIMAL), NORTH)


def dual_neighbors(target: Union[Vertex, Edge]):
    """Dual neighbors: the 4 closest other-layer vertices of a vertex, or the
    2 endpoints of an edge's dual edge."""
    if isinstance(target, Edge):
        return list(dual_edge(target).endpoints())
    v = target
    if v.layer == PRIMAL:
        return [
            Vertex(v.x, v.y, DUAL),
            Vertex(v.x - 1, v.y, DUAL),
            Vertex(v.x, v.y - 1, DUAL),
            Vertex(v.x - 1, v.y - 1, DUAL),
        ]
    return [
        Vertex(v.x, v.y, PRIMAL),
        Vertex(v.x + 1, v.y, PRIMAL),
        Vertex(v.x, v.y + 1, PRIMAL),
        Vertex(v.x + 1, v.y + 1, PRIMAL),
    ]


class Box(NamedTuple):
    """B_R: the box [-R, R]^2 around a center vertex (Chebyshev ball)."""

    radius: int
    center: Vertex = Vertex(0, 0, PRIMAL)

    def contains(self, v: Vertex) -> bool:
        if v.layer != self.center.layer:
            return False
        return max(abs(v.x - self.center.x), abs(v.y - self.center.y)) <= self.radius

    def vertices(self):
        c = self.center
        out = []
        for y in range(c.y - self.radius, c.y + self.radius + 1):
            for x in range(c.x - self.radius, c.x + self.radius + 1):
                out.append(Vertex(x, y, c.layer))
        return out

    def boundary(self):
        """dB_R = B_R \\ B_{R-1}."""
        c = self.center
        R = self.radius
        if R == 0:
            return [c]
        out = []
        for y in range(c.y - R, c.y + R + 1):
            for x in range(c.x - R, c.x + R + 1):
                if max(abs(x - c.x), abs(y - c.y)) == R:
                    out.append(Vertex(x, y, c.layer))
        return out


class Annulus(NamedTuple):
    """A[a, b) around a vertex or an edge; for an edge the center is the
    endpoint of smaller norm, and edge membership goes by the midpoint."""

    inner: int
    outer: int
    center: Union[Vertex, Edge] = Vertex(0, 0, PRIMAL)

    def center_doubled(self):
        c = self.center
        if isinstance(c, Edge):
            # x_e: the endpoint with the smaller Chebyshev norm
            u, v = c.endpoints()
            ud, vd = u.doubled(), v.doubled()
            ku = max(abs(ud[0]), abs(ud[1]))
            kv = max(abs(vd[0]), abs(vd[1]))
            return ud if ku <= kv else vd
        return c.doubled()

    def contains_point_doubled(self, pd) -> bool:
        cx, cy = self.center_doubled()
        r = max(abs(pd[0] - cx), abs(pd[1] - cy))
        return 2 * self.inner <= r < 2 * self.outer


BOTH_ENDPOINTS = "both-endpoints-in"
MIDPOINT = "midpoint-in"
ANY_ENDPOINT = "at-least-one-endpoint-in"


def _box_edge_candidates(box: Box, pad: int):
    c = box.center
    R = box.radius + pad
    for y in range(c.y - R, c.y + R + 1):
        for x in range(c.x - R, c.x + R + 1):
            yield Edge(Vertex(x, y, c.layer), EAST)
            yield Edge(Vertex(x, y, c.layer), NORTH)


def edges_of_region(region, rule=BOTH_ENDPOINTS):
    """Duplicate-free edge list of a Box or Annulus, in the canonical order
    (layer, base.y, base.x, direction)."""
    out = []
    if isinstance(region, Box):
        for e in _box_edge_candidates(region, pad=1):
            if rule == BOTH_ENDPOINTS:
                ok = region.contains(e.base) and region.contains(e.tip)
            elif rule == ANY_ENDPOINT:
                ok = region.contains(e.base) or region.contains(e.tip)
            elif rule == MIDPOINT:
                cd = region.center.doubled()
                md = e.midpoint_doubled()
                ok = max(abs(md[0] - cd[0]), abs(md[1] - cd[1])) <= 2 * region.radius
            else:
                raise ValueError("unknown rule: %r" % (rule,))
            if ok:
                out.append(e)
    elif isinstance(region, Annulus):
        cx, cy = region.center_doubled()
        c = region.center
        layer = c.layer if isinstance(c, Vertex) else c.base.layer
        b = region.outer + 2
        x0, y0 = cx // 2, cy // 2
        for y in range(y0 - b, y0 + b + 1):
            for x in range(x0 - b, x0 + b + 1):
                for d in (EAST, NORTH):
                    e = Edge(Vertex(x, y, layer), d)
                    if rule == MIDPOINT:
                        ok = region.contains_point_doubled(e.midpoint_doubled())
                    elif rule == BOTH_ENDPOINTS:
                        ok = region.contains_point_doubled(
                            e.base.doubled()
                        ) and region.contains_point_doubled(e.tip.doubled())
                    elif rule == ANY_ENDPOINT:
                        ok = region.contains_point_doubled(
                            e.base.doubled()
                        ) or region.contains_point_doubled(e.tip.doubled())
                    else:
                        raise ValueError("unknown rule: %r" % (rule,))
                    if ok:
                        out.append(e)
    else:
        raise TypeError("region must be Box or Annulus")
    out.sort(key=lambda e: (e.base.layer, e.base.y, e.base.x, e.direction))
    return out


def annulus_edge_sets(k_max, rule=BOTH_ENDPOINTS):
    """The dyadic annulus edge sets E_0, ..., E_{k_max}.

    E_k is the set of edges with both endpoints in B_{2^{k+1}} \\ B_{2^k}
    union dB_{2^k}; E_0 is the set of edges with both endpoints in B_2.
    """
    sets = []
    for k in range(k_max + 1):
        lo, hi = 2**k, 2 ** (k + 1)
        edges = []
        for e in edges_of_region(Box(hi)):
            (bx, by), (tx, ty) = e.base.doubled(), e.tip.doubled()
            nb = max(abs(bx), abs(by)) // 2
            nt = max(abs(tx), abs(ty)) // 2
            if k == 0 or (nb >= lo and nt >= lo):
                edges.append(e)
        sets.append(edges)
    return sets
