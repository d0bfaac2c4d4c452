"""Arm events in annuli: exact per-configuration detection and Monte Carlo
estimation of arm probabilities, including defected arms.

An arm query asks for j vertex-disjoint open primal arms and k vertex-disjoint
closed dual arms crossing the annulus between two boxes around a center. An
open primal path and a closed dual path can never cross (a crossing point
would be the shared midpoint of a primal/dual edge pair, which carries one
status), so cross-color disjointness is automatic and the two colors are
checked independently.

Disjointness within a color is Menger's theorem: j vertex-disjoint arms exist
iff a unit-vertex-capacity maximum flow from the inner anchors to the outer
shell is at least j. With a defect budget d the flow runs on the layered
state graph (vertex, defects used); capacities are per state, so two arms may
share a lattice vertex at different defect counts. For d = 0 this is exact
vertex-disjointness.

Boundary conventions: arms live inside the closed annulus; an open arm starts
on the inner box boundary (or at a prescribed anchor vertex) and ends on the
outer box boundary; a closed dual arm runs between the dual rings just
outside the inner box and just inside the outer box.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .construction import construct
from .environment import Environment, mix_seed
from .lattice import DUAL, EAST, NORTH, Box, Edge, Vertex


@dataclass(frozen=True)
class ArmQuery:
    """j open primal + k closed dual disjoint arms across an annulus.

    center is a primal Vertex (arms anchored on the boundary of the box of
    radius a) or a primal Edge (edge-rooted: one open arm from each endpoint
    and the closed arm from either endpoint of the crossing dual edge).
    Each arm tolerates at most defect_budget wrong-status edges.
    """

    center: object
    a: int
    b: int
    open_count: int
    closed_count: int
    defect_budget: int = 0
    containment: Box = None

    def __post_init__(self):
        if self.open_count + self.closed_count < 1:
            raise ValueError("at least one arm must be requested")
        if self.open_count < 0 or self.closed_count < 0 or self.defect_budget < 0:
            raise ValueError("arm counts and defect budget must be nonnegative")
        if isinstance(self.center, Edge):
            if self.a != 0:
                raise ValueError("edge-rooted queries use a = 0")
            if self.b < 1:
                raise ValueError("b must be at least 1")
        else:
            if not (1 <= self.a < self.b):
                raise ValueError("need 1 <= a < b")


@dataclass(frozen=True)
class EstimateResult:
    p_hat: float
    stderr: float
    samples: int
    seed: int

    def csv_row(self, query_id, q):
        return [
            query_id,
            q.a,
            q.b,
            q.open_count,
            q.closed_count,
            q.defect_budget,
            self.samples,
            repr(self.p_hat),
            repr(self.stderr),
            self.seed,
        ]


# -- connectivity kernels ------------------------------------------------------


@njit(cache=True, nogil=True)
def _reach_set(stat_e, stat_n, mask, src):
    """Vertices reachable from src through edges of status True whose
    endpoints both carry mask. All arrays are (ny, nx)."""
    ny, nx = mask.shape
    seen = np.zeros((ny, nx), dtype=np.bool_)
    stack = np.empty((ny * nx, 2), dtype=np.int64)
    top = 0
    for y in range(ny):
        for x in range(nx):
            if src[y, x] and mask[y, x]:
                seen[y, x] = True
                stack[top, 0] = y
                stack[top, 1] = x
                top += 1
    while top > 0:
        top -= 1
        y = stack[top, 0]
        x = stack[top, 1]
        if x + 1 < nx and stat_e[y, x] and mask[y, x + 1] and not seen[y, x + 1]:
            seen[y, x + 1] = True
            stack[top, 0] = y
            stack[top, 1] = x + 1
            top += 1
        if x > 0 and stat_e[y, x - 1] and mask[y, x - 1] and not seen[y, x - 1]:
            seen[y, x - 1] = True
            stack[top, 0] = y
            stack[top, 1] = x - 1
            top += 1
        if y + 1 < ny and stat_n[y, x] and mask[y + 1, x] and not seen[y + 1, x]:
            seen[y + 1, x] = True
            stack[top, 0] = y + 1
            stack[top, 1] = x
            top += 1
        if y > 0 and stat_n[y - 1, x] and mask[y - 1, x] and not seen[y - 1, x]:
            seen[y - 1, x] = True
            stack[top, 0] = y - 1
            stack[top, 1] = x
            top += 1
    return seen


def _disjoint_flow(stat_e, stat_n, mask, src, tgt, need, d):
    """Maximum number of disjoint arms (capped at need) via unit-capacity
    flow on the vertex-split (and, for d > 0, defect-layered) graph."""
    n = mask.shape[0]
    layers = d + 1
    ids = -np.ones((n, n), dtype=np.int64)
    ids[mask] = np.arange(int(mask.sum()))
    nv = int(mask.sum())

    def nid(v, t):
        return (v * layers + t) * 2  # even: in-node, odd: out-node

    N = nv * layers * 2 + 2
    S, T = N - 2, N - 1
    rows, cols, caps = [], [], []

    def add(u, v, c):
        rows.append(u)
        cols.append(v)
        caps.append(c)

    for y in range(n):
        for x in range(n):
            v = ids[y, x]
            if v < 0:
                continue
            for t in range(layers):
                add(nid(v, t), nid(v, t) + 1, 1)
                if tgt[y, x]:
                    add(nid(v, t) + 1, T, 1)
            if src[y, x]:
                add(S, nid(v, 0), 1)
            for dy, dx, st in ((0, 1, stat_e[y, x]), (1, 0, stat_n[y, x])):
                if y + dy >= n or x + dx >= n:
                    continue
                u = ids[y + dy, x + dx]
                if u < 0:
                    continue
                for t in range(layers):
                    if st:
                        add(nid(v, t) + 1, nid(u, t), 1)
                        add(nid(u, t) + 1, nid(v, t), 1)
                    elif t + 1 < layers:
                        add(nid(v, t) + 1, nid(u, t + 1), 1)
                        add(nid(u, t) + 1, nid(v, t + 1), 1)
    g = csr_matrix((np.asarray(caps, dtype=np.int32), (rows, cols)), shape=(N, N))
    return int(maximum_flow(g, S, T).flow_value)


# -- geometry of a query -------------------------------------------------------


def _query_frame(q):
    """Local status arrays and masks for one query. Returns a dict with the
    primal (stat/mask/src/tgt) and dual (stat/mask/src/tgt) pieces."""
    if isinstance(q.center, Edge):
        base = q.center.base
        cx, cy = base.x, base.y
    else:
        cx, cy = q.center.x, q.center.y
    b = q.b
    n = 2 * b + 1
    return cx, cy, n


def _masks(q, n):
    b, a = q.b, q.a
    yy, xx = np.mgrid[0:n, 0:n]
    dist = np.maximum(np.abs(xx - b), np.abs(yy - b))  # center at (b, b)

    pmask = (dist >= a) & (dist <= b)
    psrc = dist == a
    ptgt = dist == b

    # dual vertex (x, y) sits at (x + 1/2, y + 1/2); in doubled units its
    # distance to the center is odd, between 2a - 1 and 2b - 1 inside
    ddist = np.maximum(np.abs(2 * (xx - b) + 1), np.abs(2 * (yy - b) + 1))
    dmask = (ddist >= 2 * a - 1) & (ddist <= 2 * b - 1)
    dsrc = ddist == max(2 * a - 1, 1)
    dtgt = ddist == 2 * b - 1

    if isinstance(q.center, Edge):
        e = q.center
        pmask = dist <= b
        psrc = np.zeros_like(pmask)
        psrc[b, b] = True  # base endpoint
        ox, oy = e.tip.x - e.base.x, e.tip.y - e.base.y
        psrc[b + oy, b + ox] = True  # tip endpoint
        dmask = ddist <= 2 * b - 1
        dsrc = np.zeros_like(dmask)
        from .lattice import dual_edge

        for u in dual_edge(e).endpoints():
            ix, iy = u.x - (e.base.x - b), u.y - (e.base.y - b)
            if 0 <= ix < n and 0 <= iy < n:
                dsrc[iy, ix] = True
    return pmask, psrc, ptgt, dmask, dsrc, dtgt


def _containment_clip(q, cx, cy, n, pmask, dmask):
    box = q.containment
    if box is None:
        return pmask, dmask
    yy, xx = np.mgrid[0:n, 0:n]
    X, Y = xx + (cx - q.b), yy + (cy - q.b)
    r, ox, oy = box.radius, box.center.x, box.center.y
    inside = (np.abs(X - ox) <= r) & (np.abs(Y - oy) <= r)
    dinside = (np.abs(2 * (X - ox) + 1) <= 2 * r) & (np.abs(2 * (Y - oy) + 1) <= 2 * r)
    return pmask & inside, dmask & dinside


def _frame_status(env, cx, cy, b):
    """Primal and dual edge-status arrays for the (2b+1)-square around the
    center, in local coordinates."""
    n = 2 * b + 1
    og = env.open_grid(cx - b, cy - b, n + 1, n + 1)
    open_e = og[EAST, :n, :n]
    open_n = og[NORTH, :n, :n]
    # dual east (x,y)-(x+1,y) crosses primal north (x+1, y);
    # dual north (x,y)-(x,y+1) crosses primal east (x, y+1)
    closed_de = ~og[NORTH, :n, 1 : n + 1]
    closed_dn = ~og[EAST, 1 : n + 1, :n]
    return open_e, open_n, closed_de, closed_dn


def has_arms(env, q):
    """Exact detection: j disjoint open primal arms and k disjoint closed
    dual arms across the annulus of q, each tolerating q.defect_budget
    wrong-status edges."""
    cx, cy, n = _query_frame(q)
    pmask, psrc, ptgt, dmask, dsrc, dtgt = _masks(q, n)
    pmask, dmask = _containment_clip(q, cx, cy, n, pmask, dmask)
    open_e, open_n, closed_de, closed_dn = _frame_status(env, cx, cy, q.b)
    d = q.defect_budget

    for need, stat_e, stat_n, mask, src, tgt in (
        (q.open_count, open_e, open_n, pmask, psrc, ptgt),
        (q.closed_count, closed_de, closed_dn, dmask, dsrc, dtgt),
    ):
        if need == 0:
            continue
        src, tgt = src & mask, tgt & mask
        if d == 0:
            fwd = _reach_set(stat_e, stat_n, mask, src)
            if not (fwd & tgt).any():
                return False
            if need == 1:
                continue
            # flow only sees vertices on some src-to-tgt route
            bwd = _reach_set(stat_e, stat_n, mask, tgt)
            mask = fwd & bwd
            src, tgt = src & mask, tgt & mask
        if _disjoint_flow(stat_e, stat_n, mask, src, tgt, need, d) < need:
            return False
    return True


# -- Monte Carlo ---------------------------------------------------------------


def estimate_pi(q, samples, seed, threads=1):
    """Unbiased arm-probability estimate over i.i.d. Bernoulli environments
    with per-sample derived seeds. Deterministic for fixed (q, samples, seed)
    regardless of thread count."""
    if samples < 1:
        raise ValueError("samples must be at least 1")

    def one(i):
        return has_arms(Environment(mix_seed(seed, i)), q)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            hits = sum(ex.map(one, range(samples)))
    else:
        hits = sum(one(i) for i in range(samples))
    p = hits / samples
    return EstimateResult(
        p_hat=p,
        stderr=float(np.sqrt(p * (1.0 - p) / samples)),
        samples=samples,
        seed=seed,
    )


def edge_rooted_3arm(b, containment=None):
    """The 3-arm query behind the hop-count normalizer: open arms from (0,0) and
    (1,0), a closed dual arm from (1/2, +-1/2), out to the box of radius b."""
    e = Edge(Vertex(0, 0), EAST)
    return ArmQuery(
        center=e, a=0, b=b, open_count=2, closed_count=1, containment=containment
    )


def geodesic_edge_arm_rate(seeds, R, pi3_samples=2000, pi3_seed=0):
    """Empirical P(e in gamma) per edge over the distinguished geodesics of
    the given seeds (A = {0}, B = the boundary of the box of radius R), with
    a companion 3-arm estimate at each edge's distance scale.

    Returns rows (edge, frequency, M, pi3_hat(M), ratio) sorted by edge; M is
    the distance from the edge to the nearer of A and B, clamped to >= 1.
    """

    def ring(r):
        pts = set()
        for k in range(-r, r + 1):
            pts |= {Vertex(k, r), Vertex(k, -r), Vertex(r, k), Vertex(-r, k)}
        return sorted(pts, key=lambda v: (v.x, v.y))

    B = ring(R)
    freq = {}
    for s in seeds:
        env = Environment(s)
        c = construct(env, [Vertex(0, 0)], B)
        verts = c.gamma.vertices
        for e in {
            Edge(a, EAST if b.x > a.x else NORTH)
            if (b.x > a.x or b.y > a.y)
            else Edge(b, EAST if a.x > b.x else NORTH)
            for a, b in zip(verts, verts[1:])
        }:
            freq[e] = freq.get(e, 0) + 1

    pi3 = {}
    rows = []
    for e in sorted(freq, key=lambda e: (e.base.x, e.base.y, e.direction)):
        mx = max(abs(e.base.x), abs(e.base.y), abs(e.tip.x), abs(e.tip.y))
        M = max(1, min(mx, R - mx))
        if M not in pi3:
            pi3[M] = estimate_pi(
                edge_rooted_3arm(M) if M > 1 else edge_rooted_3arm(1),
                pi3_samples,
                mix_seed(pi3_seed, M),
            ).p_hat
        f = freq[e] / len(seeds)
        rows.append((e, f, M, pi3[M], f / pi3[M] if pi3[M] > 0 else float("inf")))
    return rows
