"""Near-critical quantities: p-open crossing probabilities, correlation
length, its inverse map p_R, the Kesten scaling-relation product, and
annulus statistics of the distinguished geodesic.

Crossing estimates share environments across p: the same per-sample uniforms
are thresholded at each p, so sigma_hat is nondecreasing in p exactly, not
just statistically, whenever (samples, seed) are held fixed. The correlation
length estimator inherits that exact monotonicity.
"""

import math
from dataclasses import dataclass

import numpy as np

from .arms import ArmQuery, EstimateResult, _reach_set, estimate_pi
from .environment import Environment, mix_seed
from .lattice import EAST, NORTH, Vertex


@dataclass(frozen=True)
class CrossingQuery:
    """p-open left-right crossing of the rectangle [0, n] x [0, m]."""

    n: int
    m: int
    p: float

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("rectangle sides must be at least 1")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")


def _crosses(u, p, n, m):
    """One configuration: is there a p-open path from the left side to the
    right side of [0, n] x [0, m]?"""
    opn = u <= p
    stat_e = opn[EAST, : m + 1, :n]
    stat_n = opn[NORTH, :m, : n + 1]
    mask = np.ones((m + 1, n + 1), dtype=bool)
    src = np.zeros_like(mask)
    src[:, 0] = True
    # pad edge arrays to the vertex shape expected by the kernel
    se = np.zeros_like(mask)
    se[:, :n] = stat_e
    sn = np.zeros_like(mask)
    sn[:m, :] = stat_n
    seen = _reach_set(se, sn, mask, src)
    return bool(seen[:, n].any())


def sigma_hat(q, samples, seed):
    """Monte Carlo estimate of the p-open left-right crossing probability."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    hits = 0
    for i in range(samples):
        env = Environment(mix_seed(seed, i))
        u = env.uniform_grid(0, 0, q.n + 1, q.m + 1)
        hits += _crosses(u, q.p, q.n, q.m)
    p_hat = hits / samples
    return EstimateResult(
        p_hat=p_hat,
        stderr=float(np.sqrt(p_hat * (1.0 - p_hat) / samples)),
        samples=samples,
        seed=seed,
    )


def _square_passes(p, R, epsilon, samples, seed):
    """Decision rule for L-hat: the R x R crossing estimate exceeds
    1 - epsilon by at least two standard errors."""
    r = sigma_hat(CrossingQuery(R, R, p), samples, mix_seed(seed, R))
    return r.p_hat - 2.0 * r.stderr > 1.0 - epsilon


def correlation_length_hat(p, epsilon=0.02, samples=2000, seed=0, R_max=512):
    """Smallest R whose p-open R x R crossing probability exceeds 1 - epsilon
    (by two standard errors), found by doubling then bisection. Returns R_max
    when the search saturates; epsilon is a caller-visible convention, not a
    universal constant."""
    if p <= 0.5:
        raise ValueError("the correlation length needs p > 1/2")
    if _square_passes(p, 1, epsilon, samples, seed):
        return 1
    lo, hi = 1, 2
    while not _square_passes(p, hi, epsilon, samples, seed):
        lo, hi = hi, hi * 2
        if hi >= R_max:
            if _square_passes(p, R_max, epsilon, samples, seed):
                hi = R_max
                break
            return R_max
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _square_passes(p, mid, epsilon, samples, seed):
            hi = mid
        else:
            lo = mid
    return hi


def p_R_hat(R, epsilon=0.02, samples=2000, seed=0, tol=1e-3):
    """Bisection inverse of the correlation length: the smallest p > 1/2 with
    L-hat(p) <= R, to absolute tolerance tol."""
    if R < 1:
        raise ValueError("R must be at least 1")
    lo, hi = 0.5, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if correlation_length_hat(mid, epsilon, samples, seed, R_max=4 * R) <= R:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class KestenProduct:
    product: float
    stderr: float
    L_hat: int
    pi4_hat: float
    p: float


def kesten_product(p, samples=2000, seed=0, epsilon=0.02):
    """L-hat(p)^2 * pi4-hat(1, L-hat(p)) * (p - 1/2), the scaling-relation
    product, with the 4-arm standard error propagated. By convention
    pi4-hat(1, 1) = 1 for the degenerate L-hat = 1 case."""
    L = correlation_length_hat(p, epsilon, samples, seed)
    if L <= 1:
        pi4, err = 1.0, 0.0
    else:
        q = ArmQuery(Vertex(0, 0), 1, L, 2, 2)
        r = estimate_pi(q, samples, mix_seed(seed, 4))
        pi4, err = r.p_hat, r.stderr
    scale = L * L * (p - 0.5)
    return KestenProduct(
        product=scale * pi4, stderr=scale * err, L_hat=L, pi4_hat=pi4, p=p
    )


# -- annulus statistics of the distinguished geodesic ---------------------------


@dataclass(frozen=True)
class AnnulusGeodesicStats:
    """Per-scale and per-gap statistics of one distinguished geodesic from 0
    to the boundary of the box of radius 2^(n+1).

    D[k]: positive-weight geodesic edges at scale k; M[k]: max uniform over
    geodesic edges at scales k-1..k+1; T[k]: summed weight at scale k;
    X[j]: positive-weight edges strictly between circuits j and j+1;
    X_last: the same beyond the outermost circuit; inner_scale/outer_scale:
    first and last scale each circuit touches; Y: per-scale index of the last
    circuit contained in the box of that radius.
    """

    n: int
    D: tuple
    M: tuple
    T: tuple
    X: tuple
    X_last: float
    inner_scale: tuple
    outer_scale: tuple
    Y: tuple


def _edge_scale(e):
    d = max(max(abs(q.x), abs(q.y)) for q in e.endpoints())
    return int(math.floor(math.log2(max(d, 1))))


def annulus_stats(env, n, construction):
    """Exact counts along a construction built for A = {0} and B at radius
    2^(n+1)."""
    from .lattice import edge_between

    verts = construction.gamma.vertices
    edges = [edge_between(a, b) for a, b in zip(verts, verts[1:])]
    n_scales = n + 2
    D = [0] * n_scales
    T = [0.0] * n_scales
    per_scale_u = [[] for _ in range(n_scales)]
    for e in edges:
        k = min(_edge_scale(e), n_scales - 1)
        w = env.weight(e)
        if w > 0:
            D[k] += 1
        T[k] += w
        per_scale_u[k].append(env.uniform(e))
    M = []
    for k in range(n_scales):
        pool = []
        for kk in (k - 1, k, k + 1):
            if 0 <= kk < n_scales:
                pool += per_scale_u[kk]
        M.append(max(pool) if pool else 0.0)

    circuits = construction.I
    X = []
    for j in range(len(circuits) - 1):
        cnt = 0
        for e in edges:
            if env.weight(e) > 0 and all(
                circuits[j + 1].interior_test(q) == "interior"
                and circuits[j].interior_test(q) == "exterior"
                for q in e.endpoints()
            ):
                cnt += 1
        X.append(cnt)
    X_last = 0
    if circuits:
        for e in edges:
            if env.weight(e) > 0 and all(
                circuits[-1].interior_test(q) == "exterior" for q in e.endpoints()
            ):
                X_last += 1
    else:
        X_last = sum(1 for e in edges if env.weight(e) > 0)

    inner_scale = tuple(
        min(min(_edge_scale(e), n_scales - 1) for e in c.edges) for c in circuits
    )
    outer_scale = tuple(
        max(min(_edge_scale(e), n_scales - 1) for e in c.edges) for c in circuits
    )
    Y = []
    for k in range(n_scales):
        R = 2**k
        idx = 0
        for j, c in enumerate(circuits, start=1):
            if all(max(abs(v.x), abs(v.y)) <= R for v in c.vertices):
                idx = j
        Y.append(idx)
    return AnnulusGeodesicStats(
        n=n,
        D=tuple(D),
        M=tuple(M),
        T=tuple(T),
        X=tuple(X),
        X_last=X_last,
        inner_scale=inner_scale,
        outer_scale=outer_scale,
        Y=tuple(Y),
    )
