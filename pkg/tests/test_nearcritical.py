"""Tests for crossings, correlation length, p_R, Kesten product, and annulus
statistics."""

from fractions import Fraction

import pytest

from critfpp.construction import construct
from critfpp.environment import Environment
from critfpp.lattice import Edge, Vertex
from critfpp.nearcritical import (
    CrossingQuery,
    annulus_stats,
    correlation_length_hat,
    kesten_product,
    p_R_hat,
    sigma_hat,
)
from oracles import exact_connection_probability


def rect_edges(n, m):
    out = []
    for x in range(n + 1):
        for y in range(m + 1):
            if x < n:
                out.append(Edge(Vertex(x, y), 0))
            if y < m:
                out.append(Edge(Vertex(x, y), 1))
    return out


def exact_crossing(n, m, p=Fraction(1, 2)):
    left = [Vertex(0, y) for y in range(m + 1)]
    right = [Vertex(n, y) for y in range(m + 1)]
    return exact_connection_probability(rect_edges(n, m), left, right, p)


# frozen oracle values: 2^4 and 2^7 configuration enumerations
UNIT_SQUARE = Fraction(3, 4)
TWO_BY_ONE = Fraction(1, 2)


def test_oracle_values():
    assert exact_crossing(1, 1) == UNIT_SQUARE
    assert exact_crossing(2, 1) == TWO_BY_ONE


def test_sigma_matches_enumeration():
    r = sigma_hat(CrossingQuery(1, 1, 0.5), 40000, 2)
    assert abs(r.p_hat - float(UNIT_SQUARE)) <= 3 * r.stderr
    r2 = sigma_hat(CrossingQuery(2, 1, 0.5), 40000, 2)
    assert abs(r2.p_hat - float(TWO_BY_ONE)) <= 3 * r2.stderr


def test_sigma_trivial_and_validation():
    assert sigma_hat(CrossingQuery(3, 2, 1.0), 50, 0).p_hat == 1.0
    with pytest.raises(ValueError):
        CrossingQuery(0, 2, 0.5)
    with pytest.raises(ValueError):
        CrossingQuery(2, 2, 0.0)
    with pytest.raises(ValueError):
        sigma_hat(CrossingQuery(1, 1, 0.5), 0, 0)


def test_sigma_exactly_monotone_in_p():
    # shared environments: thresholding the same uniforms at larger p can
    # only add open edges
    prev = 0.0
    for p in (0.5, 0.55, 0.6, 0.7, 0.9):
        cur = sigma_hat(CrossingQuery(6, 6, p), 500, 7).p_hat
        assert cur >= prev
        prev = cur


def test_self_duality_wide_rectangle():
    r = sigma_hat(CrossingQuery(5, 4, 0.5), 20000, 3)
    assert abs(r.p_hat - 0.5) <= 3 * r.stderr


def test_correlation_length_basics():
    assert correlation_length_hat(1.0) == 1
    with pytest.raises(ValueError):
        correlation_length_hat(0.5)
    L_hi = correlation_length_hat(0.8, samples=1500, seed=1)
    L_lo = correlation_length_hat(0.7, samples=1500, seed=1)
    assert L_hi <= L_lo


def test_correlation_length_against_table_scan():
    # scan R = 1..32 with the same decision rule; the searched value must
    # be the first passing R
    p, eps, samples, seed = 0.75, 0.02, 1500, 4
    from critfpp.nearcritical import _square_passes

    first = next(R for R in range(1, 33) if _square_passes(p, R, eps, samples, seed))
    assert correlation_length_hat(p, eps, samples, seed) == first


def test_p_R_near_closed_form():
    # sigma(1,1,p) = 1 - (1-p)^2, so the epsilon = 0.02 threshold sits at
    # 1 - sqrt(0.02) ~ 0.8586; the two-stderr rule biases the estimate up
    p1 = p_R_hat(1, samples=4000, seed=0)
    assert 0.85 <= p1 <= 0.92
    with pytest.raises(ValueError):
        p_R_hat(0)


def test_p_R_monotone():
    vals = [p_R_hat(R, samples=800, seed=2) for R in (1, 2, 4)]
    assert vals[0] >= vals[1] >= vals[2]


def test_kesten_product_degenerate():
    k = kesten_product(1.0, samples=200, seed=0)
    assert k.L_hat == 1 and k.pi4_hat == 1.0
    assert k.product == pytest.approx(0.5)
    k2 = kesten_product(0.7, samples=800, seed=1)
    assert k2.product > 0 and k2.stderr >= 0


# -- annulus statistics ----------------------------------------------------------


def ring(r):
    pts = set()
    for k in range(-r, r + 1):
        pts |= {Vertex(k, r), Vertex(k, -r), Vertex(r, k), Vertex(-r, k)}
    return sorted(pts, key=lambda v: (v.x, v.y))


def test_annulus_stats_all_open():
    env = Environment(0, all_status=True)
    c = construct(env, [Vertex(0, 0)], ring(8))
    s = annulus_stats(env, 2, c)
    assert all(d == 0 for d in s.D)
    assert all(x == 0 for x in s.X) and s.X_last == 0
    assert all(t == 0.0 for t in s.T)


def test_annulus_stats_all_closed():
    env = Environment(0, all_status=False)
    c = construct(env, [Vertex(0, 0)], ring(8))
    s = annulus_stats(env, 2, c)
    assert sum(s.D) == c.gamma.hops
    assert sum(s.T) == pytest.approx(c.gamma.passage_time)


def test_annulus_stats_random():
    for seed in (1, 2, 3):
        env = Environment(seed)
        c = construct(env, [Vertex(0, 0)], ring(8))
        s = annulus_stats(env, 2, c)
        assert sum(s.D) == sum(1 for e in c.gamma.edges if env.weight(e) > 0)
        assert all(0.0 <= m <= 1.0 for m in s.M)
        assert len(s.inner_scale) == len(c.I) == len(s.outer_scale)
        assert all(i <= o for i, o in zip(s.inner_scale, s.outer_scale))
        # Y is nondecreasing in the radius and ends at the full circuit count
        assert list(s.Y) == sorted(s.Y)
        assert s.Y[-1] <= len(c.I)
