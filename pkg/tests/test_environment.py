import math

import numpy as np
import pytest
from scipy import stats

from critfpp.environment import Environment, WeightDistribution, edge_uniforms
from critfpp.lattice import EAST, NORTH, Edge, Vertex, dual_edge


def test_uniforms_deterministic_and_in_unit_interval():
    env = Environment(12345)
    e = Edge(Vertex(3, -7), NORTH)
    u = env.uniform(e)
    assert 0.0 <= u < 1.0
    assert env.uniform(e) == u
    assert Environment(12345).uniform(e) == u
    assert Environment(12346).uniform(e) != u


def test_dual_edge_shares_uniform():
    env = Environment(9)
    e = Edge(Vertex(2, 2), EAST)
    assert env.uniform(dual_edge(e)) == env.uniform(e)
    assert env.is_open(dual_edge(e)) == env.is_open(e)


def test_scalar_and_array_streams_agree():
    env = Environment(777)
    xs = np.arange(-50, 50, dtype=np.int64)
    ys = np.arange(0, 100, dtype=np.int64)
    arr = edge_uniforms(777, xs, ys, np.full(100, NORTH, dtype=np.int64))
    for i in range(100):
        assert arr[i] == env.uniform(Edge(Vertex(int(xs[i]), int(ys[i])), NORTH))


def test_uniform_stream_is_uniform_ks():
    env = Environment(2024)
    grid = env.uniform_grid(0, 0, 1000, 500)
    ks = stats.kstest(grid.ravel(), "uniform").statistic
    assert ks < 0.005


def test_open_fraction_is_half():
    env = Environment(5150)
    grid = env.open_grid(0, 0, 1000, 500)
    frac = grid.mean()
    assert abs(frac - 0.5) < 0.002


def test_bernoulli_inverse_cdf():
    d = WeightDistribution("bernoulli")
    assert d.inverse_cdf(0.3) == 0.0
    assert d.inverse_cdf(0.5) == 0.0
    assert d.inverse_cdf(0.51) == 1.0
    assert d.integer_weights
    with pytest.raises(ValueError):
        d.inverse_cdf(1.5)


def test_gap_inverse_cdf():
    d = WeightDistribution("gap", h=0.25)
    assert d.inverse_cdf(0.2) == 0.0
    assert d.inverse_cdf(0.9) == 0.25


def test_power_law_inverse_cdf_closed_form():
    # F(t) = 1/2 + t on [0, 1/2]: quantile of 0.8 is 0.3
    d = WeightDistribution("power-law", alpha=1.0, h=0.5)
    assert math.isclose(d.inverse_cdf(0.8), 0.3, abs_tol=1e-12)
    assert d.inverse_cdf(0.5) == 0.0
    assert math.isclose(d.inverse_cdf(1.0), 0.5, abs_tol=1e-12)


def test_stretched_inverse_cdf_roundtrip():
    d = WeightDistribution("stretched", alpha=1.0, h=2.0)
    C = 0.5 * math.exp(1.0 / 2.0)
    for u in (0.55, 0.7, 0.9, 0.99):
        t = d.inverse_cdf(u)
        assert 0.0 < t <= 2.0
        assert math.isclose(0.5 + C * math.exp(-1.0 / t), u, rel_tol=1e-10)


def test_inverse_cdf_monotone():
    for d in (
        WeightDistribution("power-law", alpha=2.0, h=1.0),
        WeightDistribution("stretched", alpha=0.5, h=1.0),
    ):
        us = np.linspace(0.0, 1.0, 201)
        ts = d.inverse_cdf_array(us)
        assert np.all(np.diff(ts) >= -1e-15)


def test_distribution_parse_and_json():
    d = WeightDistribution.parse("power-law:alpha=1,h=0.5")
    assert d.kind == "power-law" and d.alpha == 1.0 and d.h == 0.5
    d2 = WeightDistribution.from_json(d.to_json())
    assert d2.kind == d.kind and d2.alpha == d.alpha and d2.h == d.h


def test_forced_statuses_override_everywhere():
    env = Environment(31)
    e = Edge(Vertex(0, 0), EAST)
    closed = env.with_forced({e: False})
    opened = env.with_forced({e: True})
    assert not closed.is_open(e) and opened.is_open(e)
    assert opened.weight(e) == 0.0 and closed.weight(e) > 0.0
    g = closed.open_grid(-2, -2, 5, 5)
    assert not g[EAST, 2, 2]
    g = opened.open_grid(-2, -2, 5, 5)
    assert g[EAST, 2, 2]
    # forcing a dual edge forces its primal partner
    forced_dual = env.with_forced({dual_edge(e): False})
    assert not forced_dual.is_open(e)


def test_all_status_environments():
    env_open = Environment(0, all_status=True)
    env_closed = Environment(0, all_status=False)
    e = Edge(Vertex(4, -4), NORTH)
    assert env_open.is_open(e) and env_open.weight(e) == 0.0
    assert not env_closed.is_open(e) and env_closed.weight(e) == 1.0
    assert env_closed.open_grid(0, 0, 3, 3).sum() == 0
    # forced entries still win
    assert env_closed.with_forced({e: True}).is_open(e)


def test_weight_grid_matches_scalar():
    env = Environment(404, WeightDistribution("power-law", alpha=1.0, h=0.5))
    g = env.weight_grid(-3, -3, 7, 7)
    for x in range(-3, 4):
        for y in range(-3, 4):
            for d in (EAST, NORTH):
                assert g[d, y + 3, x + 3] == env.weight(Edge(Vertex(x, y), d))
