import pytest

from critfpp.environment import Environment
from critfpp.lattice import Box, Edge, Vertex, EAST, NORTH
from critfpp.shortest_path import (
    GridWindow,
    LatticePath,
    fast_boundary_TN,
    grid_geodesic,
    passage_time,
    rectangle_crossing_time,
)
from oracles import brute_geodesic_TN


def test_lattice_path_validation():
    p = LatticePath([Vertex(0, 0), Vertex(1, 0), Vertex(1, 1)])
    assert p.hops == 2
    with pytest.raises(ValueError):
        LatticePath([Vertex(0, 0), Vertex(2, 0)])  # not a lattice step
    with pytest.raises(ValueError):
        LatticePath(
            [Vertex(0, 0), Vertex(1, 0), Vertex(0, 0)]
        )  # revisits a vertex


def test_geodesic_matches_brute_force_on_B4():
    A = [Vertex(0, 0)]
    box = Box(4)
    B = box.boundary()
    for seed in range(100):
        env = Environment(seed)
        T, path, N = passage_time(env, A, B)
        bT, bN = brute_geodesic_TN(env, A, B, box)
        assert T == bT, seed
        assert N == bN, seed
        assert path.vertices[0] in A and path.vertices[-1] in B
        assert path.hops == N
        assert sum(env.weight(e) for e in path.edges) == T


def test_all_open_environment():
    env = Environment(0, all_status=True)
    T, path, N = passage_time(env, [Vertex(0, 0)], Box(7).boundary())
    assert T == 0.0 and N == 7


def test_all_closed_environment():
    env = Environment(0, all_status=False)
    T, path, N = passage_time(env, [Vertex(0, 0)], Box(5).boundary())
    assert T == 5.0 and N == 5


def test_source_on_target():
    env = Environment(3)
    T, path, N = passage_time(env, [Vertex(2, 0)], [Vertex(2, 0), Vertex(9, 9)])
    assert T == 0.0 and N == 0 and path.hops == 0


def test_fast_boundary_TN_agrees_with_grid_geodesic():
    for seed in range(30):
        env = Environment(seed + 1000)
        T, path, N = passage_time(env, [Vertex(0, 0)], Box(8).boundary())
        fT, fN = fast_boundary_TN(env, 8)
        assert fT == T and fN == N, seed


def test_rectangle_crossing_all_closed():
    env = Environment(0, all_status=False)
    assert rectangle_crossing_time(env, 0, 0, 3, 1) == 3.0


def test_rectangle_crossing_all_open():
    env = Environment(0, all_status=True)
    assert rectangle_crossing_time(env, 0, 0, 6, 3) == 0.0


def test_grid_geodesic_confinement():
    # paths never use vertices outside the window
    env = Environment(42)
    win = GridWindow.box(env, 5)
    res = grid_geodesic(win, [Vertex(0, 0)], set(Box(5).boundary()))
    assert res is not None
    t, hops, verts = res
    assert all(win.contains(v) for v in verts)
