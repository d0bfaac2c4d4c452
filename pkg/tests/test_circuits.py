import random

import pytest

from critfpp.circuits import (
    Circuit,
    StatusWindow,
    clusters,
    grow_cluster,
    isolated_vertex_circuit,
    join,
    meet,
    separating_circuit,
    trace_boundaries,
)
from critfpp.environment import Environment
from critfpp.lattice import (
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
from oracles import (
    brute_join,
    brute_meet,
    enumerate_cycles,
    flood_fill_clusters,
    mpl_interior_test,
)


def unit_square(x=0, y=0, layer=PRIMAL):
    return Circuit(
        [
            Vertex(x, y, layer),
            Vertex(x + 1, y, layer),
            Vertex(x + 1, y + 1, layer),
            Vertex(x, y + 1, layer),
        ]
    )


def random_blob_circuit(rng, n_cells, start=Vertex(0, 0, DUAL), lo=-3, hi=2):
    """Outer boundary of a random connected union of cells inside a box."""
    blob = {start}
    while len(blob) < n_cells:
        c = rng.choice(sorted(blob))
        dx, dy = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        nb = Vertex(c.x + dx, c.y + dy, c.layer)
        if lo <= nb.x <= hi and lo <= nb.y <= hi:
            blob.add(nb)
    outer, _ = trace_boundaries(blob)
    return outer


def test_circuit_canonical_form():
    c = unit_square()
    assert c.vertices[0] == min(c.vertices)
    assert len(c) == 4 and c.area == 1
    # same cycle entered clockwise normalizes identically
    c2 = Circuit(list(reversed(c.vertices)))
    assert c2 == c
    with pytest.raises(ValueError):
        Circuit([Vertex(0, 0), Vertex(1, 0), Vertex(0, 1)])


def test_cells_of_unit_square():
    assert unit_square().cells == frozenset({Vertex(0, 0, DUAL)})
    assert unit_square(0, 0, DUAL).cells == frozenset({Vertex(1, 1, PRIMAL)})


def test_interior_test_against_matplotlib():
    rng = random.Random(7)
    for trial in range(25):
        c = random_blob_circuit(rng, rng.randint(1, 14))
        for x in range(-4, 5):
            for y in range(-4, 5):
                for layer in (PRIMAL, DUAL):
                    q = Vertex(x, y, layer)
                    assert c.interior_test(q) == mpl_interior_test(c, q), (
                        trial,
                        q,
                    )


def test_cells_are_exactly_the_interior_opposite_layer_vertices():
    rng = random.Random(19)
    for _ in range(20):
        c = random_blob_circuit(rng, rng.randint(1, 12))
        inside = {
            Vertex(x, y, PRIMAL if c.layer == DUAL else DUAL)
            for x in range(-5, 6)
            for y in range(-5, 6)
        }
        inside = {v for v in inside if mpl_interior_test(c, v) == "interior"}
        assert inside == set(c.cells)


def test_every_circuit_edge_has_one_inner_one_outer_dual_neighbor():
    # enumerate every circuit drawn on the edges of B_2
    pool = edges_of_region(Box(2))
    for cyc in enumerate_cycles(pool):
        try:
            c = Circuit(list(cyc))
        except ValueError:
            continue
        for e in c.edges:
            inner, outer = c.inner_outer_dual_neighbors(e)
            assert c.interior_test(inner) == "interior"
            assert c.interior_test(outer) == "exterior"


def _closed_dual_candidates(env, R):
    out = []
    for a in range(-R, R):
        for b in range(-R, R):
            for d in (EAST, NORTH):
                e = Edge(Vertex(a, b, DUAL), d)
                if all(
                    max(abs(2 * u.x + 1), abs(2 * u.y + 1)) < 2 * R
                    for u in e.endpoints()
                ) and not env.is_open(e):
                    out.append(e)
    return out


def test_cluster_partition_matches_flood_fill():
    for seed in range(200):
        env = Environment(seed)
        got = {c.edges for c in clusters(env, Box(8), "open")}
        open_edges = [e for e in edges_of_region(Box(8)) if env.is_open(e)]
        want = set(flood_fill_clusters(open_edges))
        assert got == want, seed
        gotd = {c.edges for c in clusters(env, Box(8), "closed")}
        wantd = set(flood_fill_clusters(_closed_dual_candidates(env, 8)))
        assert gotd == wantd, seed


def test_cluster_bounded_flag():
    env = Environment(0, all_status=True)
    (c,) = clusters(env, Box(4), "open")
    assert not c.bounded


def test_single_open_edge_separating_circuit():
    closed = Environment(0, all_status=False)
    env = closed.with_forced({Edge(Vertex(0, 0), EAST): True})
    (c,) = clusters(env, Box(3), "open")
    circ = separating_circuit(c)
    assert circ.layer == DUAL and len(circ) == 6
    for v in c.vertices:
        assert circ.interior_test(v) == "interior"


def test_isolated_vertex_circuit():
    circ = isolated_vertex_circuit(Vertex(0, 0, PRIMAL))
    assert len(circ) == 4 and circ.layer == DUAL
    assert circ.interior_test(Vertex(0, 0)) == "interior"


def test_separating_circuits_enclose_and_are_closed():
    found = 0
    seed = 0
    while found < 50:
        env = Environment(10_000 + seed)
        seed += 1
        for c in clusters(env, Box(8), "open"):
            if not c.bounded or found >= 50:
                continue
            circ = separating_circuit(c)
            found += 1
            assert circ.layer == DUAL
            for e in circ.edges:
                assert not env.is_open(e)  # dual status = primal partner
            for v in c.vertices:
                assert circ.interior_test(v) == "interior"


def test_trace_handles_pinch_corners():
    # a ring that touches itself at a corner: the cells (0,0) and (1,1) meet
    # diagonally and the absent cell (1,0) is walled off as a hole. The
    # sharpest-right-turn rule must route the outer walk and the hole walk
    # through the shared corner without either revisiting it.
    blob = {
        Vertex(c[0], c[1], DUAL)
        for c in [(0, 0), (0, -1), (1, -1), (2, -1), (2, 0), (2, 1), (1, 1)]
    }
    outer, holes = trace_boundaries(blob)
    assert outer.area == 8  # 7 cells plus the walled-off hole
    assert len(holes) == 1 and holes[0].area == 1
    assert holes[0].cells == frozenset({Vertex(1, 0, DUAL)})


def test_trace_reports_holes():
    ring = {
        Vertex(x, y, DUAL)
        for x in range(3)
        for y in range(3)
        if (x, y) != (1, 1)
    }
    outer, holes = trace_boundaries(ring)
    assert outer.area == 9
    assert len(holes) == 1 and holes[0].area == 1


def test_join_of_overlapping_unit_squares():
    c1 = unit_square(0, 0)
    c2 = unit_square(1, 0)
    j = join(c1, c2)
    assert len(j) == 6 and j.area == 2
    assert j == brute_join(c1, c2)


def test_join_disjoint_interiors_rejected():
    with pytest.raises(ValueError):
        join(unit_square(0, 0), unit_square(5, 5))


def test_join_matches_brute_force_and_is_symmetric():
    rng = random.Random(99)
    done = 0
    while done < 50:
        n1, n2 = rng.randint(1, 8), rng.randint(1, 8)
        start = Vertex(rng.randint(-2, 1), rng.randint(-2, 1), DUAL)
        c1 = random_blob_circuit(rng, n1, start)
        c2 = random_blob_circuit(rng, n2, start)
        if c1 == c2 or not (c1.cells & c2.cells):
            continue
        done += 1
        j12 = join(c1, c2)
        assert j12 == join(c2, c1)
        assert j12 == brute_join(c1, c2)
        assert j12.edges <= (c1.edges | c2.edges)
        assert (c1.cells | c2.cells) <= j12.cells


def test_meet_matches_brute_force():
    rng = random.Random(123)
    around0 = {
        Vertex(0, 0, DUAL),
        Vertex(-1, 0, DUAL),
        Vertex(0, -1, DUAL),
        Vertex(-1, -1, DUAL),
    }
    S = [Vertex(0, 0, PRIMAL)]
    done = 0
    while done < 50:
        c1 = random_blob_circuit(rng, rng.randint(4, 10), Vertex(0, 0, DUAL))
        c2 = random_blob_circuit(rng, rng.randint(4, 10), Vertex(-1, -1, DUAL))
        if not (around0 <= c1.cells and around0 <= c2.cells):
            continue
        done += 1
        m = meet(S, [c1, c2])
        assert m == brute_meet(S, c1, c2)
        assert m.edges <= (c1.edges | c2.edges)
        assert m.cells <= (c1.cells & c2.cells)
        assert m.interior_test(S[0]) == "interior"


def test_grow_cluster_and_escape():
    env = Environment(0, all_status=True)
    sw = StatusWindow.box(env, 4)
    g = grow_cluster(sw, [Vertex(0, 0)], want_open=True)
    assert g.escaped
    g = grow_cluster(sw, [Vertex(0, 0)], want_open=False)
    assert not g.escaped and g.vertices == frozenset({Vertex(0, 0)})


def test_passage_time_between_two_points():
    # cross-check the unconstrained two-point time against a large boxed run
    from critfpp.shortest_path import grid_geodesic, GridWindow, passage_time

    for seed in (1, 2, 3, 4, 5, 17):
        env = Environment(seed)
        T, path, N = passage_time(env, [Vertex(0, 0)], [Vertex(5, 3)])
        win = GridWindow.box(env, 40)
        t, hops, _ = grid_geodesic(win, [Vertex(0, 0)], {Vertex(5, 3)})
        assert T == t and N == hops, seed
