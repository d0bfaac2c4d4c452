import pytest

from critfpp.lattice import (
    ANY_ENDPOINT,
    BOTH_ENDPOINTS,
    DUAL,
    EAST,
    MIDPOINT,
    NORTH,
    PRIMAL,
    Annulus,
    Box,
    Edge,
    Vertex,
    annulus_edge_sets,
    dual_edge,
    dual_neighbors,
    edge_between,
    edges_of_region,
)


def test_edge_endpoints_and_midpoint():
    e = Edge(Vertex(2, 3), EAST)
    assert e.endpoints() == (Vertex(2, 3), Vertex(3, 3))
    assert e.midpoint_doubled() == (5, 6)
    n = Edge(Vertex(2, 3), NORTH)
    assert n.endpoints() == (Vertex(2, 3), Vertex(2, 4))
    assert n.midpoint_doubled() == (4, 7)


def test_dual_edge_bisects_and_is_an_involution():
    for base in (Vertex(0, 0), Vertex(3, -2), Vertex(-5, 7)):
        for d in (EAST, NORTH):
            e = Edge(base, d)
            de = dual_edge(e)
            assert de.layer != e.layer
            assert de.midpoint_doubled() == e.midpoint_doubled()
            assert dual_edge(de) == e


def test_dual_neighbors_of_a_vertex():
    ds = dual_neighbors(Vertex(0, 0))
    assert len(ds) == 4
    assert all(v.layer == DUAL for v in ds)
    # the four dual vertices at L-infinity distance 1/2 from the origin
    assert set(ds) == {
        Vertex(0, 0, DUAL),
        Vertex(-1, 0, DUAL),
        Vertex(0, -1, DUAL),
        Vertex(-1, -1, DUAL),
    }


def test_edge_between():
    assert edge_between(Vertex(1, 1), Vertex(2, 1)) == Edge(Vertex(1, 1), EAST)
    assert edge_between(Vertex(2, 1), Vertex(1, 1)) == Edge(Vertex(1, 1), EAST)
    assert edge_between(Vertex(0, 2), Vertex(0, 1)) == Edge(Vertex(0, 1), NORTH)
    with pytest.raises(ValueError):
        edge_between(Vertex(0, 0), Vertex(1, 1))


def test_box_vertices_and_boundary():
    b = Box(2)
    assert len(list(b.vertices())) == 25
    bd = list(b.boundary())
    assert len(bd) == 16
    assert all(max(abs(v.x), abs(v.y)) == 2 for v in bd)


def test_box_edge_counts():
    # a (2R+1)^2 grid has 2 * 2R * (2R+1) interior-spanning edges
    assert len(edges_of_region(Box(1), BOTH_ENDPOINTS)) == 12
    assert len(edges_of_region(Box(2), BOTH_ENDPOINTS)) == 40


def test_edge_region_rules_nest():
    box = Box(2)
    both = set(edges_of_region(box, BOTH_ENDPOINTS))
    mid = set(edges_of_region(box, MIDPOINT))
    any_ = set(edges_of_region(box, ANY_ENDPOINT))
    assert both <= mid <= any_


def test_edges_of_region_sorted_deterministically():
    es = edges_of_region(Box(3), BOTH_ENDPOINTS)
    assert es == sorted(
        es, key=lambda e: (e.layer, e.base.y, e.base.x, e.direction)
    )


def test_annulus_membership():
    a = Annulus(2, 4)
    assert a.contains_point_doubled((4, 0))  # |(2,0)| = 2, inner inclusive
    assert not a.contains_point_doubled((8, 2))  # |(4,1)| = 4, outer exclusive
    assert a.contains_point_doubled((7, 1))


def test_annulus_edge_sets_cover_and_overlap_only_on_shells():
    sets = annulus_edge_sets(4, BOTH_ENDPOINTS)
    assert len(sets[0]) == 40  # all edges inside B_2
    seen = {}
    for k, es in enumerate(sets):
        for e in es:
            seen.setdefault(e, []).append(k)
    for e, ks in seen.items():
        # consecutive sets may share edges lying entirely on the common
        # shell dB_{2^k}; nothing else repeats
        assert len(ks) <= 2
        if len(ks) == 2:
            assert ks[1] == ks[0] + 1
            shell = 2 ** ks[1]
            for v in e.endpoints():
                assert max(abs(v.x), abs(v.y)) == shell
    # every edge inside B_16 is covered
    for e in edges_of_region(Box(15), BOTH_ENDPOINTS):
        assert e in seen
