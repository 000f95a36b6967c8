import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from tilinglab.graph import (PartiteGraph, density, edge_count_between,
                             nonedge_count_between, nonedge_density,
                             typical_vertices)


def k3_path():
    # (1,0)-(2,0)-(3,0) plus (1,1) isolated-ish
    return PartiteGraph(3, [2, 1, 1],
                        [((1, 0), (2, 0)), ((2, 0), (3, 0))])


@st.composite
def small_graphs(draw):
    k = draw(st.integers(2, 4))
    sizes = [draw(st.integers(1, 4)) for _ in range(k)]
    pairs = [((p, i), (q, j))
             for p in range(1, k + 1) for q in range(p + 1, k + 1)
             for i in range(sizes[p - 1]) for j in range(sizes[q - 1])]
    edges = [e for e in pairs if draw(st.booleans())]
    return PartiteGraph(k, sizes, edges)


def test_construction_validates():
    with pytest.raises(ValueError):
        PartiteGraph(1, [3], [])
    with pytest.raises(ValueError):
        PartiteGraph(2, [2], [])
    with pytest.raises(ValueError):
        PartiteGraph(2, [2, -1], [])
    with pytest.raises(ValueError):
        PartiteGraph(2, [2, 2], [((1, 0), (1, 1))])  # same-part edge
    with pytest.raises(ValueError):
        PartiteGraph(2, [2, 2], [((1, 0), (2, 5))])  # index out of range


def test_gid_vertex_roundtrip():
    g = PartiteGraph(3, [2, 3, 1], [])
    for v in g.vertices():
        assert g.vertex(g.gid(v)) == v
    assert g.n_vertices == 6
    assert not g.is_balanced
    with pytest.raises(ValueError):
        g.gid((4, 0))
    with pytest.raises(ValueError):
        g.gid((1, 2))


def test_edges_and_degrees():
    g = k3_path()
    assert g.has_edge((1, 0), (2, 0))
    assert g.has_edge((2, 0), (1, 0))
    assert not g.has_edge((1, 0), (3, 0))
    assert g.edge_count() == 2
    assert g.deg_to((2, 0), 1) == 1
    assert g.deg_to((2, 0), 3) == 1
    assert g.neighbors_in((2, 0), 1) == [(1, 0)]
    assert g.min_partite_degree() == 0  # (1,1) has no neighbors


def test_edges_canonical_order():
    g = PartiteGraph(2, [2, 2], [((2, 1), (1, 1)), ((1, 0), (2, 0))])
    assert g.edges() == [(((1, 0)), (2, 0)), ((1, 1), (2, 1))]


def test_edge_add_remove_are_persistent():
    g = k3_path()
    g2 = g.with_edge_removed((1, 0), (2, 0))
    assert g.has_edge((1, 0), (2, 0))
    assert not g2.has_edge((1, 0), (2, 0))
    g3 = g2.with_edge_added((2, 0), (1, 0))
    assert g3 == g
    with pytest.raises(ValueError):
        g.with_edge_added((1, 0), (1, 1))


def test_induced_subgraph_maps_back():
    g = k3_path()
    sub, back = g.induced([(1, 0), (2, 0), (3, 0)])
    assert sub.k == 3 and sub.part_sizes == (1, 1, 1)
    assert sub.edge_count() == 2
    assert set(back.values()) == {(1, 0), (2, 0), (3, 0)}
    for new, old in back.items():
        assert new[0] == old[0]


def test_mask_roundtrip():
    g = k3_path()
    vs = [(1, 1), (2, 0)]
    assert g.vertices_of_mask(g.mask_of(vs)) == sorted(vs)


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_json_roundtrip(g):
    assert PartiteGraph.from_json(g.to_json()) == g


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_density_complements(g):
    a = g.part_vertices(1)
    b = g.part_vertices(2)
    assert density(g, a, b) + nonedge_density(g, a, b) == 1
    assert edge_count_between(g, a, b) + nonedge_count_between(g, a, b) \
        == len(a) * len(b)


def test_density_validates():
    g = k3_path()
    with pytest.raises(ValueError):
        density(g, [], g.part_vertices(2))
    with pytest.raises(ValueError):
        density(g, g.part_vertices(1), g.part_vertices(1))
    with pytest.raises(ValueError):
        density(g, [(1, 0), (2, 0)], g.part_vertices(3))


@given(small_graphs(), st.fractions(min_value=0, max_value=1),
       st.fractions(min_value=0, max_value=1))
@settings(max_examples=60, deadline=None)
def test_typical_vertices_monotone_in_alpha(g, a1, a2):
    lo, hi = sorted([a1, a2])
    a = g.part_vertices(1)
    b = g.part_vertices(2)
    assert set(typical_vertices(g, a, b, lo)) <= set(typical_vertices(g, a, b, hi))


def test_typical_vertices_exact_threshold():
    # (1,0) has 1 of 2 neighbors in part 2: typical iff 1 >= (1-alpha)*2
    g = PartiteGraph(2, [1, 2], [((1, 0), (2, 0))])
    a, b = g.part_vertices(1), g.part_vertices(2)
    assert typical_vertices(g, a, b, Fraction(1, 2)) == [(1, 0)]
    assert typical_vertices(g, a, b, Fraction(1, 4)) == []


def test_min_partite_degree_on_smallest_host():
    g = PartiteGraph(2, [1, 1], [((1, 0), (2, 0))])
    assert g.min_partite_degree() == 1
    with pytest.raises(ValueError):
        PartiteGraph(2, [1, 0], []).min_partite_degree()
