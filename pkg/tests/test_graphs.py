import pytest

from mblo.graphs import (
    GraphTerm,
    brick_graph,
    brick_side_graph,
    brickwork_graph,
    chain_h,
    chain_v,
    concat,
    graphs_isomorphic,
    grid_lattice,
    grid_plan_for_brickwork,
    grid_vertex,
    gsum,
    hexagonal_lattice,
    hexagonal_plan_for_brickwork,
    reduce_lattice,
    unit_depth_graph,
    vertex_delete,
    wire_shorten,
)


def test_chain_h_two_vertices():
    g = chain_h(2)
    assert g.n_vertices == 2
    assert g.edges == frozenset({(0, 1)})
    assert g.begin == (0,) and g.end == (1,)


def test_chain_h_five():
    g = chain_h(5)
    assert g.n_vertices == 5
    assert g.begin == (0,) and g.end == (4,)
    assert g.measured_count == 4


def test_chain_v_three():
    g = chain_v(3)
    assert g.begin == g.end == (0, 2)
    assert g.measured_count == 1


def test_chain_rejects_short():
    with pytest.raises(ValueError):
        chain_h(1)
    with pytest.raises(ValueError):
        chain_v(1)


def test_concat_two_chains_is_longer_chain():
    g = concat(chain_h(2), chain_h(2))
    assert g.n_vertices == 3
    assert graphs_isomorphic(g, chain_h(3))


def test_concat_interface_mismatch():
    with pytest.raises(ValueError):
        concat(chain_h(3), chain_v(3))


def test_side_block_counts():
    g = brick_side_graph()
    assert g.n_vertices == 11
    assert len(g.begin) == len(g.end) == 2


def test_brick_counts():
    g = brick_graph()
    assert g.n_vertices == 29
    assert len(g.begin) == len(g.end) == 2
    assert g.measured_count == 27


def test_vertex_count_arithmetic():
    a, b = chain_h(5), chain_h(7)
    assert gsum(a, b).n_vertices == a.n_vertices + b.n_vertices
    assert concat(a, b).n_vertices == a.n_vertices + b.n_vertices - len(a.end)


@pytest.mark.parametrize("m", [2, 4, 6])
def test_unit_depth_vertex_count(m):
    assert unit_depth_graph(m).n_vertices == 28 * m - 3


@pytest.mark.parametrize("m", [2, 4, 6])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_brickwork_vertex_count(m, k):
    g = brickwork_graph(m, k)
    assert g.n_vertices == 27 * k * m + m - 3 * k
    assert len(g.begin) == len(g.end) == m


def test_brickwork_universal_flag():
    assert brickwork_graph(4, 3).universal is True
    assert brickwork_graph(4, 2).universal is False
    assert brickwork_graph(2, 2).universal is True


def test_brickwork_rejects_odd_modes():
    with pytest.raises(ValueError):
        brickwork_graph(3, 1)


def test_graph_json_roundtrip():
    import json

    g = brick_side_graph()
    data = json.loads(g.to_json())
    assert data["begin"] == [0, 5]
    assert len(data["edges"]) == len(g.edges)
    assert "--" in brick_side_graph().to_dot()


def test_delete_grid_corner():
    g = grid_lattice(3, 3)
    vertex_delete(g, grid_vertex(1, 1, 3))
    assert len(g.vertices) == 8
    assert all(grid_vertex(1, 1, 3) not in e for e in g.edges)


def test_shorten_chain_middle():
    g = grid_lattice(3, 1)  # a 3-vertex path
    wire_shorten(g, 1)
    assert len(g.vertices) == 2
    assert g.edges == {(0, 2)}


def test_shorten_rejects_wrong_degree():
    g = grid_lattice(3, 3)
    with pytest.raises(ValueError):
        wire_shorten(g, grid_vertex(2, 2, 3))  # degree 4


def test_grid_plan_matches_brickwork_m2():
    for k in (1, 2):
        reduced = reduce_lattice(grid_plan_for_brickwork(2, k))
        assert graphs_isomorphic(reduced, brickwork_graph(2, k))


def test_grid_plan_matches_brickwork_m4():
    reduced = reduce_lattice(grid_plan_for_brickwork(4, 1))
    assert graphs_isomorphic(reduced, brickwork_graph(4, 1))


def test_hexagonal_plan_matches_brickwork():
    reduced = reduce_lattice(hexagonal_plan_for_brickwork(1))
    assert graphs_isomorphic(reduced, brickwork_graph(2, 1))


def test_hexagonal_lattice_has_hexagons():
    import networkx as nx

    g = hexagonal_lattice(6, 3).to_networkx()
    cycles = nx.minimum_cycle_basis(g)
    assert cycles and all(len(c) == 6 for c in cycles)


def test_isomorphism_cap():
    big = grid_lattice(30, 10)
    with pytest.raises(ValueError):
        graphs_isomorphic(big, big)
