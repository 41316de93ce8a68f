import numpy as np
import pytest

from egodiversity.graph import (
    FollowGraph,
    Neighborhood,
    SelfLoopError,
    UnknownNodeError,
    ego_neighborhood,
    strong_components,
    weak_components,
)

from oracles import random_neighborhood, strong_blocks_oracle, weak_blocks_oracle


def test_empty_edge_list():
    g = FollowGraph.from_edge_list([])
    assert g.n_nodes == 0
    assert g.n_edges == 0


def test_duplicate_edges_collapse():
    g = FollowGraph.from_edge_list([(1, 2), (1, 2), (3, 1)])
    assert g.n_nodes == 3
    assert g.n_edges == 2
    assert list(g.edges()) == [(1, 2), (3, 1)]


def test_self_loop_rejected_names_pair():
    with pytest.raises(SelfLoopError) as err:
        FollowGraph.from_edge_list([(1, 1)])
    assert "(1, 1)" in str(err.value)


def test_negative_id_rejected():
    with pytest.raises(ValueError):
        FollowGraph.from_edge_list([(-1, 2)])


def test_reciprocal_edges_are_distinct():
    g = FollowGraph.from_edge_list([(1, 2), (2, 1)])
    assert g.n_edges == 2
    assert g.has_edge(1, 2) and g.has_edge(2, 1)


def test_adjacency_views_consistent():
    edges = [(1, 2), (3, 2), (2, 4), (1, 4)]
    g = FollowGraph.from_edge_list(edges)
    for u, v in edges:
        assert v in g.followees(u)
        assert u in g.followers(v)
    assert g.out_degree(1) == 2
    assert g.in_degree(2) == 2
    assert g.in_degree(4) == 2


def test_followers_sorted():
    g = FollowGraph.from_edge_list([(9, 5), (2, 5), (7, 5)])
    assert g.followers(5).tolist() == [2, 7, 9]


def test_unknown_node():
    g = FollowGraph.from_edge_list([(1, 2)])
    with pytest.raises(UnknownNodeError):
        g.followers(99)
    with pytest.raises(UnknownNodeError):
        ego_neighborhood(g, 99)


def test_ego_neighborhood_basic():
    g = FollowGraph.from_edge_list([(1, 5), (2, 5), (1, 2)])
    n = ego_neighborhood(g, 5)
    assert n.member_set() == {1, 2}
    assert n.edge_set() == {(1, 2)}


def test_ego_neighborhood_no_followers():
    g = FollowGraph.from_edge_list([(5, 1)])
    n = ego_neighborhood(g, 5)
    assert n.n_members == 0
    assert n.n_edges == 0


def test_ego_neighborhood_excludes_ego_edges():
    # follower 1 follows follower 2 and the ego; ego follows 2
    g = FollowGraph.from_edge_list([(1, 9), (2, 9), (1, 2), (9, 2)])
    n = ego_neighborhood(g, 9)
    assert 9 not in n.member_set()
    assert n.edge_set() == {(1, 2)}


def test_ego_neighborhood_matches_linear_scan():
    rng = np.random.default_rng(12345)
    nodes = 50
    mask = rng.random((nodes, nodes)) < 0.08
    np.fill_diagonal(mask, False)
    edges = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    g = FollowGraph.from_edge_list(edges)
    edge_set = set(edges)
    for ego in [int(u) for u in g.node_ids][:20]:
        n = ego_neighborhood(g, ego)
        members = {u for (u, v) in edge_set if v == ego}
        expect = {(u, v) for (u, v) in edge_set if u in members and v in members}
        assert n.member_set() == members
        assert n.edge_set() == expect


def test_weak_components_examples():
    n = Neighborhood.from_member_edges(0, [1, 2, 3], [(1, 2)])
    assert [sorted(b) for b in weak_components(n).blocks] == [[1, 2], [3]]
    n = Neighborhood.from_member_edges(0, [1, 2, 3, 4], [])
    assert len(weak_components(n)) == 4


def test_strong_components_examples():
    n = Neighborhood.from_member_edges(0, [1, 2, 3], [(1, 2), (2, 1)])
    assert [sorted(b) for b in strong_components(n).blocks] == [[1, 2], [3]]
    chain = Neighborhood.from_member_edges(0, [1, 2, 3], [(1, 2), (2, 3)])
    assert len(strong_components(chain)) == 3


@pytest.mark.parametrize("seed", range(60))
def test_components_match_oracles(seed):
    n = random_neighborhood(seed)
    assert list(weak_components(n).blocks) == weak_blocks_oracle(n)
    assert list(strong_components(n).blocks) == strong_blocks_oracle(n)


@pytest.mark.parametrize("seed", range(25))
def test_partition_invariants(seed):
    n = random_neighborhood(seed)
    for part in (weak_components(n), strong_components(n)):
        union = set()
        total = 0
        for block in part.blocks:
            assert block, "blocks must be non-empty"
            assert not (union & block), "blocks must be disjoint"
            union |= block
            total += len(block)
        assert union == n.member_set()
        mins = [min(b) for b in part.blocks]
        assert mins == sorted(mins)
    assert len(strong_components(n)) >= len(weak_components(n))


@pytest.mark.parametrize("seed", range(10))
def test_component_output_independent_of_edge_order(seed):
    rng = np.random.default_rng(seed)
    edges = [(1, 9), (2, 9), (3, 9), (4, 9), (1, 2), (2, 3), (3, 1), (4, 1)]
    shuffled = list(edges)
    rng.shuffle(shuffled)
    a = ego_neighborhood(FollowGraph.from_edge_list(edges), 9)
    b = ego_neighborhood(FollowGraph.from_edge_list(shuffled), 9)
    assert weak_components(a).blocks == weak_components(b).blocks
    assert strong_components(a).blocks == strong_components(b).blocks


@pytest.mark.parametrize("seed", range(30))
def test_weak_equals_strong_of_symmetrized(seed):
    n = random_neighborhood(seed)
    sym_edges = set()
    for a, b in zip(n.edge_src.tolist(), n.edge_dst.tolist()):
        u, v = int(n.members[a]), int(n.members[b])
        sym_edges.add((u, v))
        sym_edges.add((v, u))
    sym = Neighborhood.from_member_edges(n.ego, n.members.tolist(), sym_edges)
    assert weak_components(n).blocks == strong_components(sym).blocks


def test_neighborhood_from_member_edges_validation():
    with pytest.raises(ValueError):
        Neighborhood.from_member_edges(1, [1, 2], [])
    with pytest.raises(ValueError):
        Neighborhood.from_member_edges(0, [1, 2], [(1, 3)])
