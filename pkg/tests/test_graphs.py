import numpy as np
import pytest

from gfixlab.errors import OutOfDomainError, UnsupportedSetError
from gfixlab.graphs import (GraphSpec, chain_path, componentwise_leq, has_edge,
                            in_reachability_class)
from gfixlab.vecspace import Ball, Box


def test_proximity_edge_strict():
    G = GraphSpec.proximity(0.5)
    assert has_edge(G, np.zeros(2), np.array([0.4, 0.0]))
    assert not has_edge(G, np.zeros(2), np.array([0.6, 0.0]))
    assert not has_edge(G, np.zeros(2), np.array([0.5, 0.0]))  # tie is a non-edge


def test_diagonal_always_edges():
    rng = np.random.default_rng(11)
    graphs = [GraphSpec.full(), GraphSpec.proximity(0.25), GraphSpec.order()]
    for _ in range(1000):
        y = rng.standard_normal(4)
        for G in graphs:
            assert has_edge(G, y, y)


def test_order_edges_either_direction():
    G = GraphSpec.order()
    assert has_edge(G, np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    assert has_edge(G, np.array([1.0, 2.0]), np.array([0.0, 0.0]))
    assert not has_edge(G, np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def test_order_custom_comparator():
    G = GraphSpec.order()
    reverse = lambda a, b: componentwise_leq(b, a)
    assert has_edge(G, np.array([1.0, 1.0]), np.array([0.0, 0.0]), order_cmp=reverse)


def test_graph_spec_validation():
    with pytest.raises(ValueError):
        GraphSpec("proximity")
    with pytest.raises(ValueError):
        GraphSpec("full", eps=0.3)
    with pytest.raises(ValueError):
        GraphSpec("nope")


def test_chain_path_subdivision():
    K = Ball(np.zeros(2), 2.0)
    G = GraphSpec.proximity(0.5)
    path = chain_path(np.zeros(2), np.array([1.2, 0.0]), K, G)
    assert path.L == 3
    assert np.allclose(path.nodes[:, 0], [0.0, 0.4, 0.8, 1.2], atol=1e-12)
    assert np.all(path.segment_lengths() < 0.5)
    path.validate(K, G)


def test_chain_path_degenerate_pair():
    K = Ball(np.zeros(2), 2.0)
    G = GraphSpec.proximity(0.5)
    x = np.array([0.1, 0.1])
    path = chain_path(x, x, K, G)
    assert path.L == 1
    assert np.allclose(path.nodes, np.stack([x, x]))


def test_chain_path_direct_edge():
    K = Ball(np.zeros(2), 2.0)
    G = GraphSpec.proximity(0.5)
    path = chain_path(np.zeros(2), np.array([0.3, 0.0]), K, G)
    assert path.L == 1


def test_chain_path_preconditions():
    K = Ball(np.zeros(2), 0.5)
    G = GraphSpec.proximity(0.5)
    with pytest.raises(OutOfDomainError):
        chain_path(np.array([2.0, 0.0]), np.zeros(2), K, G)
    with pytest.raises(UnsupportedSetError):
        chain_path(np.zeros(2), np.zeros(2), K, GraphSpec.full())


def test_chain_path_nodes_stay_in_k():
    rng = np.random.default_rng(5)
    K = Ball(np.zeros(3), 1.0)
    G = GraphSpec.proximity(0.3)
    for _ in range(50):
        x, y = K.sample(rng, 2)
        path = chain_path(x, y, K, G)
        path.validate(K, G)


def test_proximity_edge_iff_single_leg_path():
    rng = np.random.default_rng(7)
    K = Ball(np.zeros(3), 1.0)
    G = GraphSpec.proximity(0.4)
    for _ in range(200):
        x, y = K.sample(rng, 2)
        assert has_edge(G, x, y) == (chain_path(x, y, K, G).L == 1)


def test_reachability_full_graph():
    K = Ball(np.zeros(2), 1.0)
    assert in_reachability_class(np.zeros(2), np.array([0.9, 0.0]),
                                 GraphSpec.full(), K, 1)


def test_reachability_proximity_arithmetic():
    K = Ball(np.zeros(2), 2.0)
    G = GraphSpec.proximity(0.5)
    x0, y = np.zeros(2), np.array([1.2, 0.0])
    assert in_reachability_class(x0, y, G, K, 3)
    assert not in_reachability_class(x0, y, G, K, 2)


def test_reachability_order_direct_only():
    K = Box(-np.ones(2) * 5, np.ones(2) * 5)
    G = GraphSpec.order()
    assert in_reachability_class(np.zeros(2), np.array([1.0, 2.0]), G, K, 1)
    assert not in_reachability_class(np.array([1.0, 0.0]), np.array([0.0, 1.0]), G, K, 3)


def test_reachability_rejects_bad_L():
    K = Ball(np.zeros(2), 1.0)
    with pytest.raises(ValueError):
        in_reachability_class(np.zeros(2), np.zeros(2), GraphSpec.full(), K, 0)
