import math
import random

import networkx as nx
import pytest

from detsfc.graph import deployment_costs, extended_dijkstra, min_hop_path
from detsfc.model import EdgeNode, NetworkState, PhysLink, Topology
from detsfc.topology import generate_topology

from conftest import line_topology


def test_untouched_network_weights(two_node_state):
    view = deployment_costs(two_node_state)
    assert all(w == 2.0 for w in view.node_weight.values())
    assert all(w == 1.0 for w in view.edge_weight.values())


def test_partial_load_node_weight(two_node_state):
    state = two_node_state
    node = state.topology.nodes[0]
    state.residual_cpu[0] = node.cpu_capacity // 2   # 50% CPU remaining
    state.residual_mem[0] = node.mem_capacity / 4    # 25% memory remaining
    view = deployment_costs(state)
    assert view.node_weight[0] == pytest.approx(6.0, rel=1e-12)


def test_exhausted_link_is_unusable(two_node_state):
    state = two_node_state
    state.residual_bw[(0, 1)] = 0.0
    view = deployment_costs(state)
    assert view.edge_weight[(0, 1)] == math.inf
    assert extended_dijkstra(view, 0, 1) is None


def test_source_equals_dest():
    state = NetworkState.fresh(line_topology(n=3))
    view = deployment_costs(state)
    result = extended_dijkstra(view, 1, 1)
    assert result.nodes == [1]
    assert result.total_weight == view.node_weight[1]


def test_unknown_endpoint_raises():
    state = NetworkState.fresh(line_topology(n=2))
    with pytest.raises(ValueError):
        extended_dijkstra(deployment_costs(state), 0, 99)


def _diamond_state():
    # s=0 -> {1 heavy, 2 light} -> d=3
    nodes = [EdgeNode(id=i, cpu_capacity=10, mem_capacity=10) for i in range(4)]
    links = [PhysLink(a=0, b=1, bandwidth_capacity=1e9),
             PhysLink(a=1, b=3, bandwidth_capacity=1e9),
             PhysLink(a=0, b=2, bandwidth_capacity=1e9),
             PhysLink(a=2, b=3, bandwidth_capacity=1e9)]
    state = NetworkState.fresh(Topology(nodes, links))
    state.residual_cpu[1] = 1         # node 1 at 10% remaining
    state.residual_bw[(0, 2)] = 5e8   # make the light route's edges pricier
    state.residual_bw[(2, 3)] = 5e8
    return state


def test_loaded_middle_node_loses_to_costlier_edges():
    state = _diamond_state()
    view = deployment_costs(state)
    result = extended_dijkstra(view, 0, 3)
    assert result.nodes == [0, 2, 3]
    # exhaustive check over both 2-hop routes
    heavy = view.node_weight[0] + view.node_weight[1] + view.node_weight[3] \
        + view.edge_weight[(0, 1)] + view.edge_weight[(1, 3)]
    light = view.node_weight[0] + view.node_weight[2] + view.node_weight[3] \
        + view.edge_weight[(0, 2)] + view.edge_weight[(2, 3)]
    assert light < heavy
    assert result.total_weight == pytest.approx(light, rel=1e-12)


def _random_loaded_state(rng, n_nodes):
    topo = generate_topology(
        n_nodes=n_nodes, avg_degree=rng.uniform(2.0, 3.5), cpu=16, mem=16,
        bandwidth=1_000_000_000, length_range=(1.0, 50.0),
        seed=rng.randrange(2 ** 31))
    state = NetworkState.fresh(topo)
    for nid in topo.nodes:
        state.residual_cpu[nid] = rng.randint(0, 16)
        state.residual_mem[nid] = rng.randint(0, 16)
    for key in topo.links:
        state.residual_bw[key] = float(rng.randint(0, 10)) * 1e8
    return state


def _brute_force_min_weight(view, topology, source, dest):
    """Minimum path weight over every simple path, by DFS enumeration."""
    best = [math.inf]

    def walk(node, seen, acc):
        if acc >= best[0]:
            return
        if node == dest:
            best[0] = acc
            return
        for nbr, key in topology.adjacency[node]:
            if nbr in seen:
                continue
            w = view.edge_weight[key] + view.node_weight[nbr]
            if w == math.inf:
                continue
            seen.add(nbr)
            walk(nbr, seen, acc + w)
            seen.remove(nbr)

    if view.node_weight[source] == math.inf:
        return None
    walk(source, {source}, view.node_weight[source])
    return None if best[0] == math.inf else best[0]


def test_matches_brute_force_on_random_graphs():
    rng = random.Random(123)
    for _ in range(150):
        state = _random_loaded_state(rng, rng.randint(3, 8))
        view = deployment_costs(state)
        ids = sorted(state.topology.nodes)
        source, dest = rng.sample(ids, 2)
        result = extended_dijkstra(view, source, dest)
        expected = _brute_force_min_weight(view, state.topology, source, dest)
        if expected is None:
            assert result is None
        else:
            assert result is not None
            assert result.total_weight == pytest.approx(expected, rel=1e-9)


def test_monotone_in_load():
    rng = random.Random(5)
    for _ in range(50):
        state = _random_loaded_state(rng, 6)
        ids = sorted(state.topology.nodes)
        source, dest = rng.sample(ids, 2)
        before = extended_dijkstra(deployment_costs(state), source, dest)
        if before is None:
            continue
        nid = rng.choice(ids)
        state.residual_cpu[nid] = max(0, state.residual_cpu[nid] - 3)
        after = extended_dijkstra(deployment_costs(state), source, dest)
        assert after is None or after.total_weight >= before.total_weight - 1e-12


def test_deterministic_tie_break():
    # square with two equal-weight 2-hop routes: the smaller node id wins
    nodes = [EdgeNode(id=i, cpu_capacity=4, mem_capacity=4) for i in range(4)]
    links = [PhysLink(a=0, b=1, bandwidth_capacity=1e9),
             PhysLink(a=1, b=3, bandwidth_capacity=1e9),
             PhysLink(a=0, b=2, bandwidth_capacity=1e9),
             PhysLink(a=2, b=3, bandwidth_capacity=1e9)]
    state = NetworkState.fresh(Topology(nodes, links))
    view = deployment_costs(state)
    for _ in range(5):
        assert extended_dijkstra(view, 0, 3).nodes == [0, 1, 3]


def test_zero_node_weights_reduce_to_classic_dijkstra():
    rng = random.Random(9)
    for _ in range(30):
        topo = generate_topology(n_nodes=7, avg_degree=2.5, cpu=4, mem=4,
                                 bandwidth=1e9, length_range=(1, 9),
                                 seed=rng.randrange(2 ** 31))
        g = nx.Graph()
        edge_weight = {}
        for key, link in topo.links.items():
            w = rng.uniform(0.5, 4.0)
            edge_weight[key] = w
            g.add_edge(*key, weight=w)
        from detsfc.graph import _search
        node_weight = {nid: 0.0 for nid in topo.nodes}
        a, b = rng.sample(sorted(topo.nodes), 2)
        ours = _search(topo.adjacency, node_weight, edge_weight, a, b)
        ref = nx.dijkstra_path_length(g, a, b)
        assert ours.total_weight == pytest.approx(ref, rel=1e-9)


def test_weights_never_below_one_and_finite_iff_loaded():
    rng = random.Random(44)
    for _ in range(30):
        state = _random_loaded_state(rng, 6)
        view = deployment_costs(state)
        for nid, w in view.node_weight.items():
            cpu_rate = state.residual_cpu[nid] / state.topology.nodes[nid].cpu_capacity
            mem_rate = state.residual_mem[nid] / state.topology.nodes[nid].mem_capacity
            if cpu_rate > 0 and mem_rate > 0:
                assert w >= 2.0
            else:
                assert w == math.inf
        for key, w in view.edge_weight.items():
            assert w >= 1.0 or w == math.inf


def test_min_hop_path_prefers_fewer_hops_then_lex():
    # 0-1-4 and 0-2-4 and 0-3-4 all have 2 hops; lexicographic pick is 0-1-4
    nodes = [EdgeNode(id=i, cpu_capacity=4, mem_capacity=4) for i in range(5)]
    links = [PhysLink(a=0, b=i, bandwidth_capacity=1e9) for i in (1, 2, 3)] + \
            [PhysLink(a=i, b=4, bandwidth_capacity=1e9) for i in (1, 2, 3)]
    topo = Topology(nodes, links)
    assert min_hop_path(topo, 0, 4).nodes == [0, 1, 4]
