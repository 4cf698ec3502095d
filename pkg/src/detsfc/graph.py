"""Load-aware graph weights and node-weighted shortest-path search.

A node's weight is the sum of the reciprocals of its CPU and memory
remaining rates, an edge's weight the reciprocal of its bandwidth remaining
rate, so lightly loaded elements cost ~1 per resource and anything near
exhaustion becomes prohibitively expensive.  Fully exhausted elements get
an infinite weight and are treated as unusable by the search.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .model import NetworkState

INF = math.inf


@dataclass
class WeightedView:
    """Immutable snapshot of per-node / per-edge deployment costs."""

    node_weight: dict
    edge_weight: dict
    state: NetworkState  # the state the view was derived from


@dataclass
class PathResult:
    nodes: list
    total_weight: float

    @property
    def hops(self):
        return len(self.nodes) - 1


def _reciprocal_rate(residual, capacity):
    rate = residual / capacity
    if rate <= 0:
        return INF
    return 1.0 / rate


def deployment_costs(state: NetworkState) -> WeightedView:
    """Derive the congestion-aware weights for the current residuals."""
    node_weight = {}
    for nid, node in state.topology.nodes.items():
        w = _reciprocal_rate(state.residual_cpu[nid], node.cpu_capacity) \
            + _reciprocal_rate(state.residual_mem[nid], node.mem_capacity)
        node_weight[nid] = w
    edge_weight = {}
    for key, link in state.topology.links.items():
        edge_weight[key] = _reciprocal_rate(state.residual_bw[key], link.bandwidth_capacity)
    return WeightedView(node_weight=node_weight, edge_weight=edge_weight, state=state)


def _search(adjacency, node_weight, edge_weight, source, dest):
    """Dijkstra over (weight, hops, node sequence) keys.

    The path cost counts the weights of every node on the path (endpoints
    included) plus every traversed edge.  The lexicographic key makes the
    result unique: least weight, then fewest hops, then smallest node
    sequence.  All weights must be non-negative.
    """
    if source not in node_weight or dest not in node_weight:
        raise ValueError(f"unknown endpoint in path query: {source} -> {dest}")
    w0 = node_weight[source]
    if w0 == INF or node_weight[dest] == INF:
        return None
    heap = [(w0, 0, (source,))]
    settled = set()
    while heap:
        weight, hops, path = heapq.heappop(heap)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == dest:
            return PathResult(nodes=list(path), total_weight=weight)
        for nbr, key in adjacency[node]:
            if nbr in settled:
                continue
            ew = edge_weight.get(key, INF)
            nw = node_weight.get(nbr, INF)
            if ew == INF or nw == INF:
                continue
            heapq.heappush(heap, (weight + ew + nw, hops + 1, path + (nbr,)))
    return None


def extended_dijkstra(view: WeightedView, source, dest) -> PathResult | None:
    """Least-deployment-cost path under node + edge weights, or None."""
    return _search(view.state.topology.adjacency, view.node_weight,
                   view.edge_weight, source, dest)


def min_hop_path(topology, source, dest) -> PathResult | None:
    """Plain fewest-hops path, ties broken by smallest node sequence.

    Ignores load entirely (unit edge weights, zero node weights); used by
    the benchmark strategy.
    """
    node_weight = {nid: 0.0 for nid in topology.nodes}
    edge_weight = {key: 1.0 for key in topology.links}
    return _search(topology.adjacency, node_weight, edge_weight, source, dest)
