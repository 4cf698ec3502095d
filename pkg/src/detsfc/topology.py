"""Seeded synthetic edge topologies.

A random attachment tree guarantees connectivity; extra edges are then
sampled until the requested average degree is met.  Everything is driven
by one seed, so the same spec always yields the same graph.
"""

from __future__ import annotations

import random

from .model import EdgeNode, PhysLink, Topology


def generate_topology(n_nodes: int, avg_degree: float, cpu: int, mem: float,
                      bandwidth: float, length_range: tuple, seed: int) -> Topology:
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    lo, hi = length_range

    edges = set()
    for i in range(1, n_nodes):
        edges.add((rng.randrange(i), i))

    target = max(n_nodes - 1, round(n_nodes * avg_degree / 2))
    spare = [(a, b) for a in range(n_nodes) for b in range(a + 1, n_nodes)
             if (a, b) not in edges]
    extra = min(target - len(edges), len(spare))
    if extra > 0:
        edges.update(rng.sample(spare, extra))

    nodes = [EdgeNode(id=i, cpu_capacity=cpu, mem_capacity=mem)
             for i in range(n_nodes)]
    links = [PhysLink(a=a, b=b, bandwidth_capacity=bandwidth,
                      length=rng.uniform(lo, hi))
             for a, b in sorted(edges)]
    return Topology(nodes, links)
