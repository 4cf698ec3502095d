"""CPU-core allocation over a fixed latency budget, and bandwidth sizing.

Core allocation enumerates the full per-VNF core grid, keeps only the
options whose total processing latency falls inside the admission band
below the budget, and ranks them by CPU cost.  The grid is tiny at desk
scale (max_cores ** chain_length, 4096 for the stock 4-VNF chains), so the
enumeration is exact rather than clever.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .model import ModelParams, SfcRequest, vnf_latency


@dataclass(frozen=True)
class AllocationOption:
    cores: tuple          # per-VNF core counts
    latency: float        # resulting total processing latency, ms
    cost: float           # CPU cost only; memory and bandwidth are fixed inputs


def bandwidth_assignment(req: SfcRequest, p: ModelParams) -> float:
    """Uniform per-virtual-link bandwidth: the chain rate plus headroom.

    Returned in whole bits/s so that residual bookkeeping stays exact.
    """
    return float(round(req.data_rate * p.bw_overprovision * 1e6))


def _per_vnf_latency_table(req: SfcRequest, p: ModelParams):
    """latencies[i][c-1] = processing latency of VNF i with c cores."""
    table = []
    for vnf in req.vnfs:
        table.append(np.array([vnf_latency(vnf, req, c, p)
                               for c in range(1, p.max_cores_per_vnf + 1)]))
    return table


def enumerate_options(req: SfcRequest, proc_budget: float, p: ModelParams) -> list:
    """All core allocations whose latency lands in the band below the budget.

    The band is [proc_budget - eps, proc_budget] with eps the configured
    admissible shortfall of the chain's latency bound; options outside it
    are too slow (infeasible) or too fast (wastefully over-deterministic).
    Sorted by cost, then lexicographically by core vector.
    """
    if proc_budget <= 0:
        return []
    table = _per_vnf_latency_table(req, p)
    # broadcast-sum the per-VNF tables into the full grid, left to right so
    # the float accumulation order matches processing_latency()
    total = reduce(lambda acc, v: np.add.outer(acc, v), table[1:], table[0])
    eps = p.latency_band * req.latency_bound
    mask = (total >= proc_budget - eps) & (total <= proc_budget)
    options = []
    for idx in np.argwhere(mask):
        cores = tuple(int(c) + 1 for c in idx)
        cost = 0.0
        for c in cores:
            cost += p.cpu_unit_cost * c
        options.append(AllocationOption(cores=cores, latency=float(total[tuple(idx)]),
                                        cost=cost))
    options.sort(key=lambda o: (o.cost, o.cores))
    return options


def select_min_cost(options: list) -> AllocationOption | None:
    """Cheapest banded option (the list is already cost-sorted), or None."""
    return options[0] if options else None
