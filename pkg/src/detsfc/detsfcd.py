"""Load-aware deterministic chain deployment.

Per request: derive congestion weights, pick the least-deployment-cost
path, place the VNFs on it in a load-balancing way, size the CPU cores so
the end-to-end latency lands just inside the bound, validate, and commit
atomically.  The placement is fixed before the core allocation so that the
communication latency entering the processing budget is exactly the one
the committed deployment will exhibit (co-located neighbours drop their
transmission term, so placement changes the budget).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .allocation import AllocationOption, bandwidth_assignment, enumerate_options, \
    select_min_cost
from .graph import PathResult, deployment_costs, extended_dijkstra
from .model import (
    CAPACITY_CODES, Deployment, ModelParams, NetworkState, SfcRequest,
    REJECT_INSUFFICIENT, REJECT_NO_ALLOCATION, REJECT_NO_PATH,
    communication_latency, segment_paths, sfc_cost, sfc_profit, sfc_revenue,
    total_latency, validate_deployment,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rejection:
    reason: str
    detail: str = ""


def embed_load_balanced(path: PathResult, alloc: AllocationOption,
                        state: NetworkState) -> list:
    """Assign VNFs to path nodes, balancing CPU load while keeping order.

    Each VNF in turn takes the path node with the highest residual-CPU rate
    (counting cores already placed in this call), ties going to the earliest
    node on the path; the chosen node multiset is then laid out along the
    path direction so the chain never walks backwards.
    """
    nodes = path.nodes
    caps = [state.topology.nodes[n].cpu_capacity for n in nodes]
    free = [state.residual_cpu[n] for n in nodes]
    positions = []
    for cores in alloc.cores:
        best, best_rate = 0, -1.0
        for i, (f, c) in enumerate(zip(free, caps)):
            rate = f / c
            if rate > best_rate:
                best, best_rate = i, rate
        free[best] -= cores
        positions.append(best)
    positions.sort()
    return [nodes[i] for i in positions]


def deploy(state: NetworkState, req: SfcRequest, p: ModelParams):
    """Deploy one request; returns the committed Deployment or a Rejection.

    The state is only mutated on success, so a rejection leaves it
    untouched.
    """
    view = deployment_costs(state)
    path = extended_dijkstra(view, req.source, req.dest)
    if path is None:
        return Rejection(REJECT_NO_PATH, "no usable path between the endpoints")

    eta = bandwidth_assignment(req, p)
    provisional = AllocationOption(cores=(1,) * len(req.vnfs), latency=0.0, cost=0.0)
    vnf_nodes = embed_load_balanced(path, provisional, state)
    segments, seg_bw = segment_paths(
        state.topology, path.nodes, vnf_nodes, req.source, req.dest, eta)

    dep = Deployment(
        request_id=req.id,
        vnf_nodes=vnf_nodes,
        vnf_cores=[1] * len(req.vnfs),
        vnf_mem=[v.mem_demand for v in req.vnfs],
        link_paths=segments,
        link_bw=seg_bw,
    )
    comm = communication_latency(dep, req, p)
    proc_budget = req.latency_bound - comm
    if proc_budget <= 0:
        return Rejection(REJECT_NO_ALLOCATION,
                         "communication latency alone exceeds the bound")
    alloc = select_min_cost(enumerate_options(req, proc_budget, p))
    if alloc is None:
        return Rejection(REJECT_NO_ALLOCATION,
                         "no core allocation lands inside the latency band")

    dep.vnf_cores = list(alloc.cores)
    dep.achieved_latency = total_latency(dep, req, p)
    dep.cost = sfc_cost(dep, p)
    dep.revenue = sfc_revenue(req, p)
    dep.profit = sfc_profit(dep, req, p)

    violations = validate_deployment(state, dep, req, p)
    if violations:
        reason = REJECT_INSUFFICIENT if any(
            v.code in CAPACITY_CODES for v in violations) else REJECT_NO_ALLOCATION
        return Rejection(reason, "; ".join(str(v) for v in violations))

    state.apply(dep)
    return dep


def release(state: NetworkState, request_id) -> None:
    """Tear down an active deployment, restoring residuals exactly."""
    dep = state.active.get(request_id)
    if dep is None:
        log.warning("release of unknown request %s ignored", request_id)
        return
    state.revert(dep)
