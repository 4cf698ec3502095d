"""Benchmark strategy: shortest-path heuristic with latency equalization.

Routes on hop count alone (never looks at load), spreads the VNFs evenly
along the path, gives every VNF an equal share of the processing budget
and inverts the latency formulas for the smallest core count that meets
the share.  Validated and committed through the same code paths as the
load-aware strategy, except that it accepts any latency up to the bound
(the even split usually lands well below it).
"""

from __future__ import annotations

import math

from .allocation import bandwidth_assignment
from .detsfcd import Rejection
from .graph import min_hop_path
from .model import (
    CAPACITY_CODES, Deployment, LAYER1_RAN, ModelParams, NetworkState,
    SfcRequest, REJECT_INSUFFICIENT, REJECT_NO_ALLOCATION, REJECT_NO_PATH,
    _mcs_poly, communication_latency, segment_paths, sfc_cost, sfc_profit,
    sfc_revenue, total_latency, validate_deployment, vnf_latency,
)


def _min_cores_for(vnf, req, target, p):
    """Smallest core count whose latency is <= target, or None within the cap."""
    # closed-form seed, then integer adjustment to be safe against rounding
    if vnf.kind == LAYER1_RAN:
        # latency = K / (c*f)^2  ->  c >= sqrt(K/target)/f
        k = req.num_rbs * _mcs_poly(p.l1_coeffs, req.mcs_index)
        seed = math.sqrt(k / target) / p.core_freq if target > 0 else p.max_cores_per_vnf + 1
    else:
        seed = vnf.cycles_per_bit * req.data_rate / (target * p.core_freq) \
            if target > 0 else p.max_cores_per_vnf + 1
    c = max(1, min(p.max_cores_per_vnf, math.ceil(seed)))
    while c > 1 and vnf_latency(vnf, req, c - 1, p) <= target:
        c -= 1
    while vnf_latency(vnf, req, c, p) > target:
        c += 1
        if c > p.max_cores_per_vnf:
            return None
    return c


def deploy_sphle(state: NetworkState, req: SfcRequest, p: ModelParams):
    """Deploy one request with the benchmark policy; atomic like deploy()."""
    path = min_hop_path(state.topology, req.source, req.dest)
    if path is None:
        return Rejection(REJECT_NO_PATH, "no path between the endpoints")

    # spread the chain over the path in contiguous blocks, front to back
    n_vnfs = len(req.vnfs)
    n_nodes = len(path.nodes)
    vnf_nodes = [path.nodes[(i * n_nodes) // n_vnfs] for i in range(n_vnfs)]

    eta = bandwidth_assignment(req, p)
    segments, seg_bw = segment_paths(
        state.topology, path.nodes, vnf_nodes, req.source, req.dest, eta)

    dep = Deployment(
        request_id=req.id,
        vnf_nodes=vnf_nodes,
        vnf_cores=[1] * n_vnfs,
        vnf_mem=[v.mem_demand for v in req.vnfs],
        link_paths=segments,
        link_bw=seg_bw,
    )
    comm = communication_latency(dep, req, p)
    target = (req.latency_bound - comm) / n_vnfs
    if target <= 0:
        return Rejection(REJECT_NO_ALLOCATION,
                         "communication latency alone exceeds the bound")
    cores = []
    for vnf in req.vnfs:
        c = _min_cores_for(vnf, req, target, p)
        if c is None:
            return Rejection(REJECT_NO_ALLOCATION,
                             "per-VNF latency share unreachable within the core cap")
        cores.append(c)

    dep.vnf_cores = cores
    dep.achieved_latency = total_latency(dep, req, p)
    dep.cost = sfc_cost(dep, p)
    dep.revenue = sfc_revenue(req, p)
    dep.profit = sfc_profit(dep, req, p)

    violations = validate_deployment(state, dep, req, p, enforce_lower_band=False)
    if violations:
        reason = REJECT_INSUFFICIENT if any(
            v.code in CAPACITY_CODES for v in violations) else REJECT_NO_ALLOCATION
        return Rejection(reason, "; ".join(str(v) for v in violations))

    state.apply(dep)
    return dep
