"""Exhaustive profit-maximizing reference for tiny instances.

Enumerates every simple path, every order-preserving VNF-to-node
assignment along it and every core vector that keeps the latency within
the bound, and returns the most profitable feasible deployment.  Purely a
measurement instrument for the heuristics' optimality gap, hence the hard
instance-size limits.  Latency feasibility here is the upper bound only
(latency <= bound): the benchmark strategy ignores the lower band, so the
reference must rank its deployments too, or dominance comparisons would be
meaningless.

The core enumeration prunes on true bounds only (remaining latency at max
cores, remaining cost at one core each, residual CPU), so the result
equals the plain brute force.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .allocation import bandwidth_assignment
from .model import (
    Deployment, GENERIC, LAYER1_RAN, ModelParams, NetworkState, SfcRequest,
    VnfDescriptor, communication_latency, segment_paths, sfc_cost, sfc_profit,
    sfc_revenue, total_latency, vnf_latency,
)
from .topology import generate_topology


class OracleLimitError(ValueError):
    """The instance is too large for exhaustive search."""


@dataclass(frozen=True)
class OracleLimits:
    max_nodes: int = 8
    max_vnfs: int = 3
    max_batch: int = 4


def _simple_paths(topology, source, dest):
    """All simple paths source -> dest, in lexicographic node-sequence order."""
    paths = []
    path = [source]
    on_path = {source}

    def walk(node):
        if node == dest:
            paths.append(list(path))
            return
        for nbr, _ in topology.adjacency[node]:
            if nbr in on_path:
                continue
            path.append(nbr)
            on_path.add(nbr)
            walk(nbr)
            path.pop()
            on_path.remove(nbr)

    walk(source)
    return paths


def _monotone_assignments(n_positions, n_vnfs):
    """All non-decreasing position tuples of length n_vnfs, lexicographic."""
    out = []

    def extend(prefix, start):
        if len(prefix) == n_vnfs:
            out.append(prefix)
            return
        for pos in range(start, n_positions):
            extend(prefix + (pos,), pos)

    extend((), 0)
    return out


def _check_limits(state, reqs, limits):
    if len(state.topology.nodes) > limits.max_nodes:
        raise OracleLimitError(
            f"topology has {len(state.topology.nodes)} nodes, limit {limits.max_nodes}")
    for req in reqs:
        if len(req.vnfs) > limits.max_vnfs:
            raise OracleLimitError(
                f"request {req.id} has {len(req.vnfs)} VNFs, limit {limits.max_vnfs}")


def _build_deployment(state, req, p, path_nodes, vnf_nodes, cores, eta):
    segs, seg_bw = segment_paths(
        state.topology, path_nodes, vnf_nodes, req.source, req.dest, eta)
    dep = Deployment(
        request_id=req.id,
        vnf_nodes=list(vnf_nodes),
        vnf_cores=list(cores),
        vnf_mem=[v.mem_demand for v in req.vnfs],
        link_paths=segs,
        link_bw=seg_bw,
    )
    dep.achieved_latency = total_latency(dep, req, p)
    dep.cost = sfc_cost(dep, p)
    dep.revenue = sfc_revenue(req, p)
    dep.profit = sfc_profit(dep, req, p)
    return dep


def _enumerate(state, req, p, frontier_only):
    """Exhaustive deployment search for one request on the given residuals.

    Returns (best_deployment, frontier) where ``frontier`` is only filled
    in frontier mode: the element-wise minimal feasible core vectors per
    (path, assignment).  Anything larger costs more and uses more of every
    resource, so restricting a joint search to the frontier is exact.
    Iteration order (paths, assignments, cores, all lexicographic) plus
    strict improvement makes the best deployment unique.
    """
    vnfs = req.vnfs
    n_vnfs = len(vnfs)
    eta = bandwidth_assignment(req, p)
    revenue = sfc_revenue(req, p)
    mem = [v.mem_demand for v in vnfs]
    max_cores = p.max_cores_per_vnf
    lat = [[vnf_latency(v, req, c, p) for c in range(1, max_cores + 1)]
           for v in vnfs]
    rest_min_lat = [0.0] * (n_vnfs + 1)
    for i in range(n_vnfs - 1, -1, -1):
        rest_min_lat[i] = rest_min_lat[i + 1] + lat[i][max_cores - 1]
    rest_min_cost = [p.cpu_unit_cost * (n_vnfs - i) for i in range(n_vnfs + 1)]
    lat_slack = 1e-9 * req.latency_bound
    profit_guard = 1e-9 * max(1.0, abs(revenue))

    best = None
    frontier = []

    for path_nodes in _simple_paths(state.topology, req.source, req.dest):
        links = [state.topology.link_between(a, b)
                 for a, b in zip(path_nodes, path_nodes[1:])]
        if any(eta > state.residual_bw[l.key] for l in links):
            continue
        for assignment in _monotone_assignments(len(path_nodes), n_vnfs):
            vnf_nodes = [path_nodes[i] for i in assignment]
            need_mem = {}
            for node, m in zip(vnf_nodes, mem):
                need_mem[node] = need_mem.get(node, 0) + m
            if any(m > state.residual_mem[n] for n, m in need_mem.items()):
                continue
            segs, seg_bw = segment_paths(
                state.topology, path_nodes, vnf_nodes, req.source, req.dest, eta)
            shell = Deployment(request_id=req.id, vnf_nodes=vnf_nodes,
                               vnf_cores=[1] * n_vnfs, vnf_mem=mem,
                               link_paths=segs, link_bw=seg_bw)
            comm = communication_latency(shell, req, p)
            budget = req.latency_bound - comm
            if budget <= 0:
                continue
            fixed_cost = 0.0
            for m in mem:
                fixed_cost += p.mem_unit_cost * m
            for bw in seg_bw:
                fixed_cost += p.bw_unit_cost * (bw / 1e6)

            cores = [0] * n_vnfs
            cpu_used = {}

            def grid(i, partial_lat, partial_cpu_cost):
                nonlocal best
                node = vnf_nodes[i]
                for c in range(1, max_cores + 1):
                    new_lat = partial_lat + lat[i][c - 1]
                    if new_lat + rest_min_lat[i + 1] > budget + lat_slack:
                        continue  # too slow; more cores can only help
                    if cpu_used.get(node, 0) + c > state.residual_cpu[node]:
                        break  # more cores only dig deeper
                    new_cost = partial_cpu_cost + p.cpu_unit_cost * c
                    if not frontier_only and best is not None:
                        reachable = revenue - fixed_cost - new_cost - rest_min_cost[i + 1]
                        if reachable <= best.profit - profit_guard:
                            break  # even the cheapest completion cannot win
                    cores[i] = c
                    if i == n_vnfs - 1:
                        if new_lat <= budget:
                            dep = _build_deployment(state, req, p, path_nodes,
                                                    vnf_nodes, cores, eta)
                            if frontier_only:
                                frontier.append(dep)
                            if best is None or dep.profit > best.profit:
                                best = dep
                            if frontier_only:
                                return  # minimal last coordinate found
                    else:
                        cpu_used[node] = cpu_used.get(node, 0) + c
                        grid(i + 1, new_lat, new_cost)
                        cpu_used[node] -= c
                cores[i] = 0

            grid(0, 0.0, 0.0)
    return best, frontier


def optimal_deploy(state: NetworkState, req: SfcRequest, p: ModelParams,
                   limits: OracleLimits = OracleLimits()):
    """Most profitable feasible deployment of one request, or None.

    Deterministic tie-break by enumeration order; the state is never
    mutated.
    """
    _check_limits(state, [req], limits)
    best, _ = _enumerate(state, req, p, frontier_only=False)
    return best


def optimal_sequence(state: NetworkState, reqs, p: ModelParams,
                     limits: OracleLimits = OracleLimits()):
    """Profit-maximal admission subset and deployments under shared capacity.

    Exhaustive over admission decisions and candidate deployments (core
    frontier per path/assignment).  Returns (list of (request_id,
    Deployment), total profit); the empty admission with profit 0 is the
    fallback.
    """
    if len(reqs) > limits.max_batch:
        raise OracleLimitError(f"batch of {len(reqs)} requests, limit {limits.max_batch}")
    _check_limits(state, reqs, limits)

    # optimistic per-request bounds from the untouched state
    suffix_bound = [0.0] * (len(reqs) + 1)
    for i in range(len(reqs) - 1, -1, -1):
        best = optimal_deploy(state, reqs[i], p, limits)
        gain = max(0.0, best.profit) if best else 0.0
        suffix_bound[i] = suffix_bound[i + 1] + gain

    work = state.clone()
    best_total = [0.0]
    best_admitted = [[]]

    def rec(i, acc, admitted):
        if i == len(reqs):
            if acc > best_total[0]:
                best_total[0] = acc
                best_admitted[0] = list(admitted)
            return
        if acc + suffix_bound[i] <= best_total[0]:
            return  # cannot beat the best found so far (ties keep the incumbent)
        req = reqs[i]
        _, candidates = _enumerate(work, req, p, frontier_only=True)
        for dep in candidates:
            if dep.profit <= 0:
                continue  # admitting at a loss can never raise the total
            work.apply(dep)
            admitted.append((req.id, dep))
            rec(i + 1, acc + dep.profit, admitted)
            admitted.pop()
            work.revert(dep)
        rec(i + 1, acc, admitted)  # skip this request

    rec(0, 0.0, [])
    return best_admitted[0], best_total[0]


# ---------------------------------------------------------------------------
# Optimality-gap instrumentation (used by the CLI and the acceptance suite)
# ---------------------------------------------------------------------------

def random_instance(seed: int, p: ModelParams, requests, limits: OracleLimits):
    """One seeded small instance: a partially loaded network and a request.

    The pre-load shaves seeded amounts off the residuals directly (there
    are no backing deployments), which is all the deployment logic looks
    at.  ``requests`` supplies the sampling ranges for the request fields.
    """
    rng = random.Random(seed)
    n = rng.randint(max(4, limits.max_nodes - 3), limits.max_nodes)
    topo = generate_topology(
        n_nodes=n, avg_degree=2.4, cpu=24, mem=24,
        bandwidth=2_000_000_000, length_range=(10.0, 80.0),
        seed=rng.randrange(2 ** 31))
    state = NetworkState.fresh(topo)
    for nid in topo.nodes:
        state.residual_cpu[nid] -= rng.randint(0, topo.nodes[nid].cpu_capacity // 2)
        state.residual_mem[nid] -= rng.randint(0, int(topo.nodes[nid].mem_capacity) // 2)
    for key in topo.links:
        cap = int(topo.links[key].bandwidth_capacity)
        state.residual_bw[key] -= rng.randrange(0, cap // 2)

    n_vnfs = rng.randint(1, limits.max_vnfs)
    vnfs = [VnfDescriptor(kind=LAYER1_RAN, mem_demand=rng.randint(*requests.mem_range))]
    for _ in range(n_vnfs - 1):
        vnfs.append(VnfDescriptor(
            kind=GENERIC,
            cycles_per_bit=rng.uniform(*requests.cycles_per_bit_range),
            mem_demand=rng.randint(*requests.mem_range)))
    source, dest = rng.sample(sorted(topo.nodes), 2)
    req = SfcRequest(
        id=f"inst-{seed}",
        source=source,
        dest=dest,
        vnfs=tuple(vnfs),
        data_rate=rng.randint(*requests.data_rate_range),
        latency_bound=rng.choice(list(requests.latency_bounds)),
        num_rbs=rng.randint(*requests.num_rbs_range),
        mcs_index=rng.randint(*requests.mcs_range),
        packet_size=requests.packet_size,
    )
    return state, req


def oracle_gap_report(p: ModelParams, requests, n_instances: int, seed: int,
                      limits: OracleLimits = OracleLimits()):
    """Compare both heuristics against the oracle on seeded small instances.

    Returns (rows, summary).  A heuristic profit above the oracle's (beyond
    float tolerance) is a correctness alarm and flags the summary.
    """
    from .detsfcd import deploy
    from .sphle import deploy_sphle

    rows = []
    violations = 0
    ratios = []
    for i in range(n_instances):
        state, req = random_instance(seed + i, p, requests, limits)
        best = optimal_deploy(state, req, p, limits)
        oracle_profit = best.profit if best else 0.0

        det = deploy(state.clone(), req, p)
        det_profit = det.profit if isinstance(det, Deployment) else 0.0
        sph = deploy_sphle(state.clone(), req, p)
        sph_profit = sph.profit if isinstance(sph, Deployment) else 0.0

        tol = 1e-9 * max(1.0, abs(oracle_profit))
        if det_profit > oracle_profit + tol or sph_profit > oracle_profit + tol:
            violations += 1
        if best is not None and isinstance(det, Deployment) and oracle_profit > 0:
            ratios.append(det_profit / oracle_profit)
        rows.append({
            "instance": i,
            "oracle_feasible": best is not None,
            "oracle_profit": oracle_profit,
            "det_sfcd_accepted": isinstance(det, Deployment),
            "det_sfcd_profit": det_profit,
            "sph_le_accepted": isinstance(sph, Deployment),
            "sph_le_profit": sph_profit,
        })
    summary = {
        "instances": n_instances,
        "dominance_violations": violations,
        "oracle_feasible": sum(1 for r in rows if r["oracle_feasible"]),
        "det_sfcd_accepted": sum(1 for r in rows if r["det_sfcd_accepted"]),
        "sph_le_accepted": sum(1 for r in rows if r["sph_le_accepted"]),
        "mean_det_to_oracle_ratio": (sum(ratios) / len(ratios)) if ratios else None,
    }
    return rows, summary
