"""Domain model for latency-deterministic service chain deployment.

Types for the physical edge network, chain requests and committed
deployments, plus the closed-form latency, cost and feasibility math that
path search, allocation, the strategies and the simulator build on.

Unit conventions (conversions happen here, at the type boundary, and
nowhere else):

    latency          ms
    data rate        Mbps
    link bandwidth   bits/s
    packet size      bits
    link length      km;  propagation speed  km/ms
    CPU              integer cores; a core contributes ``core_freq``
                     GHz-equivalents of processing frequency
    memory           GB
"""

from __future__ import annotations

from dataclasses import dataclass, field

LAYER1_RAN = "layer1-ran"
GENERIC = "generic"

REJECT_NO_PATH = "no_path"
REJECT_NO_ALLOCATION = "no_allocation"
REJECT_INSUFFICIENT = "insufficient_resources"

# Relative float guard for latency-band boundary comparisons.  The band
# endpoints are reconstructed through a handful of additions, so exact
# equality at the edges is one ulp away from either side.
BAND_GUARD = 1e-9


class InvalidAllocationError(ValueError):
    """A latency formula was evaluated with an unusable allocation."""


class InvalidRequestError(ValueError):
    """A chain request violates its own invariants."""


def link_key(a, b):
    """Canonical undirected key for a physical link between a and b."""
    return (a, b) if a <= b else (b, a)


# ---------------------------------------------------------------------------
# Physical network
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeNode:
    """A physical edge node with CPU (cores) and memory (GB) capacity."""

    id: object
    cpu_capacity: int
    mem_capacity: float

    def __post_init__(self):
        if self.cpu_capacity <= 0:
            raise ValueError(f"node {self.id}: cpu_capacity must be > 0")
        if self.mem_capacity <= 0:
            raise ValueError(f"node {self.id}: mem_capacity must be > 0")


@dataclass(frozen=True)
class PhysLink:
    """Undirected physical link; length (km) drives propagation latency."""

    a: object
    b: object
    bandwidth_capacity: float  # bits/s
    length: float = 0.0  # km

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"link ({self.a},{self.b}): endpoints must differ")
        if self.bandwidth_capacity <= 0:
            raise ValueError(f"link ({self.a},{self.b}): bandwidth must be > 0")
        if self.length < 0:
            raise ValueError(f"link ({self.a},{self.b}): length must be >= 0")

    @property
    def key(self):
        return link_key(self.a, self.b)


class Topology:
    """A connected undirected graph of edge nodes and physical links."""

    def __init__(self, nodes, links):
        self.nodes = {}
        for n in nodes:
            if n.id in self.nodes:
                raise ValueError(f"duplicate node id {n.id}")
            self.nodes[n.id] = n
        self.links = {}
        for l in links:
            if l.a not in self.nodes or l.b not in self.nodes:
                raise ValueError(f"link ({l.a},{l.b}): unknown endpoint")
            if l.key in self.links:
                raise ValueError(f"duplicate link {l.key}")
            self.links[l.key] = l
        # adjacency sorted by neighbour id for deterministic iteration
        adj = {nid: [] for nid in self.nodes}
        for l in self.links.values():
            adj[l.a].append((l.b, l.key))
            adj[l.b].append((l.a, l.key))
        self.adjacency = {nid: sorted(nbrs) for nid, nbrs in adj.items()}
        self._check_connected()

    def _check_connected(self):
        if not self.nodes:
            raise ValueError("topology has no nodes")
        start = next(iter(self.nodes))
        seen = {start}
        stack = [start]
        while stack:
            for nbr, _ in self.adjacency[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    stack.append(nbr)
        if len(seen) != len(self.nodes):
            raise ValueError("topology is not connected")

    def link_between(self, a, b):
        return self.links.get(link_key(a, b))


# ---------------------------------------------------------------------------
# Requests and model constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VnfDescriptor:
    """One function in a chain.

    The first function of every chain is the radio Layer-1 stage, whose
    compute need follows the resource-block/MCS polynomial; all others are
    generic functions sized by ``cycles_per_bit`` against the chain's
    aggregate data rate.
    """

    kind: str
    cycles_per_bit: float | None = None
    mem_demand: float = 0.0

    def __post_init__(self):
        if self.kind not in (LAYER1_RAN, GENERIC):
            raise ValueError(f"unknown VNF kind {self.kind!r}")
        if self.kind == GENERIC and (self.cycles_per_bit is None or self.cycles_per_bit <= 0):
            raise ValueError("generic VNF needs cycles_per_bit > 0")
        if self.mem_demand < 0:
            raise ValueError("mem_demand must be >= 0")


@dataclass(frozen=True)
class SfcRequest:
    """One chain request: endpoints, ordered VNFs, rate and latency bound."""

    id: object
    source: object
    dest: object
    vnfs: tuple
    data_rate: float      # Mbps, aggregated over the chain's users
    latency_bound: float  # ms, end to end
    num_rbs: int          # aggregated resource blocks
    mcs_index: int
    packet_size: float = 12000.0  # bits
    arrival: float = 0.0
    lifetime: float = 1.0

    def __post_init__(self):
        if len(self.vnfs) < 1:
            raise InvalidRequestError("chain needs at least one VNF")
        if self.vnfs[0].kind != LAYER1_RAN:
            raise InvalidRequestError("first VNF must be the Layer-1 RAN stage")
        if any(v.kind != GENERIC for v in self.vnfs[1:]):
            raise InvalidRequestError("VNFs after the first must be generic")
        if self.source == self.dest:
            raise InvalidRequestError("source and destination must differ")
        if self.data_rate <= 0 or self.latency_bound <= 0 or self.lifetime <= 0:
            raise InvalidRequestError("data_rate, latency_bound, lifetime must be > 0")
        if self.num_rbs <= 0 or self.packet_size <= 0:
            raise InvalidRequestError("num_rbs and packet_size must be > 0")


@dataclass(frozen=True)
class ModelParams:
    """Every constant of the latency/cost model, with desk-scale defaults.

    Defaults are calibrated so that the stock simulation setup produces
    chains that are feasible within single-digit-millisecond budgets; they
    are configuration data, not physical truths.
    """

    l1_coeffs: tuple = (5.0, 0.06, 0.003)  # MCS polynomial a0 + a1*i + a2*i^2
    l1_scale: float = 1.0       # weight of the Layer-1 term in compute demand
    rate_scale: float = 0.1     # weight of the data-rate term in compute demand
    core_freq: float = 2.0      # GHz-equivalents contributed per allocated core
    cpu_unit_cost: float = 2.0  # per core
    mem_unit_cost: float = 0.5  # per GB
    bw_unit_cost: float = 0.05  # per Mbps allocated to a virtual link
    rate_revenue: float = 1.0   # per Mbps of service rate
    latency_revenue: float = 500.0  # scaled by 1/latency_bound
    prop_speed: float = 200.0   # km/ms
    latency_band: float = 0.05  # admissible shortfall, fraction of the bound
    max_cores_per_vnf: int = 8
    bw_overprovision: float = 1.2

    def __post_init__(self):
        if self.core_freq <= 0 or self.prop_speed <= 0:
            raise ValueError("core_freq and prop_speed must be > 0")
        # cost/revenue coefficients may be zero (a term can be switched off)
        nonneg = {
            "l1_scale": self.l1_scale, "rate_scale": self.rate_scale,
            "cpu_unit_cost": self.cpu_unit_cost, "mem_unit_cost": self.mem_unit_cost,
            "bw_unit_cost": self.bw_unit_cost, "rate_revenue": self.rate_revenue,
            "latency_revenue": self.latency_revenue,
        }
        for name, v in nonneg.items():
            if v < 0:
                raise ValueError(f"{name} must be >= 0")
        if len(self.l1_coeffs) != 3:
            raise ValueError("l1_coeffs must have exactly three coefficients")
        if not 0 < self.latency_band < 1:
            raise ValueError("latency_band must be in (0, 1)")
        if self.max_cores_per_vnf < 1:
            raise ValueError("max_cores_per_vnf must be >= 1")
        if self.bw_overprovision < 1:
            raise ValueError("bw_overprovision must be >= 1")


# ---------------------------------------------------------------------------
# Deployments and network state
# ---------------------------------------------------------------------------

@dataclass
class Deployment:
    """A complete embedding of one chain.

    ``link_paths`` has exactly len(vnfs)+1 entries: the segment from the
    source to the first VNF, one segment per virtual link between
    consecutive VNFs, and the segment from the last VNF to the destination.
    Co-located neighbours leave their segment empty.  ``link_bw`` is zero
    on empty segments (no physical bandwidth is consumed there).
    """

    request_id: object
    vnf_nodes: list
    vnf_cores: list
    vnf_mem: list
    link_paths: list = field(default_factory=list)  # list[list[PhysLink]]
    link_bw: list = field(default_factory=list)     # bits/s per virtual link
    achieved_latency: float = 0.0
    cost: float = 0.0
    revenue: float = 0.0
    profit: float = 0.0


@dataclass
class NetworkState:
    """Topology plus current residual capacities and active deployments.

    Mutation is confined to :meth:`apply` / :meth:`revert` so that residual
    bookkeeping stays symmetric (a revert after an apply restores the state
    bit-exactly when the workload uses integral resource amounts).
    """

    topology: Topology
    residual_cpu: dict
    residual_mem: dict
    residual_bw: dict
    active: dict = field(default_factory=dict)

    @classmethod
    def fresh(cls, topology):
        return cls(
            topology=topology,
            residual_cpu={nid: n.cpu_capacity for nid, n in topology.nodes.items()},
            residual_mem={nid: n.mem_capacity for nid, n in topology.nodes.items()},
            residual_bw={key: l.bandwidth_capacity for key, l in topology.links.items()},
        )

    def clone(self):
        return NetworkState(
            topology=self.topology,
            residual_cpu=dict(self.residual_cpu),
            residual_mem=dict(self.residual_mem),
            residual_bw=dict(self.residual_bw),
            active=dict(self.active),
        )

    def apply(self, dep: Deployment):
        for node, cores, mem in zip(dep.vnf_nodes, dep.vnf_cores, dep.vnf_mem):
            self.residual_cpu[node] -= cores
            self.residual_mem[node] -= mem
        for seg, bw in zip(dep.link_paths, dep.link_bw):
            for link in seg:
                self.residual_bw[link.key] -= bw
        self.active[dep.request_id] = dep

    def revert(self, dep: Deployment):
        for node, cores, mem in zip(dep.vnf_nodes, dep.vnf_cores, dep.vnf_mem):
            self.residual_cpu[node] += cores
            self.residual_mem[node] += mem
        for seg, bw in zip(dep.link_paths, dep.link_bw):
            for link in seg:
                self.residual_bw[link.key] += bw
        self.active.pop(dep.request_id, None)

    def check(self):
        """Return residual-bound and conservation violations as strings."""
        problems = []
        for nid, node in self.topology.nodes.items():
            if not 0 <= self.residual_cpu[nid] <= node.cpu_capacity:
                problems.append(f"cpu residual out of range on node {nid}")
            if not 0 <= self.residual_mem[nid] <= node.mem_capacity:
                problems.append(f"mem residual out of range on node {nid}")
        for key, link in self.topology.links.items():
            if not 0 <= self.residual_bw[key] <= link.bandwidth_capacity:
                problems.append(f"bw residual out of range on link {key}")
        used_cpu = {nid: 0 for nid in self.topology.nodes}
        used_mem = {nid: 0 for nid in self.topology.nodes}
        used_bw = {key: 0 for key in self.topology.links}
        for dep in self.active.values():
            for node, cores, mem in zip(dep.vnf_nodes, dep.vnf_cores, dep.vnf_mem):
                used_cpu[node] += cores
                used_mem[node] += mem
            for seg, bw in zip(dep.link_paths, dep.link_bw):
                for link in seg:
                    used_bw[link.key] += bw
        for nid, node in self.topology.nodes.items():
            if self.residual_cpu[nid] != node.cpu_capacity - used_cpu[nid]:
                problems.append(f"cpu conservation broken on node {nid}")
            if self.residual_mem[nid] != node.mem_capacity - used_mem[nid]:
                problems.append(f"mem conservation broken on node {nid}")
        for key, link in self.topology.links.items():
            if self.residual_bw[key] != link.bandwidth_capacity - used_bw[key]:
                problems.append(f"bw conservation broken on link {key}")
        return problems


def segment_paths(topology, path_nodes, vnf_nodes, source, dest, bw):
    """Split a physical path into per-virtual-link segments.

    Anchors are the source, the VNF nodes in chain order, then the
    destination; all must sit on ``path_nodes`` in non-decreasing position.
    The segments partition the path, so every physical link is traversed
    exactly once.  Empty segments (co-located anchors) carry zero bandwidth.
    Returns (segments, per-segment bandwidth).
    """
    pos = {n: i for i, n in enumerate(path_nodes)}
    anchor_pos = [pos[source]] + [pos[n] for n in vnf_nodes] + [pos[dest]]
    segments, seg_bw = [], []
    for a, b in zip(anchor_pos, anchor_pos[1:]):
        seg = [topology.link_between(path_nodes[j], path_nodes[j + 1])
               for j in range(a, b)]
        segments.append(seg)
        seg_bw.append(bw if seg else 0.0)
    return segments, seg_bw


# ---------------------------------------------------------------------------
# Latency model
# ---------------------------------------------------------------------------

def _mcs_poly(coeffs, mcs_index):
    a0, a1, a2 = coeffs
    return a0 + a1 * mcs_index + a2 * mcs_index * mcs_index


def compute_demand(req: SfcRequest, p: ModelParams) -> float:
    """Total computational demand of a chain (Layer-1 plus rate-driven part)."""
    return p.l1_scale * req.num_rbs * _mcs_poly(p.l1_coeffs, req.mcs_index) \
        + p.rate_scale * req.data_rate


def layer1_latency(num_rbs: int, mcs_index: int, cores: int, p: ModelParams) -> float:
    """Processing latency (ms) of the Layer-1 stage; quadratic in frequency."""
    if cores < 1:
        raise InvalidAllocationError(f"layer1 stage needs >= 1 core, got {cores}")
    freq = cores * p.core_freq
    return num_rbs * _mcs_poly(p.l1_coeffs, mcs_index) / (freq * freq)


def generic_vnf_latency(cycles_per_bit: float, data_rate: float, cores: int,
                        p: ModelParams) -> float:
    """Processing latency (ms) of a generic VNF; linear in the data rate."""
    if cores < 1:
        raise InvalidAllocationError(f"generic VNF needs >= 1 core, got {cores}")
    if cycles_per_bit <= 0:
        raise InvalidAllocationError("cycles_per_bit must be > 0")
    return cycles_per_bit * data_rate / (cores * p.core_freq)


def vnf_latency(vnf: VnfDescriptor, req: SfcRequest, cores: int, p: ModelParams) -> float:
    if vnf.kind == LAYER1_RAN:
        return layer1_latency(req.num_rbs, req.mcs_index, cores, p)
    return generic_vnf_latency(vnf.cycles_per_bit, req.data_rate, cores, p)


def processing_latency(dep: Deployment, req: SfcRequest, p: ModelParams) -> float:
    """Sum of per-VNF processing latencies, in chain order."""
    total = 0.0
    for vnf, cores in zip(req.vnfs, dep.vnf_cores):
        total += vnf_latency(vnf, req, cores, p)
    return total


def communication_latency(dep: Deployment, req: SfcRequest, p: ModelParams) -> float:
    """Propagation plus transmission latency over all non-empty virtual links."""
    total = 0.0
    for seg, bw in zip(dep.link_paths, dep.link_bw):
        if not seg:
            continue  # co-located neighbours: no physical hop, no latency
        if bw <= 0:
            raise InvalidAllocationError("non-empty virtual link with zero bandwidth")
        length = 0.0
        for link in seg:
            length += link.length
        total += length / p.prop_speed + req.packet_size / bw * 1e3
    return total


def total_latency(dep: Deployment, req: SfcRequest, p: ModelParams) -> float:
    """End-to-end latency; the single canonical formula everyone must use."""
    return processing_latency(dep, req, p) + communication_latency(dep, req, p)


# ---------------------------------------------------------------------------
# Accounting
# ---------------------------------------------------------------------------

def sfc_cost(dep: Deployment, p: ModelParams) -> float:
    """Resource cost: CPU + memory per VNF, plus bandwidth per virtual link."""
    total = 0.0
    for cores, mem in zip(dep.vnf_cores, dep.vnf_mem):
        total += p.cpu_unit_cost * cores + p.mem_unit_cost * mem
    for bw in dep.link_bw:
        total += p.bw_unit_cost * (bw / 1e6)  # bw_unit_cost is per Mbps
    return total


def sfc_revenue(req: SfcRequest, p: ModelParams) -> float:
    """Revenue: rate-proportional plus a premium for tight latency bounds."""
    if req.latency_bound <= 0:
        raise InvalidRequestError("latency_bound must be > 0")
    return p.rate_revenue * req.data_rate + p.latency_revenue / req.latency_bound


def sfc_profit(dep: Deployment, req: SfcRequest, p: ModelParams) -> float:
    return sfc_revenue(req, p) - sfc_cost(dep, p)


def system_profit(state: NetworkState) -> float:
    total = 0.0
    for dep in state.active.values():
        total += dep.profit
    return total


# ---------------------------------------------------------------------------
# Deployment validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self):
        return f"{self.code}: {self.detail}"


CAPACITY_CODES = frozenset({"cpu_capacity", "mem_capacity", "bw_capacity"})


def validate_deployment(state: NetworkState, dep: Deployment, req: SfcRequest,
                        p: ModelParams, enforce_lower_band: bool = True) -> list:
    """Check a candidate deployment against structure, capacity and latency.

    Returns a list of :class:`Violation` (empty when the deployment is
    acceptable); never raises.  ``enforce_lower_band=False`` drops the
    requirement that the latency may not undershoot the bound by more than
    the configured band (used by the benchmark strategy, which predates the
    banded admission rule).
    """
    problems = []
    n_vnfs = len(req.vnfs)
    if not (len(dep.vnf_nodes) == len(dep.vnf_cores) == len(dep.vnf_mem) == n_vnfs):
        problems.append(Violation("vnf_count", "per-VNF fields disagree with the chain length"))
        return problems
    if len(dep.link_paths) != n_vnfs + 1 or len(dep.link_bw) != n_vnfs + 1:
        problems.append(Violation("vnf_count", "expected one virtual link per chain hop"))
        return problems

    for node in dep.vnf_nodes:
        if node not in state.topology.nodes:
            problems.append(Violation("unknown_node", f"node {node} not in topology"))
            return problems

    # per-node resource demand vs residuals
    need_cpu, need_mem = {}, {}
    for node, cores, mem in zip(dep.vnf_nodes, dep.vnf_cores, dep.vnf_mem):
        if cores < 1:
            problems.append(Violation("cpu_capacity", f"VNF on node {node} has no cores"))
        need_cpu[node] = need_cpu.get(node, 0) + cores
        need_mem[node] = need_mem.get(node, 0) + mem
    for node, cores in need_cpu.items():
        if cores > state.residual_cpu[node]:
            problems.append(Violation(
                "cpu_capacity",
                f"node {node} needs {cores} cores, {state.residual_cpu[node]} free"))
    for node, mem in need_mem.items():
        if mem > state.residual_mem[node]:
            problems.append(Violation(
                "mem_capacity",
                f"node {node} needs {mem} GB, {state.residual_mem[node]} free"))

    # per-link bandwidth demand vs residuals
    need_bw = {}
    for seg, bw in zip(dep.link_paths, dep.link_bw):
        for link in seg:
            if link.key not in state.topology.links:
                problems.append(Violation("unknown_link", f"link {link.key} not in topology"))
                return problems
            need_bw[link.key] = need_bw.get(link.key, 0) + bw
    for key, bw in need_bw.items():
        if bw > state.residual_bw[key]:
            problems.append(Violation(
                "bw_capacity",
                f"link {key} needs {bw} bit/s, {state.residual_bw[key]} free"))

    # the concatenated segments must walk source -> VNFs in order -> dest
    anchors = [req.source] + list(dep.vnf_nodes) + [req.dest]
    for i, seg in enumerate(dep.link_paths):
        here = anchors[i]
        if not seg:
            if anchors[i + 1] != here:
                problems.append(Violation(
                    "path_continuity",
                    f"virtual link {i} is empty but {here} != {anchors[i + 1]}"))
            continue
        for link in seg:
            if here == link.a:
                here = link.b
            elif here == link.b:
                here = link.a
            else:
                problems.append(Violation(
                    "path_continuity", f"virtual link {i} breaks at node {here}"))
                break
        else:
            if here != anchors[i + 1]:
                problems.append(Violation(
                    "path_continuity",
                    f"virtual link {i} ends at {here}, expected {anchors[i + 1]}"))

    if problems:
        return problems

    try:
        latency = total_latency(dep, req, p)
    except (InvalidAllocationError, InvalidRequestError) as exc:
        problems.append(Violation("invalid_allocation", str(exc)))
        return problems

    bound = req.latency_bound
    guard = BAND_GUARD * bound
    if latency > bound + guard:
        problems.append(Violation(
            "latency_band", f"latency {latency:.6f} ms exceeds bound {bound} ms"))
    if enforce_lower_band:
        floor = bound - p.latency_band * bound
        if latency < floor - guard:
            problems.append(Violation(
                "latency_band",
                f"latency {latency:.6f} ms undershoots the band floor {floor:.6f} ms"))
    return problems
