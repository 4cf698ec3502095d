"""Deterministic-latency service function chain deployment over edge networks.

A library, simulator and CLI for embedding chains of virtual network
functions with a pinned end-to-end latency: load-aware path selection over
congestion-priced node/edge weights, latency-budgeted CPU allocation,
profit-aware admission, a min-hop/latency-equalization benchmark and an
exhaustive reference solver for tiny instances.
"""

from .allocation import AllocationOption, bandwidth_assignment, enumerate_options, \
    select_min_cost
from .config import (
    ArrivalProfile, ConfigError, RequestProfile, SimConfig, TopologySpec,
    build_topology, default_config, load_config,
)
from .detsfcd import Rejection, deploy, embed_load_balanced, release
from .graph import PathResult, WeightedView, deployment_costs, extended_dijkstra, \
    min_hop_path
from .model import (
    Deployment, EdgeNode, GENERIC, LAYER1_RAN, ModelParams, NetworkState,
    PhysLink, SfcRequest, Topology, Violation, VnfDescriptor,
    communication_latency, compute_demand, generic_vnf_latency, layer1_latency,
    processing_latency, sfc_cost, sfc_profit, sfc_revenue, system_profit,
    total_latency, validate_deployment,
)
from .oracle import OracleLimitError, OracleLimits, optimal_deploy, optimal_sequence
from .simulation import SimMetrics, SimResult, compare_strategies, jitter_report, run
from .sphle import deploy_sphle
from .topology import generate_topology
from .workload import generate_workload

__version__ = "0.1.0"
