import pytest

from detsfc.model import (
    EdgeNode, GENERIC, LAYER1_RAN, ModelParams, NetworkState, PhysLink,
    SfcRequest, Topology, VnfDescriptor,
)


def line_topology(n=3, cpu=16, mem=16.0, bw=1_000_000_000, length=0.0):
    """Nodes 0..n-1 connected in a chain."""
    nodes = [EdgeNode(id=i, cpu_capacity=cpu, mem_capacity=mem) for i in range(n)]
    links = [PhysLink(a=i, b=i + 1, bandwidth_capacity=bw, length=length)
             for i in range(n - 1)]
    return Topology(nodes, links)


def make_request(n_vnfs=1, data_rate=10, latency_bound=5.0, num_rbs=4,
                 mcs_index=0, rho=0.1, mem=1, source=0, dest=1, rid="r",
                 packet_size=12000.0, lifetime=10.0, arrival=0.0):
    vnfs = [VnfDescriptor(kind=LAYER1_RAN, mem_demand=mem)]
    for _ in range(n_vnfs - 1):
        vnfs.append(VnfDescriptor(kind=GENERIC, cycles_per_bit=rho, mem_demand=mem))
    return SfcRequest(
        id=rid, source=source, dest=dest, vnfs=tuple(vnfs),
        data_rate=data_rate, latency_bound=latency_bound, num_rbs=num_rbs,
        mcs_index=mcs_index, packet_size=packet_size,
        arrival=arrival, lifetime=lifetime)


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def two_node_state():
    topo = line_topology(n=2)
    return NetworkState.fresh(topo)
