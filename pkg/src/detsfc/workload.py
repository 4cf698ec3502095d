"""Seeded request streams with a tidal arrival process.

Arrivals are an inhomogeneous Poisson process whose rate swings
sinusoidally between the configured base and peak (high-load first half of
each period, low-load second half), realized by thinning against the peak
rate.  Lifetimes are exponential.  Every draw comes from one seeded RNG in
a fixed order, so a seed fully determines the stream.

Integer-valued rates and memory demands keep all residual-capacity
arithmetic exact, which is what makes release-after-deploy restore the
network state bit for bit.
"""

from __future__ import annotations

import math
import random

from .config import ArrivalProfile, SimConfig
from .model import GENERIC, LAYER1_RAN, SfcRequest, VnfDescriptor


def arrival_rate(t: float, profile: ArrivalProfile) -> float:
    """Instantaneous arrival rate at time t."""
    swing = (profile.peak_rate - profile.base_rate) / 2.0
    return profile.base_rate + swing * (1.0 + math.sin(2.0 * math.pi * t / profile.period))


def generate_workload(cfg: SimConfig, node_ids, seed=None) -> list:
    """Time-ordered requests for one epoch, fully determined by the seed."""
    rng = random.Random(cfg.seed if seed is None else seed)
    profile = cfg.arrivals
    reqs = cfg.requests
    peak = profile.peak_rate
    out = []
    if peak <= 0:
        return out
    t = 0.0
    next_id = 0
    while True:
        t += rng.expovariate(peak)
        if t >= cfg.duration:
            break
        if rng.random() > arrival_rate(t, profile) / peak:
            continue  # thinned out
        source, dest = rng.sample(node_ids, 2)
        num_rbs = rng.randint(*reqs.num_rbs_range)
        data_rate = rng.randint(*reqs.data_rate_range)
        mcs = rng.randint(*reqs.mcs_range)
        bound = rng.choice(list(reqs.latency_bounds))
        vnfs = [VnfDescriptor(kind=LAYER1_RAN,
                              mem_demand=rng.randint(*reqs.mem_range))]
        for _ in range(reqs.chain_length - 1):
            vnfs.append(VnfDescriptor(
                kind=GENERIC,
                cycles_per_bit=rng.uniform(*reqs.cycles_per_bit_range),
                mem_demand=rng.randint(*reqs.mem_range)))
        lifetime = rng.expovariate(1.0 / cfg.mean_lifetime)
        out.append(SfcRequest(
            id=next_id,
            source=source,
            dest=dest,
            vnfs=tuple(vnfs),
            data_rate=data_rate,
            latency_bound=bound,
            num_rbs=num_rbs,
            mcs_index=mcs,
            packet_size=reqs.packet_size,
            arrival=t,
            lifetime=lifetime,
        ))
        next_id += 1
    return out
