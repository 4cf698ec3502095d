"""Simulation configuration: defaults, JSON loading and validation.

The JSON schema mirrors the dataclasses below one to one; every key is
optional and falls back to the stock setup (52-node topology, 4-VNF
chains, tidal arrivals over 1000 time units, 20 epochs).  Unknown keys are
rejected with a diagnostic naming the offending key, so typos cannot
silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .model import EdgeNode, ModelParams, PhysLink, Topology
from .topology import generate_topology

STRATEGIES = ("det-sfcd", "sph-le")


class ConfigError(ValueError):
    """Malformed or out-of-range configuration input."""


@dataclass(frozen=True)
class TopologySpec:
    """Parameters for the seeded synthetic topology generator."""

    n_nodes: int = 52
    avg_degree: float = 3.5
    cpu_capacity: int = 128
    mem_capacity: float = 64.0
    bandwidth: float = 10_000_000_000.0  # bits/s
    length_range: tuple = (20.0, 120.0)  # km


@dataclass(frozen=True)
class ArrivalProfile:
    """Tidal arrival rate: sinusoidal between base and peak over one period."""

    base_rate: float = 0.5  # requests per time unit at the trough
    peak_rate: float = 2.5  # requests per time unit at the crest
    period: float = 800.0

    def __post_init__(self):
        if self.base_rate < 0 or self.peak_rate < self.base_rate:
            raise ConfigError("arrivals: need 0 <= base_rate <= peak_rate")
        if self.period <= 0:
            raise ConfigError("arrivals.period: must be > 0")


@dataclass(frozen=True)
class RequestProfile:
    """Sampling ranges for generated requests (integer ranges inclusive)."""

    num_rbs_range: tuple = (50, 100)
    data_rate_range: tuple = (20, 200)   # Mbps
    mem_range: tuple = (1, 8)            # GB per VNF
    chain_length: int = 4
    mcs_range: tuple = (5, 28)
    cycles_per_bit_range: tuple = (0.02, 0.05)
    latency_bounds: tuple = (8.0, 10.0, 12.0)  # ms, sampled uniformly
    packet_size: float = 12000.0         # bits

    def __post_init__(self):
        for name in ("num_rbs_range", "data_rate_range", "mem_range",
                     "mcs_range", "cycles_per_bit_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigError(f"requests.{name}: range is reversed")
        if self.chain_length < 1:
            raise ConfigError("requests.chain_length: must be >= 1")
        if not self.latency_bounds or any(b <= 0 for b in self.latency_bounds):
            raise ConfigError("requests.latency_bounds: need positive values")
        if self.packet_size <= 0:
            raise ConfigError("requests.packet_size: must be > 0")


@dataclass(frozen=True)
class SimConfig:
    topology: object = field(default_factory=TopologySpec)  # TopologySpec or Topology
    params: ModelParams = field(default_factory=ModelParams)
    requests: RequestProfile = field(default_factory=RequestProfile)
    arrivals: ArrivalProfile = field(default_factory=ArrivalProfile)
    seed: int = 42
    duration: float = 1000.0
    mean_lifetime: float = 100.0
    epochs: int = 20
    bucket_width: float = 50.0
    rate_buckets: int = 6
    strategy: str = "det-sfcd"
    check_invariants: bool = False

    def __post_init__(self):
        if self.duration <= 0 or self.mean_lifetime <= 0 or self.bucket_width <= 0:
            raise ConfigError("duration, mean_lifetime and bucket_width must be > 0")
        if self.epochs < 1 or self.rate_buckets < 1:
            raise ConfigError("epochs and rate_buckets must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")


def default_config() -> SimConfig:
    return SimConfig()


def build_topology(cfg: SimConfig) -> Topology:
    """Materialize the configured topology (generated or explicit)."""
    if isinstance(cfg.topology, Topology):
        return cfg.topology
    spec = cfg.topology
    return generate_topology(
        n_nodes=spec.n_nodes, avg_degree=spec.avg_degree,
        cpu=spec.cpu_capacity, mem=spec.mem_capacity,
        bandwidth=spec.bandwidth, length_range=spec.length_range,
        seed=cfg.seed)


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------

def _take(raw: dict, section: str, cls, tuple_fields=()):
    """Build a dataclass from a config section, naming bad keys precisely."""
    data = raw.pop(section, None)
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{section}.{key}: unknown key")
    kwargs = dict(data)
    for key in tuple_fields:
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def _parse_topology(data):
    if not isinstance(data, dict):
        raise ConfigError("topology: expected an object")
    if isinstance(data.get("nodes"), list):
        try:
            nodes = [EdgeNode(id=n["id"], cpu_capacity=n["cpu"], mem_capacity=n["mem"])
                     for n in data["nodes"]]
            links = [PhysLink(a=l["a"], b=l["b"], bandwidth_capacity=l["bandwidth"],
                              length=l.get("length", 0.0))
                     for l in data.get("links", [])]
            return Topology(nodes, links)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"topology: {exc}") from exc
    known = {f.name for f in dataclasses.fields(TopologySpec)}
    for key in data:
        if key not in known:
            raise ConfigError(f"topology.{key}: unknown key")
    kwargs = dict(data)
    if "length_range" in kwargs:
        kwargs["length_range"] = tuple(kwargs["length_range"])
    try:
        return TopologySpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"topology: {exc}") from exc


_SCALAR_KEYS = {
    "seed": int,
    "duration": float,
    "mean_lifetime": float,
    "epochs": int,
    "bucket_width": float,
    "rate_buckets": int,
    "strategy": str,
    "check_invariants": bool,
}


def config_from_dict(raw: dict) -> SimConfig:
    raw = dict(raw)
    kwargs = {}
    if "topology" in raw:
        kwargs["topology"] = _parse_topology(raw.pop("topology"))
    kwargs["params"] = _take(raw, "params", ModelParams, tuple_fields=("l1_coeffs",))
    kwargs["requests"] = _take(
        raw, "requests", RequestProfile,
        tuple_fields=("num_rbs_range", "data_rate_range", "mem_range",
                      "mcs_range", "cycles_per_bit_range", "latency_bounds"))
    kwargs["arrivals"] = _take(raw, "arrivals", ArrivalProfile)
    for key, typ in _SCALAR_KEYS.items():
        if key in raw:
            value = raw.pop(key)
            if typ is not str and isinstance(value, bool) and typ is not bool:
                raise ConfigError(f"{key}: expected {typ.__name__}")
            try:
                kwargs[key] = typ(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{key}: {exc}") from exc
    if raw:
        raise ConfigError(f"{sorted(raw)[0]}: unknown key")
    return SimConfig(**kwargs)


def load_config(path) -> SimConfig:
    try:
        with open(path) as f:
            raw = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return config_from_dict(raw)


def config_to_dict(cfg: SimConfig) -> dict:
    """JSON-serializable echo of the effective configuration."""
    if isinstance(cfg.topology, Topology):
        topo = {
            "nodes": [{"id": n.id, "cpu": n.cpu_capacity, "mem": n.mem_capacity}
                      for n in cfg.topology.nodes.values()],
            "links": [{"a": l.a, "b": l.b, "bandwidth": l.bandwidth_capacity,
                       "length": l.length}
                      for l in cfg.topology.links.values()],
        }
    else:
        topo = dataclasses.asdict(cfg.topology)
        topo["length_range"] = list(topo["length_range"])
    out = {
        "topology": topo,
        "params": dataclasses.asdict(cfg.params),
        "requests": dataclasses.asdict(cfg.requests),
        "arrivals": dataclasses.asdict(cfg.arrivals),
    }
    out["params"]["l1_coeffs"] = list(out["params"]["l1_coeffs"])
    for key in ("num_rbs_range", "data_rate_range", "mem_range", "mcs_range",
                "cycles_per_bit_range", "latency_bounds"):
        out["requests"][key] = list(out["requests"][key])
    for key in _SCALAR_KEYS:
        out[key] = getattr(cfg, key)
    return out
