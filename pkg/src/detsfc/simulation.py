"""Discrete-event simulation of chain arrivals and departures.

One run processes a seeded workload against a deployment strategy,
repeated over epochs with derived seeds (master seed + epoch index), and
aggregates acceptance, profit and latency/jitter statistics per time
bucket the way the evaluation figures need them.  Event order is total:
time, then departures before arrivals, then request id.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .config import SimConfig, build_topology
from .detsfcd import deploy, release
from .model import Deployment, NetworkState
from .sphle import deploy_sphle
from .workload import arrival_rate, generate_workload

STRATEGIES = {"det-sfcd": deploy, "sph-le": deploy_sphle}

REJECT_REASONS = ("no_path", "no_allocation", "insufficient_resources")

_FULL_CHECK_EVERY = 500  # events between full conservation sweeps


class InvariantViolation(AssertionError):
    """Residual bookkeeping broke during a checked simulation run."""


@dataclass
class BucketStats:
    index: int
    t0: float
    t1: float
    arrivals: int = 0
    accepted: int = 0
    rejections: dict = field(default_factory=lambda: {r: 0 for r in REJECT_REASONS})
    profit: float = 0.0
    cum_profit: float = 0.0

    @property
    def acceptance_rate(self):
        if self.arrivals == 0:
            return None  # empty bucket: acceptance undefined
        return self.accepted / self.arrivals


@dataclass
class EpochMetrics:
    epoch: int
    buckets: list
    arrivals: int
    accepted: int
    profit: float
    rejections: dict

    @property
    def acceptance_rate(self):
        return self.accepted / self.arrivals if self.arrivals else None


@dataclass
class SimMetrics:
    strategy: str
    epochs: list
    mean_bucket_acceptance: list
    mean_bucket_profit: list
    mean_bucket_cum_profit: list
    overall_acceptance: float
    overall_profit_per_epoch: float
    rate_report: list
    invariant_summary: dict | None = None

    def to_dict(self):
        return {
            "strategy": self.strategy,
            "overall_acceptance": self.overall_acceptance,
            "overall_profit_per_epoch": self.overall_profit_per_epoch,
            "mean_bucket_acceptance": self.mean_bucket_acceptance,
            "mean_bucket_profit": self.mean_bucket_profit,
            "mean_bucket_cum_profit": self.mean_bucket_cum_profit,
            "rate_report": self.rate_report,
            "invariant_summary": self.invariant_summary,
            "epochs": [{
                "epoch": em.epoch,
                "arrivals": em.arrivals,
                "accepted": em.accepted,
                "acceptance_rate": em.acceptance_rate,
                "profit": em.profit,
                "rejections": em.rejections,
                "buckets": [{
                    "index": b.index,
                    "t0": b.t0,
                    "t1": b.t1,
                    "arrivals": b.arrivals,
                    "accepted": b.accepted,
                    "acceptance_rate": b.acceptance_rate,
                    "profit": b.profit,
                    "cum_profit": b.cum_profit,
                    "rejections": b.rejections,
                } for b in em.buckets],
            } for em in self.epochs],
        }


@dataclass
class SimResult:
    metrics: SimMetrics
    log: list  # one row dict per arrival, across all epochs


def _check_touched(state, dep):
    """Bounds check on exactly the residuals an event changed."""
    bad = []
    topo = state.topology
    for node in set(dep.vnf_nodes):
        if not 0 <= state.residual_cpu[node] <= topo.nodes[node].cpu_capacity:
            bad.append(f"cpu residual out of range on node {node}")
        if not 0 <= state.residual_mem[node] <= topo.nodes[node].mem_capacity:
            bad.append(f"mem residual out of range on node {node}")
    for seg in dep.link_paths:
        for link in seg:
            if not 0 <= state.residual_bw[link.key] <= link.bandwidth_capacity:
                bad.append(f"bw residual out of range on link {link.key}")
    return bad


def run_epoch(cfg: SimConfig, topo, requests, epoch=0, inv=None):
    """Process one epoch's request stream; returns (EpochMetrics, log rows).

    Events are handled in (time, departures-first, request id) order, so a
    chain departing exactly when another arrives frees its resources first.
    """
    deploy_fn = STRATEGIES[cfg.strategy]
    p = cfg.params
    n_buckets = max(1, math.ceil(cfg.duration / cfg.bucket_width))
    by_id = {r.id: r for r in requests}
    state = NetworkState.fresh(topo)
    buckets = [BucketStats(index=i, t0=i * cfg.bucket_width,
                           t1=min((i + 1) * cfg.bucket_width, cfg.duration))
               for i in range(n_buckets)]
    log = []
    # (time, kind, id): departures (kind 0) before arrivals (kind 1)
    heap = [(r.arrival, 1, r.id) for r in requests]
    heapq.heapify(heap)
    events = 0

    while heap:
        t, kind, rid = heapq.heappop(heap)
        if kind == 0:
            dep = state.active.get(rid)
            release(state, rid)
            if inv is not None and dep is not None:
                inv["events_checked"] += 1
                bad = _check_touched(state, dep)
                if bad:
                    inv["violations"] += len(bad)
                    raise InvariantViolation(f"epoch {epoch}, t={t}: {bad[0]}")
        else:
            req = by_id[rid]
            result = deploy_fn(state, req, p)
            accepted = isinstance(result, Deployment)
            b = buckets[min(int(t // cfg.bucket_width), n_buckets - 1)]
            b.arrivals += 1
            log.append({
                "epoch": epoch, "id": rid, "arrival": t,
                "source": req.source, "dest": req.dest,
                "data_rate": req.data_rate,
                "latency_bound": req.latency_bound,
                "num_vnfs": len(req.vnfs),
                "accepted": accepted,
                "reason": "" if accepted else result.reason,
                "achieved_latency": result.achieved_latency if accepted else None,
                "cost": result.cost if accepted else None,
                "revenue": result.revenue if accepted else None,
                "profit": result.profit if accepted else None,
                "lifetime": req.lifetime,
            })
            if accepted:
                b.accepted += 1
                b.profit += result.profit
                heapq.heappush(heap, (t + req.lifetime, 0, rid))
                if inv is not None:
                    inv["events_checked"] += 1
                    bad = _check_touched(state, result)
                    if bad:
                        inv["violations"] += len(bad)
                        raise InvariantViolation(f"epoch {epoch}, t={t}: {bad[0]}")
            else:
                b.rejections[result.reason] += 1
        events += 1
        if inv is not None and events % _FULL_CHECK_EVERY == 0:
            bad = state.check()
            if bad:
                inv["violations"] += len(bad)
                raise InvariantViolation(f"epoch {epoch}, t={t}: {bad[0]}")

    # all lifetimes expired: the network must be empty again
    if inv is not None:
        fresh = NetworkState.fresh(topo)
        match = (state.residual_cpu == fresh.residual_cpu
                 and state.residual_mem == fresh.residual_mem
                 and state.residual_bw == fresh.residual_bw
                 and not state.active)
        if not match:
            inv["final_residuals_match"] = False
            raise InvariantViolation(
                f"epoch {epoch}: end-of-run residuals differ from capacities")

    running = 0.0
    for b in buckets:
        running += b.profit
        b.cum_profit = running
    rejections = {r: 0 for r in REJECT_REASONS}
    for b in buckets:
        for r, c in b.rejections.items():
            rejections[r] += c
    return EpochMetrics(
        epoch=epoch,
        buckets=buckets,
        arrivals=sum(b.arrivals for b in buckets),
        accepted=sum(b.accepted for b in buckets),
        profit=running,
        rejections=rejections,
    ), log


def run(cfg: SimConfig) -> SimResult:
    """Execute the configured simulation and aggregate its metrics."""
    topo = build_topology(cfg)
    node_ids = sorted(topo.nodes)
    n_buckets = max(1, math.ceil(cfg.duration / cfg.bucket_width))

    epoch_metrics = []
    log = []
    inv = {"events_checked": 0, "violations": 0, "final_residuals_match": True} \
        if cfg.check_invariants else None

    for epoch in range(cfg.epochs):
        requests = generate_workload(cfg, node_ids, seed=cfg.seed + epoch)
        em, rows = run_epoch(cfg, topo, requests, epoch=epoch, inv=inv)
        epoch_metrics.append(em)
        log.extend(rows)

    mean_acc, mean_profit, mean_cum = [], [], []
    for i in range(n_buckets):
        rates = [em.buckets[i].acceptance_rate for em in epoch_metrics
                 if em.buckets[i].acceptance_rate is not None]
        mean_acc.append(sum(rates) / len(rates) if rates else None)
        mean_profit.append(sum(em.buckets[i].profit for em in epoch_metrics)
                           / len(epoch_metrics))
        mean_cum.append(sum(em.buckets[i].cum_profit for em in epoch_metrics)
                        / len(epoch_metrics))

    total_arrivals = sum(em.arrivals for em in epoch_metrics)
    total_accepted = sum(em.accepted for em in epoch_metrics)
    metrics = SimMetrics(
        strategy=cfg.strategy,
        epochs=epoch_metrics,
        mean_bucket_acceptance=mean_acc,
        mean_bucket_profit=mean_profit,
        mean_bucket_cum_profit=mean_cum,
        overall_acceptance=total_accepted / total_arrivals if total_arrivals else 0.0,
        overall_profit_per_epoch=sum(em.profit for em in epoch_metrics)
        / len(epoch_metrics),
        rate_report=jitter_report(log, cfg.requests.data_rate_range, cfg.rate_buckets),
        invariant_summary=inv,
    )
    return SimResult(metrics=metrics, log=log)


def jitter_report(log, rate_range, n_buckets) -> list:
    """Mean latency and jitter of accepted chains, bucketed by data rate.

    Jitter is the population standard deviation of (achieved latency -
    latency bound) within the bucket.  Empty buckets are omitted.
    """
    lo, hi = rate_range
    width = max((hi - lo) / n_buckets, 1e-9)
    groups = {}
    for row in log:
        if not row["accepted"]:
            continue
        idx = min(int((row["data_rate"] - lo) / width), n_buckets - 1)
        groups.setdefault(idx, []).append(row)
    report = []
    for idx in sorted(groups):
        rows = groups[idx]
        n = len(rows)
        deviations = [r["achieved_latency"] - r["latency_bound"] for r in rows]
        mean_dev = sum(deviations) / n
        jitter = math.sqrt(sum((d - mean_dev) ** 2 for d in deviations) / n)
        report.append({
            "rate_lo": lo + idx * width,
            "rate_hi": min(lo + (idx + 1) * width, hi),
            "count": n,
            "mean_latency": sum(r["achieved_latency"] for r in rows) / n,
            "mean_latency_over_bound": sum(
                r["achieved_latency"] / r["latency_bound"] for r in rows) / n,
            "jitter": jitter,
        })
    return report


def peak_bucket_indices(cfg: SimConfig) -> list:
    """Buckets whose midpoint rate is at or above the tidal midpoint."""
    n_buckets = max(1, math.ceil(cfg.duration / cfg.bucket_width))
    mid = (cfg.arrivals.base_rate + cfg.arrivals.peak_rate) / 2.0
    out = []
    for i in range(n_buckets):
        t_mid = (i + 0.5) * cfg.bucket_width
        if arrival_rate(t_mid, cfg.arrivals) >= mid:
            out.append(i)
    return out


def spearman(xs, ys) -> float:
    """Spearman rank correlation with average ranks for ties."""
    def ranks(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        r = [0.0] * len(values)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
                j += 1
            avg = (i + j) / 2.0 + 1.0
            for k in range(i, j + 1):
                r[order[k]] = avg
            i = j + 1
        return r

    rx, ry = ranks(list(xs)), ranks(list(ys))
    n = len(rx)
    if n < 2:
        return 0.0
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)


def compare_strategies(cfg: SimConfig):
    """Run both strategies on identical workloads; summarize the gaps."""
    import dataclasses as _dc

    det = run(_dc.replace(cfg, strategy="det-sfcd"))
    sph = run(_dc.replace(cfg, strategy="sph-le"))
    peak = set(peak_bucket_indices(cfg))

    def phase_stats(result, indices):
        rates = [r for i, r in enumerate(result.metrics.mean_bucket_acceptance)
                 if i in indices and r is not None]
        profit = sum(pr for i, pr in enumerate(result.metrics.mean_bucket_profit)
                     if i in indices)
        return (sum(rates) / len(rates) if rates else None), profit

    n_buckets = len(det.metrics.mean_bucket_acceptance)
    offpeak = set(range(n_buckets)) - peak
    summary = {}
    for name, indices in (("peak", peak), ("offpeak", offpeak),
                          ("overall", set(range(n_buckets)))):
        det_acc, det_profit = phase_stats(det, indices)
        sph_acc, sph_profit = phase_stats(sph, indices)
        summary[name] = {
            "det_sfcd_acceptance": det_acc,
            "sph_le_acceptance": sph_acc,
            "acceptance_gain": (det_acc - sph_acc)
            if det_acc is not None and sph_acc is not None else None,
            "det_sfcd_profit": det_profit,
            "sph_le_profit": sph_profit,
            "profit_gain": det_profit - sph_profit,
        }
    return det, sph, summary
