"""Output emission: delimited time series, JSON summaries and figures.

All floats are written with 9 significant digits so identical runs produce
byte-identical CSV/JSON on any platform.  Column orders are part of the
interface:

timeseries.csv
    time_bucket, strategy, acceptance_rate, profit, cumulative_profit,
    arrivals, accepted, rej_no_path, rej_no_allocation,
    rej_insufficient_resources, epoch
    One row per (epoch, bucket, strategy), epochs ascending, then summary
    rows with epoch "mean".  An empty acceptance_rate field marks a bucket
    without arrivals.

latency.csv
    strategy, rate_lo, rate_hi, count, mean_latency,
    mean_latency_over_bound, jitter

oracle_report.csv
    instance, oracle_feasible, oracle_profit, det_sfcd_accepted,
    det_sfcd_profit, sph_le_accepted, sph_le_profit

Figures (PNG) are rendered next to the delimited output: acceptance rate
over time, cumulative profit over time, and latency/jitter against the
data rate.
"""

from __future__ import annotations

import csv
import json
import os

TIMESERIES_COLUMNS = [
    "time_bucket", "strategy", "acceptance_rate", "profit", "cumulative_profit",
    "arrivals", "accepted", "rej_no_path", "rej_no_allocation",
    "rej_insufficient_resources", "epoch",
]

LATENCY_COLUMNS = [
    "strategy", "rate_lo", "rate_hi", "count", "mean_latency",
    "mean_latency_over_bound", "jitter",
]

ORACLE_COLUMNS = [
    "instance", "oracle_feasible", "oracle_profit", "det_sfcd_accepted",
    "det_sfcd_profit", "sph_le_accepted", "sph_le_profit",
]


def fmt(value) -> str:
    """Stable scalar formatting for CSV fields."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(path, payload) -> None:
    with open(path, "w") as f:
        json.dump(_round_floats(payload), f, indent=2, sort_keys=True)
        f.write("\n")


def timeseries_rows(metrics_list) -> list:
    """Flatten per-epoch bucket stats (plus epoch means) into CSV rows."""
    rows = []
    for metrics in metrics_list:
        for em in metrics.epochs:
            for b in em.buckets:
                rows.append({
                    "time_bucket": b.index,
                    "strategy": metrics.strategy,
                    "acceptance_rate": b.acceptance_rate,
                    "profit": b.profit,
                    "cumulative_profit": b.cum_profit,
                    "arrivals": b.arrivals,
                    "accepted": b.accepted,
                    "rej_no_path": b.rejections["no_path"],
                    "rej_no_allocation": b.rejections["no_allocation"],
                    "rej_insufficient_resources": b.rejections["insufficient_resources"],
                    "epoch": em.epoch,
                })
    for metrics in metrics_list:
        for i, acc in enumerate(metrics.mean_bucket_acceptance):
            rows.append({
                "time_bucket": i,
                "strategy": metrics.strategy,
                "acceptance_rate": acc,
                "profit": metrics.mean_bucket_profit[i],
                "cumulative_profit": metrics.mean_bucket_cum_profit[i],
                "arrivals": "",
                "accepted": "",
                "rej_no_path": "",
                "rej_no_allocation": "",
                "rej_insufficient_resources": "",
                "epoch": "mean",
            })
    return rows


def write_timeseries_csv(path, metrics_list) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TIMESERIES_COLUMNS)
        for row in timeseries_rows(metrics_list):
            w.writerow([fmt(row[c]) for c in TIMESERIES_COLUMNS])


def write_latency_csv(path, metrics_list) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(LATENCY_COLUMNS)
        for metrics in metrics_list:
            for bucket in metrics.rate_report:
                w.writerow([fmt(v) for v in (
                    metrics.strategy, bucket["rate_lo"], bucket["rate_hi"],
                    bucket["count"], bucket["mean_latency"],
                    bucket["mean_latency_over_bound"], bucket["jitter"])])


def write_oracle_csv(path, rows) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(ORACLE_COLUMNS)
        for row in rows:
            w.writerow([fmt(row[c]) for c in ORACLE_COLUMNS])


def write_deployment_log(path, log) -> None:
    write_json(path, log)


# ---------------------------------------------------------------------------
# Figures
# ---------------------------------------------------------------------------

_COLORS = {"det-sfcd": "tab:blue", "sph-le": "tab:orange"}


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_figures(out_dir, metrics_list, bucket_width) -> list:
    """Render the standard report figures; returns the written paths."""
    plt = _pyplot()
    written = []

    fig, ax = plt.subplots(figsize=(7, 4))
    for metrics in metrics_list:
        xs = [(i + 0.5) * bucket_width
              for i in range(len(metrics.mean_bucket_acceptance))]
        ys = [a if a is not None else float("nan")
              for a in metrics.mean_bucket_acceptance]
        ax.plot(xs, ys, marker="o", markersize=3, label=metrics.strategy,
                color=_COLORS.get(metrics.strategy))
    ax.set_xlabel("time")
    ax.set_ylabel("acceptance rate")
    ax.set_ylim(0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend()
    path = os.path.join(out_dir, "acceptance_over_time.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4))
    for metrics in metrics_list:
        xs = [(i + 0.5) * bucket_width
              for i in range(len(metrics.mean_bucket_cum_profit))]
        ax.plot(xs, metrics.mean_bucket_cum_profit, marker="o", markersize=3,
                label=metrics.strategy, color=_COLORS.get(metrics.strategy))
    ax.set_xlabel("time")
    ax.set_ylabel("cumulative profit (epoch mean)")
    ax.grid(alpha=0.3)
    ax.legend()
    path = os.path.join(out_dir, "profit_over_time.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for metrics in metrics_list:
        mids = [(b["rate_lo"] + b["rate_hi"]) / 2 for b in metrics.rate_report]
        ax1.plot(mids, [b["mean_latency"] for b in metrics.rate_report],
                 marker="o", label=metrics.strategy,
                 color=_COLORS.get(metrics.strategy))
        ax2.plot(mids, [b["jitter"] for b in metrics.rate_report],
                 marker="o", label=metrics.strategy,
                 color=_COLORS.get(metrics.strategy))
    ax1.set_xlabel("data rate (Mbps)")
    ax1.set_ylabel("mean achieved latency (ms)")
    ax1.grid(alpha=0.3)
    ax1.legend()
    ax2.set_xlabel("data rate (Mbps)")
    ax2.set_ylabel("jitter (ms)")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    path = os.path.join(out_dir, "latency_jitter.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written


def render_oracle_figure(out_dir, rows) -> list:
    """Scatter of heuristic vs oracle profit per instance."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    xs = [r["oracle_profit"] for r in rows]
    ax.scatter(xs, [r["det_sfcd_profit"] for r in rows], s=12,
               label="det-sfcd", color=_COLORS["det-sfcd"])
    ax.scatter(xs, [r["sph_le_profit"] for r in rows], s=12,
               label="sph-le", color=_COLORS["sph-le"], alpha=0.7)
    lim = max([0.0] + xs)
    ax.plot([0, lim], [0, lim], "k--", linewidth=1, label="oracle")
    ax.set_xlabel("oracle profit")
    ax.set_ylabel("heuristic profit")
    ax.grid(alpha=0.3)
    ax.legend()
    path = os.path.join(out_dir, "oracle_gap.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [path]
