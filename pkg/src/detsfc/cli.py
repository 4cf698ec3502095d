"""Command-line front end.

    detsfc simulate     run one strategy, emit CSV/JSON metrics and figures
    detsfc compare      run both strategies on identical workloads
    detsfc oracle-check compare the heuristics against the exhaustive
                        reference on small seeded instances

All randomness flows from the config seed (or --seed); outputs for a given
config are byte-identical across runs.  Input configs are never modified.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .config import ConfigError, config_to_dict, default_config, load_config
from .oracle import OracleLimitError, OracleLimits, oracle_gap_report
from .reporting import (
    render_figures, render_oracle_figure, write_deployment_log, write_json,
    write_latency_csv, write_oracle_csv, write_timeseries_csv,
)
from .simulation import compare_strategies, run


def _load(args):
    cfg = load_config(args.config) if args.config else default_config()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "epochs", None) is not None:
        overrides["epochs"] = args.epochs
    if getattr(args, "strategy", None) is not None:
        overrides["strategy"] = args.strategy
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load(args)
    result = run(cfg)
    os.makedirs(args.out, exist_ok=True)
    write_timeseries_csv(os.path.join(args.out, "timeseries.csv"), [result.metrics])
    write_latency_csv(os.path.join(args.out, "latency.csv"), [result.metrics])
    write_json(os.path.join(args.out, "metrics.json"), {
        "config": config_to_dict(cfg),
        "metrics": result.metrics.to_dict(),
    })
    write_deployment_log(os.path.join(args.out, "deployment_log.json"), result.log)
    if not args.no_figures:
        render_figures(args.out, [result.metrics], cfg.bucket_width)
    print(f"simulate: strategy={cfg.strategy} seed={cfg.seed} epochs={cfg.epochs} "
          f"acceptance={result.metrics.overall_acceptance:.4f} "
          f"profit/epoch={result.metrics.overall_profit_per_epoch:.1f}")
    print(f"outputs written to {args.out}")
    return 0


def cmd_compare(args) -> int:
    cfg = _load(args)
    det, sph, summary = compare_strategies(cfg)
    os.makedirs(args.out, exist_ok=True)
    write_timeseries_csv(os.path.join(args.out, "timeseries.csv"),
                         [det.metrics, sph.metrics])
    write_latency_csv(os.path.join(args.out, "latency.csv"),
                      [det.metrics, sph.metrics])
    write_json(os.path.join(args.out, "compare_summary.json"), summary)
    write_json(os.path.join(args.out, "metrics.json"), {
        "config": config_to_dict(cfg),
        "det-sfcd": det.metrics.to_dict(),
        "sph-le": sph.metrics.to_dict(),
        "summary": summary,
    })
    if not args.no_figures:
        render_figures(args.out, [det.metrics, sph.metrics], cfg.bucket_width)
    for phase in ("peak", "offpeak", "overall"):
        s = summary[phase]
        gain = "n/a" if s["acceptance_gain"] is None else f"{s['acceptance_gain']:+.4f}"
        print(f"{phase:8s} acceptance gain: {gain}  "
              f"profit gain: {s['profit_gain']:+.1f}")
    print(f"outputs written to {args.out}")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = _load(args)
    limits = OracleLimits()
    rows, summary = oracle_gap_report(cfg.params, cfg.requests, args.instances,
                                      cfg.seed, limits)
    os.makedirs(args.out, exist_ok=True)
    write_oracle_csv(os.path.join(args.out, "oracle_report.csv"), rows)
    write_json(os.path.join(args.out, "oracle_summary.json"), summary)
    if rows and not args.no_figures:
        render_oracle_figure(args.out, rows)
    ratio = summary["mean_det_to_oracle_ratio"]
    print(f"oracle-check: {summary['instances']} instances, "
          f"{summary['dominance_violations']} dominance violations, "
          f"mean det-sfcd/oracle profit ratio: "
          + (f"{ratio:.4f}" if ratio is not None else "n/a"))
    print(f"outputs written to {args.out}")
    if summary["dominance_violations"]:
        print("error: a heuristic out-performed the exhaustive reference; "
              "this indicates a bug", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detsfc",
        description="Deterministic-latency service chain deployment simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", metavar="PATH",
                        help="JSON config file (defaults to the stock setup)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default: ./out)")
        sp.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")

    sp = sub.add_parser("simulate", help="run one strategy and emit metrics")
    common(sp)
    sp.add_argument("--strategy", choices=["det-sfcd", "sph-le"],
                    help="override the configured strategy")
    sp.add_argument("--epochs", type=int, help="override the epoch count")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="run both strategies on the same workload")
    common(sp)
    sp.add_argument("--epochs", type=int, help="override the epoch count")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("oracle-check",
                        help="measure the heuristics' gap to the exhaustive reference")
    common(sp)
    sp.add_argument("--instances", type=int, default=50,
                    help="number of seeded small instances (default: 50)")
    sp.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
