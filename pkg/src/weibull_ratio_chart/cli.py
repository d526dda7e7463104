"""
Command-line entry point.

    weibull-chart chart    --config run.toml --process x --data table1.csv --out x.csv
    weibull-chart ratio    --config run.toml --x table1.csv --y table2.csv --out-dir out/
    weibull-chart simulate --scenario scenario.toml --out summary.csv

Chart signals are results, not failures: the exit status is 0 whenever the run
completes and 2 when an input, configuration or numerical error stops it.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from .chart import RatioRun, run_chart
from .errors import ChartError, ProtocolError
from .io import (
    load_run_config,
    load_scenario,
    parse_dataset,
    write_chart_csv,
    write_summary_csv,
)
from .simulation import CHARTS, run_scenario

RATIO_OUTPUTS = ("x_chart", "y_chart", "ratio_chart", "x_beta_chart", "y_beta_chart")


def run_single_chart(config, subgroups, out=None, beta_out=None, plot=None, beta_plot=None):
    """Run one percentile chart and write whichever artifacts are requested."""
    track_beta = beta_out is not None or beta_plot is not None
    run = run_chart(config, subgroups, track_beta=track_beta)
    if out is not None:
        write_chart_csv(run.points, out)
    if beta_out is not None:
        write_chart_csv(run.beta_points, beta_out)
    if plot is not None or beta_plot is not None:
        from .plotting import plot_beta_chart, plot_percentile_chart

        if plot is not None:
            plot_percentile_chart(run.points, config.phase1_len, plot)
        if beta_plot is not None:
            plot_beta_chart(run.beta_points, config.phase1_len, beta_plot)
    return run


def run_ratio_chart(run_config, x_subgroups, y_subgroups, outputs=None, plot_dir=None):
    """Run both percentile charts, their shape charts and the ratio chart.

    ``outputs`` maps names in ``RATIO_OUTPUTS`` to CSV paths; missing names are
    not written. The ratio table starts with the k = 0 prior row.
    """
    if len(x_subgroups) != len(y_subgroups):
        raise ProtocolError(
            f"period-count mismatch: {len(x_subgroups)} x subgroups vs {len(y_subgroups)} y subgroups"
        )
    run = RatioRun.create(run_config.x, run_config.y, track_beta=True)
    for sx, sy in zip(x_subgroups, y_subgroups):
        run.step(sx, sy)
    tables = {
        "x_chart": run.x_run.points,
        "y_chart": run.y_run.points,
        "ratio_chart": [run.prior_point()] + run.ratio_points,
        "x_beta_chart": run.x_run.beta_points,
        "y_beta_chart": run.y_run.beta_points,
    }
    for name, path in (outputs or {}).items():
        write_chart_csv(tables[name], path)
    if plot_dir is not None:
        from .plotting import plot_beta_chart, plot_percentile_chart, plot_ratio_chart

        plot_dir = Path(plot_dir)
        p1 = run.phase1_len
        plot_percentile_chart(tables["x_chart"], p1, plot_dir / "x_chart.svg", "x percentile chart")
        plot_percentile_chart(tables["y_chart"], p1, plot_dir / "y_chart.svg", "y percentile chart")
        plot_beta_chart(tables["x_beta_chart"], p1, plot_dir / "x_beta_chart.svg", "x shape chart")
        plot_beta_chart(tables["y_beta_chart"], p1, plot_dir / "y_beta_chart.svg", "y shape chart")
        plot_ratio_chart(run, plot_dir / "ratio_chart.svg", "x / y ratio chart")
    return run


def run_simulation(scenario, out=None, n_jobs=1):
    summary = run_scenario(scenario, n_jobs=n_jobs)
    if out is not None:
        write_summary_csv(summary, out)
    return summary


def _signals_line(label, points):
    ks = [p.k for p in points if p.signal]
    return f"{label}: {len(points)} points, signals at {ks if ks else 'none'}"


def _cmd_chart(args):
    cfg = load_run_config(args.config)
    run = run_single_chart(
        cfg[args.process], parse_dataset(args.data),
        out=args.out or cfg.outputs.get(f"{args.process}_chart"),
        beta_out=args.beta_out or cfg.outputs.get(f"{args.process}_beta_chart"),
        plot=args.plot, beta_plot=args.beta_plot,
    )
    print(_signals_line(f"{args.process} chart", run.points))


def _cmd_ratio(args):
    cfg = load_run_config(args.config)
    if args.out_dir is not None:
        outputs = {name: Path(args.out_dir) / f"{name}.csv" for name in RATIO_OUTPUTS}
    else:
        outputs = {k: v for k, v in cfg.outputs.items() if k in RATIO_OUTPUTS}
    plot_dir = args.plot_dir or cfg.outputs.get("plot_dir")
    run = run_ratio_chart(cfg, parse_dataset(args.x), parse_dataset(args.y), outputs, plot_dir)
    print(_signals_line("x chart", run.x_run.points))
    print(_signals_line("y chart", run.y_run.points))
    print(_signals_line("ratio chart", run.ratio_points))


def _cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    if args.replicates is not None:
        scenario = dataclasses.replace(scenario, replicates=args.replicates)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    summary = run_simulation(scenario, out=args.out, n_jobs=args.jobs)
    for chart in CHARTS:
        cs = summary[chart]
        print(f"{chart}: signal fraction {cs.signal_fraction:.4f}, "
              f"max per-period hazard {cs.max_period_hazard:.4f}")
    if summary.errors:
        print(f"{summary.errors} replicates failed: {summary.error_messages[0]}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weibull-chart",
        description="Bayesian control charts for Weibull percentiles and their ratio.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chart", help="percentile chart for a single process")
    p.add_argument("--config", required=True)
    p.add_argument("--process", choices=("x", "y"), default="x",
                   help="which prior block of the config to use")
    p.add_argument("--data", required=True, help="subgroup-per-row CSV")
    p.add_argument("--out", help="chart CSV")
    p.add_argument("--beta-out", help="shape chart CSV")
    p.add_argument("--plot", help="percentile chart SVG")
    p.add_argument("--beta-plot", help="shape chart SVG")
    p.set_defaults(func=_cmd_chart)

    p = sub.add_parser("ratio", help="percentile charts of two processes and their ratio chart")
    p.add_argument("--config", required=True)
    p.add_argument("--x", required=True, help="subgroup CSV of process x")
    p.add_argument("--y", required=True, help="subgroup CSV of process y")
    p.add_argument("--out-dir", help="write all five chart tables here")
    p.add_argument("--plot-dir", help="write SVG plots here")
    p.set_defaults(func=_cmd_ratio)

    p = sub.add_parser("simulate", help="Monte Carlo run-length study")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", help="summary CSV")
    p.add_argument("--replicates", type=int, help="override the scenario's replicate count")
    p.add_argument("--seed", type=int, help="override the scenario's seed")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ChartError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
