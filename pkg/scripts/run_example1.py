"""Example 1: two processes, subgroups of 4, ten Phase I periods.

    python3 scripts/run_example1.py [out_dir]
"""

import sys
from pathlib import Path

from weibull_ratio_chart.cli import RATIO_OUTPUTS, run_ratio_chart
from weibull_ratio_chart.io import fixture_path, load_run_config, parse_dataset


def main(out_dir="out/example1"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = load_run_config(fixture_path("example1.toml"))
    run = run_ratio_chart(
        cfg,
        parse_dataset(fixture_path("table1.csv")),
        parse_dataset(fixture_path("table2.csv")),
        {name: out / f"{name}.csv" for name in RATIO_OUTPUTS},
        plot_dir=out,
    )
    print(f"{'k':>3} {'x_hat':>8} {'y_hat':>8} {'ratio':>7} {'LCL':>7} {'UCL':>7}  signal")
    for px, py, pr in zip(run.x_run.points, run.y_run.points, run.ratio_points):
        flags = "".join(c for c, p in (("x", px), ("y", py), ("r", pr)) if p.signal)
        print(f"{pr.k:3d} {px.estimate:8.4f} {py.estimate:8.4f} {pr.estimate:7.4f} "
              f"{pr.lcl:7.4f} {pr.ucl:7.4f}  {flags}")
    print(f"tables and plots in {out}/")


if __name__ == "__main__":
    main(*sys.argv[1:])
