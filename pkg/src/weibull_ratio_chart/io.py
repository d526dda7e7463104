"""
Dataset, configuration and chart-table I/O.

Datasets hold one subgroup per row as comma-separated positive decimals; lines
starting with ``#`` are comments and a single non-numeric header row is
allowed. Configurations are TOML files. Chart tables are CSV with the column
set ``k,estimate,lcl,ucl,beta_hat,beta_bar,phase,signal``; floats are written
with ``repr`` so that re-reading is lossless.
"""

import csv
import io as _io
import math
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bayes import PriorSpec, Subgroup
from .chart import ChartConfig, ChartPoint, Phase
from .distributions import WeibullParams
from .errors import ChartError, ConfigError, DataError
from .simulation import CHARTS, RL_QUANTILES, Scenario, Shift

CHART_COLUMNS = ("k", "estimate", "lcl", "ucl", "beta_hat", "beta_bar", "phase", "signal")

FIXTURES = ("table1.csv", "table2.csv", "table3a.csv", "table3b.csv",
            "example1.toml", "example2.toml", "scenario_in_control.toml")


def fixture_path(name):
    """Path of a data file shipped with the package (tables and example configs)."""
    return Path(resources.files("weibull_ratio_chart") / "data" / name)


# --- datasets -------------------------------------------------------------


def parse_dataset(path):
    """Read a subgroup-per-row file into ``Subgroup`` objects numbered from 1."""
    with open(path, newline="") as fh:
        return parse_dataset_lines(fh)


def parse_dataset_lines(lines):
    subgroups = []
    width = None
    seen_data = False
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        cells = [c.strip() for c in text.split(",")]
        values = []
        for col, cell in enumerate(cells, start=1):
            try:
                values.append(float(cell))
            except ValueError:
                values.append(None)
        if not seen_data and all(v is None for v in values):
            seen_data = True  # header row
            continue
        seen_data = True
        for col, (cell, v) in enumerate(zip(cells, values), start=1):
            if v is None:
                raise DataError(f"cannot parse {cell!r} as a number", row=lineno, column=col,
                                kind="parse")
            if not v > 0 or not math.isfinite(v):
                raise DataError(f"value {cell} is not positive", row=lineno, column=col,
                                kind="nonpositive")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataError(f"expected {width} values, found {len(values)}", row=lineno,
                            kind="width")
        subgroups.append(Subgroup(tuple(values), len(subgroups) + 1))
    if not subgroups:
        raise DataError("dataset contains no subgroups")
    return subgroups


# --- configuration --------------------------------------------------------


def _flatten(table, prefix=""):
    out = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def _load_toml(path):
    try:
        with open(path, "rb") as fh:
            return _flatten(tomllib.load(fh))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc


def _number(flat, key, kind=float, required=True, default=None):
    if key not in flat:
        if required:
            raise ConfigError("missing required key", key=key)
        return default
    value = flat[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    if kind is int:
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"expected an integer, got {value!r}", key=key)
        value = int(value)
    return kind(value)


def _check_keys(flat, allowed):
    for key in flat:
        if key not in allowed:
            raise ConfigError("unknown key", key=key)


RUN_KEYS = {
    "reliability_R", "alpha", "subgroup_size", "phase1_samples",
    "x.prior_percentile", "x.beta_low", "x.beta_high",
    "y.prior_percentile", "y.beta_low", "y.beta_high",
    "output.x_chart", "output.y_chart", "output.ratio_chart",
    "output.x_beta_chart", "output.y_beta_chart", "output.plot_dir",
}

SCENARIO_KEYS = (RUN_KEYS - {k for k in RUN_KEYS if k.startswith("output.")}) | {
    "name", "seed", "replicates", "max_periods",
    "x.true_scale", "x.true_shape", "y.true_scale", "y.true_shape",
    "shift.period", "shift.x_scale", "shift.x_shape", "shift.y_scale", "shift.y_shape",
    "output.summary",
}


def _chart_configs(flat):
    R = _number(flat, "reliability_R")
    alpha = _number(flat, "alpha")
    n = _number(flat, "subgroup_size", int)
    phase1 = _number(flat, "phase1_samples", int)
    configs = {}
    for proc in ("x", "y"):
        try:
            prior = PriorSpec(
                _number(flat, f"{proc}.prior_percentile"),
                _number(flat, f"{proc}.beta_low"),
                _number(flat, f"{proc}.beta_high"),
                R,
            )
        except ConfigError:
            raise
        except ChartError as exc:
            raise ConfigError(str(exc), key=proc) from exc
        try:
            configs[proc] = ChartConfig(prior, n, phase1, alpha)
        except ChartError as exc:
            raise ConfigError(str(exc), key="alpha/subgroup_size/phase1_samples") from exc
    return configs


class RunConfig:
    """Validated chart configuration for both processes plus output paths."""

    def __init__(self, x, y, outputs):
        self.x = x
        self.y = y
        self.outputs = outputs

    def __getitem__(self, process):
        if process not in ("x", "y"):
            raise ConfigError(f"unknown process {process!r}", key="process")
        return self.x if process == "x" else self.y


def load_run_config(path):
    return run_config_from_mapping(_load_toml(path))


def run_config_from_mapping(flat):
    flat = _flatten(flat)
    _check_keys(flat, RUN_KEYS)
    configs = _chart_configs(flat)
    outputs = {k.split(".", 1)[1]: v for k, v in flat.items() if k.startswith("output.")}
    return RunConfig(configs["x"], configs["y"], outputs)


def load_scenario(path):
    return scenario_from_mapping(_load_toml(path))


def scenario_from_mapping(flat):
    flat = _flatten(flat)
    _check_keys(flat, SCENARIO_KEYS)
    configs = _chart_configs(flat)

    def weibull(prefix):
        try:
            return WeibullParams(_number(flat, f"{prefix}_scale"), _number(flat, f"{prefix}_shape"))
        except ConfigError:
            raise
        except ChartError as exc:
            raise ConfigError(str(exc), key=prefix) from exc

    shift = None
    if any(k.startswith("shift.") for k in flat):
        shift = Shift(
            _number(flat, "shift.period", int),
            weibull("shift.x"),
            weibull("shift.y"),
        )
    name = flat.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("expected a string", key="name")
    try:
        return Scenario(
            x_true=weibull("x.true"),
            y_true=weibull("y.true"),
            x_config=configs["x"],
            y_config=configs["y"],
            replicates=_number(flat, "replicates", int),
            max_periods=_number(flat, "max_periods", int),
            seed=_number(flat, "seed", int),
            shift=shift,
            name=name,
        )
    except ConfigError:
        raise
    except ChartError as exc:
        raise ConfigError(str(exc), key="scenario") from exc


# --- chart tables ---------------------------------------------------------


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_chart_csv(points, path_or_file):
    """Write chart points; ``path_or_file`` may be a path or an open text file."""
    if hasattr(path_or_file, "write"):
        _write_chart(points, path_or_file)
    else:
        Path(path_or_file).parent.mkdir(parents=True, exist_ok=True)
        with open(path_or_file, "w", newline="") as fh:
            _write_chart(points, fh)


def _write_chart(points, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CHART_COLUMNS)
    for p in points:
        writer.writerow([
            _fmt(p.k), _fmt(float(p.estimate)), _fmt(float(p.lcl)), _fmt(float(p.ucl)),
            _fmt(None if p.beta_hat is None else float(p.beta_hat)),
            _fmt(None if p.beta_bar is None else float(p.beta_bar)),
            p.phase.value, _fmt(bool(p.signal)),
        ])


def chart_csv_string(points):
    buf = _io.StringIO()
    _write_chart(points, buf)
    return buf.getvalue()


def read_chart_csv(path_or_file):
    if hasattr(path_or_file, "read"):
        return _read_chart(path_or_file)
    with open(path_or_file, newline="") as fh:
        return _read_chart(fh)


def _read_chart(fh):
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CHART_COLUMNS:
        raise DataError(f"unexpected chart columns {reader.fieldnames}")
    opt = lambda s: float(s) if s else None  # noqa: E731
    return [
        ChartPoint(
            k=int(row["k"]), estimate=float(row["estimate"]), lcl=float(row["lcl"]),
            ucl=float(row["ucl"]), phase=Phase(row["phase"]), signal=row["signal"] == "1",
            beta_hat=opt(row["beta_hat"]), beta_bar=opt(row["beta_bar"]),
        )
        for row in reader
    ]


# --- simulation summaries -------------------------------------------------


def scenario_echo(scenario):
    s = scenario
    cx, cy = s.x_config, s.y_config
    items = [
        ("name", s.name), ("seed", s.seed), ("replicates", s.replicates),
        ("max_periods", s.max_periods), ("reliability_R", cx.R), ("alpha", cx.alpha),
        ("subgroup_size", cx.subgroup_size), ("phase1_samples", cx.phase1_len),
    ]
    for proc, cfg, true in (("x", cx, s.x_true), ("y", cy, s.y_true)):
        items += [
            (f"{proc}.prior_percentile", cfg.prior.anticipated_percentile),
            (f"{proc}.beta_low", cfg.prior.beta_low),
            (f"{proc}.beta_high", cfg.prior.beta_high),
            (f"{proc}.true_scale", true.scale),
            (f"{proc}.true_shape", true.shape),
        ]
    if s.shift is not None:
        items += [
            ("shift.period", s.shift.period),
            ("shift.x_scale", s.shift.x.scale), ("shift.x_shape", s.shift.x.shape),
            ("shift.y_scale", s.shift.y.scale), ("shift.y_shape", s.shift.y.shape),
        ]
    return items


def write_summary_csv(summary, path_or_file):
    if hasattr(path_or_file, "write"):
        _write_summary(summary, path_or_file)
    else:
        Path(path_or_file).parent.mkdir(parents=True, exist_ok=True)
        with open(path_or_file, "w", newline="") as fh:
            _write_summary(summary, fh)


def _write_summary(summary, fh):
    for key, value in scenario_echo(summary.scenario):
        fh.write(f"# {key} = {_fmt(value)}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("chart", "statistic", "period", "value"))
    writer.writerow(("all", "errors", "", summary.errors))
    for chart in CHARTS:
        cs = summary[chart]
        writer.writerow((chart, "replicates", "", cs.replicates))
        writer.writerow((chart, "signalled", "", cs.signalled))
        writer.writerow((chart, "signal_fraction", "", _fmt(cs.signal_fraction)))
        writer.writerow((chart, "mean_run_length", "", _fmt(cs.mean_run_length)))
        for p, q in cs.run_length_quantiles(RL_QUANTILES).items():
            writer.writerow((chart, f"run_length_q{int(round(p * 100)):02d}", "", _fmt(q)))
        for k, frac in cs.period_fractions.items():
            writer.writerow((chart, "false_alarm_fraction", k, _fmt(frac)))
        for k, h in cs.period_hazards.items():
            writer.writerow((chart, "false_alarm_hazard", k, _fmt(h)))


def read_summary_csv(path):
    """Parse a summary file into ``{(chart, statistic, period): value}``."""
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    out = {}
    for row in csv.DictReader(rows):
        period = int(row["period"]) if row["period"] else None
        out[(row["chart"], row["statistic"], period)] = float(row["value"])
    return out
