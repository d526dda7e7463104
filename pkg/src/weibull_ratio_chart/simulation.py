"""
Monte Carlo run-length study of the percentile and ratio charts.

Every replicate draws its data from its own Philox stream keyed by
``(seed, replicate, process)``, so results do not depend on how replicates are
scheduled across workers. Aggregation walks replicates in index order.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chart import ChartConfig, RatioRun
from .distributions import WeibullParams
from .errors import ChartError, InvalidParameterError

CHARTS = ("x", "y", "ratio")
RL_QUANTILES = (0.1, 0.5, 0.9)


def inverse_cdf_transform(u, params):
    """Map uniforms in ``(0, 1]`` to Weibull variates: ``scale * (-ln u)^(1/shape)``."""
    return params.scale * (-np.log(u)) ** (1.0 / params.shape)


def weibull_sample(params, count, rng):
    u = rng.random(count)
    # rng.random is on [0, 1); an exact zero would map to +inf
    u[u == 0.0] = np.finfo(float).tiny
    return inverse_cdf_transform(u, params)


def replicate_rng(seed, replicate, stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, replicate, stream])))


@dataclass(frozen=True)
class Shift:
    """Step change of the true parameters from ``period`` on."""

    period: int
    x: WeibullParams
    y: WeibullParams


@dataclass(frozen=True)
class Scenario:
    x_true: WeibullParams
    y_true: WeibullParams
    x_config: ChartConfig
    y_config: ChartConfig
    replicates: int = 1000
    max_periods: int = 40
    seed: int = 0
    shift: Shift = None
    name: str = ""

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidParameterError("replicates must be >= 1")
        if self.max_periods <= self.x_config.phase1_len:
            raise InvalidParameterError("max_periods must exceed phase1_len")
        if self.shift is not None and self.shift.period <= self.x_config.phase1_len:
            raise InvalidParameterError("shift period must fall in Phase II")

    @property
    def phase1_len(self):
        return self.x_config.phase1_len

    @property
    def reference_period(self):
        """First period counted by run lengths: the shift onset, else Phase II start."""
        return self.shift.period if self.shift is not None else self.phase1_len + 1

    def true_params(self, k):
        if self.shift is not None and k >= self.shift.period:
            return self.shift.x, self.shift.y
        return self.x_true, self.y_true


@dataclass(frozen=True)
class ReplicateResult:
    """Per-period signal flags for each chart; ``error`` set if the pipeline failed."""

    replicate: int
    signals: dict = None
    error: str = None


def simulate_replicate(scenario, replicate):
    n = scenario.x_config.subgroup_size
    rng_x = replicate_rng(scenario.seed, replicate, 0)
    rng_y = replicate_rng(scenario.seed, replicate, 1)
    run = RatioRun.create(scenario.x_config, scenario.y_config, track_beta=False)
    try:
        for k in range(1, scenario.max_periods + 1):
            px, py = scenario.true_params(k)
            run.step(weibull_sample(px, n, rng_x), weibull_sample(py, n, rng_y))
    except ChartError as exc:
        return ReplicateResult(replicate, error=f"{type(exc).__name__}: {exc}")
    signals = {
        "x": tuple(p.signal for p in run.x_run.points),
        "y": tuple(p.signal for p in run.y_run.points),
        "ratio": tuple(p.signal for p in run.ratio_points),
    }
    return ReplicateResult(replicate, signals=signals)


@dataclass
class ChartSummary:
    chart: str
    replicates: int
    signalled: int
    run_lengths: list = field(repr=False)
    period_fractions: dict = field(repr=False)
    period_hazards: dict = field(repr=False)

    @property
    def signal_fraction(self):
        return self.signalled / self.replicates if self.replicates else math.nan

    @property
    def mean_run_length(self):
        return float(np.mean(self.run_lengths)) if self.run_lengths else math.nan

    def run_length_quantiles(self, probs=RL_QUANTILES):
        if not self.run_lengths:
            return {p: math.nan for p in probs}
        return {p: float(np.quantile(self.run_lengths, p)) for p in probs}

    @property
    def max_period_fraction(self):
        return max(self.period_fractions.values()) if self.period_fractions else 0.0

    @property
    def max_period_hazard(self):
        return max(self.period_hazards.values()) if self.period_hazards else 0.0


@dataclass
class RunLengthSummary:
    scenario: Scenario
    errors: int
    error_messages: list
    charts: dict

    def __getitem__(self, chart):
        return self.charts[chart]


def summarize(scenario, results):
    """Reduce replicate results (in replicate order) to per-chart statistics.

    A run length counts periods from the reference period, so a signal at the
    reference period has run length 1. ``period_fractions`` maps every Phase II
    period to the fraction of good replicates whose point signals there;
    ``period_hazards`` divides the first Phase II signals at that period by the
    replicates with no Phase II signal before it (the per-period false-alarm
    rate behind an in-control run length).
    """
    results = sorted(results, key=lambda r: r.replicate)
    good = [r for r in results if r.error is None]
    ref = scenario.reference_period
    phase2 = range(scenario.phase1_len + 1, scenario.max_periods + 1)
    charts = {}
    for chart in CHARTS:
        run_lengths = []
        for r in good:
            flags = r.signals[chart]
            first = next((k for k in range(ref, len(flags) + 1) if flags[k - 1]), None)
            if first is not None:
                run_lengths.append(first - ref + 1)
        fractions = {
            k: sum(r.signals[chart][k - 1] for r in good) / len(good) if good else math.nan
            for k in phase2
        }
        hazards = {}
        at_risk = list(good)
        for k in phase2:
            hits = [r for r in at_risk if r.signals[chart][k - 1]]
            hazards[k] = len(hits) / len(at_risk) if at_risk else math.nan
            at_risk = [r for r in at_risk if not r.signals[chart][k - 1]]
        charts[chart] = ChartSummary(
            chart, len(good), len(run_lengths), run_lengths, fractions, hazards
        )
    errors = [r for r in results if r.error is not None]
    return RunLengthSummary(scenario, len(errors), [r.error for r in errors], charts)


def run_scenario(scenario, n_jobs=1):
    """Simulate every replicate of ``scenario`` and summarise the run lengths."""
    reps = range(scenario.replicates)
    if n_jobs == 1:
        results = [simulate_replicate(scenario, i) for i in reps]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(simulate_replicate, [scenario] * len(reps), reps, chunksize=16))
    return summarize(scenario, results)
