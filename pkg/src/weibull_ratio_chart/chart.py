"""
Chart state machines: Phase I accumulation with evolving limits, freezing at
the end of Phase I, Phase II monitoring against the frozen limits.

A point signals when it falls outside ``[lcl, ucl]``; no run rules are used.
Phase I signals are flagged but estimation carries on regardless.
"""

import enum
from dataclasses import dataclass, field

from .bayes import PosteriorState, PriorSpec, Subgroup, ingest_subgroup
from .errors import InvalidParameterError, ProtocolError
from .limits import (
    LimitPair,
    RatioContext,
    beta_chart_bands,
    percentile_limits,
    prior_ratio_limits,
    ratio_limits,
)

DEFAULT_ALPHA = 0.0027


class Phase(str, enum.Enum):
    PRIOR = "prior"
    I = "I"  # noqa: E741
    II = "II"


@dataclass(frozen=True)
class ChartConfig:
    prior: PriorSpec
    subgroup_size: int
    phase1_len: int
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.phase1_len < 1:
            raise InvalidParameterError(f"phase1_len must be >= 1, got {self.phase1_len}")
        if self.subgroup_size < 1:
            raise InvalidParameterError(f"subgroup_size must be >= 1, got {self.subgroup_size}")
        if not 0 < self.alpha < 0.5:
            raise InvalidParameterError(f"alpha must lie in (0, 0.5), got {self.alpha}")

    @property
    def R(self):
        return self.prior.R


@dataclass(frozen=True)
class ChartPoint:
    """One plotted point with the limits it was judged against.

    ``beta_hat`` and ``beta_bar`` carry the shape estimates behind the point;
    on ratio charts ``beta_hat`` is ``None`` and ``beta_bar`` is the pooled value.
    """

    k: int
    estimate: float
    lcl: float
    ucl: float
    phase: Phase
    signal: bool
    beta_hat: float = None
    beta_bar: float = None


def _judge(k, estimate, limits, phase, **extra):
    signal = not (limits.lcl <= estimate <= limits.ucl)
    return ChartPoint(k, estimate, limits.lcl, limits.ucl, phase, signal, **extra)


@dataclass
class ChartRun:
    """Percentile chart (and optionally its shape chart) for one process."""

    config: ChartConfig
    track_beta: bool = True
    posterior: PosteriorState = None
    points: list = field(default_factory=list)
    beta_points: list = field(default_factory=list)
    frozen_limits: LimitPair = None
    frozen_bands: LimitPair = None

    def __post_init__(self):
        if self.posterior is None:
            self.posterior = PosteriorState.initial(self.config.prior, self.config.subgroup_size)

    @property
    def k(self):
        return self.posterior.k

    @property
    def in_phase1(self):
        return self.k <= self.config.phase1_len

    def current_limits(self):
        post = self.posterior
        return percentile_limits(
            post.accumulator, post.beta_bar, post.k, post.n, self.config.alpha
        )

    def step(self, subgroup):
        if not isinstance(subgroup, Subgroup):
            subgroup = Subgroup(tuple(subgroup), self.k + 1)
        self.posterior = ingest_subgroup(self.posterior, subgroup)
        k = self.k
        if self.in_phase1:
            limits, phase = self.current_limits(), Phase.I
        else:
            limits, phase = self.frozen_limits, Phase.II
        post = self.posterior
        point = _judge(
            k, post.estimate, limits, phase, beta_hat=post.beta_hat, beta_bar=post.beta_bar
        )
        self.points.append(point)
        if self.track_beta:
            self.beta_step()
        if k == self.config.phase1_len:
            self.freeze()
        return point

    def beta_step(self):
        """Record the shape estimate of the latest period against its bands."""
        post = self.posterior
        if post.k == 0 or len(self.beta_points) != post.k - 1:
            raise ProtocolError("beta_step must follow each ingested period exactly once")
        if self.in_phase1:
            bands, phase = beta_chart_bands(post, self.config.alpha), Phase.I
        else:
            bands, phase = self.frozen_bands, Phase.II
        point = _judge(
            post.k, post.beta_hat, bands, phase, beta_hat=post.beta_hat, beta_bar=post.beta_bar
        )
        self.beta_points.append(point)
        return point

    def freeze(self):
        """Fix the limits in force at the last Phase I period; idempotent."""
        if self.frozen_limits is not None:
            return self.frozen_limits
        if self.k < self.config.phase1_len:
            raise ProtocolError(
                f"cannot freeze at period {self.k} before phase1_len={self.config.phase1_len}"
            )
        last = self.points[self.config.phase1_len - 1]
        self.frozen_limits = LimitPair(last.lcl, last.ucl, self.config.alpha, last.k)
        if self.beta_points:
            b = self.beta_points[self.config.phase1_len - 1]
            self.frozen_bands = LimitPair(b.lcl, b.ucl, self.config.alpha, b.k)
        return self.frozen_limits

    def signals(self):
        return [p.k for p in self.points if p.signal]


@dataclass
class RatioRun:
    """Ratio chart of two percentile charts advanced in lockstep."""

    x_run: ChartRun
    y_run: ChartRun
    ratio_points: list = field(default_factory=list)
    prior_limits: LimitPair = None
    frozen_limits: LimitPair = None
    contexts: list = field(default_factory=list)

    def __post_init__(self):
        cx, cy = self.x_run.config, self.y_run.config
        if (cx.subgroup_size, cx.phase1_len, cx.alpha) != (cy.subgroup_size, cy.phase1_len, cy.alpha):
            raise InvalidParameterError("x and y charts must share subgroup size, phase1_len and alpha")
        if self.prior_limits is None:
            px, py = self.x_run.posterior, self.y_run.posterior
            if px.k != 0 or py.k != 0:
                raise ProtocolError("prior limits need both runs at period 0")
            pooled = 0.5 * (px.beta_bar + py.beta_bar)
            self.prior_limits = prior_ratio_limits(px.prior_scale, py.prior_scale, pooled, cx.alpha)
            self.contexts = [RatioContext(
                A=px.prior_scale ** (-pooled), B=py.prior_scale ** (-pooled),
                beta_bar=pooled, k=0, n=cx.subgroup_size,
            )]

    @classmethod
    def create(cls, x_config, y_config, track_beta=True):
        return cls(ChartRun(x_config, track_beta), ChartRun(y_config, track_beta))

    @property
    def alpha(self):
        return self.x_run.config.alpha

    @property
    def phase1_len(self):
        return self.x_run.config.phase1_len

    @property
    def k(self):
        return len(self.ratio_points)

    @property
    def anticipated_ratio(self):
        return (
            self.x_run.config.prior.anticipated_percentile
            / self.y_run.config.prior.anticipated_percentile
        )

    def prior_point(self):
        """The k = 0 row: anticipated ratio against the prior limits."""
        lim = self.prior_limits
        return ChartPoint(
            0, self.anticipated_ratio, lim.lcl, lim.ucl, Phase.PRIOR,
            not lim.contains(self.anticipated_ratio), beta_bar=self.contexts[0].beta_bar,
        )

    def context(self):
        return RatioContext.from_states(self.x_run.posterior, self.y_run.posterior)

    def current_limits(self):
        return ratio_limits(self.context(), self.alpha)

    def step(self, x_subgroup, y_subgroup):
        self.x_run.step(x_subgroup)
        self.y_run.step(y_subgroup)
        return self.step_ratio()

    def step_ratio(self):
        kx, ky = self.x_run.k, self.y_run.k
        if kx != ky:
            raise ProtocolError(f"period mismatch: x at {kx}, y at {ky}")
        if kx != self.k + 1:
            raise ProtocolError(f"ratio chart at period {self.k}, runs at {kx}")
        k = kx
        ctx = self.context()
        self.contexts.append(ctx)
        if k <= self.phase1_len:
            limits, phase = ratio_limits(ctx, self.alpha), Phase.I
        else:
            limits, phase = self.frozen_limits, Phase.II
        estimate = self.x_run.points[-1].estimate / self.y_run.points[-1].estimate
        point = _judge(k, estimate, limits, phase, beta_bar=ctx.beta_bar)
        self.ratio_points.append(point)
        if k == self.phase1_len:
            self.freeze()
        return point

    def freeze(self):
        if self.frozen_limits is not None:
            return self.frozen_limits
        if self.k < self.phase1_len:
            raise ProtocolError(
                f"cannot freeze at period {self.k} before phase1_len={self.phase1_len}"
            )
        last = self.ratio_points[self.phase1_len - 1]
        self.frozen_limits = LimitPair(last.lcl, last.ucl, self.alpha, last.k)
        return self.frozen_limits

    def signals(self):
        return [p.k for p in self.ratio_points if p.signal]


def run_chart(config, subgroups, track_beta=True):
    run = ChartRun(config, track_beta)
    for s in subgroups:
        run.step(s)
    return run


def run_ratio(x_config, y_config, x_subgroups, y_subgroups, track_beta=True):
    if len(x_subgroups) != len(y_subgroups):
        raise ProtocolError(
            f"period-count mismatch: {len(x_subgroups)} x subgroups vs {len(y_subgroups)} y subgroups"
        )
    run = RatioRun.create(x_config, y_config, track_beta)
    for sx, sy in zip(x_subgroups, y_subgroups):
        run.step(sx, sy)
    return run
