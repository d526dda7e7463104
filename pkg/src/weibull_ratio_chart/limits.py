"""
Control limits for the percentile, ratio and shape charts.

Percentile limits come from the standard Gamma pivot ``z = x_R^-beta * A``,
which is decreasing in ``x_R``: the upper Gamma quantile gives the LCL.
Ratio limits come from the Inverted Beta pivot ``v = u^beta * C`` with
``C = B / A``, which is increasing in ``u``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .bayes import beta_moments, log_beta_kernel
from .distributions import inverted_beta_quantile, std_gamma_quantile
from .errors import InvalidParameterError
from .quadrature import integrate


@dataclass(frozen=True)
class LimitPair:
    lcl: float
    ucl: float
    alpha: float
    k: int

    def __post_init__(self):
        object.__setattr__(self, "lcl", float(self.lcl))
        object.__setattr__(self, "ucl", float(self.ucl))
        if not 0 < self.lcl < self.ucl:
            raise InvalidParameterError(f"need 0 < lcl < ucl, got ({self.lcl}, {self.ucl})")
        if not 0 < self.alpha < 1:
            raise InvalidParameterError(f"alpha must lie in (0, 1), got {self.alpha}")

    def contains(self, value):
        return self.lcl <= value <= self.ucl


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")


def percentile_limits(A, beta_bar, k, n, alpha):
    _check_alpha(alpha)
    shape = k * n + 1
    z_lo = std_gamma_quantile(alpha / 2, shape)
    z_hi = std_gamma_quantile(1 - alpha / 2, shape)
    return LimitPair(
        lcl=(A / z_hi) ** (1.0 / beta_bar),
        ucl=(A / z_lo) ** (1.0 / beta_bar),
        alpha=alpha,
        k=k,
    )


@dataclass(frozen=True)
class RatioContext:
    """Accumulators of both processes at period ``k`` and the pooled shape."""

    A: float
    B: float
    beta_bar: float
    k: int
    n: int

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0 and self.beta_bar > 0):
            raise InvalidParameterError("accumulators and pooled shape must be positive")

    @property
    def C(self):
        return self.B / self.A

    @classmethod
    def from_states(cls, x_state, y_state):
        """Pool the two shape averages and rescale each accumulator to the pool.

        Each percentile chart uses the pivot ``z = x_R^-b * A ~ Gamma(m)`` with
        ``m = kn + 1`` and its own average ``b``. Writing
        ``x_R = (A/m)^(1/b) * (z/m)^(-1/b)`` and replacing ``b`` by the pooled
        shape only in the second factor (which is close to one) gives the
        rescaled accumulator ``m * (A/m)^(pooled/b)``. The ratio limits then
        centre on the ratio of the plotted estimates; with equal averages this
        is exactly ``B / A``.
        """
        if x_state.k != y_state.k:
            raise InvalidParameterError(f"period mismatch: {x_state.k} != {y_state.k}")
        pooled = 0.5 * (x_state.beta_bar + y_state.beta_bar)
        m = x_state.k * x_state.n + 1
        return cls(
            A=_rescale(x_state.accumulator, x_state.beta_bar, pooled, m),
            B=_rescale(y_state.accumulator, y_state.beta_bar, pooled, m),
            beta_bar=pooled,
            k=x_state.k,
            n=x_state.n,
        )


def _rescale(acc, own, pooled, m):
    if own == pooled:
        return acc
    return m * (acc / m) ** (pooled / own)


def ratio_limits(ctx, alpha):
    _check_alpha(alpha)
    shape = ctx.k * ctx.n + 1
    v_lo = inverted_beta_quantile(alpha / 2, shape)
    v_hi = inverted_beta_quantile(1 - alpha / 2, shape)
    C = ctx.C
    return LimitPair(
        lcl=(v_lo / C) ** (1.0 / ctx.beta_bar),
        ucl=(v_hi / C) ** (1.0 / ctx.beta_bar),
        alpha=alpha,
        k=ctx.k,
    )


def prior_ratio_limits(a_x, a_y, beta_bar, alpha):
    """Ratio limits before any data (k = 0), from the two prior scales."""
    ctx = RatioContext(A=a_x ** (-beta_bar), B=a_y ** (-beta_bar), beta_bar=beta_bar, k=0, n=1)
    return ratio_limits(ctx, alpha)


def ratio_logpdf(u, C, beta, k, n):
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise InvalidParameterError("ratio support is u > 0")
    m = k * n + 1
    lu = np.log(u)
    lc = math.log(C)
    return (
        math.log(beta) + gammaln(2 * m) - 2 * gammaln(m)
        + (beta * m - 1.0) * lu + m * lc
        - 2 * m * np.logaddexp(0.0, beta * lu + lc)
    )


def ratio_pdf(u, C, beta, k, n):
    """Density of ``u = x_R / y_R`` for independent percentiles sharing ``beta``."""
    out = np.exp(ratio_logpdf(u, C, beta, k, n))
    return float(out) if out.ndim == 0 else out


def beta_chart_bands(state, alpha):
    """Central ``1 - alpha`` interval of the shape posterior at the state's period.

    The bands are the ``alpha/2`` and ``1 - alpha/2`` quantiles of the marginal
    posterior of the shape on the interval used for that period, found by
    root-finding on the quadrature CDF.
    """
    _check_alpha(alpha)
    lo, hi = state.interval
    data, a, R = state.data, state.prior_scale, state.R
    log_norm, _ = beta_moments(data, a, state.interval, R)

    def density(beta):
        return np.exp(log_beta_kernel(beta, data, a, R) - log_norm)

    def cdf(b):
        if b <= lo:
            return 0.0
        return integrate(density, lo, b, rtol=1e-11, atol=1e-14)[0]

    def quantile(p):
        return brentq(lambda b: cdf(b) - p, lo, hi, xtol=1e-12, rtol=1e-12)

    return LimitPair(
        lcl=quantile(alpha / 2), ucl=quantile(1 - alpha / 2), alpha=alpha, k=state.k
    )
