"""
Cumulative Bayesian estimation of a Weibull percentile and shape parameter.

Prior: Uniform on ``(beta_low, beta_high)`` for the shape and Inverse Weibull
(scale ``a``, shape ``b = beta``) for the percentile ``x_R``. After every
subgroup the posterior over all data gathered so far yields a shape estimate
(posterior mean over the current interval), a running average of those
estimates, and a closed-form percentile estimate. The prior for the next
period is then re-centred on the latest estimates.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from .distributions import InverseWeibullParams, log_gamma
from .errors import InvalidParameterError, InvalidPriorError, ProtocolError
from .quadrature import integrate

BETA_RTOL = 1e-9


@dataclass(frozen=True)
class PriorSpec:
    """Practitioner's prior: anticipated percentile and a plausible shape range."""

    anticipated_percentile: float
    beta_low: float
    beta_high: float
    R: float

    def __post_init__(self):
        if not self.anticipated_percentile > 0:
            raise InvalidPriorError(
                f"anticipated percentile must be positive, got {self.anticipated_percentile}"
            )
        if not 0 < self.beta_low < self.beta_high:
            raise InvalidPriorError(
                f"need 0 < beta_low < beta_high, got ({self.beta_low}, {self.beta_high})"
            )
        if not self.beta_low + self.beta_high > 2:
            raise InvalidPriorError("beta_low + beta_high must exceed 2")
        if not 0 < self.R < 1:
            raise InvalidParameterError(f"R must lie in (0, 1), got {self.R}")

    @property
    def interval(self):
        return (self.beta_low, self.beta_high)


@dataclass(frozen=True)
class Subgroup:
    values: tuple
    period: int

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise InvalidParameterError("empty subgroup")
        for j, v in enumerate(values):
            if not v > 0 or not math.isfinite(v):
                raise InvalidParameterError(
                    f"period {self.period}: value {j + 1} = {v} is not positive"
                )
        if self.period < 1:
            raise InvalidParameterError(f"period index must be >= 1, got {self.period}")

    def __len__(self):
        return len(self.values)


def elicit_b_bar(spec):
    """Anticipated Inverse-Weibull shape: the midpoint of the shape interval."""
    return _b_bar(spec.beta_low, spec.beta_high)


def _b_bar(beta_low, beta_high):
    if not beta_low + beta_high > 2:
        raise InvalidPriorError(
            f"beta_low + beta_high = {beta_low + beta_high} must exceed 2"
        )
    return 0.5 * (beta_low + beta_high)


def elicit_a(anticipated_percentile, b_bar):
    """Inverse-Weibull scale whose prior mean equals the anticipated percentile."""
    if not b_bar > 1:
        raise InvalidPriorError(f"b_bar must exceed 1, got {b_bar}")
    if not anticipated_percentile > 0:
        raise InvalidPriorError("anticipated percentile must be positive")
    return math.exp(log_gamma(1.0 - 1.0 / b_bar)) / anticipated_percentile


def prior_params(spec):
    b = elicit_b_bar(spec)
    return InverseWeibullParams(elicit_a(spec.anticipated_percentile, b), b)


def accumulator(data, a, beta, R):
    """``a^-beta + ln(1/R) * sum(x_i^beta)``; empty ``data`` gives the prior-only value."""
    data = np.asarray(data, dtype=float)
    return a ** (-beta) + math.log(1.0 / R) * float(np.sum(data ** beta))


def log_accumulator(log_data, log_a, beta, R):
    """Vectorised ``ln A(beta)`` for an array of ``beta``; ``log_data`` is ``ln x_i``."""
    beta = np.asarray(beta, dtype=float)
    prior_term = -beta * log_a
    if log_data.size == 0:
        return prior_term
    t = np.multiply.outer(beta, log_data)
    top = t.max(axis=-1)
    data_term = math.log(math.log(1.0 / R)) + top + np.log(np.exp(t - top[..., None]).sum(axis=-1))
    return np.logaddexp(prior_term, data_term)


def log_beta_kernel(beta, data, a, R):
    """Unnormalised log marginal posterior of the shape parameter.

    ``kn ln(beta) - beta ln(a) + (beta - 1) sum(ln x) - (kn + 1) ln A(beta)``,
    i.e. the joint posterior integrated over the percentile, up to a constant.
    """
    data = np.asarray(data, dtype=float)
    log_data = np.log(data)
    kn = data.size
    beta = np.asarray(beta, dtype=float)
    log_a = math.log(a)
    return (
        kn * np.log(beta)
        - beta * log_a
        + (beta - 1.0) * float(np.sum(log_data))
        - (kn + 1) * log_accumulator(log_data, log_a, beta, R)
    )


def _kernel_shift(data, a, interval, R):
    grid = np.linspace(interval[0], interval[1], 65)
    return float(np.max(log_beta_kernel(grid, data, a, R)))


def beta_moments(data, a, interval, R, rtol=BETA_RTOL):
    """Normaliser and first moment of the shape posterior on ``interval``.

    Both integrands are scaled by the same ``exp(-shift)`` so only their ratio
    (and the log normaliser) is meaningful. Returns ``(log_norm, mean)``.
    """
    lo, hi = interval
    shift = _kernel_shift(data, a, interval, R)

    def f(beta):
        w = np.exp(log_beta_kernel(beta, data, a, R) - shift)
        return np.vstack([w, beta * w])

    (z0, z1), _ = integrate(f, lo, hi, rtol=rtol, atol=0.0)
    return math.log(z0) + shift, float(z1 / z0)


def posterior_beta_estimate(data, a, interval, R):
    """Posterior mean of the shape parameter given all data to date."""
    _, mean = beta_moments(data, a, interval, R)
    return mean


def beta_posterior_pdf(beta, data, a, interval, R):
    """Normalised marginal posterior density of the shape on ``interval``."""
    log_norm, _ = beta_moments(data, a, interval, R)
    beta = np.asarray(beta, dtype=float)
    inside = (beta > interval[0]) & (beta < interval[1])
    out = np.where(inside, np.exp(log_beta_kernel(np.clip(beta, *interval), data, a, R) - log_norm), 0.0)
    return float(out) if out.ndim == 0 else out


def update_beta_bar(history):
    """Running mean of every shape estimate so far, the current one included."""
    if len(history) == 0:
        raise InvalidParameterError("empty shape-estimate history")
    return math.fsum(history) / len(history)


def percentile_estimate(A, beta_bar, k, n):
    """Posterior mean of the percentile with the shape fixed at ``beta_bar``.

    ``Gamma(kn + 1 - 1/beta_bar) / Gamma(kn + 1) * A^(1/beta_bar)``.
    """
    m = k * n + 1
    if not m > 1.0 / beta_bar:
        raise InvalidParameterError(f"need k*n + 1 > 1/beta_bar, got {m} <= {1.0 / beta_bar}")
    if not A > 0:
        raise InvalidParameterError(f"accumulator must be positive, got {A}")
    return math.exp(gammaln(m - 1.0 / beta_bar) - gammaln(m) + math.log(A) / beta_bar)


def conditional_posterior_logpdf(x, A, beta, k, n):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidParameterError("percentile support is x > 0")
    m = k * n + 1
    lx = np.log(x)
    return (
        math.log(beta) - (beta * m + 1.0) * lx + m * math.log(A)
        - np.exp(math.log(A) - beta * lx) - gammaln(m)
    )


def conditional_posterior_pdf(x, A, beta, k, n):
    """Density of the percentile given the data and a fixed shape ``beta``."""
    out = np.exp(conditional_posterior_logpdf(x, A, beta, k, n))
    return float(out) if out.ndim == 0 else out


def joint_posterior_pdf(x, beta, data, a, interval, R):
    """Joint posterior density of (percentile, shape) on ``(0, inf) x interval``."""
    data = np.asarray(data, dtype=float)
    log_norm, _ = beta_moments(data, a, interval, R)
    kn = data.size
    x = np.asarray(x, dtype=float)
    beta = np.asarray(beta, dtype=float)
    log_A = log_accumulator(np.log(data), math.log(a), beta, R)
    lx = np.log(x)
    log_num = (
        (kn + 1) * np.log(beta) - beta * math.log(a) - (beta * (kn + 1) + 1.0) * lx
        + (beta - 1.0) * float(np.sum(np.log(data))) - np.exp(log_A - beta * lx)
    )
    out = np.exp(log_num - gammaln(kn + 1) - log_norm)
    out = np.where((beta > interval[0]) & (beta < interval[1]), out, 0.0)
    return float(out) if out.ndim == 0 else out


def recursive_prior_update(x_hat_prev, beta_hat_prev):
    """Prior for the next period, centred on the latest estimates.

    The shape interval becomes ``(beta_hat / 2, 1.5 * beta_hat)`` and the
    Inverse-Weibull scale is re-elicited with ``x_hat`` as the anticipated
    percentile. Returns ``(a, (beta_low, beta_high))``.
    """
    if not beta_hat_prev > 1:
        raise InvalidPriorError(
            f"shape estimate {beta_hat_prev} <= 1 leaves the prior mean undefined"
        )
    interval = (0.5 * beta_hat_prev, 1.5 * beta_hat_prev)
    b = _b_bar(*interval)
    return elicit_a(x_hat_prev, b), interval


@dataclass(frozen=True, eq=False)
class PosteriorState:
    """Everything one process stream has learned through period ``k``.

    ``prior_scale`` and ``interval`` are the prior used for period ``k``;
    ``next_prior_scale`` and ``next_interval`` are what period ``k + 1`` will use.
    At ``k = 0`` they coincide and the accumulator holds the prior term alone.
    """

    R: float
    n: int
    data: np.ndarray = field(repr=False)
    beta_hats: tuple
    estimates: tuple
    beta_bar: float
    prior_scale: float
    interval: tuple
    accumulator: float
    next_prior_scale: float
    next_interval: tuple

    @classmethod
    def initial(cls, spec, n):
        if n < 1:
            raise InvalidParameterError(f"subgroup size must be >= 1, got {n}")
        prior = prior_params(spec)
        data = np.empty(0)
        data.flags.writeable = False
        return cls(
            R=spec.R, n=n, data=data, beta_hats=(), estimates=(),
            beta_bar=prior.shape, prior_scale=prior.scale, interval=spec.interval,
            accumulator=prior.scale ** (-prior.shape),
            next_prior_scale=prior.scale, next_interval=spec.interval,
        )

    @property
    def k(self):
        return len(self.beta_hats)

    @property
    def beta_hat(self):
        return self.beta_hats[-1] if self.beta_hats else None

    @property
    def estimate(self):
        return self.estimates[-1] if self.estimates else None


def ingest_subgroup(state, subgroup):
    """Fold one subgroup into the posterior and prepare the next period's prior."""
    if subgroup.period != state.k + 1:
        raise ProtocolError(f"expected period {state.k + 1}, got {subgroup.period}")
    if len(subgroup) != state.n:
        raise ProtocolError(f"subgroup size {len(subgroup)} != chart subgroup size {state.n}")
    k = subgroup.period
    data = np.concatenate([state.data, subgroup.values])
    data.flags.writeable = False
    a = state.next_prior_scale
    interval = state.next_interval

    beta_hat = posterior_beta_estimate(data, a, interval, state.R)
    beta_hats = state.beta_hats + (beta_hat,)
    beta_bar = update_beta_bar(beta_hats)
    A = accumulator(data, a, beta_bar, state.R)
    x_hat = percentile_estimate(A, beta_bar, k, state.n)
    next_a, next_interval = recursive_prior_update(x_hat, beta_hat)

    return replace(
        state, data=data, beta_hats=beta_hats, estimates=state.estimates + (x_hat,),
        beta_bar=beta_bar, prior_scale=a, interval=interval, accumulator=A,
        next_prior_scale=next_a, next_interval=next_interval,
    )
