"""
Distribution primitives: Weibull in scale and percentile form, Inverse Weibull,
standard Gamma and the symmetric Inverted Beta (beta prime), plus log-gamma.

The Gamma and Beta CDFs come from ``scipy.special``; their inverses are
computed here by a bracketed Newton iteration that falls back to bisection
whenever a Newton step leaves the bracket.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import InvalidParameterError, NoConvergenceError


def _check_reliability(R):
    if not 0.0 < R < 1.0:
        raise InvalidParameterError(f"reliability level must lie in (0, 1), got {R}")


def _check_positive(name, value):
    if not value > 0.0 or not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be positive and finite, got {value}")


def _check_probability(p):
    if not 0.0 < p < 1.0:
        raise InvalidParameterError(f"probability must lie in (0, 1), got {p}")


@dataclass(frozen=True)
class WeibullParams:
    """Weibull in scale/shape form, ``F(x) = 1 - exp[-(x/scale)^shape]``."""

    scale: float
    shape: float

    def __post_init__(self):
        _check_positive("scale", self.scale)
        _check_positive("shape", self.shape)


@dataclass(frozen=True)
class PercentileParams:
    """Weibull in percentile form: ``percentile`` is exceeded with probability ``R``."""

    percentile: float
    shape: float
    R: float

    def __post_init__(self):
        _check_positive("percentile", self.percentile)
        _check_positive("shape", self.shape)
        _check_reliability(self.R)

    @classmethod
    def from_weibull(cls, w, R):
        return cls(weibull_percentile(w, R), w.shape, R)


@dataclass(frozen=True)
class InverseWeibullParams:
    scale: float
    shape: float

    def __post_init__(self):
        _check_positive("scale", self.scale)
        _check_positive("shape", self.shape)


def weibull_cdf(x, p):
    """CDF of the percentile-parameterised Weibull, ``1 - exp[-ln(1/R) (x/x_R)^beta]``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidParameterError("Weibull support is x >= 0")
    out = -np.expm1(-math.log(1.0 / p.R) * (x / p.percentile) ** p.shape)
    return float(out) if out.ndim == 0 else out


def weibull_percentile(w, R):
    """Value exceeded with probability ``R``: ``scale * ln(1/R)^(1/shape)``."""
    _check_reliability(R)
    return w.scale * math.log(1.0 / R) ** (1.0 / w.shape)


def weibull_scale_from_percentile(percentile, shape, R):
    """Inverse of :func:`weibull_percentile` with respect to the scale."""
    _check_reliability(R)
    return percentile / math.log(1.0 / R) ** (1.0 / shape)


def inverse_weibull_logpdf(x, p):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidParameterError("Inverse Weibull support is x > 0")
    b = p.shape
    lax = np.log(p.scale * x)
    return np.log(p.scale * b) - (b + 1.0) * lax - np.exp(-b * lax)


def inverse_weibull_pdf(x, p):
    """Density ``a b (a x)^-(b+1) exp[-(a x)^-b]`` with ``a = p.scale``, ``b = p.shape``."""
    out = np.exp(inverse_weibull_logpdf(x, p))
    return float(out) if out.ndim == 0 else out


def inverse_weibull_mean(p):
    """``Gamma(1 - 1/b) / a``; finite only for ``b > 1``."""
    if not p.shape > 1.0:
        raise InvalidParameterError(f"mean requires shape > 1, got {p.shape}")
    return math.exp(log_gamma(1.0 - 1.0 / p.shape)) / p.scale


def log_gamma(z):
    """Natural log of the Gamma function for ``z > 0``."""
    if not z > 0.0:
        raise InvalidParameterError(f"log_gamma requires z > 0, got {z}")
    return float(special.gammaln(z))


# --- standard Gamma -------------------------------------------------------


def std_gamma_cdf(z, shape):
    return special.gammainc(shape, z)


def std_gamma_pdf(z, shape):
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(special.xlogy(shape - 1.0, z) - z - special.gammaln(shape))
    return float(out) if out.ndim == 0 else out


def _newton_bisect(cdf, pdf, p, lo, hi, x0, xtol=1e-15, maxiter=200):
    """Solve ``cdf(x) = p`` on a bracket ``[lo, hi]`` with ``cdf(lo) <= p <= cdf(hi)``."""
    x = min(max(x0, lo), hi)
    for _ in range(maxiter):
        resid = cdf(x) - p
        if resid == 0.0:
            return x
        if resid < 0.0:
            lo = x
        else:
            hi = x
        d = pdf(x)
        step_ok = False
        if d > 0.0 and math.isfinite(d):
            x_new = x - resid / d
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= xtol * max(abs(x_new), 1e-300):
            return x_new
        x = x_new
        if hi - lo <= xtol * hi:
            return x
    raise NoConvergenceError(f"quantile inversion for p={p} did not converge")


@lru_cache(maxsize=4096)
def std_gamma_quantile(p, shape):
    """``z`` such that the unit-scale Gamma(shape) CDF equals ``p``."""
    _check_probability(p)
    _check_positive("shape", shape)
    # Wilson-Hilferty start
    zn = special.ndtri(p)
    c = 1.0 / (9.0 * shape)
    x0 = shape * (1.0 - c + zn * math.sqrt(c)) ** 3
    if not x0 > 0.0:
        x0 = (p * math.exp(special.gammaln(shape + 1.0))) ** (1.0 / shape)
    hi = max(x0, shape, 1.0)
    while std_gamma_cdf(hi, shape) < p:
        hi *= 2.0
    if p > 0.5:
        # solve on the upper tail, where 1 - p is exact and well conditioned
        return _newton_bisect(
            lambda z: -special.gammaincc(shape, z),
            lambda z: std_gamma_pdf(z, shape),
            -(1.0 - p), 0.0, hi, x0,
        )
    return _newton_bisect(
        lambda z: std_gamma_cdf(z, shape),
        lambda z: std_gamma_pdf(z, shape),
        p, 0.0, hi, x0,
    )


# --- symmetric Inverted Beta ---------------------------------------------


def _beta_cdf(q, shape):
    return special.betainc(shape, shape, q)


def _beta_pdf(q, shape):
    if q <= 0.0 or q >= 1.0:
        return 0.0
    logb = 2.0 * special.gammaln(shape) - special.gammaln(2.0 * shape)
    return math.exp((shape - 1.0) * (math.log(q) + math.log1p(-q)) - logb)


def inverted_beta_cdf(v, shape):
    """CDF of ``v`` when ``v / (1 + v)`` is Beta(shape, shape)."""
    v = np.asarray(v, dtype=float)
    out = special.betainc(shape, shape, v / (1.0 + v))
    return float(out) if out.ndim == 0 else out


def inverted_beta_logpdf(v, shape):
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise InvalidParameterError("Inverted Beta support is v > 0")
    _check_positive("shape", shape)
    lognorm = special.gammaln(2.0 * shape) - 2.0 * special.gammaln(shape)
    return lognorm + (shape - 1.0) * np.log(v) - 2.0 * shape * np.log1p(v)


def inverted_beta_pdf(v, shape):
    """``Gamma(2s)/Gamma(s)^2 * v^(s-1) / (1+v)^(2s)``."""
    out = np.exp(inverted_beta_logpdf(v, shape))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def inverted_beta_quantile(p, shape):
    """Quantile of the symmetric Inverted Beta with both parameters equal to ``shape``."""
    _check_probability(p)
    _check_positive("shape", shape)
    if p == 0.5:
        return 1.0
    if p > 0.5:
        # exact reciprocal symmetry v_p * v_(1-p) = 1
        return 1.0 / inverted_beta_quantile(1.0 - p, shape)
    # normal approximation to Beta(s, s) as a start
    sd = 0.5 / math.sqrt(2.0 * shape + 1.0)
    q0 = min(max(0.5 + sd * special.ndtri(p), 1e-12), 1.0 - 1e-12)
    q = _newton_bisect(
        lambda q: _beta_cdf(q, shape),
        lambda q: _beta_pdf(q, shape),
        p, 0.0, 1.0, q0,
    )
    return q / (1.0 - q)
