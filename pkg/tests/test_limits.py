import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from weibull_ratio_chart.bayes import (
    PosteriorState,
    PriorSpec,
    Subgroup,
    beta_posterior_pdf,
    conditional_posterior_pdf,
    ingest_subgroup,
)
from weibull_ratio_chart.errors import InvalidParameterError
from weibull_ratio_chart.limits import (
    LimitPair,
    RatioContext,
    beta_chart_bands,
    percentile_limits,
    prior_ratio_limits,
    ratio_limits,
    ratio_pdf,
)

ALPHA = 0.0027


def _quad(f, lo, hi):
    return sp_integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=400)[0]


@pytest.mark.parametrize("A, beta, k, n", [(900.0, 5.0, 1, 4), (3.3e4, 4.1, 10, 4), (55.0, 2.2, 22, 2)])
def test_percentile_limit_coverage(A, beta, k, n):
    lim = percentile_limits(A, beta, k, n, ALPHA)
    mass = _quad(lambda x: conditional_posterior_pdf(x, A, beta, k, n), lim.lcl, lim.ucl)
    assert mass == pytest.approx(1 - ALPHA, abs=1e-9)


@given(st.floats(1.0, 1e5), st.floats(1.1, 10), st.integers(0, 40), st.integers(1, 5), st.floats(0.001, 0.2))
def test_percentile_limits_bracket_estimate_region(A, beta, k, n, alpha):
    lim = percentile_limits(A, beta, k, n, alpha)
    assert 0 < lim.lcl < lim.ucl
    wider = percentile_limits(A, beta, k, n, alpha / 2)
    assert wider.lcl <= lim.lcl and lim.ucl <= wider.ucl


def test_ratio_density_matches_convolution_oracle():
    """Density of x / y for independent conditional posteriors, by direct integration."""
    A, B, beta, k, n = 700.0, 2100.0, 4.5, 3, 2
    for u in (0.5, 0.7, 0.76, 0.9, 1.2):
        ref = _quad(
            lambda y: conditional_posterior_pdf(u * y, A, beta, k, n)
            * conditional_posterior_pdf(y, B, beta, k, n) * y,
            0, np.inf,
        )
        assert ratio_pdf(u, B / A, beta, k, n) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("C, beta, k, n", [(3.9, 5.0, 0, 4), (4.2, 4.6, 10, 4), (1.0, 2.3, 22, 2)])
def test_ratio_density_normalises_and_covers(C, beta, k, n):
    ctx = RatioContext(A=1.0, B=C, beta_bar=beta, k=k, n=n)
    lim = ratio_limits(ctx, ALPHA)
    f = lambda u: ratio_pdf(u, C, beta, k, n)  # noqa: E731
    mode = C ** (-1 / beta)
    total = _quad(f, 0, mode) + _quad(f, mode, np.inf)
    assert total == pytest.approx(1.0, abs=1e-9)
    assert _quad(f, lim.lcl, lim.ucl) == pytest.approx(1 - ALPHA, abs=1e-9)


@given(st.floats(1e-3, 1e3), st.floats(0.5, 12), st.integers(0, 50), st.integers(1, 5))
def test_unit_c_gives_reciprocal_limits(A, beta, k, n):
    lim = ratio_limits(RatioContext(A, A, beta, k, n), ALPHA)
    assert lim.lcl * lim.ucl == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(1.1, 10))
def test_prior_ratio_limits_swap(a_x, a_y, beta):
    fwd = prior_ratio_limits(a_x, a_y, beta, ALPHA)
    back = prior_ratio_limits(a_y, a_x, beta, ALPHA)
    assert fwd.lcl * back.ucl == pytest.approx(1.0, rel=1e-12)
    assert fwd.ucl * back.lcl == pytest.approx(1.0, rel=1e-12)


def _state(spec, subgroups):
    s = PosteriorState.initial(spec, len(subgroups[0]))
    for k, g in enumerate(subgroups, start=1):
        s = ingest_subgroup(s, Subgroup(g, k))
    return s


def test_from_states_equal_shapes_is_plain_ratio():
    spec = PriorSpec(2.9, 2.5, 7.5, 0.95)
    sx = _state(spec, [[3.7, 3.3, 4.9, 4.3]])
    ctx = RatioContext.from_states(sx, sx)
    assert ctx.A == sx.accumulator and ctx.C == 1.0


def test_from_states_centres_on_estimate_ratio():
    sx = _state(PriorSpec(2.9, 2.5, 7.5, 0.95), [[3.7, 3.3, 4.9, 4.3], [4.0, 3.1, 4.4, 3.6]])
    sy = _state(PriorSpec(3.8, 2.5, 7.5, 0.95), [[6.6, 4.5, 5.8, 6.5], [5.1, 6.0, 7.2, 5.5]])
    assert sx.beta_bar != sy.beta_bar
    ctx = RatioContext.from_states(sx, sy)
    assert ctx.beta_bar == pytest.approx(0.5 * (sx.beta_bar + sy.beta_bar))
    m = sx.k * sx.n + 1
    # the rescaled accumulators keep each process's (A/m)^(1/beta_bar) scale
    assert (ctx.A / m) ** (1 / ctx.beta_bar) == pytest.approx((sx.accumulator / m) ** (1 / sx.beta_bar))
    assert (ctx.B / m) ** (1 / ctx.beta_bar) == pytest.approx((sy.accumulator / m) ** (1 / sy.beta_bar))


def test_from_states_period_mismatch():
    spec = PriorSpec(2.9, 2.5, 7.5, 0.95)
    with pytest.raises(InvalidParameterError):
        RatioContext.from_states(_state(spec, [[1, 2]]), PosteriorState.initial(spec, 2))


def test_beta_bands_cover_posterior_mass():
    spec = PriorSpec(2.9, 2.5, 7.5, 0.95)
    s = _state(spec, [[3.7, 3.3, 4.9, 4.3], [4.0, 3.1, 4.4, 3.6]])
    bands = beta_chart_bands(s, ALPHA)
    lo, hi = s.interval
    assert lo < bands.lcl < s.beta_hat < bands.ucl < hi
    f = lambda b: beta_posterior_pdf(b, s.data, s.prior_scale, s.interval, s.R)  # noqa: E731
    assert _quad(f, lo, bands.lcl) == pytest.approx(ALPHA / 2, abs=1e-9)
    assert _quad(f, bands.ucl, hi) == pytest.approx(ALPHA / 2, abs=1e-9)


@pytest.mark.parametrize("lcl, ucl", [(2.0, 1.0), (0.0, 1.0), (1.0, 1.0)])
def test_limit_pair_validation(lcl, ucl):
    with pytest.raises(InvalidParameterError):
        LimitPair(lcl, ucl, ALPHA, 1)


def test_limit_pair_contains_boundaries():
    lim = LimitPair(1.0, 2.0, ALPHA, 3)
    assert lim.contains(1.0) and lim.contains(2.0) and not lim.contains(2.0 + 1e-15)
    assert isinstance(LimitPair(np.float64(1), np.float64(2), ALPHA, 1).lcl, float)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
def test_alpha_validation(alpha):
    with pytest.raises(InvalidParameterError):
        percentile_limits(10.0, 2.0, 1, 2, alpha)
    with pytest.raises(InvalidParameterError):
        ratio_limits(RatioContext(1.0, 1.0, 2.0, 1, 2), alpha)


def test_ratio_pdf_domain():
    with pytest.raises(InvalidParameterError):
        ratio_pdf(0.0, 1.0, 2.0, 1, 2)
    assert math.isfinite(ratio_pdf(1e-3, 1.0, 2.0, 1, 2))
