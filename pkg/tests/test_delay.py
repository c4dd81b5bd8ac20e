import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdmac.config import PolynomialDelay
from tdmac.delay import (
    CutoffError,
    cascade_delay,
    cell_delay,
    fit_polynomial,
    starved_current,
)
from tdmac.frontend import AnalogSample

volts = st.floats(0.0, 0.25875)


def samples(vs):
    return [AnalogSample(v, False, i) for i, v in enumerate(vs)]


def test_starved_current_square_law(params):
    m = params.delay_model
    assert starved_current(0.0, m, 1.0) == pytest.approx(m.k_factor * 0.36, rel=1e-14)
    assert starved_current(0.3, m, 1.0) == pytest.approx(m.k_factor * 0.09, rel=1e-12)
    assert starved_current(0.0, m, 1.0) / starved_current(0.3, m, 1.0) == pytest.approx(4.0)


def test_starved_current_cutoff(params):
    with pytest.raises(CutoffError):
        starved_current(0.6, params.delay_model, 1.0)


def test_cell_delay_anchors(params):
    assert cell_delay(0.0, params).t_d == pytest.approx(2e-9, rel=1e-14)
    assert cell_delay(0.0, params).t_d >= 2e-9
    assert cell_delay(0.3, params).t_d == pytest.approx(8e-9, rel=1e-12)


def test_cell_delay_cutoff_names_cell(params):
    with pytest.raises(CutoffError) as err:
        cell_delay(0.7, params, cell_index=3)
    assert err.value.cell_index == 3


def test_polynomial_linear_case(params):
    p = params.replace(delay_model=PolynomialDelay(t0=2e-9, alpha=20e-9))
    for v in np.linspace(0, 0.3, 7):
        assert cell_delay(v, p).t_d == pytest.approx(2e-9 + 20e-9 * v, rel=1e-15)


def test_polynomial_nonpositive_delay_rejected(params):
    p = params.replace(delay_model=PolynomialDelay(t0=1e-9, alpha=1e-9, beta=-1e-6))
    with pytest.raises(CutoffError):
        cell_delay(0.2, p)


def test_fit_fixed_point(params):
    model = PolynomialDelay(t0=2e-9, alpha=7e-9, beta=9e-9, gamma=6e-8)
    fit = fit_polynomial(params.replace(delay_model=model), 0.0, 0.26)
    assert fit.fit_residual_max < 1e-18
    for got, want in zip((fit.t0, fit.alpha, fit.beta, fit.gamma), (2e-9, 7e-9, 9e-9, 6e-8)):
        assert got == pytest.approx(want, rel=1e-6)


def test_fit_default_model_shape(params):
    fit = fit_polynomial(params, 0.0, 0.26)
    assert fit.alpha > 0
    assert fit.gamma > 0
    # the fitted delay rises across the whole range, like the physical cell
    v = np.linspace(0, 0.26, 101)
    assert np.all(fit.alpha + 2 * fit.beta * v + 3 * fit.gamma * v**2 > 0)
    # and bends upward on average: the top half gains more delay than the bottom half
    assert fit(0.26) - fit(0.13) > fit(0.13) - fit(0.0)


def test_fit_taylor_regime(params):
    # on a narrow range the cubic fit tracks the Taylor series of 1/(Vdd - v - Vtp)^2,
    # whose coefficients are all positive
    fit = fit_polynomial(params, 0.0, 0.01)
    t0 = 2e-9
    a = 0.6
    assert fit.alpha > 0 and fit.beta > 0 and fit.gamma > 0
    assert fit.alpha == pytest.approx(t0 * 2 / a, rel=1e-3)
    assert fit.beta == pytest.approx(t0 * 3 / a**2, rel=1e-2)


def test_fit_residual_shrinks_with_range(params):
    highs = [0.26, 0.2, 0.15, 0.1, 0.05, 0.02]
    resid = [fit_polynomial(params, 0.0, hi).fit_residual_max for hi in highs]
    assert all(a > b for a, b in zip(resid, resid[1:]))


def test_fit_bounds_random_points(params):
    fit = fit_polynomial(params)
    v = np.random.default_rng(0).uniform(0, params.v_full_scale, 1000)
    err = [abs(cell_delay(x, params).t_d - fit(x)) for x in v]
    assert max(err) <= fit.fit_residual_max


def test_fit_range_errors(params):
    with pytest.raises(ValueError):
        fit_polynomial(params, 0.2, 0.1)
    with pytest.raises(ValueError):
        fit_polynomial(params, 0.0, 0.2, n_nodes=3)
    with pytest.raises(CutoffError):
        fit_polynomial(params, 0.0, 0.65)


def test_cascade_all_zero(params):
    assert cascade_delay(samples([0.0] * 4), params) == pytest.approx(8e-9, rel=1e-14)


def test_cascade_single_cell(params):
    assert cascade_delay(samples([0.123]), params) == cell_delay(0.123, params).t_d


def test_cascade_linear_closed_form(params):
    p = params.replace(delay_model=PolynomialDelay(t0=2e-9, alpha=20e-9))
    rng = np.random.default_rng(5)
    for _ in range(200):
        vs = rng.uniform(0, 0.26, rng.integers(1, 9))
        expected = len(vs) * 2e-9 + 20e-9 * math.fsum(vs)
        assert cascade_delay(samples(vs), p) == pytest.approx(expected, rel=1e-14)


def test_cascade_cutoff_reports_cell(params):
    with pytest.raises(CutoffError) as err:
        cascade_delay(samples([0.1, 0.2, 0.61]), params)
    assert err.value.cell_index == 2


@settings(max_examples=100)
@given(st.lists(volts, min_size=1, max_size=8), st.lists(volts, min_size=1, max_size=8))
def test_cascade_additive(a, b):
    from tdmac import default_params

    p = default_params()
    whole = cascade_delay(samples(a + b), p)
    assert whole == pytest.approx(cascade_delay(samples(a), p) + cascade_delay(samples(b), p), rel=1e-14)


@settings(max_examples=100)
@given(st.lists(volts, min_size=1, max_size=8), st.data())
def test_cascade_monotone(vs, data):
    from tdmac import default_params

    p = default_params()
    i = data.draw(st.integers(0, len(vs) - 1))
    bump = data.draw(st.floats(1e-4, 0.02))
    raised = list(vs)
    raised[i] = min(raised[i] + bump, 0.3)
    if raised[i] > vs[i]:
        assert cascade_delay(samples(raised), p) > cascade_delay(samples(vs), p)


def test_distortion_decomposition(params):
    fit = fit_polynomial(params)
    p = params.replace(delay_model=fit.model())
    rng = np.random.default_rng(9)
    for _ in range(500):
        vs = rng.uniform(0, params.v_full_scale, 4)
        total = cascade_delay(samples(vs), p)
        dist = total - math.fsum([4 * fit.t0] + [fit.alpha * v for v in vs])
        expected = math.fsum([fit.beta * v * v for v in vs] + [fit.gamma * v * v * v for v in vs])
        assert abs(dist - expected) / total < 1e-15
