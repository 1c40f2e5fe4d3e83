from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import roots_laguerre
from scipy.stats import norm

from orisqkd.errors import NonConvergence, OrderTooLarge
from orisqkd.numerics import (
    MAX_LAGUERRE_ORDER,
    erf_accurate,
    gauss_laguerre,
    integrate_adaptive,
    lognormal_expectation,
    lognormal_pdf,
)

mpmath.mp.dps = 40


# ---- erf


@pytest.mark.parametrize("x", [0.0, 1e-12, 1e-6, 0.1, 0.5, 1.0, 2.0, 3.5, 5.0, 6.0])
def test_erf_matches_high_precision_reference(x):
    ref = float(mpmath.erf(mpmath.mpf(x)))
    assert erf_accurate(x) == pytest.approx(ref, rel=1e-14, abs=1e-300)


def test_erf_zero_and_saturation():
    assert erf_accurate(0.0) == 0.0
    assert erf_accurate(7.0) == 1.0
    assert isinstance(erf_accurate(0.3), float)


def test_erf_vectorises():
    x = np.linspace(-3, 3, 7)
    out = erf_accurate(x)
    assert out.shape == (7,)
    assert np.all(np.diff(out) > 0)


@given(st.floats(-30, 30, allow_nan=False))
def test_erf_is_exactly_odd(x):
    assert erf_accurate(-x) == -erf_accurate(x)


@given(st.floats(-30, 30, allow_nan=False))
def test_erf_bounded(x):
    assert -1.0 <= erf_accurate(x) <= 1.0


# ---- adaptive quadrature


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (math.sin, 0.0, math.pi, 2.0),
        (math.exp, 0.0, 1.0, math.e - 1.0),
        (lambda x: x ** (5.0 / 6.0), 0.0, 1.0, 6.0 / 11.0),
        (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, math.pi / 4.0),
    ],
)
def test_integrate_adaptive_closed_forms(f, a, b, exact):
    assert integrate_adaptive(f, a, b, 1e-10) == pytest.approx(exact, rel=1e-10)


def test_integrate_adaptive_rejects_bad_input():
    with pytest.raises(ValueError):
        integrate_adaptive(math.sin, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_adaptive(math.sin, 0.0, 1.0, rel_tol=0.0)
    with pytest.raises(ValueError):
        integrate_adaptive(math.sin, 0.0, 1.0, rel_tol=0.5)


def test_integrate_adaptive_reports_non_convergence():
    # wildly oscillating integrand with a tiny subdivision budget
    with pytest.raises(NonConvergence):
        integrate_adaptive(lambda x: math.sin(1.0 / x) / x, 1e-6, 1.0, 1e-12, limit=5)


def test_integrate_adaptive_uses_breakpoints():
    step = lambda x: 1.0 if x > 0.3 else 0.0  # noqa: E731
    assert integrate_adaptive(step, 0.0, 1.0, 1e-10, breakpoints=[0.3]) == pytest.approx(0.7, rel=1e-12)


# ---- Gauss-Laguerre


@pytest.mark.parametrize("order", [2, 5, 10])
def test_gauss_laguerre_exact_for_polynomials(order):
    rule = gauss_laguerre(order)
    for k in range(2 * order):
        approx = float(np.sum(rule.weights * rule.nodes**k))
        assert approx == pytest.approx(math.factorial(k), rel=1e-11), k


@pytest.mark.parametrize("order", [1, 3, 20, 60, 100])
def test_gauss_laguerre_matches_reference_rule(order):
    x_ref, w_ref = roots_laguerre(order)
    rule = gauss_laguerre(order)
    np.testing.assert_allclose(rule.nodes, x_ref, rtol=1e-12)
    keep = w_ref > 1e-250
    np.testing.assert_allclose(rule.weights[keep], w_ref[keep], rtol=1e-9)


def test_gauss_laguerre_order_180_is_well_formed():
    rule = gauss_laguerre(180)
    assert rule.nodes.shape == (180,)
    assert np.all(np.isfinite(rule.nodes)) and np.all(np.isfinite(rule.scaled_weights))
    assert np.all(rule.scaled_weights > 0)
    assert np.all(np.diff(rule.nodes) > 0) and rule.nodes[0] > 0
    assert abs(rule.integrate(lambda x: np.exp(-x)) - 1.0) < 1e-10


def test_gauss_laguerre_smallest_weights_against_mpmath():
    # direct evaluation of w = x / ((G+1) L_{G+1}(x))^2 at the polished nodes
    rule = gauss_laguerre(180)
    for i in (0, 1, 90, 179):
        x = mpmath.mpf(rule.nodes[i])
        ref = x / ((181 * mpmath.laguerre(181, 0, x)) ** 2) * mpmath.exp(x)
        assert rule.scaled_weights[i] == pytest.approx(float(ref), rel=1e-12)


def test_gauss_laguerre_nodes_interlace():
    a = gauss_laguerre(30).nodes
    b = gauss_laguerre(31).nodes
    assert np.all(b[:-1] < a) and np.all(a < b[1:])


def test_gauss_laguerre_rule_is_immutable():
    rule = gauss_laguerre(8)
    with pytest.raises(ValueError):
        rule.nodes[0] = 1.0


def test_gauss_laguerre_order_limits():
    gauss_laguerre(MAX_LAGUERRE_ORDER)
    with pytest.raises(OrderTooLarge):
        gauss_laguerre(MAX_LAGUERRE_ORDER + 1)
    with pytest.raises(ValueError):
        gauss_laguerre(0)


# ---- log-normal helpers


@pytest.mark.parametrize("s2", [1e-4, 0.04, 0.5, 2.0])
def test_lognormal_pdf_normalised_with_unit_mean(s2):
    f = lambda x: lognormal_pdf(x, s2)  # noqa: E731
    s = math.sqrt(s2)
    lo, hi = math.exp(-s2 / 2 - 12 * s), math.exp(-s2 / 2 + 12 * s)
    pts = [math.exp(-s2 / 2 + k * s) for k in range(-8, 9)]
    assert integrate_adaptive(f, lo, hi, 1e-9, breakpoints=pts) == pytest.approx(1.0, rel=1e-8)
    assert integrate_adaptive(lambda x: x * f(x), lo, hi, 1e-9, breakpoints=pts) == pytest.approx(1.0, rel=1e-8)


def test_lognormal_pdf_zero_off_support():
    assert lognormal_pdf(0.0, 0.3) == 0.0
    assert lognormal_pdf(-1.0, 0.3) == 0.0


@pytest.mark.parametrize("s2", [0.01, 0.3, 1.0])
def test_lognormal_expectation_moments(s2):
    assert lognormal_expectation(lambda i: i, s2) == pytest.approx(1.0, rel=1e-7)
    assert lognormal_expectation(lambda i: i * i, s2) == pytest.approx(math.exp(s2), rel=1e-7)


@pytest.mark.parametrize("s2, clamp", [(0.3, 1.2), (1.0, 0.5), (0.04, 1.0)])
def test_lognormal_expectation_truncated_mean(s2, clamp):
    # E[I; I < K] for a mean-one log-normal
    s = math.sqrt(s2)
    exact = norm.cdf((math.log(clamp) - s2 / 2) / s)
    assert lognormal_expectation(lambda i: i, s2, upper_clamp=clamp) == pytest.approx(exact, rel=1e-7)


def test_lognormal_expectation_rejects_degenerate_variance():
    with pytest.raises(ValueError):
        lognormal_expectation(lambda i: i, 0.0)
