from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdlab.bubbles import (EXPONENTIAL, QUADRATIC, QUADRATIC_ONE_PLUS_B2_BETA1, bubble_derivative,
                           bubble_second_derivative, check_h_restriction, eval_bubble, make_exponential,
                           make_quadratic, moments_by_quadrature, special_beta)
from cdlab.errors import DomainError, ParameterError, ValidityError


def test_quadratic_moments():
    b = make_quadratic(1.0, 0.1)
    assert b.kind == QUADRATIC
    assert b.b1 == pytest.approx(2 / 3, rel=1e-15) and b.b2 == pytest.approx(16 / 3, rel=1e-15)
    b = make_quadratic(0.75, 0.25)
    assert b.b1 == pytest.approx(0.5, rel=1e-15) and b.b2 == pytest.approx(3.0, rel=1e-15)
    assert make_quadratic(0.28, 0.37).b1 == pytest.approx(0.186667, abs=1e-6)


def test_quadratic_one_plus_b2_general_form():
    assert make_quadratic(1.0, 0.1).one_plus_b2 == pytest.approx(QUADRATIC_ONE_PLUS_B2_BETA1, rel=1e-15)
    assert make_quadratic(0.5, 0.1).one_plus_b2 == pytest.approx(1 + 16 * 0.25 / 3, rel=1e-15)


@pytest.mark.parametrize("beta,h", [(0.0, 0.1), (-1.0, 0.1), (1.0, 0.0), (float("nan"), 0.1)])
def test_quadratic_rejects(beta, h):
    with pytest.raises(ParameterError):
        make_quadratic(beta, h)


def test_exponential_h_over_eps_two():
    b = make_exponential(0.05, 0.1)
    assert b.kind == EXPONENTIAL
    assert b.g0 == pytest.approx(math.tanh(1.0), rel=1e-15)
    assert b.l0 == pytest.approx(1.1565, abs=1e-4) and b.u0 == pytest.approx(0.1565, abs=1e-4)


def test_exponential_h_equals_eps():
    b = make_exponential(0.1, 0.1)
    expected = 1 / (2 * math.tanh(0.5)) - 1
    assert b.b1 == pytest.approx(expected, rel=1e-14)
    assert b.b2 == pytest.approx(expected, rel=1e-14)
    assert b.b1 == pytest.approx(0.0819767, abs=1e-7)


def test_exponential_saturation():
    b = make_exponential(1e-4, 0.1)
    assert b.g0 == 1.0 and b.g0_saturated
    assert b.b1 == 0.5 - 1e-4 / 0.1
    assert not make_exponential(0.1 / 36.04, 0.1).g0_saturated
    assert make_exponential(0.1 / 40, 0.1).g0 == 1.0


def test_eval_bubble():
    assert eval_bubble(make_quadratic(1.0, 0.2), 0.1) == pytest.approx(1.0, rel=1e-15)
    for spec in (make_quadratic(0.7, 0.2), make_exponential(0.05, 0.1), make_exponential(1e-6, 0.1)):
        assert eval_bubble(spec, 0.0) == 0.0
    assert abs(eval_bubble(make_exponential(0.05, 0.1), 0.1)) <= 1e-13
    with pytest.raises(DomainError):
        eval_bubble(make_quadratic(1.0, 0.1), 0.2)


def test_moments_by_quadrature_examples():
    np.testing.assert_allclose(moments_by_quadrature(make_quadratic(1.0, 0.1)), (2 / 3, 16 / 3), rtol=1e-12)
    np.testing.assert_allclose(moments_by_quadrature(make_quadratic(0.5, 1.0)), (1 / 3, 4 / 3), rtol=1e-12)
    g0 = math.tanh(1.0)
    np.testing.assert_allclose(moments_by_quadrature(make_exponential(0.05, 0.1)),
                               (1 / (2 * g0) - 0.5, 1 / g0 - 1), rtol=1e-12)


def test_quadratic_moments_random(rng):
    for _ in range(200):
        beta, h = rng.uniform(0.01, 3.0), 10 ** rng.uniform(-3, 0)
        spec = make_quadratic(beta, h)
        np.testing.assert_allclose(moments_by_quadrature(spec), (spec.b1, spec.b2), rtol=1e-11)


def test_exponential_moments_random(rng):
    for _ in range(200):
        h = 10 ** rng.uniform(-3, 0)
        eps = h / 10 ** rng.uniform(-1, math.log10(50))
        spec = make_exponential(eps, h)
        g0 = math.tanh(h / (2 * eps))
        np.testing.assert_allclose(moments_by_quadrature(spec),
                                   (1 / (2 * g0) - eps / h, h / (2 * eps * g0) - 1), rtol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-8, 10.0), st.floats(1e-4, 1.0))
def test_exponential_identities(eps, h):
    b = make_exponential(eps, h)
    assert 0 < b.g0 <= 1.0
    assert eps + h * b.b1 == pytest.approx(h / (2 * b.g0), rel=1e-13)
    assert abs(b.l0 - b.u0 - 1.0) <= 1e-13 * b.l0
    assert abs(-b.l0 + 1 / b.g0 - b.u0) <= 1e-13 * b.l0


def test_exponential_ode_residual():
    for eps, h in [(0.05, 0.1), (0.1, 0.1), (0.01, 0.05), (1.0, 0.25)]:
        spec = make_exponential(eps, h)
        x = np.linspace(0, h, 52)[1:-1]
        res = -eps * bubble_second_derivative(spec, x) - bubble_derivative(spec, x) - 1 / h
        assert np.max(np.abs(res)) <= 1e-8 / h


def test_special_beta():
    assert special_beta(0.01, 0.1) == pytest.approx(0.6, rel=1e-15)
    assert special_beta(1e-300, 0.5) == 0.75
    with pytest.raises(ValidityError) as info:
        special_beta(0.03, 0.05)
    assert info.value.threshold == pytest.approx(0.078)


def test_h_restriction():
    assert check_h_restriction(0.01, 0.1, 1 / 3)
    assert not check_h_restriction(0.01, 0.1, 2 * 0.28 / 3)
    for eps in (1e-6, 1e-3, 0.05, 0.5, 5.0):
        for h in (1e-3, 0.01, 0.1, 0.5):
            assert check_h_restriction(eps, h, make_exponential(eps, h).b1)
