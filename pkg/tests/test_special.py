import math

import mpmath
import numpy as np
import pytest

from airyphase.errors import DomainError
from airyphase.oracle import airy_ai_reference
from airyphase.special import LogValue, airy_ai, airy_ai_scaled, log_airy_ai

AI0 = 0.35502805388781724


def test_known_values():
    assert airy_ai(0.0) == pytest.approx(AI0, abs=1e-16)
    assert airy_ai(-1.0) == pytest.approx(0.53556088329235211, abs=1e-15)


def test_scalar_and_array_shapes():
    assert isinstance(airy_ai(1.0), float)
    out = airy_ai(np.zeros((2, 3)))
    assert out.shape == (2, 3)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(DomainError):
        airy_ai(bad)
    with pytest.raises(DomainError):
        log_airy_ai(bad)


def test_oracle_agreement_on_wide_range():
    x = np.linspace(-30, 30, 601)
    ref = np.array([float(airy_ai_reference(v, 20)) for v in x])
    assert np.max(np.abs(airy_ai(x) - ref)) < 1e-13


def test_relative_accuracy_positive_side():
    x = np.linspace(0.0, 30.0, 301)
    ref = np.array([float(mpmath.airyai(v)) for v in x])
    assert np.max(np.abs(airy_ai(x) / ref - 1)) < 1e-12


def test_large_positive_underflows_gracefully():
    assert airy_ai(200.0) == 0.0
    v = airy_ai(np.array([60.0, 80.0, 105.0]))
    assert np.all(v >= 0) and np.all(np.isfinite(v))


def test_positive_and_decreasing_on_right_half_line():
    x = np.linspace(0.0, 25.0, 5001)
    y = airy_ai(x)
    assert np.all(y > 0)
    assert np.all(np.diff(y) < 0)


def test_ode_residual():
    # step balances the h^2 truncation against rounding in the second difference
    h = 2e-4
    x = np.linspace(-10, 5, 1501)
    second = (airy_ai(x + h) - 2 * airy_ai(x) + airy_ai(x - h)) / h**2
    assert np.max(np.abs(second - x * airy_ai(x))) < 1e-6


def test_scaled_values():
    assert airy_ai_scaled(0.0) == pytest.approx(AI0, abs=1e-16)
    assert airy_ai_scaled(1.0) == pytest.approx(airy_ai(1.0) * math.exp(2 / 3), rel=1e-14)
    v = airy_ai_scaled(100.0)
    assert 0.05 < v < 0.35
    ref = float(mpmath.airyai(100) * mpmath.exp(mpmath.mpf(2) / 3 * 1000))
    assert v == pytest.approx(ref, rel=1e-13)


def test_scaled_bounded_on_half_line():
    v = airy_ai_scaled(np.logspace(-3, 6, 200))
    assert np.all(v > 0) and np.all(v < AI0 + 1e-15)


def test_scaled_rejects_negative():
    with pytest.raises(DomainError):
        airy_ai_scaled(-0.5)


def test_log_airy_zero_and_large():
    lv = log_airy_ai(0.0)
    assert lv.sign == 1 and lv.ln_mag == pytest.approx(math.log(AI0), rel=1e-15)
    lv = log_airy_ai(400.0)
    assert lv.sign == 1 and math.isfinite(lv.ln_mag)
    ref = float(mpmath.log(mpmath.airyai(400)))
    assert lv.ln_mag == pytest.approx(ref, rel=1e-13)


def test_log_airy_relative_accuracy():
    x = np.concatenate([np.linspace(-50, 0, 211)[:-1], np.linspace(0.1, 500, 200)])
    lv = log_airy_ai(x)
    ref = np.array([float(mpmath.log(abs(mpmath.airyai(v)))) for v in x])
    assert np.max(np.abs(lv.ln_mag - ref) / np.maximum(np.abs(ref), 1e-300)) < 1e-10


def test_log_airy_sign_flip_at_first_zero():
    a1 = -2.338107410459767
    assert log_airy_ai(a1 + 1e-6).sign == 1
    assert log_airy_ai(a1 - 1e-6).sign == -1


def test_log_consistent_with_direct():
    x = np.linspace(-10, 10, 2001)
    lv = log_airy_ai(x)
    assert np.max(np.abs(airy_ai(x) - lv.value)) < 1e-12


def test_logvalue_invariants():
    lv = LogValue.from_value(np.array([-2.0, 0.0, 3.0]))
    assert list(lv.sign) == [-1, 0, 1]
    assert lv.ln_mag[1] == -np.inf
    np.testing.assert_allclose(lv.value, [-2.0, 0.0, 3.0])
    prod = LogValue.from_value(-2.0) * LogValue.from_value(-4.0)
    assert prod.sign == 1 and prod.value == pytest.approx(8.0)


def test_reference_values_and_domain():
    with mpmath.workdps(30):
        exact = mpmath.mpf(3) ** (-mpmath.mpf(2) / 3) / mpmath.gamma(mpmath.mpf(2) / 3)
        assert abs(airy_ai_reference(0.0) - exact) < mpmath.mpf(10) ** -25
    assert abs(float(airy_ai_reference(5.0)) - airy_ai(5.0)) < 1e-13
    with pytest.raises(DomainError):
        airy_ai_reference(31.0)
    with pytest.raises(DomainError):
        airy_ai_reference(1.0, target_digits=30)


def test_reference_bound_and_zero_bracket():
    val, bound = airy_ai_reference(-3.0, 20, return_bound=True)
    assert bound < 1e-20
    assert airy_ai_reference(-2.33) > 0 > airy_ai_reference(-2.35)
