import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsoahead.channel import (
    BandCoefficients,
    DielectricParams,
    VisibilityParams,
    fso_observed_attenuation,
    itu_cloud_attenuation,
    itu_specific_attenuation,
    kim_attenuation_coefficient,
    slant_attenuation,
)


def test_slant_attenuation_examples():
    assert slant_attenuation(0.0, 0.7, 300.0) == 0.0
    assert slant_attenuation(0.3, math.pi / 2, 300.0) == pytest.approx(90.0)
    assert slant_attenuation(0.2, math.radians(30), 3.0) == pytest.approx(1.2)


def test_slant_attenuation_rejects_horizon():
    with pytest.raises(ValueError):
        slant_attenuation(0.1, 0.0, 3.0)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(1e-3, math.pi / 2), st.floats(1e-3, math.pi / 2))
def test_slant_attenuation_monotone(t1, t2, e1, e2):
    lo_t, hi_t = sorted((t1, t2))
    lo_e, hi_e = sorted((e1, e2))
    assert slant_attenuation(lo_t, e1, 3.0) <= slant_attenuation(hi_t, e1, 3.0)
    assert slant_attenuation(t1, hi_e, 3.0) <= slant_attenuation(t1, lo_e, 3.0) * (1 + 1e-12)


@given(st.floats(0, 5), st.floats(1e-3, math.pi / 2))
def test_fso_rf_ratio_is_100(thickness, elevation):
    band = BandCoefficients()
    rf = slant_attenuation(thickness, elevation, band.rf_specific_attenuation)
    fso = slant_attenuation(thickness, elevation, band.fso_specific_attenuation)
    assert fso == pytest.approx(100.0 * rf, rel=1e-12)


@pytest.mark.parametrize("raw,seen", [(90.0, 90.0), (150.0, 100.0), (100.0, 100.0)])
def test_detector_cap(raw, seen):
    assert fso_observed_attenuation(raw) == seen


def test_detector_cap_vectorised():
    np.testing.assert_array_equal(fso_observed_attenuation(np.array([0.0, 120.0])), [0.0, 100.0])


def test_itu_specific_attenuation_example():
    # eta = 7/10 = 0.7; k_l = 81.9 / (10 * 1.49)
    assert itu_specific_attenuation(DielectricParams(100.0, 5.0, 10.0)) == pytest.approx(5.4966, abs=1e-4)
    assert itu_specific_attenuation(DielectricParams(0.0, 5.0, 10.0)) == 0.0


@given(st.floats(0.1, 200), st.floats(1, 80), st.floats(0.1, 80))
def test_itu_specific_attenuation_linear_in_f(f, e1, e2):
    a = itu_specific_attenuation(DielectricParams(f, e1, e2))
    b = itu_specific_attenuation(DielectricParams(2 * f, e1, e2))
    assert b == pytest.approx(2 * a, rel=1e-12)


def test_itu_specific_attenuation_zero_imaginary_part():
    with pytest.raises(ZeroDivisionError):
        itu_specific_attenuation(DielectricParams(10.0, 5.0, 0.0))


def test_itu_cloud_attenuation_examples():
    assert itu_cloud_attenuation(0.5, 2.0, math.pi / 2) == pytest.approx(1.0)
    assert itu_cloud_attenuation(0.5, 2.0, math.radians(30)) == pytest.approx(2.0)
    assert itu_cloud_attenuation(0.0, 2.0, 0.3) == 0.0
    with pytest.raises(ValueError):
        itu_cloud_attenuation(0.5, 2.0, 0.0)


@given(st.floats(0, 3), st.floats(0, 10), st.floats(0.01, math.pi / 2))
def test_itu_cloud_attenuation_sine_product_constant(L, k, theta):
    assert itu_cloud_attenuation(L, k, theta) * math.sin(theta) == pytest.approx(L * k, rel=1e-12, abs=1e-300)


def test_kim_examples():
    assert kim_attenuation_coefficient(VisibilityParams(10.0, 550.0)) == pytest.approx(0.391, rel=1e-12)
    assert kim_attenuation_coefficient(VisibilityParams(60.0, 1550.0)) == pytest.approx(0.01242, abs=1e-4)
    assert kim_attenuation_coefficient(VisibilityParams(1.0, 1550.0)) == pytest.approx(2.133, abs=1e-3)


def test_kim_branch_boundary_six_km_uses_average_branch():
    ratio = 1550.0 / 550.0
    assert kim_attenuation_coefficient(VisibilityParams(6.0, 1550.0)) == pytest.approx(3.91 / 6 * ratio**-1.3)


@given(st.floats(0.05, 200), st.floats(0.05, 200), st.floats(550, 2000))
def test_kim_strictly_decreasing_within_branch(v1, v2, lam):
    def branch(v):
        return 2 if v > 50 else (1 if v >= 6 else 0)

    lo, hi = sorted((v1, v2))
    if hi - lo < 1e-6 or branch(lo) != branch(hi):
        return
    assert kim_attenuation_coefficient(VisibilityParams(hi, lam)) < kim_attenuation_coefficient(VisibilityParams(lo, lam))


def test_kim_continuous_inside_branches():
    for v in (2.0, 20.0, 80.0):
        a = kim_attenuation_coefficient(VisibilityParams(v, 1550.0))
        b = kim_attenuation_coefficient(VisibilityParams(v + 1e-9, 1550.0))
        assert abs(a - b) < 1e-7
