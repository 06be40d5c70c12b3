"""Core nonlinearity tests.

Oracles: the p=1 case has the closed form G*x/sqrt(1 + (x/vsat)^2); at
|x| = vsat the output is G*vsat*2^(-1/(2p)) for any p; the large-p limit
is the hard limiter min(G*x, G*vsat).
"""

import numpy as np
import pytest

from rappfit import (
    OperatingPoint,
    RappParams,
    am_am_curve,
    apply_to_frame,
    compression_factor,
    rapp_eval,
)


def test_zero_input_maps_to_zero():
    params = RappParams(gain=2.0, smoothness=1.3, vsat=0.9)
    assert rapp_eval(params, 0.0) == 0.0
    assert am_am_curve(params, np.array([0.0]))[0] == 0.0


def test_p1_closed_form_oracle():
    params = RappParams(gain=3.1, smoothness=1.0, vsat=0.7)
    x = np.linspace(0.0, 4.0, 200)
    expected = params.gain * x / np.sqrt(1.0 + (x / params.vsat) ** 2)
    np.testing.assert_allclose(am_am_curve(params, x), expected, rtol=1e-13)


def test_knee_value_any_p():
    rng = np.random.default_rng(11)
    for _ in range(50):
        gain = 10.0 ** rng.uniform(-1, 1)
        p = 10.0 ** rng.uniform(np.log10(0.3), np.log10(30.0))
        vsat = 10.0 ** rng.uniform(-1, 1)
        params = RappParams(gain=gain, smoothness=p, vsat=vsat)
        got = am_am_curve(params, np.array([vsat]))[0]
        expected = gain * vsat * 2.0 ** (-1.0 / (2.0 * p))
        assert got == pytest.approx(expected, rel=1e-13)


def test_large_p_approaches_hard_limiter():
    params = RappParams(gain=1.5, smoothness=50.0, vsat=1.0)
    x = np.array([0.2, 0.5, 0.9, 1.1, 2.0, 10.0])
    limiter = params.gain * np.minimum(x, params.vsat)
    got = am_am_curve(params, x)
    np.testing.assert_allclose(got, limiter, rtol=1e-4)
    # Far from the knee the agreement is much tighter.
    np.testing.assert_allclose(got[x <= 0.5], limiter[x <= 0.5], rtol=1e-12)


def test_extreme_p_no_overflow():
    params = RappParams(gain=1.0, smoothness=500.0, vsat=1.0)
    x = np.array([0.5, 1.0, 2.0, 100.0])
    got = am_am_curve(params, x)
    assert np.all(np.isfinite(got))
    np.testing.assert_allclose(got, [0.5, 2.0 ** (-1e-3), 1.0, 1.0], rtol=1e-6)


def test_strictly_increasing_and_bounded():
    params = RappParams(gain=2.0, smoothness=2.0, vsat=1.2)
    x = np.linspace(0.0, 20.0, 2000)
    y = am_am_curve(params, x)
    assert np.all(np.diff(y) > 0.0)
    assert np.all(y[1:] < params.gain * params.vsat)


def test_supremum_approached():
    params = RappParams(gain=2.0, smoothness=1.1, vsat=0.8)
    sup = params.gain * params.vsat
    # Strictly below the supremum while the correction is representable...
    y_mid = am_am_curve(params, np.array([1e3]))[0]
    assert y_mid < sup
    # ...and saturating to it (within rounding) in the deep limit.
    y_far = am_am_curve(params, np.array([1e9]))[0]
    assert y_far <= sup * (1.0 + 1e-14)
    assert y_far == pytest.approx(sup, rel=1e-12)


def test_compression_factor_range_and_identity():
    params = RappParams(gain=5.0, smoothness=1.7, vsat=1.0)
    a = np.linspace(0.0, 10.0, 500)
    factor = compression_factor(a, params)
    assert factor[0] == 1.0
    assert np.all(factor <= 1.0)
    assert np.all(factor > 0.0)
    # The factor never depends on gain.
    other = RappParams(gain=0.01, smoothness=1.7, vsat=1.0)
    np.testing.assert_array_equal(factor, compression_factor(a, other))


def test_phase_preserved_exactly():
    params = RappParams(gain=1.4, smoothness=0.9, vsat=0.6)
    rng = np.random.default_rng(3)
    frame = rng.uniform(0.05, 3.0, 300) * np.exp(1j * rng.uniform(-np.pi, np.pi, 300))
    out = apply_to_frame(params, frame)
    np.testing.assert_allclose(np.angle(out), np.angle(frame), atol=1e-12)
    np.testing.assert_allclose(np.abs(out), am_am_curve(params, np.abs(frame)), rtol=1e-13)


def test_rapp_eval_scalar_and_array():
    params = RappParams(gain=1.0, smoothness=1.0, vsat=1.0)
    scalar = rapp_eval(params, 1.0 + 1.0j)
    assert np.iscomplexobj(scalar)
    arr = rapp_eval(params, np.array([1.0 + 1.0j, 0.5]))
    assert arr.shape == (2,)
    assert arr[0] == scalar


def test_params_validation():
    for bad in (0.0, -1.0, np.nan, np.inf):
        with pytest.raises(ValueError):
            RappParams(gain=bad, smoothness=1.0, vsat=1.0)
        with pytest.raises(ValueError):
            RappParams(gain=1.0, smoothness=bad, vsat=1.0)
        with pytest.raises(ValueError):
            RappParams(gain=1.0, smoothness=1.0, vsat=bad)


def test_operating_point_validation_and_order():
    with pytest.raises(ValueError):
        OperatingPoint(-1.0, 1.0)
    with pytest.raises(ValueError):
        OperatingPoint(3.0, np.nan)
    assert OperatingPoint(2.4, 1.0) < OperatingPoint(2.4, 2.0) < OperatingPoint(3.0, 0.5)


def test_am_am_curve_rejects_bad_amplitudes():
    params = RappParams(gain=1.0, smoothness=1.0, vsat=1.0)
    with pytest.raises(ValueError):
        am_am_curve(params, np.array([-0.1]))
    with pytest.raises(ValueError):
        am_am_curve(params, np.array([np.nan]))


def test_rapp_eval_rejects_nonfinite_frame():
    params = RappParams(gain=1.0, smoothness=1.0, vsat=1.0)
    with pytest.raises(ValueError):
        rapp_eval(params, np.array([1.0, np.inf]))
