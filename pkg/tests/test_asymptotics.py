import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpest import ChirpComponent, InvalidArgumentError, asymptotic_variances, sigma, sigma_inverse
from chirpest.asymptotics import AVAR_SCALE, THEOREM_SCALE, rate_scaling

ONE = ChirpComponent(2.93, 1.91, 2.5, 0.1)


def test_sigma_unit_cosine():
    expected = [[1, 0, 0, 0], [0, 9, 36, -30], [0, 36, 192, -180], [0, -30, -180, 180]]
    np.testing.assert_allclose(sigma(1, 0), expected, atol=1e-12)


def test_sigma_unit_sine_swaps_amplitude_entries():
    s = sigma(0, 1)
    assert s[0, 0] == pytest.approx(9)
    assert s[1, 1] == pytest.approx(1)


def test_sigma_inverse_unit_cosine():
    expected = [[1, 0, 0, 0], [0, 1, -1 / 2, -1 / 3], [0, -1 / 2, 1 / 3, 1 / 4], [0, -1 / 3, 1 / 4, 1 / 5]]
    np.testing.assert_allclose(sigma_inverse(1, 0), expected, atol=1e-15)


def test_zero_amplitude_rejected():
    with pytest.raises(InvalidArgumentError):
        sigma(0, 0)
    with pytest.raises(InvalidArgumentError):
        sigma_inverse(0.0, 0.0)


def test_table_avar_cell():
    r = asymptotic_variances(ONE, 1.25, 0.1, 250)
    # 1.25 * 0.1 * 192 / (A^2 + B^2) / 250^3
    assert r.alpha == pytest.approx(1.25 * 0.1 * 192 / 12.233 / 250**3, rel=1e-12)
    assert f"{r.alpha:.3e}" == "1.256e-07"
    assert f"{r.beta:.2e}" == "1.88e-12"


def test_n_scaling_exact():
    a = asymptotic_variances(ONE, 1.25, 0.1, 250)
    b = asymptotic_variances(ONE, 1.25, 0.1, 1000)
    assert b.alpha / a.alpha == pytest.approx(4.0**-3, rel=1e-14)
    assert b.beta / a.beta == pytest.approx(4.0**-5, rel=1e-14)
    assert b.A / a.A == pytest.approx(0.25, rel=1e-14)


def test_theorem_scale_doubles():
    a = asymptotic_variances(ONE, 1.25, 0.1, 250)
    b = asymptotic_variances(ONE, 1.25, 0.1, 250, scale=THEOREM_SCALE)
    assert AVAR_SCALE == 1.0
    np.testing.assert_allclose(b.as_array(), 2 * a.as_array(), rtol=1e-15)


def test_report_lookup():
    r = asymptotic_variances(ONE, 1.25, 0.1, 250)
    assert r["beta"] == r.beta
    with pytest.raises(KeyError):
        r["gamma"]


def test_invalid_inputs():
    with pytest.raises(InvalidArgumentError):
        asymptotic_variances(ONE, 0.0, 0.1, 250)
    with pytest.raises(InvalidArgumentError):
        asymptotic_variances(ONE, 1.0, 0.1, 0)


def test_rate_scaling():
    np.testing.assert_allclose(rate_scaling(100), [0.1, 0.1, 1e-3, 1e-5], rtol=1e-15)


amps = st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-3)


@settings(max_examples=50, deadline=None)
@given(A=amps, B=amps)
def test_inverse_pair(A, B):
    np.testing.assert_allclose(sigma(A, B) @ sigma_inverse(A, B), np.eye(4), atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(A=amps, B=amps)
def test_symmetric_positive_definite(A, B):
    s = sigma(A, B)
    assert np.array_equal(s, s.T)
    assert np.linalg.eigvalsh(s).min() > 0


@settings(max_examples=30, deadline=None)
@given(A=amps, B=amps, scale=st.floats(0.1, 10))
def test_inverse_lower_block_linear_in_energy(A, B, scale):
    s = math.sqrt(scale)
    np.testing.assert_allclose(sigma_inverse(s * A, s * B)[2:, 2:], scale * sigma_inverse(A, B)[2:, 2:],
                               rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(A=amps, B=amps, phi=st.floats(-math.pi, math.pi))
def test_frequency_variances_rotation_invariant(A, B, phi):
    rot = ChirpComponent(A * math.cos(phi) - B * math.sin(phi), A * math.sin(phi) + B * math.cos(phi), 1.0, 0.1)
    a = asymptotic_variances(ChirpComponent(A, B, 1.0, 0.1), 1.25, 0.1, 500)
    b = asymptotic_variances(rot, 1.25, 0.1, 500)
    assert b.alpha == pytest.approx(a.alpha, rel=1e-10)
    assert b.beta == pytest.approx(a.beta, rel=1e-10)
