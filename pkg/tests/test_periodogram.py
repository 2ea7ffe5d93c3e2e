import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpest import ChirpComponent, GridSpec, ModelSpec, NoiseSpec, synthesize
from chirpest.core import InvalidArgumentError
from chirpest.periodogram import demodulated_dft_row, grid_scan, periodogram_value, surface

MA1 = NoiseSpec.ma1(0.5, 0.1)


def naive_I(y, alpha, beta):
    """Direct complex sum, independent of the library's cos/sin route."""
    t = np.arange(1, len(y) + 1)
    z = np.sum(y * np.exp(-1j * (alpha * t + beta * t * t)))
    return 2.0 / len(y) * abs(z) ** 2


def exhaustive_grid(y, alpha_count, beta_count):
    """Full table of I over every interior grid point, rows = k, cols = j."""
    n = len(y)
    t = np.arange(1, n + 1, dtype=float)
    alphas = math.pi * np.arange(1, alpha_count) / alpha_count
    base = np.exp(-1j * np.outer(alphas, t))  # (j, t)
    out = np.empty((beta_count - 1, alpha_count - 1))
    for k in range(1, beta_count):
        demod = y * np.exp(-1j * math.pi * k / beta_count * t * t)
        out[k - 1] = 2.0 / n * np.abs(base @ demod) ** 2
    return out


def oracle_argmax(table):
    """Largest value, ties to the smallest (k, j) (row-major argmax does that)."""
    k0, j0 = np.unravel_index(int(np.argmax(table)), table.shape)
    return k0 + 1, j0 + 1


def chirp(A, B, alpha, beta, n, seed=None):
    m = ModelSpec((ChirpComponent(A, B, alpha, beta),), MA1)
    return synthesize(m, n, seed, noiseless=seed is None).samples


def test_zero_signal_gives_zero():
    assert periodogram_value(np.zeros(50), 1.3, 0.2) == 0.0


def test_unit_chirp_at_truth():
    y = chirp(1, 0, 1.5, 0.1, 100)
    v = periodogram_value(y, 1.5, 0.1)
    assert abs(v - 50) <= 2
    assert v == pytest.approx(naive_I(y, 1.5, 0.1), rel=1e-12)


def test_table_chirp_at_truth():
    y = chirp(2.93, 1.91, 2.5, 0.1, 250)
    v = periodogram_value(y, 2.5, 0.1)
    # 40-digit mpmath direct summation
    assert v == pytest.approx(1391.303721697594, rel=1e-10)
    assert v == pytest.approx(naive_I(y, 2.5, 0.1), rel=1e-12)
    # n (A^2 + B^2) / 2 = 1529.1 is only the leading term; the conjugate
    # image contributes a few percent at this n
    assert abs(v / 1529.1 - 1) < 0.1


def test_empty_signal_rejected():
    with pytest.raises(InvalidArgumentError):
        periodogram_value(np.array([]), 1.0, 0.1)


def test_grid_scan_resolution_full_grid():
    n = 100
    y = chirp(2.93, 1.91, 2.5, 0.1, n)
    gm = grid_scan(y, GridSpec(n, n * n))
    assert abs(gm.alpha - 2.5) <= math.pi / n
    assert abs(gm.beta - 0.1) <= math.pi / n**2


@pytest.mark.parametrize("seed", [None, 4])
def test_grid_scan_matches_exhaustive_scan(seed):
    n = 60
    y = chirp(2.93, 1.91, 2.5, 0.1, n, seed)
    table = exhaustive_grid(y, n, n * n)
    gm = grid_scan(y, GridSpec(n, n * n))
    k, j = oracle_argmax(table)
    assert gm.value == pytest.approx(table[k - 1, j - 1], rel=1e-10)
    # the oracle may pick the exact mirror point when rounding breaks the tie
    assert (gm.k, gm.j) in {(k, j), (n * n - k, n - j)}
    assert gm.k <= n * n // 2


def test_zero_signal_ties_to_first_point():
    gm = grid_scan(np.zeros(30), GridSpec(30, 900))
    assert (gm.j, gm.k) == (1, 1)
    assert gm.value == 0.0


def test_two_components_grid_max_near_dominant():
    n = 100
    m = ModelSpec((ChirpComponent(2, 1.75, 1.5, 0.1), ChirpComponent(3, 2.25, 2.5, 0.2)), MA1)
    y = synthesize(m, n, noiseless=True).samples
    gm = grid_scan(y, GridSpec(n, n * n))
    assert abs(gm.alpha - 2.5) <= math.pi / n
    assert abs(gm.beta - 0.2) <= math.pi / n**2
    table = exhaustive_grid(y, n, n * n)
    assert gm.value == pytest.approx(table.max(), rel=1e-10)


def test_decimated_scan_finds_full_scan_maximum():
    n = 120
    y = chirp(2.93, 1.91, 2.5, 0.1, n, seed=8)
    full = grid_scan(y, GridSpec(n, n * n))
    coarse = grid_scan(y, GridSpec(n, n * n, beta_decimation=8))
    assert (coarse.j, coarse.k) == (full.j, full.k)


def test_grid_scan_workers_identical():
    n = 200
    y = chirp(2.93, 1.91, 2.5, 0.1, n, seed=3)
    g = GridSpec(n, n * n)
    assert grid_scan(y, g, workers=1) == grid_scan(y, g, workers=3)


def test_restricted_ranges_stay_inside():
    n = 80
    y = chirp(2.93, 1.91, 2.5, 0.1, n, seed=2)
    g = GridSpec(n, n * n, alpha_range=(0.5, 1.5), beta_range=(0.3, 0.6))
    gm = grid_scan(y, g)
    assert 0.5 <= gm.alpha <= 1.5 and 0.3 <= gm.beta <= 0.6
    table = exhaustive_grid(y, n, n * n)
    j_lo, j_hi = g.j_bounds()
    k_lo, k_hi = g.k_bounds()
    sub = table[k_lo - 1:k_hi, j_lo - 1:j_hi]
    assert gm.value == pytest.approx(sub.max(), rel=1e-10)


def test_grid_validation():
    with pytest.raises(InvalidArgumentError):
        GridSpec(1, 10)
    with pytest.raises(InvalidArgumentError):
        GridSpec(10, 10, alpha_range=(0, 4))
    with pytest.raises(InvalidArgumentError):
        GridSpec(10, 10, beta_decimation=0)


def test_default_grid():
    assert GridSpec.default(250).beta_decimation == 1
    assert GridSpec.default(500).beta_decimation == 8
    g = GridSpec.default(100)
    assert (g.alpha_count, g.beta_count) == (100, 10_000)
    assert g.alpha_step == math.pi / 100 and g.beta_step == math.pi / 10_000


@pytest.mark.parametrize("n, alpha_count", [(128, 128), (128, 40), (97, 300), (50, 2)])
def test_row_matches_naive(n, alpha_count):
    rng = np.random.default_rng(n + alpha_count)
    y = rng.normal(size=n)
    beta = 0.05
    row = demodulated_dft_row(y, beta, alpha_count)
    naive = np.array([naive_I(y, math.pi * j / alpha_count, beta) for j in range(1, alpha_count)])
    np.testing.assert_allclose(row, naive, rtol=1e-9, atol=1e-12 * naive.max())


def test_row_argmax_matches_naive_scan():
    y = np.random.default_rng(128).normal(size=128)
    row = demodulated_dft_row(y, 0.05, 128)
    naive = [naive_I(y, math.pi * j / 128, 0.05) for j in range(1, 128)]
    assert int(np.argmax(row)) == int(np.argmax(naive))


def test_zero_signal_row():
    assert not demodulated_dft_row(np.zeros(64), 0.3, 64).any()


def test_surface_matches_pointwise():
    y = chirp(2.93, 1.91, 2.5, 0.1, 90, seed=1)
    alphas, betas = np.linspace(2.3, 2.7, 5), np.linspace(0.09, 0.11, 3)
    s = surface(y, alphas, betas)
    for r, b in enumerate(betas):
        for c, a in enumerate(alphas):
            assert s[r, c] == pytest.approx(naive_I(y, a, b), rel=1e-10)


signals = st.lists(st.floats(-10, 10, allow_nan=False), min_size=4, max_size=80)
angles = st.floats(0, math.pi, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(y=signals, alpha=angles, beta=angles)
def test_nonnegative_and_quadratic(y, alpha, beta):
    y = np.array(y)
    v = periodogram_value(y, alpha, beta)
    assert v >= 0
    assert periodogram_value(2 * y, alpha, beta) == pytest.approx(4 * v, rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(y=signals, alpha=angles, beta=angles)
def test_mirror_symmetry(y, alpha, beta):
    y = np.array(y)
    a = periodogram_value(y, alpha, beta)
    b = periodogram_value(y, math.pi - alpha, math.pi - beta)
    scale = len(y) * float(np.abs(y).sum()) ** 2 / len(y)
    assert abs(a - b) <= 1e-9 * (scale + 1e-300)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(8, 40))
def test_argmax_invariant_under_scaling(seed, n):
    y = np.random.default_rng(seed).normal(size=n)
    g = GridSpec(n, n * n)
    a, b = grid_scan(y, g), grid_scan(2 * y, g)
    assert (a.j, a.k) == (b.j, b.k)
    assert b.value == pytest.approx(4 * a.value, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 300), alpha_count=st.integers(2, 400),
       beta=angles)
def test_row_equals_naive_property(seed, n, alpha_count, beta):
    y = np.random.default_rng(seed).normal(size=n)
    row = demodulated_dft_row(y, beta, alpha_count)
    js = np.unique(np.linspace(1, alpha_count - 1, 7).astype(int))
    naive = np.array([naive_I(y, math.pi * j / alpha_count, beta) for j in js])
    np.testing.assert_allclose(row[js - 1], naive, rtol=1e-9, atol=1e-12 * max(naive.max(), 1))
