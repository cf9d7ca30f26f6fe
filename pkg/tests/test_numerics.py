import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nestedmzi.numerics import (
    AliasingError,
    bessel_j,
    bessel_j_signed,
    dft_bin,
    dft_bins,
    erf,
    sine_bin,
    unit_sine,
)


def test_erf_scalar_and_array_shapes():
    assert isinstance(erf(0.5), float)
    assert erf(np.array([[0.1, 0.2]])).shape == (1, 2)


@pytest.mark.parametrize("k, x", [(-1, 0.5), (1.5, 0.5), (0, 10.5), (2, float("nan"))])
def test_bessel_domain_errors(k, x):
    with pytest.raises(ValueError):
        bessel_j(k, x)


@pytest.mark.parametrize("k", [1, 2, 3, 6])
def test_bessel_signed_parity(k):
    assert bessel_j_signed(-k, 0.8) == pytest.approx((-1) ** k * bessel_j(k, 0.8), rel=1e-15)


def test_bessel_sum_rule():
    # J_0 + 2 sum_k J_2k = 1
    x = 3.7
    total = bessel_j(0, x) + 2 * sum(bessel_j(2 * k, x) for k in range(1, 20))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_unit_sine_exact_reduction():
    n = 4096
    t = np.arange(n) / n
    np.testing.assert_array_equal(unit_sine(23, t), unit_sine(23 + n, t))
    assert unit_sine(1, 0.25) == pytest.approx(1.0)


def test_sine_bin_of_unit_sine_is_half():
    t = np.arange(64) / 64
    assert sine_bin(np.sin(2 * np.pi * t), 1) == pytest.approx(0.5, abs=1e-16)


def test_dft_bin_of_complex_exponential():
    t = np.arange(128) / 128
    s = 0.25 + np.exp(2j * np.pi * 5 * t)
    assert dft_bin(s, 5) == pytest.approx(1.0, abs=1e-15)
    assert dft_bin(s, 0) == pytest.approx(0.25, abs=1e-16)
    assert abs(dft_bin(s, 6)) < 1e-15


@pytest.mark.parametrize("f", [32, 40])
def test_aliasing_guard(f):
    with pytest.raises(AliasingError):
        dft_bins(np.zeros(64), [f])
    with pytest.raises(AliasingError):
        sine_bin(np.zeros(64), f)


def test_sine_bin_rejects_dc():
    with pytest.raises(ValueError):
        sine_bin(np.zeros(64), 0)


def test_large_mean_does_not_leak():
    # weak tone on a large offset survives at full relative precision
    t = np.arange(4096) / 4096
    s = 1e3 + 1e-12 * np.exp(2j * np.pi * 9 * t)
    assert abs(dft_bin(s, 9)) == pytest.approx(1e-12, rel=1e-3)


@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8), st.integers(0, 3))
def test_dft_linearity(vals, f):
    a = np.array(vals)
    b = a[::-1].copy()
    lhs = dft_bin(2 * a + b, f)
    rhs = 2 * dft_bin(a, f) + dft_bin(b, f)
    assert lhs == pytest.approx(rhs, abs=1e-14)
