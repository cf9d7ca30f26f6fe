import math
import os
import subprocess
import sys

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

mpmath.mp.dps = 40


def mp_bessel(k, x):
    return float(mpmath.besselj(k, x))


def trapezoid_bessel(k, x, m=256):
    # periodic trapezoid of (1/2pi) int cos(k t - x sin t) dt is spectrally exact
    t = 2 * np.pi * np.arange(m) / m
    return float(np.mean(np.cos(k * t - x * np.sin(t))))


class TestErf:
    @pytest.mark.parametrize("x", [0.0, 1e-300, 1e-8, 0.1, 0.5, 1.0, 2.0, 2.49, 2.51, 3.3, 5.9, 6.1, 9.0])
    def test_matches_mpmath(self, backend, x):
        for v in (x, -x):
            got = float(backend.erf(np.array([v]))[0])
            want = float(mpmath.erf(v))
            assert got == pytest.approx(want, rel=1e-14, abs=1e-300)

    def test_dense_grid_against_math_erf(self, backend):
        x = np.linspace(-7, 7, 20001)
        got = backend.erf(x)
        want = np.array([math.erf(v) for v in x])
        np.testing.assert_allclose(got, want, rtol=5e-15, atol=0)

    def test_special_values(self, backend):
        got = backend.erf(np.array([np.inf, -np.inf, 0.0, -0.0]))
        np.testing.assert_array_equal(got[:3], [1.0, -1.0, 0.0])
        assert math.copysign(1.0, got[3]) == -1.0

    @given(st.floats(-8, 8, allow_nan=False))
    def test_odd_and_bounded(self, x):
        from nestedmzi.numerics import erf

        assert erf(-x) == -erf(x)
        assert -1.0 <= erf(x) <= 1.0


class TestBessel:
    @pytest.mark.parametrize("k", [0, 1, 2, 3, 5, 8, 12, 20])
    @pytest.mark.parametrize("x", [1e-6, 0.00628, 0.1, 0.5, 1.9, 2.1, 4.0, 7.5, 10.0])
    def test_matches_mpmath(self, backend, k, x):
        want = mp_bessel(k, x)
        got = backend.bessel_j(k, x)
        assert got == pytest.approx(want, rel=1e-13, abs=1e-300)

    @pytest.mark.parametrize("k", [0, 1, 4, 9])
    @pytest.mark.parametrize("x", [0.3, 2.5, 6.0, 9.5])
    def test_integral_representation(self, backend, k, x):
        assert backend.bessel_j(k, x) == pytest.approx(trapezoid_bessel(k, x), abs=1e-14)

    def test_negative_argument_parity(self, backend):
        for k in range(6):
            assert backend.bessel_j(k, -1.3) == pytest.approx((-1) ** k * backend.bessel_j(k, 1.3), rel=1e-15)

    def test_small_argument_leading_term(self, backend):
        x = 1e-6
        assert backend.bessel_j(1, x) == pytest.approx(x / 2, rel=1e-12)
        assert backend.bessel_j(0, 0.0) == 1.0
        assert backend.bessel_j(3, 0.0) == 0.0

    @given(st.integers(1, 15), st.floats(0.05, 10.0))
    def test_three_term_recurrence(self, k, x):
        from nestedmzi.numerics import bessel_j

        lhs = bessel_j(k - 1, x) + bessel_j(k + 1, x)
        rhs = 2 * k / x * bessel_j(k, x)
        assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-15)


class TestTransforms:
    def test_dft_matches_numpy_fft(self, backend):
        rng = np.random.default_rng(3)
        s = rng.normal(size=256) + 1j * rng.normal(size=256)
        freqs = np.arange(0, 128)
        want = np.fft.fft(s)[:128] / 256
        np.testing.assert_allclose(backend.dft_bins(s, freqs), want, atol=1e-15)

    def test_sine_bins_of_pure_tones(self, backend):
        n = 512
        t = np.arange(n) / n
        s = np.sin(2 * np.pi * 7 * t) + 0.25 * np.cos(2 * np.pi * 9 * t)
        got = backend.sine_bins(s, np.array([7, 9, 11]))
        np.testing.assert_allclose(got, [0.5, 0.0, 0.0], atol=1e-15)

    def test_real_input_dft(self, backend):
        s = np.cos(2 * np.pi * 3 * np.arange(64) / 64)
        np.testing.assert_allclose(backend.dft_bins(s, np.array([3, 4])), [0.5, 0.0], atol=1e-16)


class TestSignOverlap:
    def test_single_beam_gives_erf(self, backend):
        # one beam at offset d: (1/sqrt(pi)) int sign(y) exp(-(y-d)^2) dy = erf(d)
        d = np.array([0.3, -0.7])
        z = np.zeros(2)
        got = backend.sign_overlap(z, d, z + 50.0, (0.0, 1.0, 0.0), 1.0, 8.0, 4001)
        np.testing.assert_allclose(got, [math.erf(0.3), math.erf(-0.7)], atol=1e-11)

    def test_backends_agree(self):
        from nestedmzi import kernels

        all_b = kernels.backends()
        if len(all_b) < 2:
            pytest.skip("numba unavailable")
        rng = np.random.default_rng(0)
        d = rng.uniform(-0.5, 0.5, size=(3, 50))
        a = all_b["numpy"].sign_overlap(*d, (1.0, 1.0, -1.0), 1.0, 8.0, 2001)
        b = all_b["numba"].sign_overlap(*d, (1.0, 1.0, -1.0), 1.0, 8.0, 2001)
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_backends_agree_on_special_functions():
    from nestedmzi import kernels

    all_b = kernels.backends()
    if len(all_b) < 2:
        pytest.skip("numba unavailable")
    x = np.linspace(-6.5, 6.5, 1001)
    np.testing.assert_allclose(all_b["numpy"].erf(x), all_b["numba"].erf(x), rtol=2e-15, atol=0)
    for k in (0, 1, 5):
        for v in (0.01, 1.5, 3.0, 9.0):
            assert all_b["numpy"].bessel_j(k, v) == pytest.approx(all_b["numba"].bessel_j(k, v), rel=1e-14)


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("0", None)])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, NESTEDMZI_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from nestedmzi import kernels; print(kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    ).stdout.strip()
    if expected:
        assert out == expected
    else:
        assert out in ("numba", "numpy")
