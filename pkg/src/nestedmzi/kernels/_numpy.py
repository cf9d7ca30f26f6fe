"""Pure-numpy versions of the hot kernels.

Every function here has a twin in ``_numba`` with the same signature and the
same arithmetic, so the two backends agree to rounding.
"""

import math

import numpy as np

SQRT_PI = math.sqrt(math.pi)
TWO_OVER_SQRT_PI = 2.0 / SQRT_PI

# |x| below this uses the positive-term series, above it the erfc continued
# fraction; erfc(6) ~ 2e-17 so erf saturates to +-1 past 6.
ERF_SERIES_LIMIT = 2.5
ERF_SATURATION = 6.0
ERF_CF_DEPTH = 90
ERF_SERIES_TERMS = 80

BESSEL_SERIES_LIMIT = 2.0


def erf(x):
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    out = np.ones_like(ax)

    small = ax < ERF_SERIES_LIMIT
    if np.any(small):
        xs = ax[small]
        x2 = xs * xs
        term = xs.copy()
        total = xs.copy()
        for n in range(1, ERF_SERIES_TERMS):
            term *= 2.0 * x2 / (2 * n + 1)
            total += term
            if np.all(term <= 1e-17 * total):
                break
        out[small] = TWO_OVER_SQRT_PI * np.exp(-x2) * total

    mid = (ax >= ERF_SERIES_LIMIT) & (ax < ERF_SATURATION)
    if np.any(mid):
        xm = ax[mid]
        frac = xm.copy()
        for n in range(ERF_CF_DEPTH, 0, -1):
            frac = xm + (0.5 * n) / frac
        out[mid] = 1.0 - np.exp(-xm * xm) / (SQRT_PI * frac)

    return np.copysign(out, x)


def bessel_j(k, x):
    """J_k(x) for integer k >= 0 (scalar)."""
    x = float(x)
    sign = -1.0 if (x < 0.0 and k % 2 == 1) else 1.0
    ax = abs(x)
    if ax == 0.0:
        return 1.0 if k == 0 else 0.0
    if ax <= BESSEL_SERIES_LIMIT:
        return sign * _bessel_series(k, ax)
    return sign * _bessel_miller(k, ax)


def _bessel_series(k, x):
    half = 0.5 * x
    term = 1.0
    for i in range(1, k + 1):
        term *= half / i
    total = term
    q = -half * half
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + k))
        total += term
        if abs(term) <= 1e-18 * abs(total) or m > 200:
            break
    return total


def _bessel_miller(k, x):
    # backward recurrence from well above max(k, x), normalised with
    # J_0 + 2 * sum J_{2m} = 1
    top = max(k, int(x)) + 2
    start = 2 * ((top + int(math.sqrt(60.0 * top)) + 20) // 2)
    j_next = 0.0
    j_cur = 1e-30
    result = 0.0
    norm = 0.0
    for m in range(start, 0, -1):
        j_prev = (2.0 * m / x) * j_cur - j_next
        j_next = j_cur
        j_cur = j_prev
        # j_cur now holds J_{m-1} up to scale
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            result *= 1e-250
            norm *= 1e-250
        if m - 1 == k:
            result = j_cur
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * j_cur
    norm += j_cur
    return result / norm


def twiddles(n):
    m = np.arange(n)
    angle = 2.0 * np.pi * m / n
    return np.cos(angle), np.sin(angle)


def dft_bins(samples, freqs):
    samples = np.asarray(samples, dtype=np.complex128)
    freqs = np.asarray(freqs, dtype=np.int64)
    n = samples.size
    cos_t, sin_t = twiddles(n)
    idx = np.outer(freqs, np.arange(n)) % n
    kernel = cos_t[idx] - 1j * sin_t[idx]
    return (kernel * samples).sum(axis=1) / n


def sine_bins(samples, freqs):
    samples = np.asarray(samples, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.int64)
    n = samples.size
    _, sin_t = twiddles(n)
    idx = np.outer(freqs, np.arange(n)) % n
    return (sin_t[idx] * samples).sum(axis=1) / n


def simpson_weights(points, half_width):
    # Simpson weights on [0, half_width] with (points - 1) // 2 intervals
    intervals = (points - 1) // 2
    h = half_width / intervals
    w = np.ones(intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0, np.linspace(0.0, half_width, intervals + 1)


def sign_overlap(d1, d2, d3, coeffs, sigma, half_width, points):
    """(1/(sigma*sqrt(pi))) * int sign(y) |sum_i c_i exp(-(y-d_i)^2/2s^2)|^2 dy."""
    d = np.stack([np.atleast_1d(d1), np.atleast_1d(d2), np.atleast_1d(d3)], axis=-1)
    w, y = simpson_weights(points, half_width)
    c = np.asarray(coeffs, dtype=np.float64)
    two_s2 = 2.0 * sigma * sigma

    def side(yy):
        amp = (c * np.exp(-((yy[:, None, None] - d[None, :, :]) ** 2) / two_s2)).sum(axis=-1)
        return (w[:, None] * amp * amp).sum(axis=0)

    return (side(y) - side(-y)) / (sigma * SQRT_PI)
