"""numba-compiled versions of the hot kernels (same contracts as ``_numpy``)."""

import math

import numpy as np
from numba import njit

from ._numpy import (
    BESSEL_SERIES_LIMIT,
    ERF_CF_DEPTH,
    ERF_SATURATION,
    ERF_SERIES_LIMIT,
    ERF_SERIES_TERMS,
    SQRT_PI,
    TWO_OVER_SQRT_PI,
)


@njit(cache=True)
def _erf_scalar(x):
    ax = abs(x)
    if ax >= ERF_SATURATION:
        r = 1.0
    elif ax < ERF_SERIES_LIMIT:
        x2 = ax * ax
        term = ax
        total = ax
        for n in range(1, ERF_SERIES_TERMS):
            term *= 2.0 * x2 / (2 * n + 1)
            total += term
            if term <= 1e-17 * total:
                break
        r = TWO_OVER_SQRT_PI * math.exp(-x2) * total
    else:
        frac = ax
        for n in range(ERF_CF_DEPTH, 0, -1):
            frac = ax + (0.5 * n) / frac
        r = 1.0 - math.exp(-ax * ax) / (SQRT_PI * frac)
    return math.copysign(r, x)


@njit(cache=True)
def _erf_flat(x, out):
    for i in range(x.size):
        out[i] = _erf_scalar(x[i])


def erf(x):
    x = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(x).ravel()
    out = np.empty_like(flat)
    _erf_flat(flat, out)
    return out.reshape(x.shape)


@njit(cache=True)
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


@njit(cache=True)
def _bessel_miller(k, x):
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


@njit(cache=True)
def _bessel_j(k, x):
    sign = -1.0 if (x < 0.0 and k % 2 == 1) else 1.0
    ax = abs(x)
    if ax == 0.0:
        return 1.0 if k == 0 else 0.0
    if ax <= BESSEL_SERIES_LIMIT:
        return sign * _bessel_series(k, ax)
    return sign * _bessel_miller(k, ax)


def bessel_j(k, x):
    return _bessel_j(int(k), float(x))


@njit(cache=True)
def _twiddles(n):
    cos_t = np.empty(n)
    sin_t = np.empty(n)
    for m in range(n):
        angle = 2.0 * np.pi * m / n
        cos_t[m] = math.cos(angle)
        sin_t[m] = math.sin(angle)
    return cos_t, sin_t


@njit(cache=True)
def _dft_bins(samples, freqs):
    n = samples.size
    cos_t, sin_t = _twiddles(n)
    out = np.empty(freqs.size, dtype=np.complex128)
    for i in range(freqs.size):
        f = freqs[i]
        # Neumaier-compensated accumulation of both quadratures
        sr = 0.0
        cr = 0.0
        si = 0.0
        ci = 0.0
        for j in range(n):
            m = (f * j) % n
            s = samples[j]
            tr = s.real * cos_t[m] + s.imag * sin_t[m]
            ti = s.imag * cos_t[m] - s.real * sin_t[m]
            t = sr + tr
            if abs(sr) >= abs(tr):
                cr += (sr - t) + tr
            else:
                cr += (tr - t) + sr
            sr = t
            t = si + ti
            if abs(si) >= abs(ti):
                ci += (si - t) + ti
            else:
                ci += (ti - t) + si
            si = t
        out[i] = complex((sr + cr) / n, (si + ci) / n)
    return out


def dft_bins(samples, freqs):
    return _dft_bins(
        np.ascontiguousarray(samples, dtype=np.complex128),
        np.ascontiguousarray(freqs, dtype=np.int64),
    )


@njit(cache=True)
def _sine_bins(samples, freqs):
    n = samples.size
    _, sin_t = _twiddles(n)
    out = np.empty(freqs.size)
    for i in range(freqs.size):
        f = freqs[i]
        acc = 0.0
        comp = 0.0
        for j in range(n):
            v = samples[j] * sin_t[(f * j) % n]
            t = acc + v
            if abs(acc) >= abs(v):
                comp += (acc - t) + v
            else:
                comp += (v - t) + acc
            acc = t
        out[i] = (acc + comp) / n
    return out


def sine_bins(samples, freqs):
    return _sine_bins(
        np.ascontiguousarray(samples, dtype=np.float64),
        np.ascontiguousarray(freqs, dtype=np.int64),
    )


@njit(cache=True)
def _sign_overlap(d, coeffs, sigma, half_width, points):
    intervals = (points - 1) // 2
    h = half_width / intervals
    two_s2 = 2.0 * sigma * sigma
    out = np.empty(d.shape[0])
    for p in range(d.shape[0]):
        total = 0.0
        for q in range(intervals + 1):
            if q == 0 or q == intervals:
                w = 1.0
            elif q % 2 == 1:
                w = 4.0
            else:
                w = 2.0
            y = q * h
            up = 0.0
            down = 0.0
            for i in range(3):
                up += coeffs[i] * math.exp(-((y - d[p, i]) ** 2) / two_s2)
                down += coeffs[i] * math.exp(-((-y - d[p, i]) ** 2) / two_s2)
            total += w * (up * up - down * down)
        out[p] = total * h / 3.0 / (sigma * SQRT_PI)
    return out


def sign_overlap(d1, d2, d3, coeffs, sigma, half_width, points):
    d = np.stack([np.atleast_1d(d1), np.atleast_1d(d2), np.atleast_1d(d3)], axis=-1)
    d = np.ascontiguousarray(d, dtype=np.float64)
    return _sign_overlap(
        d, np.asarray(coeffs, dtype=np.float64), float(sigma), float(half_width), int(points)
    )
