"""Special functions and single-period transform kernels.

Thin, validated wrappers around :mod:`nestedmzi.kernels`. Transforms treat a
series of ``N`` samples as one period of a signal sampled at ``t = j/N``; the
rectangle rule is then spectrally exact for band-limited integrands.
"""

import math

import numpy as np

from . import kernels

BESSEL_MAX_ARG = 10.0


class AliasingError(ValueError):
    """Requested bin at or above the Nyquist limit N/2."""


def unit_sine(f, t):
    """sin(2 pi f t) with the argument reduced mod one period first.

    On the grid t = j/N (N a power of two) the reduction is exact, which keeps
    sampled series exactly periodic even for f*j in the 1e5 range.
    """
    frac = np.mod(f * np.asarray(t, dtype=float), 1.0)
    return np.sin(2.0 * np.pi * frac)


def erf(x):
    """Error function, odd, relative error below 1e-14 on |x| <= 6.

    Accepts scalars or arrays; returns the same shape (a float for scalars).
    """
    arr = np.asarray(x, dtype=np.float64)
    out = kernels.erf(arr)
    if arr.ndim == 0:
        return float(out)
    return out


def bessel_j(k, x):
    """Bessel function of the first kind J_k(x) for integer ``k >= 0``.

    Use :func:`bessel_j_signed` for negative orders.
    """
    if int(k) != k or k < 0:
        raise ValueError(f"bessel_j needs an integer order k >= 0, got {k!r}")
    if not np.isfinite(x) or abs(x) > BESSEL_MAX_ARG:
        raise ValueError(f"bessel_j argument must satisfy |x| <= {BESSEL_MAX_ARG}, got {x!r}")
    return kernels.bessel_j(int(k), float(x))


def bessel_j_signed(k, x):
    """J_k(x) for any integer k, via J_{-k} = (-1)^k J_k."""
    k = int(k)
    if k >= 0:
        return bessel_j(k, x)
    value = bessel_j(-k, x)
    return -value if k % 2 else value


def _check_bins(n, freqs, lowest):
    freqs = np.atleast_1d(np.asarray(freqs))
    if freqs.size and (freqs.min() < lowest):
        raise ValueError(f"frequency must be >= {lowest}, got {int(freqs.min())}")
    if freqs.size and 2 * int(freqs.max()) >= n:
        raise AliasingError(
            f"frequency {int(freqs.max())} violates the aliasing guard f < N/2 (N={n})"
        )
    return freqs.astype(np.int64)


def _mean(samples):
    if np.iscomplexobj(samples):
        return complex(math.fsum(samples.real), math.fsum(samples.imag)) / samples.size
    return math.fsum(samples) / samples.size


def dft_bins(samples, freqs):
    """(1/N) sum_j s_j exp(-2 pi i f j / N) for each f in ``freqs``.

    Twiddles sum to zero for f != 0, so those bins are taken from the centered
    series; otherwise twiddle rounding times a large mean swamps weak bins.
    """
    samples = np.asarray(samples)
    freqs = _check_bins(samples.size, freqs, 0)
    mean = _mean(samples)
    out = kernels.dft_bins(samples - mean, freqs).astype(complex)
    out[freqs == 0] = mean
    return out


def dft_bin(samples, f):
    """Rectangle-rule value of the period integral of exp(-2 pi i f t) s(t)."""
    return complex(dft_bins(samples, [f])[0])


def sine_bins(samples, freqs):
    """(1/N) sum_j s_j sin(2 pi f j / N); f = 0 is rejected."""
    samples = np.asarray(samples, dtype=np.float64)
    freqs = _check_bins(samples.size, freqs, 1)
    return kernels.sine_bins(samples - _mean(samples), freqs)


def sine_bin(samples, f):
    """Plain rectangle-rule value of the period integral of s(t) sin(2 pi f t).

    No factor of two is applied, so sin(2 pi t) gives 1/2 at f = 1.
    """
    return float(sine_bins(samples, [f])[0])
