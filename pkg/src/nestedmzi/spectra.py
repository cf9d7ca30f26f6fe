"""Discrete single-period power spectra and dark-count noise injection."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .numerics import AliasingError, dft_bins, sine_bins
from .signals import SignalKind, TimeSeries

# Powers below (FLOOR_ULPS * eps * max|signal|)^2 are treated as rounding noise.
FLOOR_ULPS = 16.0

# Medians of |X|^2 relative to its mean: exponential (complex bins of real
# white noise) and chi-square with one degree of freedom (sine bins).
MEDIAN_OVER_MEAN_COMPLEX = math.log(2.0)
MEDIAN_OVER_MEAN_SINE = 0.454936423119572


@dataclass
class SpectrumTable:
    """Power per integer frequency 0..max_frequency of one base period.

    For intensity-difference series bin 0 holds the squared time mean, which
    the sine transform does not define; peak analysis skips bin 0.
    """

    power: np.ndarray
    kind: SignalKind
    source_samples: int
    numerical_floor: float
    fingerprint: str = ""
    normalization: dict = field(default_factory=lambda: {"scheme": "Raw"})

    @property
    def max_frequency(self):
        return self.power.size - 1

    @property
    def frequencies(self):
        return np.arange(self.power.size)

    def __getitem__(self, f):
        return float(self.power[f])

    def to_dict(self):
        return {
            "fingerprint": self.fingerprint,
            "kind": self.kind.value,
            "source_samples": self.source_samples,
            "max_frequency": self.max_frequency,
            "numerical_floor": self.numerical_floor,
            "normalization": dict(self.normalization),
            "entries": {str(f): float(p) for f, p in enumerate(self.power)},
        }


def numerical_floor(samples):
    """Power level set by float64 rounding of the stored fluctuation."""
    scale = float(np.max(np.abs(samples))) if samples.size else 0.0
    return (FLOOR_ULPS * np.finfo(float).eps * scale) ** 2


def power_spectrum(series, max_f):
    """G(f) = |dft_bin|^2 (complex amplitude or plain intensity) or
    G'(f) = sine_bin^2 (intensity difference) for f = 0..max_f."""
    n = series.n
    if max_f < 0:
        raise ValueError(f"max_f must be >= 0, got {max_f}")
    if 2 * max_f >= n:
        raise AliasingError(f"max_f={max_f} violates the aliasing guard max_f < N/2 (N={n})")
    freqs = np.arange(max_f + 1)
    fluct = series.fluctuation
    power = np.empty(max_f + 1)
    if series.kind is SignalKind.INTENSITY_DIFF:
        power[0] = abs(series.baseline + math.fsum(fluct) / n) ** 2
        if max_f:
            power[1:] = sine_bins(fluct, freqs[1:]) ** 2
    else:
        bins = dft_bins(fluct, freqs)
        bins[0] += series.baseline
        power[:] = np.abs(bins) ** 2
    return SpectrumTable(
        power=power,
        kind=series.kind,
        source_samples=n,
        numerical_floor=numerical_floor(series.fluctuation),
        fingerprint=series.fingerprint,
    )


def normalize(spec):
    """Divide by the DC entry, or by the largest entry for G'-type spectra.

    The record says which rule fired; applying it twice changes nothing.
    """
    power = spec.power
    if spec.kind is SignalKind.INTENSITY_DIFF or not power[0] > 0:
        body = power[1:] if power.size > 1 else power
        ref_bin = int(np.argmax(body)) + (1 if power.size > 1 else 0)
        rule = "max"
    else:
        ref_bin = 0
        rule = "dc"
    ref = float(power[ref_bin])
    if not ref > 0:
        raise ValueError("cannot normalise an all-zero spectrum")
    record = {"scheme": "UnitDC", "rule": rule, "reference_bin": ref_bin, "reference_power": ref}
    if spec.normalization.get("scheme") == "UnitDC":
        record["reference_power"] = spec.normalization["reference_power"] * ref
    return replace(
        spec,
        power=power / ref,
        numerical_floor=spec.numerical_floor / ref,
        normalization=record,
    )


@dataclass(frozen=True)
class NoiseSpec:
    rate: float
    seed: int = 0


def add_dark_counts(series, noise):
    """Overlay Poissonian dark counts on the two detector halves.

    Each sample gains P1 - P2 with P1, P2 ~ Poisson(rate / (2N)), ``rate``
    being the expected number of dark counts per base period. For complex
    amplitude series the counts enter the real (in-phase) quadrature.
    """
    if not (noise.rate >= 0 and math.isfinite(noise.rate)):
        raise ValueError(f"dark-count rate must be >= 0, got {noise.rate}")
    if noise.rate == 0:
        return series
    n = series.n
    rng = np.random.default_rng(noise.seed)
    lam = noise.rate / (2 * n)
    counts = rng.poisson(lam, size=n).astype(float) - rng.poisson(lam, size=n)
    return TimeSeries(
        series.kind, series.fluctuation + counts, series.fingerprint, series.config, series.baseline
    )


def noise_bin_mean(rate, samples, kind):
    """Expected noise power per bin for a given dark-count rate."""
    mean = rate / samples**2
    return mean / 2 if kind is SignalKind.INTENSITY_DIFF else mean


def rate_for_median_noise(median_power, samples, kind):
    """Dark-count rate whose median noise bin equals ``median_power``."""
    if kind is SignalKind.INTENSITY_DIFF:
        return 2 * samples**2 * median_power / MEDIAN_OVER_MEAN_SINE
    return samples**2 * median_power / MEDIAN_OVER_MEAN_COMPLEX
