"""Detector signals: output amplitude (phase variant) and quad-cell intensity
difference (displacement variants), plus a direct-quadrature oracle."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .experiment import ConfigError, Topology, Variant
from .numerics import erf, unit_sine


class SignalKind(str, Enum):
    COMPLEX_AMPLITUDE = "ComplexAmplitude"
    INTENSITY_DIFF = "RealIntensityDiff"
    # |V2|^2 of the phase variant, the quantity a detector without a
    # reference beam registers
    INTENSITY = "RealIntensity"


class SignalMode(str, Enum):
    AMPLITUDE = "amplitude"
    INTENSITY = "intensity"


@dataclass(frozen=True)
class PathOffsets:
    d1: object
    d2: object
    d3: object


@dataclass(frozen=True)
class QuadratureGrid:
    half_width: float = 8.0
    points: int = 4001


@dataclass
class TimeSeries:
    """Detector signal over one base period, stored as baseline + fluctuation.

    Keeping the exact constant part apart stops float64 quantization of a
    large mean from masking spectral lines far below it.
    """

    kind: SignalKind
    fluctuation: np.ndarray
    fingerprint: str
    config: object = None
    baseline: complex = 0.0

    @property
    def samples(self):
        if self.baseline == 0:
            return self.fluctuation
        return self.baseline + self.fluctuation

    @property
    def n(self):
        return self.fluctuation.size

    @property
    def times(self):
        return np.arange(self.n) / self.n

    @property
    def is_complex(self):
        return self.kind is SignalKind.COMPLEX_AMPLITUDE


def _require(config, variant, op):
    if config.variant is not variant:
        raise ConfigError(f"{op} needs the {variant.value} variant", "variant")


def _expj_minus_one(x):
    # exp(ix) - 1 without cancellation for small x
    return -2.0 * np.sin(0.5 * x) ** 2 + 1j * np.sin(x)


def _amplitude_parts(config, t):
    a0 = config.amplitude
    s = {x: unit_sine(f, t) for x, f in config.frequency_map.items()}
    common = s["E"] + s["F"]
    dv = _expj_minus_one(a0 * (s["A"] + common)) - _expj_minus_one(a0 * (s["B"] + common))
    if config.topology is Topology.BLOCKED:
        base = 0.0
    else:
        dv = dv + _expj_minus_one(a0 * s["C"])
        base = 1.0 / 3.0
    return base, dv / 3.0


def amplitude_out2(config, t):
    """Complex amplitude reaching the detector output for unit input on port 1."""
    _require(config, Variant.PHASE, "amplitude_out2")
    base, dv = _amplitude_parts(config, t)
    v = base + dv
    return complex(v) if np.ndim(v) == 0 else v


def path_offsets(config, t):
    """Beam displacements along the C path and the two inner arms."""
    _require(config, Variant.DISPLACEMENT, "path_offsets")
    delta = config.amplitude * config.sigma
    s = {x: unit_sine(f, t) for x, f in config.frequency_map.items()}
    d1 = delta * s["C"]
    d2 = delta * (s["A"] + s["E"] + s["F"])
    if config.topology is Topology.DOVE:
        # the prism mirrors the arm-B beam, flipping displacements picked up upstream
        d3 = delta * (-s["E"] - s["B"] + s["F"])
    else:
        d3 = delta * (s["B"] + s["E"] + s["F"])
    return PathOffsets(d1, d2, d3)


def _cross(a, b, sigma):
    return np.exp(-((a - b) ** 2) / (4 * sigma * sigma)) * erf((a + b) / (2 * sigma))


SECOND_DIFF_SERIES_LIMIT = 0.25
SECOND_DIFF_TERMS = 20


def _erf_second_difference(m, h):
    """erf(m + h) + erf(m - h) - 2 erf(m), accurate for small h.

    Uses 2 sum_k erf^(2k)(m) h^2k / (2k)! with erf^(n) = (2/sqrt(pi))
    (-1)^(n-1) H_(n-1)(m) exp(-m^2) (physicists' Hermite H) when |h| is small.
    """
    m, h = np.broadcast_arrays(np.asarray(m, dtype=float), np.asarray(h, dtype=float))
    direct = erf(m + h) + erf(m - h) - 2 * erf(m)
    small = np.abs(h) < SECOND_DIFF_SERIES_LIMIT
    if not np.any(small):
        return direct
    ms, hs = m[small], h[small]
    h_prev, h_cur = np.ones_like(ms), 2 * ms  # H_0, H_1
    total = np.zeros_like(ms)
    term_h = np.ones_like(hs)
    fact = 1.0
    for n in range(1, 2 * SECOND_DIFF_TERMS):
        term_h = term_h * hs
        fact *= n + 1
        if n % 2 == 1:
            # H_n with n = 2k - 1 multiplies h^(2k) / (2k)!
            total = total + h_cur * (term_h * hs) / fact
        h_prev, h_cur = h_cur, 2 * ms * h_cur - 2 * n * h_prev
    series = -4 / np.sqrt(np.pi) * np.exp(-ms * ms) * total
    out = np.array(direct, dtype=float)
    out[small] = series
    return out


def _blocked_pair(a, b, sigma):
    # erf(a) + erf(b) - 2 E(a, b), rearranged so the O(delta^5) result is not
    # the small difference of O(delta) terms
    m = (a + b) / (2 * sigma)
    h = (a - b) / (2 * sigma)
    return _erf_second_difference(m, h) - 2 * np.expm1(-h * h) * erf(m)


def intensity_from_offsets(d1, d2, d3, topology=Topology.STANDARD, sigma=1.0):
    """Closed-form quad-cell difference for the superposition G_d1 + G_d2 - G_d3.

    Normalised as (1/(sigma sqrt(pi))) * int sign(y) |sum c_i G_{d_i}(y)|^2 dy,
    i.e. the 1/9 amplitude factor and the x integral are dropped. The blocked
    topology removes the d1 beam.
    """
    topology = Topology(topology)
    d2 = np.asarray(d2, dtype=float)
    d3 = np.asarray(d3, dtype=float)
    inner = _blocked_pair(d2, d3, sigma)
    if topology is Topology.BLOCKED:
        out = inner
    else:
        d1 = np.asarray(d1, dtype=float)
        out = inner + erf(d1 / sigma) + 2 * _cross(d1, d2, sigma) - 2 * _cross(d1, d3, sigma)
    return float(out) if np.ndim(out) == 0 else out


def _beam_weights(topology):
    return (0.0, 1.0, -1.0) if topology is Topology.BLOCKED else (1.0, 1.0, -1.0)


def intensity_diff(config, t):
    """Quad-cell intensity difference I(t) from the closed Erf form."""
    _require(config, Variant.DISPLACEMENT, "intensity_diff")
    d = path_offsets(config, t)
    return intensity_from_offsets(d.d1, d.d2, d.d3, config.topology, config.sigma)


def intensity_diff_numeric(config, t, grid=QuadratureGrid()):
    """Independent oracle for :func:`intensity_diff`: Simpson quadrature in y.

    The y range is split at 0 where sign(y) jumps, so each half is smooth,
    and is widened by the largest offset so no beam tail is clipped.
    """
    _require(config, Variant.DISPLACEMENT, "intensity_diff_numeric")
    if grid.points % 4 != 1:
        raise ValueError("quadrature points must be 1 mod 4 (even Simpson panels per half)")
    d = path_offsets(config, t)
    reach = max(float(np.max(np.abs(x))) for x in (d.d1, d.d2, d.d3)) / config.sigma
    # keep the grid spacing of the nominal window
    panels = math.ceil((grid.points - 1) * (1 + reach / grid.half_width) / 4)
    out = kernels.sign_overlap(
        d.d1,
        d.d2,
        d.d3,
        _beam_weights(config.topology),
        config.sigma,
        (grid.half_width + reach) * config.sigma,
        4 * panels + 1,
    )
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def default_mode(config):
    """Intensity mode for the blocked phase setup, amplitude mode otherwise."""
    if config.variant is Variant.PHASE and config.topology is Topology.BLOCKED:
        return SignalMode.INTENSITY
    return SignalMode.AMPLITUDE


def sample(config, mode=SignalMode.AMPLITUDE):
    """N uniform samples over one base period of the variant's detector signal.

    ``mode`` only matters for the phase variant: amplitude gives V2(t),
    intensity gives |V2(t)|^2.
    """
    t = np.arange(config.samples) / config.samples
    if config.variant is Variant.PHASE:
        base, dv = _amplitude_parts(config, t)
        if SignalMode(mode) is SignalMode.INTENSITY:
            # |base + dv|^2 - base^2 for real base
            di = 2.0 * base * dv.real + np.abs(dv) ** 2
            return TimeSeries(SignalKind.INTENSITY, di, config.fingerprint, config, base * base)
        return TimeSeries(SignalKind.COMPLEX_AMPLITUDE, dv, config.fingerprint, config, complex(base))
    values = intensity_diff(config, t)
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite intensity samples")
    return TimeSeries(SignalKind.INTENSITY_DIFF, values, config.fingerprint, config)
