"""Exact Bessel-product oracle, predicted peak catalogs, peak detection and
amplitude-sweep order estimation."""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .experiment import DEFAULT_FREQUENCIES, ConfigError, Topology, Variant
from .labels import ELEMENTS, CombinationLabel, canonical
from .numerics import bessel_j_signed, dft_bin, sine_bin
from .signals import SignalKind, SignalMode, default_mode, sample
from .spectra import numerical_floor

BESSEL_TAIL = 1e-20
MAX_LABEL_ORDER = 6
# Torus Fourier coefficients are O(1/k!) or exactly zero; rounding leaves
# residues near 1e-14, so anything above this absolute level is content.
STRUCTURE_TOL = 1e-10


class OrderUnderflowError(ArithmeticError):
    """A swept bin fell to the numerical floor; its order cannot be fitted."""

    def __init__(self, message, amplitudes=()):
        super().__init__(message)
        self.amplitudes = tuple(amplitudes)


@dataclass(frozen=True)
class LabelMatch:
    label: CombinationLabel
    order: int

    def render(self):
        return f"{self.label.render()} (order {self.order})"


@dataclass
class PredictedPeak:
    frequency: int
    leading_order: int
    labels: list
    closed_form_power: float = None


@dataclass
class PeakRecord:
    frequency: int
    power: float
    above_floor: bool
    matched_labels: list = field(default_factory=list)
    estimated_order: float = math.nan
    residual: float = math.nan

    @property
    def label_order(self):
        return min((m.order for m in self.matched_labels), default=None)


@dataclass
class OrderEstimate:
    order: float
    residual: float
    amplitudes: np.ndarray
    powers: np.ndarray


# -- Jacobi-Anger oracle -----------------------------------------------------


def truncation_order(a0, tail=BESSEL_TAIL):
    """Smallest K with |J_{K+1}(a0)| < tail."""
    k = 0
    while abs(bessel_j_signed(k + 1, a0)) >= tail:
        k += 1
    return k


@lru_cache(maxsize=32)
def _coefficients(a0, freqs, blocked):
    k_max = truncation_order(a0)
    ks = range(-k_max, k_max + 1)
    jk = {k: bessel_j_signed(k, a0) for k in ks}
    f = dict(zip(ELEMENTS, freqs))
    out = {}
    if not blocked:
        for k in ks:
            out[k * f["C"]] = out.get(k * f["C"], 0.0) + jk[k]
    for arm, sign in (("A", 1.0), ("B", -1.0)):
        for ka in ks:
            for ke in ks:
                for kf in ks:
                    g = ka * f[arm] + ke * f["E"] + kf * f["F"]
                    out[g] = out.get(g, 0.0) + sign * jk[ka] * jk[ke] * jk[kf]
    return {g: v / 3.0 for g, v in out.items()}


def _oracle_table(config):
    if config.variant is not Variant.PHASE:
        raise ConfigError("Bessel oracle needs the PhaseModulation variant", "variant")
    return _coefficients(
        float(config.amplitude), tuple(config.frequencies), config.topology is Topology.BLOCKED
    )


def bessel_coefficient(config, f):
    """Exact Fourier coefficient of V2 at integer frequency ``f``.

    Sums Jacobi-Anger products over every index combination landing on ``f``;
    terms beyond |k| = K with |J_{K+1}| < 1e-20 are dropped.
    """
    return complex(_oracle_table(config).get(int(f), 0.0))


def intensity_coefficient(config, f):
    """Exact Fourier coefficient of |V2|^2, the autocorrelation of V2's."""
    table = _oracle_table(config)
    total = 0.0
    for g, v in table.items():
        w = table.get(g - int(f))
        if w is not None:
            total += v * w
    return complex(total)


def closed_form_power(config, f, mode=None):
    mode = SignalMode(mode or default_mode(config))
    c = intensity_coefficient(config, f) if mode is SignalMode.INTENSITY else bessel_coefficient(config, f)
    return abs(c) ** 2


def leading_constants(config):
    """Small-amplitude peak levels relative to G(0), oracle vs the quoted ones.

    Returns ratios G(f)/(G(0) A0^(2k)) for the first-order peak at f_A and the
    second-order peaks at f_A+f_E and 2 f_A, next to the quoted 1/3 and 1/12.
    The ratios are evaluated on the collision-free default frequency set at
    the config's amplitude, so coinciding labels cannot inflate them.
    """
    config = replace(config, frequencies=DEFAULT_FREQUENCIES, topology=Topology.STANDARD)
    a0 = config.amplitude
    if not a0 > 0:
        raise ValueError("leading constants need a nonzero amplitude")
    g0 = closed_form_power(config, 0, SignalMode.AMPLITUDE)
    fa, fe = config.freq("A"), config.freq("E")
    rows = [
        ("f_A", fa, 1, 1 / 3),
        ("f_A+f_E", fa + fe, 2, 1 / 12),
        ("2f_A", 2 * fa, 2, 1 / 12),
    ]
    out = []
    for name, f, order, quoted in rows:
        ratio = closed_form_power(config, f, SignalMode.AMPLITUDE) / (g0 * a0 ** (2 * order))
        out.append(
            {
                "peak": name,
                "frequency": f,
                "order": order,
                "oracle": ratio,
                "quoted": quoted,
                "agrees": abs(ratio - quoted) <= 0.05 * quoted,
            }
        )
    return out


# -- order structure ---------------------------------------------------------


def _torus(m):
    theta = 2 * np.pi * np.arange(m) / m
    s = np.sin(theta)
    shape = [1] * len(ELEMENTS)
    grids = {}
    for i, x in enumerate(ELEMENTS):
        sh = list(shape)
        sh[i] = m
        grids[x] = s.reshape(sh)
    return grids


def _erf_series(k):
    j = (k - 1) // 2
    return 2 / math.sqrt(math.pi) * (-1) ** j / (math.factorial(j) * (2 * j + 1))


def _displacement_parts(s, topology, max_order):
    d1 = s["C"]
    d2 = s["A"] + s["E"] + s["F"]
    if topology is Topology.DOVE:
        d3 = -s["E"] - s["B"] + s["F"]
    else:
        d3 = s["B"] + s["E"] + s["F"]
    beams = [(1.0, d2), (-1.0, d3)]
    if topology is not Topology.BLOCKED:
        beams.insert(0, (1.0, d1))
    parts = {}
    for k in range(1, max_order + 1):
        if k % 2 == 0:
            parts[k] = None
            continue
        total = 0.0
        for i, (ci, di) in enumerate(beams):
            for j in range(i, len(beams)):
                cj, dj = beams[j]
                weight = ci * cj * (1 if i == j else 2)
                u = (di + dj) / 2
                w = (di - dj) ** 2 / 4
                for m in range(0, (k - 1) // 2 + 1):
                    if i == j and m:
                        break
                    k1 = k - 2 * m
                    total = total + weight * _erf_series(k1) * u**k1 * (-w) ** m / math.factorial(m)
        parts[k] = total
    return parts


def _phase_amplitude_parts(s, topology, max_order):
    arm_a = s["A"] + s["E"] + s["F"]
    arm_b = s["B"] + s["E"] + s["F"]
    c_on = 0.0 if topology is Topology.BLOCKED else 1.0
    parts = {0: (c_on + 1.0 - 1.0) / 3.0}
    for k in range(1, max_order + 1):
        parts[k] = (1j**k / math.factorial(k)) * (c_on * s["C"] ** k + arm_a**k - arm_b**k) / 3.0
    return parts


@lru_cache(maxsize=16)
def _torus_coefficients(variant, topology, mode, max_order):
    """Per order k, the nonzero Fourier coefficients {n: c_n} of the signal.

    The degree-k Maclaurin part of the signal is a trigonometric polynomial on
    the 5-torus of modulation phases; its exact Fourier coefficients come from
    an FFT on a grid fine enough to avoid wrap-around. Cancellations between
    paths are therefore found, not assumed. Coefficients are for unit
    amplitude; the order-k part scales as amplitude**k.
    """
    m = 2 * max_order + 2
    s = _torus(m)
    if variant is Variant.DISPLACEMENT:
        parts = _displacement_parts(s, topology, max_order)
    else:
        amp = _phase_amplitude_parts(s, topology, max_order)
        if mode is SignalMode.INTENSITY:
            parts = {}
            for k in range(1, max_order + 1):
                parts[k] = sum(amp[j] * np.conj(amp[k - j]) for j in range(k + 1))
        else:
            parts = {k: amp[k] for k in range(1, max_order + 1)}
    out = {}
    for k in range(1, max_order + 1):
        part = parts[k]
        out[k] = {}
        if part is None or np.ndim(part) == 0:
            continue
        coef = np.fft.fftn(np.broadcast_to(part, (m,) * len(ELEMENTS))) / m ** len(ELEMENTS)
        for idx in zip(*np.nonzero(np.abs(coef) > STRUCTURE_TOL)):
            n = tuple(int(i) if i <= m // 2 else int(i) - m for i in idx)
            if any(n):
                out[k][n] = complex(coef[idx])
    return out


def _label_orders(variant, topology, mode, max_order):
    """Map each coefficient vector to the lowest amplitude order it carries."""
    orders = {}
    coefs = _torus_coefficients(variant, topology, mode, max_order)
    for k in range(1, max_order + 1):
        for n in coefs[k]:
            orders.setdefault(n, k)
    return orders


def frequency_orders(config, max_order=MAX_LABEL_ORDER, mode=None):
    """Frequency f >= 1 -> lowest order whose summed content at f is nonzero.

    Distinct labels landing on one frequency can cancel, so this can exceed
    the lowest label order there.
    """
    mode = _resolve_mode(config, mode)
    coefs = _torus_coefficients(config.variant, config.topology, mode, int(max_order))
    freqs = np.array(config.frequencies)
    out = {}
    for k in range(1, max_order + 1):
        sums = {}
        for n, c in coefs[k].items():
            f = int(np.dot(n, freqs))
            if f > 0:
                sums[f] = sums.get(f, 0) + c
        for f, c in sums.items():
            if abs(c) > STRUCTURE_TOL and f not in out:
                out[f] = k
    return out


def _resolve_mode(config, mode):
    if config.variant is Variant.DISPLACEMENT:
        return SignalMode.AMPLITUDE
    return SignalMode(mode) if mode is not None else default_mode(config)


def label_table(config, max_order=MAX_LABEL_ORDER, mode=None):
    """Frequency -> list of LabelMatch present in the signal up to ``max_order``."""
    if not 1 <= max_order <= MAX_LABEL_ORDER:
        raise ValueError(f"max_order must lie in 1..{MAX_LABEL_ORDER}, got {max_order}")
    mode = _resolve_mode(config, mode)
    orders = _label_orders(config.variant, config.topology, mode, int(max_order))
    freqs = config.frequencies
    table = {}
    seen = set()
    for n, k in orders.items():
        lab = canonical(n, freqs)
        if lab in seen:
            continue
        seen.add(lab)
        f = lab.frequency(freqs)
        if f == 0:
            continue
        table.setdefault(f, []).append(LabelMatch(lab, k))
    for matches in table.values():
        matches.sort(key=lambda m: (m.order, m.label.order, m.label.coefficients))
    return table


def predicted_peaks(config, max_order, mode=None):
    """Peaks the signal carries at amplitude orders 1..max_order.

    Each frequency reports the lowest order with non-cancelling content there
    and every label reaching it. Phase-variant peaks also carry the exact
    Jacobi-Anger power.
    """
    mode = _resolve_mode(config, mode)
    table = label_table(config, max_order, mode)
    orders = frequency_orders(config, max_order, mode)
    out = []
    for f in sorted(orders):
        power = closed_form_power(config, f, mode) if config.variant is Variant.PHASE else None
        out.append(PredictedPeak(f, orders[f], table.get(f, []), power))
    return out


def absent_labels(config, candidates, max_order, mode=None):
    """Subset of ``candidates`` (CombinationLabels) with no content up to max_order."""
    present = {m.label for ms in label_table(config, max_order, mode).values() for m in ms}
    return [lab for lab in candidates if lab not in present]


def first_order_of(config, label, mode=None):
    """Lowest order (<= MAX_LABEL_ORDER) at which ``label`` appears, else None."""
    for ms in label_table(config, MAX_LABEL_ORDER, mode).values():
        for m in ms:
            if m.label == label:
                return m.order
    return None


# -- detection and sweeps ----------------------------------------------------


def _mode_for_kind(kind):
    return SignalMode.INTENSITY if kind is SignalKind.INTENSITY else SignalMode.AMPLITUDE


def detection_threshold(spec, floor_factor):
    body = spec.power[1:]
    nonzero = body[body > 0]
    median = float(np.median(nonzero)) if nonzero.size else 0.0
    return max(floor_factor * median, spec.numerical_floor)


def classify_peaks(spec, config, floor_factor=10.0, max_order=MAX_LABEL_ORDER, include_all=False):
    """Detect peaks and attach every predicted label at their frequency.

    A bin f >= 1 is a peak when its power exceeds ``floor_factor`` times the
    median of the nonzero bins and the spectrum's numerical floor. Peaks with
    no predicted label are kept with an empty label list.
    """
    if spec.power.size < 2:
        raise ValueError("spectrum has no bins beyond DC")
    threshold = detection_threshold(spec, floor_factor)
    table = label_table(config, max_order, _mode_for_kind(spec.kind))
    records = []
    for f in range(1, spec.power.size):
        p = float(spec.power[f])
        above = p > threshold
        if above or include_all:
            records.append(PeakRecord(f, p, above, list(table.get(f, []))))
    return records


def _bin_power(series, f):
    if series.kind is SignalKind.INTENSITY_DIFF:
        return sine_bin(series.fluctuation, f) ** 2
    return abs(dft_bin(series.fluctuation, f)) ** 2


def sweep_powers(config, frequency, amplitudes, mode=None):
    """Power at one bin for each amplitude; raises if any falls to the floor."""
    mode = _resolve_mode(config, mode)
    powers = []
    low = []
    for a in amplitudes:
        series = sample(config.with_amplitude(a), mode)
        p = _bin_power(series, frequency)
        if not p > numerical_floor(series.fluctuation):
            low.append(a)
        powers.append(p)
    if low:
        raise OrderUnderflowError(
            f"bin {frequency} at the numerical floor for amplitudes {low}", low
        )
    return np.array(powers)


def _check_amplitudes(amplitudes):
    a = np.asarray(amplitudes, dtype=float)
    if a.ndim != 1 or a.size < 4:
        raise ValueError("need at least 4 amplitudes")
    if np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError("amplitudes must be positive and finite")
    ratios = a[1:] / a[:-1]
    if not np.allclose(ratios, ratios[0], rtol=1e-6):
        raise ValueError("amplitudes must form a geometric sequence")
    if a.max() / a.min() < 10 * (1 - 1e-9):
        raise ValueError("amplitudes must span at least one decade")
    if a.max() > 0.2:
        raise ValueError("largest amplitude must be <= 0.2 for the leading order to dominate")
    return a


def _fit(a, powers):
    x, y = np.log(a), np.log(powers)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope) / 2, residual


def estimate_order(config, frequency, amplitudes, mode=None):
    """Amplitude order of a bin: half the log-log slope of power vs amplitude.

    ``residual`` is the RMS deviation of log(power) from the fitted line, large
    for bins that do not follow a single power law.
    """
    if int(frequency) < 1:
        raise ValueError("order estimation needs a frequency >= 1")
    a = _check_amplitudes(amplitudes)
    powers = sweep_powers(config, int(frequency), a, mode)
    order, residual = _fit(a, powers)
    return OrderEstimate(order, residual, a, powers)


def sweep_spectra(config, amplitudes, max_f, mode=None):
    """Spectra (rows) at each amplitude plus a mask of bins above the floor."""
    from .spectra import power_spectrum

    mode = _resolve_mode(config, mode)
    rows, ok = [], []
    for a in amplitudes:
        spec = power_spectrum(sample(config.with_amplitude(a), mode), max_f)
        rows.append(spec.power)
        ok.append(spec.power > spec.numerical_floor)
    return np.array(rows), np.array(ok)


def estimate_orders(config, frequencies, amplitudes, mode=None):
    """Order and residual for many bins from one sweep; NaN where a bin underflows."""
    a = _check_amplitudes(amplitudes)
    freqs = [int(f) for f in frequencies]
    if not freqs:
        return {}
    powers, ok = sweep_spectra(config, a, max(freqs), mode)
    out = {}
    for f in freqs:
        if f >= 1 and ok[:, f].all():
            out[f] = _fit(a, powers[:, f])
        else:
            out[f] = (math.nan, math.nan)
    return out


def local_amplitudes(amplitude, count=4):
    """Geometric sweep spanning one decade and ending at ``amplitude``."""
    return np.geomspace(amplitude / 10, amplitude, count)
