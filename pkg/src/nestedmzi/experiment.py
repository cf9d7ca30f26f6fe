"""Experiment configurations and the time-dependent three-mode transfer chain."""

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .labels import ELEMENTS, path_labels
from .numerics import unit_sine

MAX_ANALYSIS_ORDER = 6
DEFAULT_SAMPLES = 4096

# No harmonic or order <= 2 label coincidences (see frequency_collisions).
DEFAULT_FREQUENCIES = {"A": 3, "B": 5, "C": 7, "E": 16, "F": 23}
UNIT_STEP_FREQUENCIES = {"A": 1, "B": 2, "C": 3, "E": 4, "F": 5}


class Variant(str, Enum):
    PHASE = "PhaseModulation"
    DISPLACEMENT = "BeamDisplacement"


class Topology(str, Enum):
    STANDARD = "Standard"
    BLOCKED = "BlockedPathC"
    DOVE = "DovePrism"


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class FrequencyCollisionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One nested-interferometer setup.

    ``frequencies`` is ordered as :data:`ELEMENTS` (A, B, C, E, F), each an
    integer harmonic of the unit base frequency. ``amplitude`` is the common
    phase amplitude A0 in radians (phase variant) or the displacement ratio
    delta/sigma (displacement variant).
    """

    variant: Variant
    amplitude: float
    frequencies: tuple = tuple(DEFAULT_FREQUENCIES[x] for x in ELEMENTS)
    topology: Topology = Topology.STANDARD
    sigma: float = 1.0
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "topology", Topology(self.topology))
        if isinstance(self.frequencies, dict):
            freqs = tuple(self.frequencies.get(x) for x in ELEMENTS)
        else:
            freqs = tuple(self.frequencies)
        object.__setattr__(self, "frequencies", freqs)

    def freq(self, element):
        return self.frequencies[ELEMENTS.index(element)]

    @property
    def frequency_map(self):
        return dict(zip(ELEMENTS, self.frequencies))

    @property
    def max_frequency(self):
        return max(self.frequencies)

    def with_amplitude(self, amplitude):
        return replace(self, amplitude=float(amplitude))

    def to_dict(self):
        return {
            "variant": self.variant.value,
            "topology": self.topology.value,
            "amplitude": self.amplitude,
            "frequencies": self.frequency_map,
            "sigma": self.sigma,
            "samples": self.samples,
        }

    @property
    def fingerprint(self):
        """Short content hash of the canonical JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @classmethod
    def fig3_preset(cls):
        return cls(Variant.PHASE, math.pi / 500, UNIT_STEP_FREQUENCIES)

    @classmethod
    def fig4_preset(cls):
        return cls(Variant.DISPLACEMENT, 1e-3, UNIT_STEP_FREQUENCIES)


CONFIG_FIELDS = ("variant", "topology", "amplitude", "frequencies", "sigma", "samples")


def _as_int(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field}: expected an integer, got {value!r}", field)
    if isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{field}: expected an integer, got {value!r}", field)
    return int(value)


def _as_float(value, field):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field}: expected a number, got {value!r}", field)
    if not math.isfinite(value):
        raise ConfigError(f"{field}: must be finite, got {value!r}", field)
    return float(value)


def config_from_dict(data):
    """Build and validate a config from its JSON document form."""
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object", None)
    unknown = sorted(set(data) - set(CONFIG_FIELDS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown field", unknown[0])
    for field in ("variant", "amplitude", "frequencies"):
        if field not in data:
            raise ConfigError(f"{field}: missing required field", field)

    try:
        variant = Variant(data["variant"])
    except ValueError:
        raise ConfigError(f"variant: unknown variant {data['variant']!r}", "variant") from None
    try:
        topology = Topology(data.get("topology", Topology.STANDARD.value))
    except ValueError:
        raise ConfigError(f"topology: unknown topology {data['topology']!r}", "topology") from None

    freqs = data["frequencies"]
    if not isinstance(freqs, dict):
        raise ConfigError("frequencies: expected an object keyed by A, B, C, E, F", "frequencies")
    extra = sorted(set(freqs) - set(ELEMENTS))
    if extra:
        raise ConfigError(f"frequencies.{extra[0]}: unknown element", f"frequencies.{extra[0]}")
    missing = [x for x in ELEMENTS if x not in freqs]
    if missing:
        raise ConfigError(
            f"frequencies.{missing[0]}: missing frequency", f"frequencies.{missing[0]}"
        )
    freq_tuple = tuple(_as_int(freqs[x], f"frequencies.{x}") for x in ELEMENTS)

    config = ExperimentConfig(
        variant=variant,
        topology=topology,
        amplitude=_as_float(data["amplitude"], "amplitude"),
        frequencies=freq_tuple,
        sigma=_as_float(data.get("sigma", 1.0), "sigma"),
        samples=_as_int(data.get("samples", DEFAULT_SAMPLES), "samples"),
    )
    return validate(config)


def load_config(path):
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def frequency_collisions(freqs):
    """Low-order coincidences that make peak labels ambiguous.

    Two kinds are reported: harmonics ``n*f_X == m*f_Y`` with 1 <= n, m <= 3,
    and equal frequencies of two distinct path labels of order <= 2.
    """
    freqs = tuple(int(f) for f in freqs)
    found = []
    for i, x in enumerate(ELEMENTS):
        for j in range(i + 1, len(ELEMENTS)):
            y = ELEMENTS[j]
            for n in (1, 2, 3):
                for m in (1, 2, 3):
                    if n * freqs[i] == m * freqs[j]:
                        found.append(f"{n}*f{x} = {m}*f{y} = {n * freqs[i]}")
    by_freq = {}
    for lab in path_labels(freqs, 2):
        by_freq.setdefault(lab.frequency(freqs), []).append(lab)
    for f, labs in sorted(by_freq.items()):
        if len(labs) > 1:
            found.append(" = ".join(lab.render() for lab in labs) + f" = {f}")
    return found


def validate(config):
    """Check every config invariant; warn (not fail) on frequency collisions."""
    if config.variant not in (Variant.PHASE, Variant.DISPLACEMENT):
        raise ConfigError("variant: unknown variant", "variant")
    if len(config.frequencies) != len(ELEMENTS) or any(f is None for f in config.frequencies):
        raise ConfigError("frequencies: all of A, B, C, E, F are required", "frequencies")
    for x, f in zip(ELEMENTS, config.frequencies):
        if isinstance(f, bool) or int(f) != f:
            raise ConfigError(f"frequencies.{x}: must be an integer", f"frequencies.{x}")
        if f < 1:
            raise ConfigError(f"frequencies.{x}: must be >= 1, got {f}", f"frequencies.{x}")
    if not math.isfinite(config.amplitude) or config.amplitude < 0:
        raise ConfigError("amplitude: must be finite and >= 0", "amplitude")
    if not (config.sigma > 0 and math.isfinite(config.sigma)):
        raise ConfigError("sigma: must be positive", "sigma")
    if config.topology is Topology.DOVE and config.variant is not Variant.DISPLACEMENT:
        raise ConfigError("topology: DovePrism requires the BeamDisplacement variant", "topology")
    n = config.samples
    if n < 4 or n & (n - 1):
        raise ConfigError(f"samples: must be a power of two, got {n}", "samples")
    need = 4 * config.max_frequency * MAX_ANALYSIS_ORDER
    if n < need:
        raise ConfigError(
            f"samples: {n} undersamples order-{MAX_ANALYSIS_ORDER} analysis (need >= {need})",
            "samples",
        )
    collisions = frequency_collisions(config.frequencies)
    if collisions:
        warnings.warn(
            "frequency set has low-order collisions: " + "; ".join(collisions[:4]),
            FrequencyCollisionWarning,
            stacklevel=2,
        )
    return config


# -- transfer chain ----------------------------------------------------------

_R13 = math.sqrt(1.0 / 3.0)
_R23 = math.sqrt(2.0 / 3.0)
_R12 = math.sqrt(0.5)

BS_INPUT = np.array([[_R23, 0, _R13], [0, 1, 0], [_R13, 0, -_R23]], dtype=complex)
BS_INNER = np.array([[_R12, _R12, 0], [_R12, -_R12, 0], [0, 0, 1]], dtype=complex)
BS_OUTPUT = np.array([[1, 0, 0], [0, _R23, _R13], [0, _R13, -_R23]], dtype=complex)


def phases(config, t):
    """phi_X(t) = A0 sin(2 pi f_X t) for every element, keyed by name."""
    return {x: config.amplitude * unit_sine(f, t) for x, f in config.frequency_map.items()}


def transfer_chain(config, t):
    """Ordered product of the seven factors mapping input to output modes."""
    phi = phases(config, t)
    e = {x: np.exp(1j * float(p)) for x, p in phi.items()}
    c_path = 0.0 if config.topology is Topology.BLOCKED else e["C"]
    mod_ec = np.diag([e["E"], 1.0, c_path])
    mod_ab = np.diag([e["A"], e["B"], 1.0])
    mod_f = np.diag([1.0, e["F"], 1.0])
    return BS_OUTPUT @ mod_f @ BS_INNER @ mod_ab @ BS_INNER @ mod_ec @ BS_INPUT


def transfer_at(config, t):
    """3x3 mode transfer matrix at time ``t`` in [0, 1) (phase variant only).

    Unitary for the standard topology; the blocked topology absorbs path C and
    the matrix becomes sub-unitary.
    """
    if config.variant is not Variant.PHASE:
        raise ConfigError("transfer_at needs the PhaseModulation variant", "variant")
    if not (0.0 <= t < 1.0):
        raise ValueError(f"t must lie in [0, 1), got {t}")
    return transfer_chain(config, t)
