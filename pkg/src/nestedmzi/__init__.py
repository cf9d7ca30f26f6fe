"""Simulated power spectra of nested Mach-Zehnder interferometers with
modulated elements, and tools to classify their peaks by amplitude order."""

__version__ = "0.1.0"

from .analysis import (
    bessel_coefficient,
    classify_peaks,
    estimate_order,
    predicted_peaks,
)
from .experiment import ConfigError, ExperimentConfig, Topology, Variant, load_config
from .signals import SignalKind, SignalMode, sample
from .spectra import NoiseSpec, add_dark_counts, normalize, power_spectrum

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "NoiseSpec",
    "SignalKind",
    "SignalMode",
    "Topology",
    "Variant",
    "add_dark_counts",
    "bessel_coefficient",
    "classify_peaks",
    "estimate_order",
    "load_config",
    "normalize",
    "power_spectrum",
    "predicted_peaks",
    "sample",
]
