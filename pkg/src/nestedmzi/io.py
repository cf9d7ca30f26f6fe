"""CSV/JSON export and run manifests.

Floats are written with ``repr`` (shortest round-trip form) and JSON keys are
sorted, so identical inputs give byte-identical files.
"""

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field

from . import __version__
from .signals import TimeSeries


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def log10_power(p):
    return math.log10(p) if p > 0 else -math.inf


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def manifest_path(out_path):
    stem, _ = os.path.splitext(out_path)
    return stem + ".manifest.json"


def companion_path(out_path, suffix):
    stem, _ = os.path.splitext(out_path)
    return stem + suffix


def write_series_csv(path, series: TimeSeries):
    values = series.samples
    t = series.times
    if series.is_complex:
        header = ["j", "t", "re", "im"]
        rows = ([j, fmt(t[j]), fmt(v.real), fmt(v.imag)] for j, v in enumerate(values))
    else:
        header = ["j", "t", "value"]
        rows = ([j, fmt(t[j]), fmt(v)] for j, v in enumerate(values))
    _write_rows(path, header, rows)


def write_spectrum_csv(path, spec):
    rows = ([f, fmt(p), fmt(log10_power(p))] for f, p in enumerate(spec.power))
    _write_rows(path, ["f", "power", "log10_power"], rows)


def peak_rows(records):
    for r in records:
        labels = "; ".join(m.render() for m in r.matched_labels)
        residual = getattr(r, "residual", math.nan)
        yield [r.frequency, fmt(r.power), fmt(r.estimated_order), fmt(residual), labels]


def write_peaks_csv(path, records):
    _write_rows(path, ["f", "power", "order", "residual", "labels"], peak_rows(records))


def write_sweep_csv(path, amplitudes, powers):
    rows = ([fmt(a), fmt(p)] for a, p in zip(amplitudes, powers))
    _write_rows(path, ["amplitude", "power"], rows)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


@dataclass
class RunManifest:
    """Provenance for one CLI invocation. Output paths are stored relative to
    the manifest so that moving a run directory keeps it valid."""

    command: str
    config: object
    parameters: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def to_dict(self, base_dir):
        return {
            "tool": "nestedmzi",
            "version": __version__,
            "command": self.command,
            "fingerprint": self.config.fingerprint,
            "config": self.config.to_dict(),
            "parameters": self.parameters,
            "outputs": [
                {"path": os.path.relpath(p, base_dir), "sha256": _sha256(p)} for p in self.outputs
            ],
        }

    def write(self, path):
        base = os.path.dirname(os.path.abspath(path))
        write_json(path, self.to_dict(base))
        return path
