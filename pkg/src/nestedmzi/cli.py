"""Command-line front end: ``nestedmzi simulate|spectrum|peaks|sweep``."""

import argparse
import json
import math
import os
import sys
import warnings
from importlib import resources

from . import analysis, io
from .analysis import MAX_LABEL_ORDER, OrderUnderflowError
from .experiment import ELEMENTS, ConfigError, Variant, config_from_dict, load_config
from .labels import canonical
from .numerics import AliasingError
from .signals import SignalMode, default_mode, sample
from .spectra import NoiseSpec, add_dark_counts, normalize, power_spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_ALIASING = 4
EXIT_UNDERFLOW = 5


def preset_names():
    return sorted(
        p.name[:-5] for p in resources.files("nestedmzi.presets").iterdir() if p.name.endswith(".json")
    )


def resolve_config(name_or_path):
    """Load a config file, or a bundled preset when no such file exists."""
    if os.path.exists(name_or_path):
        return load_config(name_or_path)
    if name_or_path in preset_names():
        text = resources.files("nestedmzi.presets").joinpath(name_or_path + ".json").read_text()
        return config_from_dict(json.loads(text))
    raise ConfigError(
        f"config: {name_or_path!r} is neither a file nor a preset ({', '.join(preset_names())})",
        "config",
    )


def _mode(config, args):
    return SignalMode(args.mode) if getattr(args, "mode", None) else default_mode(config)


def _series(config, args):
    series = sample(config, _mode(config, args))
    rate = getattr(args, "noise_rate", None)
    if rate:
        series = add_dark_counts(series, NoiseSpec(rate, args.seed))
    return series


def default_max_f(config, mode):
    """Largest frequency carrying content up to the label-search order."""
    table = analysis.label_table(config, MAX_LABEL_ORDER, mode)
    top = max(table, default=config.max_frequency)
    return min(top, config.samples // 2 - 1)


def _finish(args, config, command, params, outputs):
    manifest = io.RunManifest(command, config, params, outputs)
    manifest.write(io.manifest_path(args.out))


def cmd_simulate(args):
    config = resolve_config(args.config)
    series = _series(config, args)
    io.write_series_csv(args.out, series)
    params = {"mode": _mode(config, args).value, "noise_rate": args.noise_rate, "seed": args.seed}
    _finish(args, config, "simulate", params, [args.out])
    return EXIT_OK


def cmd_spectrum(args):
    config = resolve_config(args.config)
    mode = _mode(config, args)
    max_f = args.max_f if args.max_f is not None else default_max_f(config, mode)
    spec = power_spectrum(_series(config, args), max_f)
    if args.normalize:
        spec = normalize(spec)
    json_path = io.companion_path(args.out, ".json")
    io.write_spectrum_csv(args.out, spec)
    doc = spec.to_dict()
    doc["manifest"] = os.path.basename(io.manifest_path(args.out))
    io.write_json(json_path, doc)
    params = {
        "max_f": max_f,
        "mode": mode.value,
        "normalize": bool(args.normalize),
        "noise_rate": args.noise_rate,
        "seed": args.seed,
    }
    _finish(args, config, "spectrum", params, [args.out, json_path])
    return EXIT_OK


def element_rows(config, mode, max_order):
    """First order of each single-element line, with "absent" wording."""
    rows = []
    for i, x in enumerate(ELEMENTS):
        coeffs = [0] * len(ELEMENTS)
        coeffs[i] = 1
        label = canonical(coeffs, config.frequencies)
        first = analysis.first_order_of(config, label, mode)
        if first is not None and first > max_order:
            first = None
        if first is None:
            status = f"absent through order {max_order}"
        elif first == 1:
            status = "first order"
        else:
            status = f"absent through order {first - 1}; order {first}"
        rows.append({"label": label.render(), "frequency": config.freq(x), "first_order": first, "status": status})
    return rows


def reconcile(config, records, predicted, max_order):
    detected = {r.frequency: r for r in records}
    rows = []
    for p in predicted:
        r = detected.get(p.frequency)
        rows.append(
            {
                "frequency": p.frequency,
                "predicted_order": p.leading_order,
                "detected": r is not None,
                "estimated_order": r.estimated_order if r else math.nan,
                "labels": [m.render() for m in p.labels],
            }
        )
    unexplained = [r.frequency for r in records if not r.matched_labels]
    return rows, unexplained


def format_table(config, rows, unexplained, elements, max_order, floor_factor):
    lines = [f"PREDICTED vs DETECTED  (orders <= {max_order}, floor factor {floor_factor:g})"]
    lines.append(f"{'f':>5}  {'pred':>4}  {'det':>3}  {'est':>6}  labels")
    for row in rows:
        est = row["estimated_order"]
        est_s = "   -  " if math.isnan(est) else f"{est:6.2f}"
        labels = "; ".join(row["labels"][:3]) + (" ..." if len(row["labels"]) > 3 else "")
        det = "yes" if row["detected"] else "no"
        lines.append(f"{row['frequency']:>5}  {row['predicted_order']:>4}  {det:>3}  {est_s}  {labels}")
    lines.append(f"unexplained detections: {len(unexplained)}" + (f" at {unexplained}" if unexplained else ""))
    lines.append("single-element lines:")
    for e in elements:
        lines.append(f"  {e['label']:>6} (f={e['frequency']}): {e['status']}")
    return "\n".join(lines)


def cmd_peaks(args):
    config = resolve_config(args.config)
    mode = _mode(config, args)
    if not 1 <= args.max_order <= MAX_LABEL_ORDER:
        raise ValueError(f"--max-order must lie in 1..{MAX_LABEL_ORDER}")
    max_f = args.max_f if args.max_f is not None else default_max_f(config, mode)
    spec = power_spectrum(_series(config, args), max_f)
    records = analysis.classify_peaks(spec, config, args.floor_factor, MAX_LABEL_ORDER)
    if 0 < config.amplitude <= 0.2 and records:
        fits = analysis.estimate_orders(
            config, [r.frequency for r in records], analysis.local_amplitudes(config.amplitude), mode
        )
        for r in records:
            r.estimated_order, r.residual = fits[r.frequency]
    predicted = [p for p in analysis.predicted_peaks(config, args.max_order, mode) if p.frequency <= max_f]
    rows, unexplained = reconcile(config, records, predicted, args.max_order)
    elements = element_rows(config, mode, args.max_order)
    table = format_table(config, rows, unexplained, elements, args.max_order, args.floor_factor)
    print(table)

    json_path = io.companion_path(args.out, ".json")
    io.write_peaks_csv(args.out, records)
    doc = {
        "fingerprint": config.fingerprint,
        "manifest": os.path.basename(io.manifest_path(args.out)),
        "numerical_floor": spec.numerical_floor,
        "threshold": analysis.detection_threshold(spec, args.floor_factor),
        "peaks": [
            {
                "frequency": r.frequency,
                "power": r.power,
                "estimated_order": r.estimated_order,
                "residual": r.residual,
                "labels": [m.render() for m in r.matched_labels],
            }
            for r in records
        ],
        "reconciliation": rows,
        "unexplained": unexplained,
        "single_element_lines": elements,
    }
    if config.variant is Variant.PHASE and config.amplitude > 0:
        doc["leading_constants"] = analysis.leading_constants(config)
    io.write_json(json_path, doc)
    params = {
        "floor_factor": args.floor_factor,
        "max_order": args.max_order,
        "max_f": max_f,
        "mode": mode.value,
        "noise_rate": args.noise_rate,
        "seed": args.seed,
    }
    _finish(args, config, "peaks", params, [args.out, json_path])
    return EXIT_OK


def parse_amplitudes(text):
    """Comma list ``1e-3,1e-2,...`` or geometric range ``lo:hi:count``."""
    import numpy as np

    if ":" in text:
        lo, hi, count = text.split(":")
        return np.geomspace(float(lo), float(hi), int(count))
    return np.array([float(v) for v in text.split(",") if v.strip()])


def cmd_sweep(args):
    config = resolve_config(args.config)
    mode = _mode(config, args)
    amps = parse_amplitudes(args.amps)
    est = analysis.estimate_order(config, args.frequency, amps, mode)
    json_path = io.companion_path(args.out, ".json")
    io.write_sweep_csv(args.out, est.amplitudes, est.powers)
    io.write_json(
        json_path,
        {
            "fingerprint": config.fingerprint,
            "manifest": os.path.basename(io.manifest_path(args.out)),
            "frequency": args.frequency,
            "order": est.order,
            "residual": est.residual,
        },
    )
    print(f"f={args.frequency}: order {est.order:.3f} (residual {est.residual:.2e})")
    params = {"frequency": args.frequency, "amplitudes": [float(a) for a in amps], "mode": mode.value}
    _finish(args, config, "sweep", params, [args.out, json_path])
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="config JSON file or preset name")
    common.add_argument("--out", required=True, help="output CSV path")
    common.add_argument("--seed", type=int, default=0, help="dark-count RNG seed")
    common.add_argument("--mode", choices=[m.value for m in SignalMode], help="phase-variant signal")

    parser = argparse.ArgumentParser(prog="nestedmzi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="write the detector time series")
    p.add_argument("--noise-rate", type=float, default=0.0, help="dark counts per base period")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", parents=[common], help="write the power spectrum")
    p.add_argument("--max-f", type=int, help="highest bin (default: highest labelled line)")
    p.add_argument("--normalize", action="store_true", help="divide by DC, or by the largest bin for G'")
    p.add_argument("--noise-rate", type=float, default=0.0, help="dark counts per base period")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("peaks", parents=[common], help="detect, label and reconcile peaks")
    p.add_argument("--floor-factor", type=float, default=10.0, help="threshold in units of the median bin")
    p.add_argument("--max-order", type=int, default=MAX_LABEL_ORDER, help="highest predicted order (1-6)")
    p.add_argument("--max-f", type=int, help="highest bin (default: highest labelled line)")
    p.add_argument("--noise-rate", type=float, default=0.0, help="dark counts per base period")
    p.set_defaults(func=cmd_peaks)

    p = sub.add_parser("sweep", parents=[common], help="fit the amplitude order of one bin")
    p.add_argument("--frequency", type=int, required=True)
    p.add_argument("--amps", required=True, help="comma list or lo:hi:count (geometric)")
    p.set_defaults(func=cmd_sweep)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def _run(args):
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AliasingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALIASING
    except OrderUnderflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDERFLOW
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None):
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        return _run(args)


if __name__ == "__main__":
    sys.exit(main())
