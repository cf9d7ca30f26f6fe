"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--samples 4096]

Numba timings exclude JIT compilation (one warm-up call per kernel).
"""

import argparse
import timeit

import numpy as np

from nestedmzi import kernels


def cases(n):
    rng = np.random.default_rng(0)
    x = rng.uniform(-6, 6, size=n)
    samples = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    real = rng.standard_normal(n)
    freqs = np.arange(128)
    d = rng.uniform(-0.5, 0.5, size=(3, 256))
    return {
        "erf": lambda m: m.erf(x),
        "bessel_j (1000 scalar calls)": lambda m: [m.bessel_j(k % 6, v) for k, v in enumerate(x[:1000])],
        "dft_bins (128 bins)": lambda m: m.dft_bins(samples, freqs),
        "sine_bins (128 bins)": lambda m: m.sine_bins(real, freqs),
        "sign_overlap (256 t, 4001 y)": lambda m: m.sign_overlap(*d, (1.0, 1.0, -1.0), 1.0, 8.0, 4001),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--samples", type=int, default=4096)
    args = parser.parse_args(argv)

    backends = kernels.backends()
    names = sorted(backends)
    print(f"{'kernel':<30}" + "".join(f"{n + ' [ms]':>14}" for n in names) + f"{'speed-up':>10}")
    for label, fn in cases(args.samples).items():
        times = {}
        for name in names:
            mod = backends[name]
            fn(mod)
            times[name] = 1e3 * min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        ratio = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        print(f"{label:<30}" + "".join(f"{times[n]:>14.3f}" for n in names) + f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
