"""Time the numba and numpy kernel backends on realistic array sizes.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]

Each kernel is run once untimed (numba compiles on first call), then the
best of ``--repeat`` runs is reported along with the max abs difference
between the two outputs.
"""

import argparse
import timeit

import numpy as np

from bspsk.kernels import _numpy as numpy_impl

try:
    from bspsk.kernels import _numba as numba_impl
except ImportError:  # pragma: no cover
    numba_impl = None


def cases(n, rng):
    t = np.arange(n) / 96e6 - 0.5e-3
    x = rng.standard_normal(n)
    ref = np.cos(2 * np.pi * 10e6 * t)
    w = rng.uniform(0.1, 3.0, 6)
    delays = np.array([0, 96, 250])
    gains = np.array([1.0, 0.631, -0.2])
    return {
        "sweep_phase": lambda m: m.sweep_phase(t, 2 * np.pi * 10e6, 1000.0, 2 * np.pi * 4e6, 1e-3),
        "dtft_magnitude": lambda m: m.dtft_magnitude(x, w),
        "tapped_delay": lambda m: m.tapped_delay(x, delays, gains),
        "integrate_dump": lambda m: m.integrate_dump(x, ref, 2400),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=960_000, help="array length (default 10 sweeps)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if numba_impl is None:
        print("numba is not installed; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}{'max diff':>11}")
    for name, fn in cases(args.samples, rng).items():
        ref, fast = fn(numpy_impl), fn(numba_impl)
        t_np = min(timeit.repeat(lambda: fn(numpy_impl), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: fn(numba_impl), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np.asarray(ref) - np.asarray(fast))))
        print(f"{name:<16}{1e3 * t_np:>10.2f}{1e3 * t_nb:>10.2f}{t_np / t_nb:>8.1f}x{diff:>11.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
