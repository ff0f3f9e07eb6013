"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Each case runs through the public API so dispatch overhead is included.
Numba compile time is excluded by one warm-up call per case.
"""

import argparse
import time

from primedelta import _backend, expsums, moments, sieves, spacing, summatory, voronoi


def cases(scale: float):
    n = int(2e6 * scale)
    return {
        "divisor sieve": lambda: sieves.sieve_segment(1, n + 1),
        "delta stream": lambda: sum(1 for _ in summatory.delta_stream(n)),
        "close pairs": lambda: spacing.count_close_pairs(int(2e5 * scale), 3.0),
        "spacing B": lambda: spacing.count_spacing_B(
            spacing.SpacingInstance(64, 64, 64, 0.5, 0.5, 1e-2)),
        "T sum": lambda: spacing.T_sum(max(1, int(256 * scale)), 256, 0.5, 0.5),
        "exp sum": lambda: expsums.exp_sum(expsums.PhaseFunction.power(1.0, 0.5), 0, 2e6 * scale),
        "voronoi": lambda: voronoi.voronoi_residual_stats(10**5, 18, 2001),
        "shifted moment": lambda: moments.shifted_delta_sum(int(1e5 * scale), 10),
    }


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()

    previous = _backend.backend_name()
    print(f"{'case':<16}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    try:
        for name, fn in cases(args.scale).items():
            _backend.set_backend("numba")
            fn()  # compile
            t_nb = timeit(fn, args.repeat)
            _backend.set_backend("numpy")
            t_np = timeit(fn, args.repeat)
            print(f"{name:<16}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")
    finally:
        _backend.set_backend(previous)


if __name__ == "__main__":
    main()
