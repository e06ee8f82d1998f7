"""Timing comparison of the compiled monodromy kernels vs the numpy fallback.

Run as a script:  python benchmarks/bench_kernels.py [--sizes 2,4,8,16]

Both backends are imported directly (the TODASOV_PURE switch picks the
fallback for a whole process; here we want both side by side).  Outputs
are checked for agreement before timing, so the numbers always describe
two implementations of the same function.
"""

import argparse
import sys
import time

import numpy as np

from todasov import _kernels_py

try:
    from todasov import _flowkernel
except ImportError:
    _flowkernel = None


def _agree(a, b, rtol=1e-13):
    # Coefficient magnitudes grow combinatorially with n, so small entries
    # carry cancellation noise; compare against each array's own scale.
    return all(np.allclose(x, y, rtol=rtol, atol=rtol * np.abs(x).max())
               for x, y in zip(a, b))


def _time(fn, args, repeat: int) -> float:
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best


def run(sizes, repeat: int) -> int:
    rng = np.random.default_rng(3)
    print(f"{'n':>4} {'kernel':<16} {'numpy us':>10} {'compiled us':>12} "
          f"{'speedup':>8}")
    for n in sizes:
        p = rng.uniform(-2, 2, n)
        q = rng.uniform(-2, 2, n)
        for name in ("monodromy_coeffs", "tvec_and_grads"):
            ref = getattr(_kernels_py, name)
            t_py = _time(ref, (p, q), repeat)
            if _flowkernel is None:
                print(f"{n:>4} {name:<16} {t_py * 1e6:>10.2f} "
                      f"{'missing':>12} {'-':>8}")
                continue
            fast = getattr(_flowkernel, name)
            if not _agree(ref(p, q), fast(p, q)):
                print(f"backends disagree on {name} at n={n}",
                      file=sys.stderr)
                return 1
            t_c = _time(fast, (p, q), repeat)
            print(f"{n:>4} {name:<16} {t_py * 1e6:>10.2f} "
                  f"{t_c * 1e6:>12.2f} {t_py / t_c:>8.1f}x")
    return 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="2,4,8,16")
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args()
    sizes = [int(v) for v in args.sizes.split(",")]
    return run(sizes, args.repeat)


if __name__ == "__main__":
    sys.exit(main())
