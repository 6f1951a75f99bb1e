"""Compare the compiled and pure-Python series kernels.

    python benchmarks/bench_kernels.py [--reps 200]

Also times 200 series inversions to precision 256 over F_16 under each
backend in a subprocess, since the backend is fixed at import.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from kisin import _pycore
from kisin.gf import field

try:
    from kisin import _ccore
except ImportError:
    _ccore = None


def kernel_cases(F, rng, length):
    a = [rng.randrange(F.q) for _ in range(length)]
    b = [rng.randrange(F.q) for _ in range(length)]
    unit = [rng.randrange(1, F.q)] + a[1:]
    return {
        "poly_mul": lambda m: m.poly_mul(a, b, F.add_t, F.mul_t),
        "poly_mul_trunc": lambda m: m.poly_mul_trunc(a, b, length, F.add_t, F.mul_t),
        "poly_addshift": lambda m: m.poly_addshift(a, b, 3, F.add_t),
        "series_inv": lambda m: m.series_inv(unit, length, F.add_t, F.neg_t, F.mul_t, F.inv_t),
    }


E2E = (
    "import random, time; from kisin import BACKEND; from kisin.gf import field;"
    "from kisin.series import LaurentElement; F = field(2, 4); r = random.Random(0);"
    "xs = [LaurentElement(F, 0, [r.randrange(1, 16)] + [r.randrange(16) for _ in range(60)]) for _ in range(200)];"
    "t = time.perf_counter(); n = sum(len((x.inverse(256) * x).truncate(256).coeffs) for x in xs);"
    "print(BACKEND, n, time.perf_counter() - t)"
)


def end_to_end(pure: bool):
    env = dict(os.environ)
    env["KISIN_PURE_PYTHON"] = "1" if pure else "0"
    out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
    backend, count, secs = out.stdout.split()
    return backend, int(count), float(secs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _ccore is None:
        print("compiled extension not built; only the pure-Python kernels are available")
        return
    rng = random.Random(args.seed)
    print(f"{'kernel':<16}{'q':>4}{'len':>6}{'python us':>12}{'cython us':>12}{'speedup':>9}")
    for q_p, m in ((2, 1), (3, 1), (2, 4)):
        F = field(q_p, m)
        for length in (16, 64, 256):
            for name, call in kernel_cases(F, rng, length).items():
                assert call(_pycore) == call(_ccore), name
                reps = max(args.reps * 16 // length, 5)
                tp = timeit.timeit(lambda: call(_pycore), number=reps) / reps * 1e6
                tc = timeit.timeit(lambda: call(_ccore), number=reps) / reps * 1e6
                print(f"{name:<16}{F.q:>4}{length:>6}{tp:>12.1f}{tc:>12.1f}{tp / tc:>8.1f}x")
    print()
    for pure in (True, False):
        backend, _, secs = end_to_end(pure)
        print(f"200 inversions over F_16 to precision 256: backend={backend:<7} {secs:.3f}s")


if __name__ == "__main__":
    main()
