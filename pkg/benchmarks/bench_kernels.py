"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py            # kernel table
    python3 benchmarks/bench_kernels.py --e2e      # also a full domination run per backend

The end-to-end run starts a fresh interpreter per backend, since the backend is
picked from NCSMOOTH_NO_NUMBA at import time.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from ncsmooth import _kernels as K


def best_of(fn, repeat: int) -> float:
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(rng: np.random.Generator):
    exps = rng.integers(0, 4, size=(12, 2))
    coeffs = rng.standard_normal(12)
    X = rng.standard_normal((200_000, 2))
    V = rng.standard_normal((100_000, 6, 6))
    w = rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
    E = rng.standard_normal((4096, 4, 4)) + 0j
    monos = rng.integers(0, 4, size=(20, 3))
    C = rng.standard_normal((130, 20))
    rows = rng.integers(0, 25, size=130)
    X3 = rng.standard_normal((35_937, 3))
    W = rng.standard_normal((256, 256)) + 0j
    E1 = rng.standard_normal((256, 4, 4)) + 0j
    E2 = rng.standard_normal((256, 4, 4)) + 0j
    return [
        ("poly_eval", lambda: K.poly_eval_np(exps, coeffs, X), lambda: K.poly_eval(exps, coeffs, X)),
        ("max_row_sum_sup", lambda: K.max_row_sum_sup_np(V), lambda: K.max_row_sum_sup(V)),
        ("packed_row_sum_sup", lambda: K.packed_row_sum_sup_np(monos, C, rows, 25, X3),
         lambda: K.packed_row_sum_sup(monos, C, rows, 25, X3)),
        ("weighted_matrix_sum", lambda: K.weighted_matrix_sum_np(w, E), lambda: K.weighted_matrix_sum(w, E)),
        ("ordered_sum_2d", lambda: K.ordered_sum_2d_np(W, E1, E2), lambda: K.ordered_sum_2d(W, E1, E2)),
    ]


E2E = """
import time
from fractions import Fraction
from ncsmooth import _kernels
from ncsmooth.grid import CompactBox
from ncsmooth.ncfunc import from_uea
from ncsmooth.pbw import parse_element
from ncsmooth.reps import catalog
from ncsmooth.seminorm_lab import verify_domination
S = catalog("heisenberg").system
a = from_uea(parse_element("e1^3*e2^2*e3^2 - 2*e1*e3^2 + e2^3*e3", S.algebra, 2), 2)
box = CompactBox.of((-1, 1), (0, Fraction(3, 2)))
verify_domination(a, (2,), box, 1, S)  # warm-up
t = time.perf_counter()
for _ in range(3):
    verify_domination(a, (2,), box, 1, S)
print(_kernels.BACKEND, time.perf_counter() - t)
"""


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--e2e", action="store_true")
    args = ap.parse_args()
    print(f"active backend: {K.BACKEND}")
    rng = np.random.default_rng(0)
    print(f"{'kernel':22s} {'numpy [ms]':>11s} {'active [ms]':>12s} {'speedup':>8s}")
    for name, slow, fast in cases(rng):
        a = np.asarray(slow())
        b = np.asarray(fast())
        assert np.allclose(a, b), name
        t0, t1 = best_of(slow, args.repeat), best_of(fast, args.repeat)
        print(f"{name:22s} {1e3 * t0:11.2f} {1e3 * t1:12.2f} {t0 / t1:8.1f}x")
    if args.e2e:
        for flag in ("0", "1"):
            env = dict(os.environ, NCSMOOTH_NO_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True)
            print("domination x3:", out.stdout.strip() or out.stderr.strip().splitlines()[-1])


if __name__ == "__main__":
    main()
