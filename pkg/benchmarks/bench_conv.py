"""Timing comparison of the compiled convolution core against the NumPy
fallback.

Times the raw conv kernels on sparse 1- and 2-variable coefficient sets, and
a product-heavy end-to-end path (squaring a random positive polynomial and
certifying its sup norm).  Run from a checkout:

    python3 benchmarks/bench_conv.py

The fallback is selected with LATFAC_PURE_PYTHON=1 in a child process so the
same build serves both measurements.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

WORKER = """
import json, time
import numpy as np
from latfac import conv_backend
from latfac._conv import convolve1, convolve2
from latfac.trigpoly import TrigPoly1, TrigPoly2, sup_norm_certified

rng = np.random.default_rng(42)

def poly1(n):
    c = {0: complex(rng.normal())}
    for j in range(1, n + 1):
        z = complex(rng.normal(), rng.normal()) / (1 + j)
        c[j], c[-j] = z, z.conjugate()
    return c

def poly2(n):
    c = {(0, 0): complex(rng.normal())}
    for j in range(-n, n + 1):
        for k in range(-n, n + 1):
            if (j, k) <= (0, 0):
                continue
            z = complex(rng.normal(), rng.normal()) / (1 + abs(j) + abs(k))
            c[(j, k)], c[(-j, -k)] = z, z.conjugate()
    return c

def best_of(fn, reps=5):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

a1, b1 = poly1(256), poly1(256)
a2, b2 = poly2(24), poly2(24)
t1 = TrigPoly1(poly1(64))
t2 = TrigPoly2(poly2(8))

res = {
    "backend": conv_backend,
    "conv1_n256_ms": best_of(lambda: convolve1(a1, b1)) * 1e3,
    "conv2_n24_ms": best_of(lambda: convolve2(a2, b2)) * 1e3,
    "square1_n64_ms": best_of(lambda: t1 * t1) * 1e3,
    "square2_n8_ms": best_of(lambda: t2 * t2) * 1e3,
}
print(json.dumps(res))
"""


def run(pure: bool) -> dict:
    env = dict(os.environ)
    if pure:
        env["LATFAC_PURE_PYTHON"] = "1"
    else:
        env.pop("LATFAC_PURE_PYTHON", None)
    out = subprocess.run(
        [sys.executable, "-c", WORKER], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().split("\n")[-1])


def main():
    compiled = run(pure=False)
    pure = run(pure=True)
    print(f"{'kernel':<18}{'compiled ms':>14}{'pure ms':>14}{'speedup':>10}")
    for key in ("conv1_n256_ms", "conv2_n24_ms", "square1_n64_ms", "square2_n8_ms"):
        c, p = compiled[key], pure[key]
        print(f"{key[:-3]:<18}{c:>14.3f}{p:>14.3f}{p / c:>10.2f}x")
    print(f"backends: {compiled['backend']} vs {pure['backend']}")


if __name__ == "__main__":
    main()
