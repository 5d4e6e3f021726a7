"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the Jacobi eigensolver and the xorshift fill directly, then a harness
suite run in a subprocess for each backend (the backend is fixed at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from spectral_ous import _kernels_py
from spectral_ous.rng import ShiftRegisterRNG

try:
    from spectral_ous import _kernels as _compiled
except ImportError:
    _compiled = None

SUITE_SNIPPET = (
    "import time; from spectral_ous.harness import SuiteConfig, run_suite;"
    "t=time.perf_counter(); run_suite(SuiteConfig('matrix:6', 0, {trials}, ('compression-axioms',)));"
    "print(time.perf_counter()-t)"
)


def bench_kernels(repeat):
    rng = ShiftRegisterRNG(0)
    mats = {n: [rng.symmetric_gaussian(n) for _ in range(20)] for n in (4, 8, 16)}
    buf = np.empty(100_000)
    rows = []
    backends = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    for n, ms in mats.items():
        for name, mod in backends:
            t = min(timeit.repeat(lambda: [mod.jacobi_sweeps(m, 1e-12, 100) for m in ms],
                                  number=1, repeat=repeat)) / len(ms)
            rows.append((f"jacobi n={n}", name, t))
    for name, mod in backends:
        t = min(timeit.repeat(lambda: mod.xorshift_fill(12345, buf), number=1, repeat=repeat))
        rows.append(("xorshift 1e5", name, t))
    return rows


def bench_suite(trials):
    rows = []
    for name, env in (("python", {"SPECTRAL_OUS_PURE_PYTHON": "1"}), ("default", {})):
        out = subprocess.run([sys.executable, "-c", SUITE_SNIPPET.format(trials=trials)],
                             env=dict(os.environ, **env), capture_output=True, text=True, check=True)
        rows.append((f"compression suite matrix:6 x{trials}", name, float(out.stdout)))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--trials", type=int, default=1000)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled kernels not built; only the fallback is timed")
    rows = bench_kernels(args.repeat) + bench_suite(args.trials)
    base = {}
    print(f"{'benchmark':38s} {'backend':8s} {'seconds':>12s} {'speedup':>8s}")
    for bench, backend, t in rows:
        if backend == "python":
            base[bench] = t
        ratio = base.get(bench, t) / t
        print(f"{bench:38s} {backend:8s} {t:12.6f} {ratio:8.1f}x")


if __name__ == "__main__":
    main()
