#!/usr/bin/env python3
"""Benchmark the jet-multiplication kernel: numba vs pure numpy.

The backend is fixed at import time by EXCAL_BACKEND, so this script
re-executes itself once per backend in a subprocess and prints a
comparison.  Measured:

* raw truncated-convolution kernel calls on representative jet spaces,
* one end-to-end identity suite through the verifier.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def time_kernel(n_vars, order, calls):
    import numpy as np

    from excal._kernels import mul_coeffs
    from excal.jets import jet_space

    sp = jet_space(n_vars, order)
    ia, ib, io = sp.mul_table
    rng = np.random.default_rng(0)
    a = rng.standard_normal(sp.size)
    b = rng.standard_normal(sp.size)
    mul_coeffs(a, b, ia, ib, io, sp.size)  # warm-up (numba compiles here)
    t0 = time.perf_counter()
    for _ in range(calls):
        mul_coeffs(a, b, ia, ib, io, sp.size)
    return (time.perf_counter() - t0) / calls


def time_suite():
    from excal import verifier

    t0 = time.perf_counter()
    reports = verifier.suite("dsquared", n_points=10)
    elapsed = time.perf_counter() - t0
    assert verifier.all_pass(reports)
    return elapsed


def run_one(repeat):
    from excal._kernels import backend_name

    shapes = [(2, 2), (3, 2), (4, 3), (6, 3)]
    results = {"backend": backend_name(), "kernel": {}, "suite_s": None}
    for n_vars, order in shapes:
        best = min(time_kernel(n_vars, order, 2000) for _ in range(repeat))
        results["kernel"][f"n{n_vars}_o{order}"] = best
    results["suite_s"] = min(time_suite() for _ in range(repeat))
    return results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.child:
        json.dump(run_one(args.repeat), sys.stdout)
        return

    rows = []
    for backend in ("numpy", "numba"):
        env = dict(os.environ, EXCAL_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--child",
             "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            print(f"{backend}: failed\n{proc.stderr}", file=sys.stderr)
            continue
        rows.append(json.loads(proc.stdout))

    if not rows:
        sys.exit(1)
    keys = sorted(rows[0]["kernel"])
    print(f"{'case':>10s}  " + "  ".join(f"{r['backend']:>12s}" for r in rows))
    for key in keys:
        cells = "  ".join(f"{r['kernel'][key] * 1e6:10.2f}us" for r in rows)
        print(f"{key:>10s}  {cells}")
    cells = "  ".join(f"{r['suite_s']:11.3f}s" for r in rows)
    print(f"{'suite':>10s}  {cells}")
    if len(rows) == 2:
        base, fast = rows[0], rows[1]
        speedups = [
            base["kernel"][k] / fast["kernel"][k] for k in keys if fast["kernel"][k]
        ]
        print(
            f"\nkernel speedup ({fast['backend']} over {base['backend']}): "
            f"{min(speedups):.1f}x - {max(speedups):.1f}x; "
            f"suite {base['suite_s'] / fast['suite_s']:.1f}x"
        )


if __name__ == "__main__":
    main()
