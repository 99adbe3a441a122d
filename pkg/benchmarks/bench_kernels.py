"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--json]

Kernel timings call both modules directly in this process. End-to-end
timings run the golden scenario in fresh interpreters, once per backend,
with ``COORDPURSUIT_PURE`` selecting the fallback.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import timeit

from coordpursuit import _kernels_py
from coordpursuit.geometry import Polygon

try:
    from coordpursuit import _kernels as _compiled
except ImportError:
    _compiled = None

RUN_SNIPPET = """
import time
from coordpursuit import kernels, scenario
from coordpursuit.engine import run
sc = scenario.builtin("golden")
run(sc.config, "idle")
t0 = time.perf_counter()
for spec in ("idle", "random_admissible", "greedy_flee", "boundary_hugger"):
    run(sc.config, spec)
print(kernels.BACKEND, time.perf_counter() - t0)
"""


def _polygon(n: int):
    poly = Polygon([(3 * math.cos(2 * math.pi * k / n), 2 * math.sin(2 * math.pi * k / n)) for k in range(n)])
    return poly._vx, poly._vy, poly._nx, poly._ny, poly._off


def cases(mod):
    vx, vy, nx, ny, off = _polygon(24)
    return {
        "poly_sdf (24 edges)": lambda: mod.poly_sdf(vx, vy, nx, ny, off, 4.0, 1.0),
        "poly_max_fraction": lambda: mod.poly_max_fraction(nx, ny, off, 0.1, 0.2, 5.0, 1.0, 1e-7),
        "ellipse_nearest": lambda: mod.ellipse_nearest(3.0, 2.0, 4.0, 1.5),
        "ellipse_max_fraction": lambda: mod.ellipse_max_fraction(3.0, 2.0, 0.1, 0.2, 5.0, 1.0),
        "capture_fraction": lambda: mod.capture_fraction(1.0, 0.5, -0.5, -0.2, 1e-6),
        "crossing_fraction": lambda: mod.crossing_fraction(0.3, -0.1),
    }


def time_kernels(repeat: int) -> list[dict]:
    rows = []
    pure = cases(_kernels_py)
    fast = cases(_compiled) if _compiled is not None else {}
    for name, fn in pure.items():
        n = 20_000
        tp = min(timeit.repeat(fn, number=n, repeat=repeat)) / n
        row = {"kernel": name, "python_us": tp * 1e6}
        if name in fast:
            tc = min(timeit.repeat(fast[name], number=n, repeat=repeat)) / n
            row["compiled_us"] = tc * 1e6
            row["speedup"] = tp / tc
        rows.append(row)
    return rows


def time_runs() -> dict:
    out = {}
    for pure in ("0", "1"):
        env = dict(os.environ, COORDPURSUIT_PURE=pure)
        res = subprocess.run([sys.executable, "-c", RUN_SNIPPET], env=env, capture_output=True, text=True, check=True)
        backend, secs = res.stdout.split()
        out[backend] = float(secs)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    kernels = time_kernels(args.repeat)
    runs = time_runs()
    if args.json:
        print(json.dumps({"kernels": kernels, "golden_runs_s": runs}, indent=2))
        return 0
    if _compiled is None:
        print("compiled kernels not built; showing the fallback only")
    print(f"{'kernel':<24}{'python us':>12}{'compiled us':>14}{'speedup':>10}")
    for r in kernels:
        c = f"{r['compiled_us']:14.3f}{r['speedup']:10.1f}" if "compiled_us" in r else ""
        print(f"{r['kernel']:<24}{r['python_us']:12.3f}{c}")
    print("\ngolden scenario, four evaders, end to end:")
    for backend, secs in runs.items():
        print(f"  {backend:<10}{secs:8.3f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
