#!/usr/bin/env python3
"""Benchmark the compiled jet kernel against the numpy fallback.

Two views:

* raw kernel: batched order-3 convolutions at the batch shapes the
  curvature pipeline actually produces;
* end to end: a full curvature pass (through Cotton and the divergence
  of Weyl) on a catalog fixture, run in a subprocess per backend since
  the kernel is bound at import time.

Usage: python benchmarks/bench_backends.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from qeflat._backend import available_backends, make_mul_for
from qeflat.jets import JetContext


def bench_raw_kernel(repeat: int) -> list[dict]:
    rows = []
    rng = np.random.default_rng(0)
    for n, batch in ((3, 729), (4, 1024), (5, 3125)):
        ctx = JetContext.get(n)
        a = rng.standard_normal((batch, ctx.size))
        b = rng.standard_normal((batch, ctx.size))
        out = np.empty_like(a)
        row = {"n": n, "batch": batch, "pairs": len(ctx.kk)}
        for backend in available_backends():
            mul = make_mul_for(backend, ctx.ii, ctx.jj, ctx.kk, ctx.size)
            mul(a, b, out)  # warm up
            best = min(
                _timed(mul, a, b, out) for _ in range(repeat)
            )
            row[backend] = best
        rows.append(row)
    return rows


def _timed(mul, a, b, out) -> float:
    t0 = time.perf_counter()
    mul(a, b, out)
    return time.perf_counter() - t0


_WORKER_SNIPPET = """
import json, time
from qeflat._backend import backend_name
from qeflat.curvature import CurvatureJets
from qeflat.warp import catalog
from qeflat.rng import SplitMix64

fixture = catalog("hyperbolic_qe:4:1")
rng = SplitMix64(0)
points = [fixture.chart.sample_point(rng) for _ in range(8)]
for p in points[:2]:  # warm up (fills the jet-context cache)
    geo = CurvatureJets(fixture.chart, p)
    geo.cotton; geo.weyl_divergence
t0 = time.perf_counter()
for p in points:
    geo = CurvatureJets(fixture.chart, p)
    geo.cotton
    geo.weyl_divergence
elapsed = time.perf_counter() - t0
print(json.dumps({"backend": backend_name(), "seconds": elapsed, "points": len(points)}))
"""


def bench_end_to_end() -> list[dict]:
    results = []
    for backend in available_backends():
        env = dict(os.environ, QEFLAT_JET_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, "-c", _WORKER_SNIPPET],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        results.append(json.loads(proc.stdout))
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    print()
    print("raw kernel (best of {} runs)".format(args.repeat))
    header = f"{'n':>3} {'batch':>6} {'pairs':>6}" + "".join(f" {b:>12}" for b in backends)
    print(header)
    for row in bench_raw_kernel(args.repeat):
        cells = "".join(f" {row[b] * 1e6:>10.1f}us" for b in backends)
        print(f"{row['n']:>3} {row['batch']:>6} {row['pairs']:>6}{cells}")
    print()
    print("end to end: curvature pass through Cotton + div(Weyl), n = 4")
    for result in bench_end_to_end():
        per_point = result["seconds"] / result["points"] * 1e3
        print(f"  {result['backend']:>9}: {per_point:8.2f} ms/point")
    return 0


if __name__ == "__main__":
    sys.exit(main())
