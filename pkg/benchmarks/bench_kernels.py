"""Compiled vs numpy Cauchy-sum tables on the grids of a real run.

    python3 benchmarks/bench_kernels.py [--nu 1.2] [--ne 8] [--repeat 3]
"""

import argparse
import time

import numpy as np

from levy_extremum import kernels
from levy_extremum.joint_cpdf import SinhEngine
from levy_extremum.levy_models import benchmark_kobol


def inputs(nu, ne):
    e = SinhEngine(benchmark_kobol(nu), 0.25, 0.15, Ne=ne, check=False)
    eta, n = e.xm, e.xm.size
    base = e.derm * e.S1
    hs = [0.0, 0.025, 0.05, 0.075, 0.1, 0.125]
    shared = np.stack([base * np.exp(-1j * h * eta) for h in hs], axis=-1)
    shared = np.broadcast_to(shared, (n,) + shared.shape)
    inv = 1.0 / (eta[:, None] + eta[None, :])
    full = np.stack([(base * np.exp(-1j * h * eta))[None, :] * inv for h in hs[:3]], axis=-1)
    return e.xp, eta, shared, full


def best_of(fn, repeat):
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t0)
    return min(ts), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nu", type=float, default=1.2)
    ap.add_argument("--ne", type=float, default=8.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    xi, eta, shared, full = inputs(args.nu, args.ne)
    print(f"grid: {xi.size} xi nodes, {eta.size} eta nodes; backend selected at import: {kernels.BACKEND}")
    if kernels.cauchy_tables_compiled is None:
        print("compiled extension not built; only the numpy fallback is timed")
    for label, coef in (("S3 (shared rows)", shared), ("S32 (full coefficients)", full)):
        tp, ref = best_of(lambda: kernels.cauchy_tables_python(xi, eta, eta, coef), args.repeat)
        line = f"{label:24s} P={coef.shape[-1]}  numpy {tp:7.3f} s"
        if kernels.cauchy_tables_compiled is not None:
            tc, out = best_of(lambda: kernels.cauchy_tables_compiled(xi, eta, eta, coef), args.repeat)
            diff = np.max(np.abs(out - ref)) / np.max(np.abs(ref))
            line += f"  compiled {tc:7.3f} s  speedup {tp / tc:5.2f}x  max rel diff {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
