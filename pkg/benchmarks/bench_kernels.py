#!/usr/bin/env python3
"""Benchmark the compiled segment-field kernel against the numpy fallback.

Workload: a meandered trace (plus ground-plane images) evaluated over a
raster of scan points, the hot loop of every simulated scan.

    python3 benchmarks/bench_kernels.py [--segments N] [--points N] [--repeat N]
"""

import argparse
import math
import time

import numpy as np

from nfscan import _kernels_py

try:
    from nfscan import _kernels
except ImportError:
    _kernels = None


def meander_workload(n_segments, n_points, seed=42):
    r = np.random.default_rng(seed)
    # meander in the x-y plane at 1.6 mm height, 1 mm pitch
    n_verts = n_segments // 2 + 1
    x = np.cumsum(r.uniform(0.5e-3, 1.5e-3, n_verts))
    y = 2e-3 * (np.arange(n_verts) % 2)
    verts = np.column_stack([x, y, np.full(n_verts, 1.6e-3)])
    starts = np.ascontiguousarray(verts[:-1])
    ends = np.ascontiguousarray(verts[1:])
    currents = np.exp(-1j * r.uniform(0, 2 * math.pi, len(starts))) * 1.4e-3
    # images
    m_starts = starts.copy()
    m_ends = ends.copy()
    m_starts[:, 2] *= -1
    m_ends[:, 2] *= -1
    starts = np.vstack([starts, m_starts])
    ends = np.vstack([ends, m_ends])
    currents = np.concatenate([currents, -currents])

    side = int(math.sqrt(n_points))
    gx, gy = np.meshgrid(np.linspace(0, x[-1], side), np.linspace(-5e-3, 7e-3, side))
    points = np.column_stack([gx.ravel(), gy.ravel(), np.full(side * side, 2.6e-3)])
    return starts, ends, currents, np.ascontiguousarray(points)


def time_kernel(module, args, repeat):
    starts, ends, currents, points = args
    out = np.empty((len(points), 3), dtype=complex)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        code = module.segment_field_sum(starts, ends, currents, points, 1e-9, out)
        best = min(best, time.perf_counter() - t0)
    assert code == -1
    return best, out.copy()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--segments", type=int, default=400,
                    help="trace segments before imaging (default 400)")
    ap.add_argument("--points", type=int, default=4096,
                    help="scan points, rounded down to a square (default 4096)")
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions")
    opts = ap.parse_args()

    args = meander_workload(opts.segments, opts.points)
    n_evals = len(args[0]) * len(args[3])
    print(f"workload: {len(args[0])} segments (incl. images) x {len(args[3])} points "
          f"= {n_evals / 1e6:.2f}M segment evaluations")

    t_py, out_py = time_kernel(_kernels_py, args, opts.repeat)
    print(f"pure python : {t_py * 1e3:9.2f} ms   {n_evals / t_py / 1e6:8.1f} Meval/s")

    if _kernels is None:
        print("compiled    : not available (pure-Python install)")
        return
    t_c, out_c = time_kernel(_kernels, args, opts.repeat)
    print(f"compiled    : {t_c * 1e3:9.2f} ms   {n_evals / t_c / 1e6:8.1f} Meval/s")
    err = np.max(np.abs(out_c - out_py)) / np.max(np.abs(out_py))
    print(f"speedup     : {t_py / t_c:9.1f}x   (max relative deviation {err:.2e})")


if __name__ == "__main__":
    main()
