#!/usr/bin/env python3
"""Benchmark the compiled transform core against the numpy fallback.

Times the forward pass (per-digit DFT sweeps) on single rows and on batches,
for Walsh and mixed-radix configurations, and checks the two backends agree.

Usage: python benchmarks/bench_transform.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from vilenkin import backend
from vilenkin.group import GroupConfig, walsh_config


def time_backend(name: str, cfg: GroupConfig, batch: int, repeats: int) -> tuple[float, np.ndarray]:
    mod = backend.get_module(name)
    rng = np.random.default_rng(7)
    base = rng.standard_normal((batch, cfg.size)) + 1j * rng.standard_normal((batch, cfg.size))
    best = float("inf")
    out = None
    for _ in range(repeats):
        work = base.copy()
        t0 = time.perf_counter()
        mod.mixed_radix_passes(work, cfg.radices, -1)
        best = min(best, time.perf_counter() - t0)
        out = work
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    cases = [
        ("walsh depth 12", walsh_config(12), 1),
        ("walsh depth 16", walsh_config(16), 1),
        ("walsh depth 12, batch 64", walsh_config(12), 64),
        ("mixed (2,3,4)x4", GroupConfig((2, 3, 4) * 4), 1),
        ("mixed (2,3,4)x4, batch 64", GroupConfig((2, 3, 4) * 4), 64),
    ]
    names = backend.available_backends()
    print(f"backends: {', '.join(names)}")
    header = f"{'case':<28} {'M_N':>8} " + " ".join(f"{n:>12}" for n in names) + "   speedup"
    print(header)
    print("-" * len(header))
    for label, cfg, batch in cases:
        times = {}
        outs = {}
        for name in names:
            times[name], outs[name] = time_backend(name, cfg, batch, args.repeats)
        if len(names) == 2:
            diff = np.max(np.abs(outs[names[0]] - outs[names[1]]))
            scale = np.max(np.abs(outs[names[1]]))
            assert diff <= 1e-10 * scale, f"backend mismatch on {label}: {diff}"
            speedup = f"{times['python'] / times['compiled']:9.2f}x"
        else:
            speedup = "      n/a"
        cols = " ".join(f"{times[n] * 1e3:10.3f}ms" for n in names)
        print(f"{label:<28} {cfg.size:>8} {cols} {speedup}")


if __name__ == "__main__":
    main()
