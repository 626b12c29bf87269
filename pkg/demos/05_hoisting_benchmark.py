"""Measure what hoisting buys.

Same cell, same numbers (a 64-bit gate verifies that first), two schedules:
fused does three big matrix products then a cheap elementwise loop; naive
re-enters BLAS for every timestep. Sizes here are scaled down to keep the
demo quick; pass --full for the d=512 configuration.
"""

import sys

from lrn.bench import bench

full = "--full" in sys.argv
shape = dict(d=512, n=256, batch=32) if full else dict(d=192, n=96, batch=16)
common = dict(repeats=5, warmups=2, precision="f32", seed=0, **shape)

print(f"shape: {shape}, f32, median of 5 repeats\n")
rows = []
for kind in ("lrn", "elman"):
    for mode in ("fused", "naive"):
        r = bench(kind=kind, mode=mode, **common)
        rows.append(r)
        print(f"{kind:6s} {mode:6s}  {r.median_time * 1e3:8.1f} ms  "
              f"{r.steps_per_second:12,.0f} steps/s  (gate delta {r.equivalence_max_delta:.1e})")

lrn_fused, lrn_naive = rows[0], rows[1]
print(f"\nfused speedup over naive (lrn): "
      f"{lrn_naive.median_time / lrn_fused.median_time:.2f}x")

print("\nlayer norm: outside the loop for the gated cell, inside for vanilla")
for kind in ("lrn", "elman"):
    plain = bench(kind=kind, mode="fused", **common)
    normed = bench(kind=kind, mode="fused", with_layer_norm=True, **common)
    print(f"{kind:6s}  plain {plain.median_time * 1e3:7.1f} ms   "
          f"+LN {normed.median_time * 1e3:7.1f} ms   "
          f"slowdown {normed.median_time / plain.median_time:.3f}x")
