#!/usr/bin/env python3
"""Census statistics over an enumeration report.

Shows the analyses the region census supports: how many regions each layer
contributes, how a layer-1 region's dimension (its count of active units)
drives the second layer's sub-partitioning, how task times distribute, and
the exponential width decay of the largest per-parent subcell fraction.
"""

import math

from relucell import (fit_decay, layerwise_serial, random_mlp, schlafli_bound,
                      subcell_histogram, task_time_stats, unit_box)
from relucell.analysis import max_subcell_ratios

mlp = random_mlp([3, 5, 5, 2], seed=7)
report = layerwise_serial(mlp, unit_box(3))
print(f"widths {mlp.widths}: {report.total_cells} regions, "
      f"per layer {report.layer_counts}")
print(f"(Schlafli bound for layer 1: {schlafli_bound(5, 3)})")

print("\nlayer-1 region dimension -> mean layer-2 subcells:")
stats = subcell_histogram(report)
for dim, bin_ in stats.bins.items():
    bar = "#" * round(4 * bin_.mean_subcells)
    print(f"  dim {dim}: {bin_.n_cells:3d} regions, "
          f"mean subcells {bin_.mean_subcells:5.2f} {bar}")

tt = task_time_stats(report)
print(f"\ntask times: mean {tt.mean * 1e3:.1f} ms, std {tt.std * 1e3:.1f} ms, "
      f"Fisher-Pearson skew {tt.skew:.2f}")

print("\nmax per-parent subcell fraction, by deep-layer width (random nets):")
for width, seed in [(4, 31), (6, 33), (8, 35)]:
    rep = layerwise_serial(random_mlp([3, 4, width, 2], seed), unit_box(3))
    (layer, n_l, ratio), = max_subcell_ratios(rep)
    print(f"  width {n_l}: ratio {ratio:.3f}")
print("(random nets need not decay; the exponential decay is a trained-net effect)")

print("\nfit_decay round-trips the canonical decay law from clean ratio data:")
points = [(n, 2.234 * math.exp(-0.6445 * n)) for n in (11, 13, 15)]
fit = fit_decay(points)
print(f"  recovered amplitude {fit.amplitude:.4f}, rate {fit.rate:.4f}; "
      f"cell factor at n=15: {fit.cell_factor(15):.2e}")
