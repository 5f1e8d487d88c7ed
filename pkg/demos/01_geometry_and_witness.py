#!/usr/bin/env python3
"""Hyperplanes, sign vectors, and witness points.

A hyperplane splits space into a + and a - side; an ordered collection of
them assigns every point a sign vector. A candidate cell (a sign vector
with no zeros) exists inside a bounded domain exactly when a small LP can
produce a strict witness point for it.
"""

import numpy as np

from relucell import (Arrangement, Hyperplane, SignedConstraint, find_witness,
                      sign_vector, unit_box, witness_in_domain)

# Three lines through the unit square.
lines = Arrangement([
    Hyperplane([1.0, 0.0], 0.35),   # vertical:   x = 0.35
    Hyperplane([0.0, 1.0], 0.55),   # horizontal: y = 0.55
    Hyperplane([1.0, -1.0], 0.1),   # diagonal:   x - y = 0.1 (scaled to unit normal)
])
box = unit_box(2)

print("sign vectors of a few points:")
for p in ([0.9, 0.9], [0.1, 0.9], [0.9, 0.1], [0.1, 0.1]):
    print(f"  {p} -> {sign_vector(lines, p).to_string()}")

print("\nan interior point of the box itself:")
res = witness_in_domain(box)
print(f"  {res.point} with margin {res.margin:.3f}")

print("\nwitness for the cell '+-+' (right of x=0.35, below y=0.55, x-y>0.1):")
constraints = [SignedConstraint(h, s)
               for h, s in zip(lines, [+1, -1, +1])]
res = find_witness(constraints, box)
print(f"  feasible={res.feasible}, point={np.round(res.point, 3)}, margin={res.margin:.3f}")

print("\nand for the impossible cell '+++' with the diagonal flipped twice:")
contradictory = constraints + [SignedConstraint(lines[2], -1)]
print(f"  feasible={find_witness(contradictory, box).feasible}")
