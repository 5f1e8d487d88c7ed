"""Independent checks of a finished report.

Two directions, matching the two ways a census can be wrong:

* sampling soundness: random interior points of the domain must land in
  regions the report knows about (misses mean the enumeration lost cells);
* re-witnessing: every reported network sign vector must still admit a
  strict witness (phantoms mean the enumeration invented cells).

Samples that fall numerically on a region boundary (tiny pre-activation)
are redrawn; boundaries are measure zero and carry no cell information.
"""

import numpy as np

from .geometry import NEG, ON_PLANE_TOL, POS, SignVector
from .network import (CONTRADICTORY_PREFIX, NetworkSignVector, cell_constraints,
                      forward_batch)
from .witness import find_witness


class VerificationResult:
    __slots__ = ("samples_checked", "missing", "phantoms")

    def __init__(self, samples_checked, missing, phantoms):
        self.samples_checked = int(samples_checked)
        self.missing = list(missing)    # (point, vector) not in the report
        self.phantoms = list(phantoms)  # reported vectors with no witness

    @property
    def ok(self):
        return not self.missing and not self.phantoms

    def summary(self):
        if self.ok:
            return (f"OK: {self.samples_checked} sampled patterns covered, "
                    "all reported vectors re-witnessed")
        lines = []
        for point, vector in self.missing[:10]:
            lines.append(f"missing from report: {vector.to_string()}")
        for vector in self.phantoms[:10]:
            lines.append(f"no witness for reported vector: {vector.to_string()}")
        extra = len(self.missing) + len(self.phantoms) - len(lines)
        if extra > 0:
            lines.append(f"... and {extra} more violations")
        return "\n".join(lines)


def _domain_bounding_box(domain):
    """Per-coordinate [lo, hi] of the domain, via 2d support LPs."""
    d = domain.d
    lo = np.zeros(d)
    hi = np.zeros(d)
    for i in range(d):
        axis = np.zeros(d)
        axis[i] = 1.0
        for direction, store in ((1.0, hi), (-1.0, lo)):
            # maximize direction * x_i == find the farthest witness along axis
            best = _support(domain, direction * axis)
            store[i] = direction * best
    return lo, hi


def _support(domain, direction):
    from scipy.optimize import linprog
    normals, offsets = domain.matrices()
    res = linprog(-direction, A_ub=-normals, b_ub=-offsets,
                  bounds=[(None, None)] * domain.d, method="highs")
    if res.status != 0:
        raise ValueError("domain is empty or unbounded; cannot sample it")
    return float(direction @ res.x)


def sample_interior_points(domain, count, seed, max_batches=200):
    """Uniform samples from the domain interior by rejection from its
    bounding box. Batches are redrawn until `count` points are collected."""
    rng = np.random.default_rng(seed)
    lo, hi = _domain_bounding_box(domain)
    normals, offsets = domain.matrices()
    points = []
    for _ in range(max_batches):
        batch = lo + (hi - lo) * rng.random((max(count, 256), domain.d))
        inside = (batch @ normals.T - offsets > 0.0).all(axis=1)
        points.append(batch[inside])
        if sum(len(p) for p in points) >= count:
            break
    collected = np.concatenate(points) if points else np.empty((0, domain.d))
    if len(collected) < count:
        raise ValueError("rejection sampling starved; domain interior too thin "
                         f"(wanted {count}, got {len(collected)})")
    return collected[:count]


def sampled_vectors(mlp, points, boundary_tol=ON_PLANE_TOL):
    """Network sign vectors of the given inputs, dropping samples that sit
    within boundary_tol of any ReLU boundary."""
    _, indicators, margin = forward_batch(mlp, points)
    keep = margin > boundary_tol
    vectors = []
    for row in range(len(points)):
        if not keep[row]:
            continue
        layers = [SignVector([POS if z else NEG for z in ind[row]])
                  for ind in indicators]
        vectors.append((points[row], NetworkSignVector(layers)))
    return vectors


def verify_report(mlp, domain, report, samples=10000, seed=0):
    """Run both directions against a report; returns VerificationResult."""
    known = set(report.sign_vectors)

    missing = []
    checked = 0
    if samples > 0:
        points = sample_interior_points(domain, samples, seed)
        for point, vector in sampled_vectors(mlp, points):
            checked += 1
            if vector not in known:
                missing.append((point, vector))

    phantoms = []
    for vector in report.sign_vectors:
        constraints = cell_constraints(mlp, vector)
        if constraints is CONTRADICTORY_PREFIX:
            phantoms.append(vector)
            continue
        if not find_witness(constraints, domain).feasible:
            phantoms.append(vector)
    return VerificationResult(checked, missing, phantoms)
