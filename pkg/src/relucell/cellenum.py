"""Bounded cell enumeration over a single hyperplane arrangement.

Two interchangeable subroutines produce the sign vectors of every cell of
an arrangement that meets a bounded region:

* exhaustive: LP-test all 2^n candidate sign assignments;
* incremental: depth-first extension of sign-vector prefixes, testing only
  the flipped branch of each split with an LP.

Both accept extra `base_constraints` that every cell must satisfy strictly;
the layerwise engine uses these to restrict enumeration to one activation
region of the earlier layers. Degenerate (zero-normal) hyperplanes never
reach the LP: their sign is fixed by the sign of their constant term.

Enumeration calls are pure functions of their inputs and may run
concurrently; a single call is single-threaded.
"""

import numpy as np

from .geometry import NEG, ON_PLANE_TOL, POS, SignVector
from .witness import (EPS_STRICT, SignedConstraint, find_witness,
                      witness_in_domain)


class CellSet:
    """Sign vectors of the cells found, with one witness point per cell."""

    __slots__ = ("sign_vectors", "witnesses", "lp_calls")

    def __init__(self, sign_vectors=(), witnesses=None, lp_calls=0):
        self.sign_vectors = set(sign_vectors)
        self.witnesses = dict(witnesses) if witnesses else {}
        self.lp_calls = int(lp_calls)
        lengths = {len(s) for s in self.sign_vectors}
        if len(lengths) > 1:
            raise ValueError(f"sign vectors of mixed lengths: {sorted(lengths)}")
        for s in self.sign_vectors:
            if s.has_zero():
                raise ValueError("cell sign vectors contain no 0 entries")

    def add(self, sign_vec, witness=None):
        self.sign_vectors.add(sign_vec)
        if witness is not None:
            self.witnesses[sign_vec] = witness

    def __len__(self):
        return len(self.sign_vectors)

    def __contains__(self, sign_vec):
        return sign_vec in self.sign_vectors

    def __repr__(self):
        return f"CellSet({len(self.sign_vectors)} cells, {self.lp_calls} LP calls)"


def _fixed_signs(arrangement, tol=ON_PLANE_TOL):
    """Map index -> forced sign for degenerate members."""
    return {i: arrangement[i].constant_sign(tol)
            for i in arrangement.degenerate_indices()}


def signed_constraints_for(arrangement, signs, upto=None):
    """SignedConstraints for the non-degenerate members of a prefix."""
    upto = len(signs) if upto is None else upto
    out = []
    for i in range(upto):
        h = arrangement[i]
        if not h.degenerate:
            out.append(SignedConstraint(h, signs[i]))
    return out


def exhaustive_candidates(n_free):
    """All {+,-}^n_free assignments in binary-counting order.

    Candidate t reads t's n_free-bit binary expansion left to right
    (index 0 is the most significant bit) with 0 -> NEG and 1 -> POS, so
    enumeration runs all-minus first and all-plus last.
    """
    for t in range(1 << n_free):
        yield tuple(POS if (t >> (n_free - 1 - j)) & 1 else NEG
                    for j in range(n_free))


class _CheckTables:
    """Vectorized geometry shared by the incremental recursion.

    Certifies candidate witness points directly against the arrangement
    prefix, the base constraints, and the domain, so cheap geometric
    guesses can replace LP solves without weakening soundness; also bounds
    each plane's affine value over the domain's bounding box to prune
    flips no point of the domain could ever realize.
    """

    def __init__(self, arrangement, domain, base_constraints):
        self.arr_normals, self.arr_offsets = arrangement.matrices()
        self.dom_normals, self.dom_offsets = domain.matrices()
        if base_constraints:
            self.base_normals = np.array([c.hyperplane.normal for c in base_constraints])
            self.base_rhs = np.array([c.hyperplane.offset for c in base_constraints])
            self.base_signs = np.array([c.required_sign for c in base_constraints], dtype=float)
        else:
            self.base_normals = None
        degenerate = np.zeros(len(arrangement), dtype=bool)
        for i in arrangement.degenerate_indices():
            degenerate[i] = True
        self.degenerate = degenerate
        self._value_ranges = None
        self._axis_lo = None
        self._axis_hi = None

    def strict_at(self, p, signs, k):
        """p strictly realizes signs[:k] (margin EPS_STRICT on every
        non-degenerate plane and base constraint) and lies in the domain."""
        if np.any(self.dom_normals @ p - self.dom_offsets < 0.0):
            return False
        if self.base_normals is not None:
            base_vals = self.base_signs * (self.base_normals @ p - self.base_rhs)
            if np.any(base_vals < EPS_STRICT):
                return False
        if k:
            vals = self.arr_normals[:k] @ p - self.arr_offsets[:k]
            req = np.asarray(signs[:k], dtype=float) * vals
            if np.any(req[~self.degenerate[:k]] < EPS_STRICT):
                return False
        return True

    def axis_bounds(self):
        if self._axis_lo is None:
            self._axis_lo, self._axis_hi = _axis_bounds(self.dom_normals,
                                                        self.dom_offsets)
        return self._axis_lo, self._axis_hi

    def value_range(self, k):
        """[lo, hi] of plane k's affine value over the domain's axis-aligned
        bounding box (an outer bound of the domain, so a sign unreachable
        on the box is unreachable, full stop)."""
        if self._value_ranges is None:
            lo, hi = self.axis_bounds()
            center = (lo + hi) / 2.0
            half = (hi - lo) / 2.0
            mid = self.arr_normals @ center - self.arr_offsets
            radius = np.abs(self.arr_normals) @ half
            ranges = np.column_stack([mid - radius, mid + radius])
            self._value_ranges = ranges
        return self._value_ranges[k]


def _axis_bounds(dom_normals, dom_offsets):
    """Componentwise bounds implied by the axis-aligned domain rows.

    Rows with a single nonzero entry are plain coordinate bounds; any
    remaining direction falls back to a wide interval, which only makes
    the pruning weaker, never wrong.
    """
    d = dom_normals.shape[1]
    lo = np.full(d, -1e6)
    hi = np.full(d, 1e6)
    for row, off in zip(dom_normals, dom_offsets):
        nz = np.nonzero(row)[0]
        if len(nz) != 1:
            continue
        i = nz[0]
        bound = off / row[i]
        if row[i] > 0:
            lo[i] = max(lo[i], bound)
        else:
            hi[i] = min(hi[i], bound)
    return lo, hi


def bound_exh_enum(arrangement, region, base_constraints=(), counter=None):
    """Exhaustively LP-test all sign assignments of the arrangement.

    Returns the CellSet of assignments whose (open) cell, further cut by
    the strict base constraints, meets the region. Cost is 2^n LP solves
    over the non-degenerate members, so callers keep n small (the engine
    uses this only for layer 1 when n1 <= n0).
    """
    base_constraints = list(base_constraints)
    fixed = _fixed_signs(arrangement)
    free_idx = [i for i in range(len(arrangement)) if i not in fixed]
    out = CellSet()

    for combo in exhaustive_candidates(len(free_idx)):
        signs = [0] * len(arrangement)
        for i, s in fixed.items():
            signs[i] = s
        for j, i in enumerate(free_idx):
            signs[i] = combo[j]
        constraints = base_constraints + signed_constraints_for(arrangement, signs)
        if constraints:
            res = find_witness(constraints, region, counter=counter)
        else:
            res = witness_in_domain(region, counter=counter)
        out.lp_calls += 1
        if res.feasible:
            out.add(SignVector(signs), res.point)
    return out


def bound_inc_enum(arrangement, region, base_constraints=(), initial_witness=None,
                   counter=None):
    """Incrementally build the sign vectors of all cells meeting the region.

    Depth-first over hyperplane indices: the current prefix's witness fixes
    the sign of the next hyperplane; the carried witness certifies that
    branch for free, while the flipped branch is kept only if a fresh
    witness exists (cheap reflection guess first, LP otherwise). The
    flipped branch always recurses with its own new witness, never the old
    one, since the old witness lies on the wrong side by construction.

    `initial_witness`, when given, must lie in the region and strictly
    inside every base constraint; it saves the initial LP. Implemented with
    an explicit stack so deep arrangements cannot overflow the interpreter.
    """
    base_constraints = list(base_constraints)
    n = len(arrangement)
    out = CellSet()
    lp_calls = 0

    if initial_witness is None:
        if base_constraints:
            res = find_witness(base_constraints, region, counter=counter)
        else:
            res = witness_in_domain(region, counter=counter)
        lp_calls += 1
        if not res.feasible:
            out.lp_calls = lp_calls
            return out
        w0 = res.point
    else:
        w0 = np.asarray(initial_witness, dtype=float)

    fixed = _fixed_signs(arrangement)
    tables = _CheckTables(arrangement, region, base_constraints)
    normals, offsets = arrangement.matrices()

    def flip_witness(signs, k, flip_sign, w):
        """Witness for prefix signs[:k] + flip_sign at k, or None.

        Cheap attempts first: prune flips whose sign is unreachable over
        the whole domain, then try points stepped just across plane k from
        w (and w's full reflection), each verified strictly against every
        constraint. Only then pay for an LP.
        """
        nonlocal lp_calls
        lo, hi = tables.value_range(k)
        if flip_sign == POS and hi < EPS_STRICT:
            return None
        if flip_sign == NEG and -lo < EPS_STRICT:
            return None
        val = float(normals[k] @ w - offsets[k])
        trial = list(signs[:k]) + [flip_sign]
        span = abs(val)
        # Candidate points along the plane normal whose affine value is
        # exactly flip_sign * step: a short hop across the plane, a
        # moderate one, and w's full reflection. LP witnesses are vertex
        # solutions that hug the domain boundary, so each candidate is
        # also tried clamped back into the domain's coordinate bounds.
        box_lo, box_hi = tables.axis_bounds()
        for step in (1e-4, 0.1 * span + 1e-6, span):
            if step < 2.0 * EPS_STRICT:
                continue
            guess = w + (flip_sign * step - val) * normals[k]
            if tables.strict_at(guess, trial, k + 1):
                return guess
            clamped = np.clip(guess, box_lo, box_hi)
            if tables.strict_at(clamped, trial, k + 1):
                return clamped
        constraints = (base_constraints
                       + signed_constraints_for(arrangement, signs, upto=k)
                       + [SignedConstraint(arrangement[k], flip_sign)])
        res = find_witness(constraints, region, counter=counter)
        lp_calls += 1
        return res.point if res.feasible else None

    # Stack of (prefix signs as list, witness) pairs still to be extended.
    stack = [([], w0)]
    while stack:
        signs, w = stack.pop()
        k = len(signs)
        alive = True
        while k < n:
            h = arrangement[k]
            if h.degenerate:
                signs.append(fixed[k])
                k += 1
                continue
            # A branch is only followed for free when the witness clears the
            # plane by the same strictness the LP demands; anything closer
            # gets both sides LP-certified, so a sliver the exhaustive
            # subroutine would drop is never admitted here either.
            val = float(normals[k] @ w - offsets[k])
            if val > EPS_STRICT:
                sigma = POS
            elif val < -EPS_STRICT:
                sigma = NEG
            else:
                sigma = 0
            if sigma != 0:
                w_flip = flip_witness(signs, k, -sigma, w)
                if w_flip is not None:
                    stack.append((signs + [-sigma], w_flip))
                signs.append(sigma)
                k += 1
            else:
                # Witness sits on the plane: certify each side separately.
                w_pos = flip_witness(signs, k, POS, w)
                w_neg = flip_witness(signs, k, NEG, w)
                if w_pos is None and w_neg is None:
                    alive = False  # sliver below LP resolution; drop subtree
                    break
                if w_pos is not None and w_neg is not None:
                    stack.append((signs + [NEG], w_neg))
                    signs.append(POS)
                    w = w_pos
                elif w_pos is not None:
                    signs.append(POS)
                    w = w_pos
                else:
                    signs.append(NEG)
                    w = w_neg
                k += 1
        if alive:
            out.add(SignVector(signs), w)

    out.lp_calls = lp_calls
    return out


def bound_cell_enum(arrangement, region, method="inc", base_constraints=(),
                    counter=None):
    """Common contract of both subroutines: the sign vectors in {+,-}^n of
    exactly the cells of the arrangement that meet the region (and the
    strict base constraints, when given)."""
    if method == "exh":
        return bound_exh_enum(arrangement, region, base_constraints, counter)
    if method == "inc":
        return bound_inc_enum(arrangement, region, base_constraints, counter=counter)
    raise ValueError(f"unknown enumeration method {method!r} (expected 'exh' or 'inc')")
