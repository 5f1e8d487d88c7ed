"""Witness-point search: strict feasibility of a candidate cell via LP.

A cell candidate is a conjunction of signed (strict) hyperplane
constraints, intersected with a closed bounded domain. We maximize a
shared slack t over

    sigma_i * (a_i . x - b_i) >= t   for every signed constraint,
    a_j . x >= b_j                   for every domain halfspace,
    t <= 1,

and call the cell feasible iff the optimum t* >= EPS_STRICT. The cap on t
keeps the LP bounded; only the sign of t* matters. Maximizing slack (rather
than accepting any point with t >= 0) keeps witnesses strictly interior to
the open cell, which avoids phantom cells whose closures merely touch.

Each call owns its LP instance; everything here is stateless and safe to
call from many workers at once.
"""

import numpy as np
from scipy.optimize import linprog

from .geometry import NEG, POS

# Minimum shared slack for a witness to count as strictly inside the cell.
EPS_STRICT = 1e-7

# The LP backend enforces constraints only to its primal feasibility
# tolerance, so solver-produced points may sit this far outside a closed
# halfspace.
SOLVER_FEAS_TOL = 1e-7

_LINPROG_OPTIONS = {"presolve": False}


class SolverError(RuntimeError):
    """The LP backend failed numerically; the query may be retried."""


class LPCounter:
    """Mutable tally of LP solves, for instrumentation."""

    __slots__ = ("calls",)

    def __init__(self):
        self.calls = 0

    def bump(self):
        self.calls += 1


class SignedConstraint:
    """Require a point to lie strictly on one side of a hyperplane."""

    __slots__ = ("hyperplane", "required_sign")

    def __init__(self, hyperplane, required_sign):
        required_sign = int(required_sign)
        if required_sign not in (POS, NEG):
            raise ValueError("required_sign must be +1 or -1 (cells have no 0 entries)")
        if hyperplane.degenerate:
            raise ValueError("degenerate hyperplanes cannot form signed constraints; "
                             "resolve their constant sign before the LP")
        object.__setattr__(self, "hyperplane", hyperplane)
        object.__setattr__(self, "required_sign", required_sign)

    def __setattr__(self, name, value):
        raise AttributeError("SignedConstraint is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    def holds_at(self, p, margin=0.0):
        return self.required_sign * self.hyperplane.value(p) >= margin

    def __repr__(self):
        s = "+" if self.required_sign == POS else "-"
        return f"SignedConstraint({s} side of {self.hyperplane!r})"


class WitnessResult:
    """Outcome of a feasibility query.

    feasible implies point is present with margin >= EPS_STRICT: every
    signed constraint holds strictly at point and every domain halfspace
    holds (closed).
    """

    __slots__ = ("feasible", "point", "margin")

    def __init__(self, feasible, point=None, margin=None):
        self.feasible = bool(feasible)
        self.point = None if point is None else np.asarray(point, dtype=float)
        self.margin = None if margin is None else float(margin)

    def __repr__(self):
        if self.feasible:
            return f"WitnessResult(feasible, margin={self.margin:.3g})"
        return "WitnessResult(infeasible)"


def _stacked(constraints, domain):
    """LP matrices for variables (x, t): A_ub [x; t] <= b_ub."""
    d = domain.d
    n_c = len(constraints)
    dom_normals, dom_offsets = domain.matrices()
    n_d = dom_normals.shape[0]

    a_ub = np.zeros((n_c + n_d, d + 1))
    b_ub = np.zeros(n_c + n_d)
    for i, c in enumerate(constraints):
        # sigma(a.x - b) >= t  <=>  -sigma a . x + t <= -sigma b
        a_ub[i, :d] = -c.required_sign * c.hyperplane.normal
        a_ub[i, d] = 1.0
        b_ub[i] = -c.required_sign * c.hyperplane.offset
    # a.x >= b  <=>  -a.x <= -b
    a_ub[n_c:, :d] = -dom_normals
    b_ub[n_c:] = -dom_offsets
    return a_ub, b_ub


def find_witness(constraints, domain, counter=None):
    """Search for a strict witness of the signed constraints within domain.

    Returns WitnessResult. Infeasibility of the LP and a maximal slack
    below EPS_STRICT both come back infeasible. Raises SolverError if the
    backend reports numerical trouble, ValueError on dimension mismatch or
    degenerate constraint hyperplanes.
    """
    constraints = list(constraints)
    d = domain.d
    for c in constraints:
        if c.hyperplane.d != d:
            raise ValueError(f"constraint dimension {c.hyperplane.d} != domain dimension {d}")

    a_ub, b_ub = _stacked(constraints, domain)
    cost = np.zeros(d + 1)
    cost[d] = -1.0  # maximize t
    bounds = [(None, None)] * d + [(None, 1.0)]

    if counter is not None:
        counter.bump()
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds,
                  method="highs", options=_LINPROG_OPTIONS)

    if res.status == 2:  # infeasible: the domain itself is empty
        return WitnessResult(False)
    if res.status != 0:
        raise SolverError(f"LP backend failed (status {res.status}): {res.message}")

    t_star = float(res.x[d])
    if t_star < EPS_STRICT:
        return WitnessResult(False)
    return WitnessResult(True, point=res.x[:d], margin=t_star)


def witness_in_domain(domain, counter=None):
    """Interior point of the domain (find_witness with no signed constraints).

    With an empty constraint set the slack variable rides on nothing, so
    the LP reduces to plain feasibility of the closed domain; we instead
    ask each domain halfspace for slack t to certify a point of the
    interior, not just the boundary.
    """
    # Reuse the machinery by lifting the closed halfspaces to signed
    # constraints; orientation of each halfspace already points inward.
    lifted = [SignedConstraint(h, POS) for h in domain.halfspaces]
    return find_witness(lifted, domain, counter=counter)


def check_witness(constraints, domain, p, margin=EPS_STRICT):
    """Direct re-verification of a witness point, independent of the LP.

    True iff every signed constraint holds at p with at least `margin`
    slack and every domain halfspace holds (closed) at p, allowing the LP
    backend's feasibility tolerance on the closed side.
    """
    return (all(c.holds_at(p, margin) for c in constraints)
            and domain.contains(p, margin=-SOLVER_FEAS_TOL))
