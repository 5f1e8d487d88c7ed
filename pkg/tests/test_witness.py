import numpy as np
import pytest

from relucell.geometry import (BoundedDomain, Hyperplane, POS, NEG, side_of,
                               unit_box)
from relucell.witness import (EPS_STRICT, LPCounter, SignedConstraint,
                              check_witness, find_witness, witness_in_domain)

from oracles import grid_sign_tuples


def test_half_interval_witness():
    h = Hyperplane([1.0], 0.5)
    res = find_witness([SignedConstraint(h, POS)], unit_box(1))
    assert res.feasible
    assert res.margin >= 0.25
    assert res.point[0] > 0.5


def test_contradictory_signs_infeasible():
    h = Hyperplane([1.0, 0.0], 0.5)
    res = find_witness([SignedConstraint(h, POS), SignedConstraint(h, NEG)],
                       unit_box(2))
    assert not res.feasible
    assert res.point is None


def test_witness_agrees_with_grid_oracle():
    # every sign combination of 3 generic random lines: LP feasibility must
    # match dense 200x200 rasterization of the unit square
    rng = np.random.default_rng(5)
    for trial in range(6):
        planes = []
        for _ in range(3):
            normal = rng.normal(size=2)
            normal /= np.linalg.norm(normal)
            point = 0.2 + 0.6 * rng.random(2)
            planes.append(Hyperplane(normal, float(normal @ point)))
        normals = np.array([h.normal for h in planes])
        offsets = np.array([h.offset for h in planes])
        realized = grid_sign_tuples(normals, offsets, resolution=200)
        box = unit_box(2)
        for bits in range(8):
            signs = tuple(POS if (bits >> (2 - j)) & 1 else NEG for j in range(3))
            res = find_witness([SignedConstraint(h, s) for h, s in zip(planes, signs)], box)
            assert res.feasible == (signs in realized), (trial, signs)


def test_witness_soundness_recheck():
    rng = np.random.default_rng(6)
    box = unit_box(3)
    for _ in range(15):
        planes = [Hyperplane(rng.normal(size=3), rng.normal() * 0.2) for _ in range(4)]
        signs = [POS if b else NEG for b in rng.integers(0, 2, size=4)]
        constraints = [SignedConstraint(h, s) for h, s in zip(planes, signs)]
        res = find_witness(constraints, box)
        if res.feasible:
            assert check_witness(constraints, box, res.point)
            for c in constraints:
                assert side_of(c.hyperplane, res.point) == c.required_sign


def test_monotonicity_adding_constraints():
    rng = np.random.default_rng(7)
    box = unit_box(2)
    for _ in range(20):
        planes = [Hyperplane(rng.normal(size=2), rng.normal() * 0.3) for _ in range(5)]
        signs = [POS if b else NEG for b in rng.integers(0, 2, size=5)]
        constraints = [SignedConstraint(h, s) for h, s in zip(planes, signs)]
        feasible = [find_witness(constraints[:k], box).feasible for k in range(6)]
        # once infeasible, always infeasible as constraints accumulate
        for k in range(5):
            if not feasible[k]:
                assert not feasible[k + 1]


def test_witness_in_domain_unit_box():
    res = witness_in_domain(unit_box(2))
    assert res.feasible
    assert np.all(res.point > 0.0) and np.all(res.point < 1.0)


def test_witness_in_domain_empty():
    dom = BoundedDomain([Hyperplane([1.0], 0.0), Hyperplane([-1.0], 1.0)], d=1)
    assert not witness_in_domain(dom).feasible


def test_witness_in_domain_emnist_box():
    res = witness_in_domain(unit_box(784))
    assert res.feasible


def test_margin_threshold():
    # a slab thinner than the strictness threshold is reported infeasible
    lo = Hyperplane([1.0], 0.5)
    hi = Hyperplane([-1.0], -(0.5 + 1e-9))
    res = find_witness([SignedConstraint(lo, POS), SignedConstraint(hi, POS)],
                       unit_box(1))
    assert not res.feasible
    assert EPS_STRICT > 1e-9


def test_degenerate_constraint_rejected():
    with pytest.raises(ValueError):
        SignedConstraint(Hyperplane(np.zeros(2), 1.0), POS)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        find_witness([SignedConstraint(Hyperplane([1.0], 0.5), POS)], unit_box(2))


def test_lp_counter():
    counter = LPCounter()
    find_witness([SignedConstraint(Hyperplane([1.0], 0.5), POS)], unit_box(1),
                 counter=counter)
    witness_in_domain(unit_box(1), counter=counter)
    assert counter.calls == 2
