import math

import numpy as np
import pytest

from relucell.analysis import (accuracy_eval, fit_decay, max_subcell_ratios,
                               region_dimension, schlafli_bound,
                               subcell_histogram, task_time_stats)
from relucell.engine import layerwise_serial
from relucell.generators import random_mlp
from relucell.geometry import POS, NEG, SignVector, unit_box
from relucell.network import MLP


def test_region_dimension():
    assert region_dimension(SignVector([POS, NEG, POS])) == 2
    assert region_dimension(SignVector([NEG] * 6)) == 0
    assert region_dimension(SignVector([POS] * 15)) == 15


def test_task_time_stats_constant():
    stats = task_time_stats([1.0, 1.0, 1.0])
    assert stats.mean == 1.0
    assert stats.std == 0.0
    assert stats.skew == 0.0
    assert stats.zero_variance


def test_task_time_stats_symmetric():
    stats = task_time_stats([1.0, 2.0, 3.0])
    assert stats.mean == pytest.approx(2.0)
    assert stats.std == pytest.approx(1.0)
    assert stats.skew == pytest.approx(0.0, abs=1e-12)
    assert not stats.zero_variance


def test_task_time_stats_positive_skew():
    # direct formula: m2 = 18, m3 = 54, g1 = 54 / 18^1.5 = sqrt(2)/2
    stats = task_time_stats([1.0, 1.0, 10.0])
    assert stats.skew == pytest.approx(math.sqrt(2) / 2)
    assert stats.skew > 0
    assert stats.std == pytest.approx(math.sqrt(27))


def test_task_time_stats_matches_direct_recompute():
    rng = np.random.default_rng(0)
    times = rng.exponential(scale=3.0, size=200)
    stats = task_time_stats(times)
    mean = sum(times) / len(times)
    m2 = sum((t - mean) ** 2 for t in times) / len(times)
    m3 = sum((t - mean) ** 3 for t in times) / len(times)
    assert stats.mean == pytest.approx(mean, abs=1e-12)
    assert stats.skew == pytest.approx(m3 / m2 ** 1.5, abs=1e-12)


def test_task_time_stats_needs_two():
    with pytest.raises(ValueError):
        task_time_stats([1.0])


def test_subcell_histogram_missing_layer2():
    base = random_mlp([2, 3, 3, 2], seed=59)
    weights = [np.array(w) for w in base.weights]
    biases = [np.array(b) for b in base.biases]
    biases[1] = np.full(3, 50.0)
    report = layerwise_serial(MLP(weights, biases), unit_box(2))
    stats = subcell_histogram(report)
    assert stats.has_histogram
    for bin_ in stats.bins.values():
        assert bin_.mean_subcells == pytest.approx(1.0)


def test_subcell_histogram_conservation():
    mlp = random_mlp([3, 4, 4, 2], seed=115)
    report = layerwise_serial(mlp, unit_box(3))
    stats = subcell_histogram(report)
    total = sum(b.total_subcells for b in stats.bins.values())
    assert total == report.layer_counts[1]
    assert sum(b.n_cells for b in stats.bins.values()) == report.layer_counts[0]
    # recount directly from the raw sign vectors
    per_parent = {}
    for v in report.sign_vectors:
        per_parent.setdefault(v[0], set()).add(v.prefix(2))
    for dim, bin_ in stats.bins.items():
        parents = [s1 for s1 in per_parent if region_dimension(s1) == dim]
        assert len(parents) == bin_.n_cells
        assert sum(len(per_parent[s1]) for s1 in parents) == bin_.total_subcells


def test_subcell_histogram_shallow_net_marker():
    mlp = random_mlp([2, 3, 2], seed=117)
    report = layerwise_serial(mlp, unit_box(2))
    stats = subcell_histogram(report)
    assert not stats.has_histogram
    assert stats.bins is None


def test_fit_decay_round_trip():
    points = [(n, 2.234 * math.exp(-0.6445 * n)) for n in (11, 13, 15)]
    fit = fit_decay(points)
    assert abs(fit.amplitude - 2.234) / 2.234 < 1e-6
    assert abs(fit.rate - 0.6445) / 0.6445 < 1e-6
    assert np.max(np.abs(fit.residuals)) < 1e-9
    assert fit.cell_factor(11) == pytest.approx(math.exp(-0.6445 * 11))


def test_fit_decay_constant_ratios():
    fit = fit_decay([(11, 1.0), (13, 1.0), (15, 1.0)])
    assert fit.amplitude == pytest.approx(1.0)
    assert fit.rate == pytest.approx(0.0, abs=1e-12)


def test_fit_decay_with_noise():
    rng = np.random.default_rng(7)
    points = [(n, 2.234 * math.exp(-0.6445 * n) * math.exp(0.05 * rng.normal()))
              for n in range(8, 16)]
    fit = fit_decay(points)
    assert abs(fit.rate - 0.6445) / 0.6445 < 0.10


def test_fit_decay_errors():
    with pytest.raises(ValueError, match="positive"):
        fit_decay([(11, 0.5), (13, 0.0), (15, 0.2)])
    with pytest.raises(ValueError, match="distinct widths"):
        fit_decay([(11, 0.5), (11, 0.4)])


def test_schlafli_bound():
    assert schlafli_bound(3, 2) == 7
    assert schlafli_bound(11, 196) == 2048
    assert schlafli_bound(5, 2) == 16
    for n in range(0, 12):
        for d in range(n, 14):
            assert schlafli_bound(n, d) == 2 ** n
    with pytest.raises(ValueError):
        schlafli_bound(-1, 2)


def test_max_subcell_ratios():
    mlp = random_mlp([3, 4, 4, 2], seed=115)
    report = layerwise_serial(mlp, unit_box(3))
    rows = max_subcell_ratios(report)
    assert len(rows) == 1
    layer, width, ratio = rows[0]
    assert layer == 2 and width == 4
    assert 0 < ratio <= 1
    biggest = max(len(s) for s in _per_parent(report).values())
    assert ratio == pytest.approx(biggest / report.layer_counts[1])


def _per_parent(report):
    per_parent = {}
    for v in report.sign_vectors:
        per_parent.setdefault(v[0], set()).add(v.prefix(2))
    return per_parent


def test_accuracy_eval_constant_net():
    # zero weights: output is the bias, argmax always class 1
    mlp = MLP([np.zeros((2, 3)), np.zeros((3, 2))],
              [np.zeros(2), np.array([0.0, 5.0, -1.0])])
    x = np.random.default_rng(0).random((50, 3))
    assert accuracy_eval(mlp, x, np.full(50, 1)) == 1.0
    assert accuracy_eval(mlp, x, np.full(50, 0)) == 0.0


def test_accuracy_eval_chance_level():
    rng = np.random.default_rng(9)
    mlp = random_mlp([4, 6, 15], seed=119)
    x = rng.random((3000, 4))
    y = rng.integers(0, 15, size=3000)
    acc = accuracy_eval(mlp, x, y)
    assert abs(acc - 1 / 15) < 0.02


def test_accuracy_eval_empty_dataset():
    mlp = random_mlp([2, 3, 2], seed=121)
    with pytest.raises(ValueError):
        accuracy_eval(mlp, np.empty((0, 2)), np.empty(0, dtype=int))
