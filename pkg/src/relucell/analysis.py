"""Post-enumeration statistics over finished reports.

Everything here reads an EnumerationReport (usually reloaded from a run
directory); nothing re-runs enumeration. The analyses mirror the standard
questions about a region census: how counts grow per layer, how the
dimension of a layer-1 region drives the second layer's sub-partitioning,
how task times distribute, how the largest per-parent subcell fraction
decays with width, and how region counts line up with accuracy.
"""

import math

import numpy as np

from .network import forward_batch


def region_dimension(s1):
    """Dimension of a layer-1 region's affine map: its count of + signs.

    Reported raw (not capped by the input dimension).
    """
    return s1.count_positive()


class DimensionBin:
    __slots__ = ("dimension", "n_cells", "total_subcells", "task_times")

    def __init__(self, dimension):
        self.dimension = dimension
        self.n_cells = 0
        self.total_subcells = 0
        self.task_times = []

    @property
    def mean_subcells(self):
        return self.total_subcells / self.n_cells

    @property
    def mean_task_time(self):
        return float(np.mean(self.task_times)) if self.task_times else float("nan")


class RegionStats:
    """Layer totals, the dimension histogram, and the task-time summary."""

    __slots__ = ("layer_counts", "bins", "time_stats")

    def __init__(self, layer_counts, bins, time_stats):
        self.layer_counts = list(layer_counts)
        self.bins = bins  # dimension -> DimensionBin, or None when L == 1
        self.time_stats = time_stats

    @property
    def has_histogram(self):
        return self.bins is not None


class TaskTimeStats:
    """Sample mean and std with the Fisher-Pearson moment skewness
    g1 = m3 / m2^(3/2); zero-variance data reports skew 0 with a flag."""

    __slots__ = ("mean", "std", "skew", "zero_variance", "n")

    def __init__(self, mean, std, skew, zero_variance, n):
        self.mean = float(mean)
        self.std = float(std)
        self.skew = float(skew)
        self.zero_variance = bool(zero_variance)
        self.n = int(n)

    def __repr__(self):
        return (f"TaskTimeStats(mean={self.mean:.4g}, std={self.std:.4g}, "
                f"skew={self.skew:.4g}, n={self.n})")


def task_time_stats(report_or_times):
    """Distribution summary of task wall times (needs >= 2 tasks)."""
    if hasattr(report_or_times, "task_times"):
        times = report_or_times.task_times()
    else:
        times = list(report_or_times)
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("task time statistics need at least 2 timed tasks")
    mean = float(times.mean())
    std = float(times.std(ddof=1))
    centered = times - mean
    m2 = float(np.mean(centered ** 2))
    if m2 == 0.0:
        return TaskTimeStats(mean, 0.0, 0.0, True, times.size)
    m3 = float(np.mean(centered ** 3))
    return TaskTimeStats(mean, std, m3 / m2 ** 1.5, False, times.size)


def subcell_histogram(report):
    """Group layer-1 cells by region dimension; per group, the mean number
    of layer-2 cells formed inside, plus mean task time.

    Conservation: summed total_subcells over bins equals |C^2| exactly.
    For a 1-hidden-layer report the histogram is empty (bins=None).
    """
    layer_counts = report.layer_counts
    times = {}
    for task in report.tasks:
        if task.n_found:
            times[task.s1] = task.wall_time

    if not report.sign_vectors or len(report.sign_vectors[0]) < 2:
        stats = task_time_stats(report) if len(report.tasks) >= 2 else None
        return RegionStats(layer_counts, None, stats)

    subcells = {}
    for v in report.sign_vectors:
        subcells.setdefault(v[0], set()).add(v.prefix(2))
    bins = {}
    for s1, prefixes in subcells.items():
        dim = region_dimension(s1)
        bin_ = bins.setdefault(dim, DimensionBin(dim))
        bin_.n_cells += 1
        bin_.total_subcells += len(prefixes)
        if s1 in times:
            bin_.task_times.append(times[s1])
    stats = task_time_stats(report) if len(report.tasks) >= 2 else None
    return RegionStats(layer_counts, dict(sorted(bins.items())), stats)


class DecayFit:
    """Exponential decay of the max per-parent subcell fraction with layer
    width: ratio(n) ~ amplitude * exp(-rate * n)."""

    __slots__ = ("amplitude", "rate", "residuals")

    def __init__(self, amplitude, rate, residuals):
        self.amplitude = float(amplitude)
        self.rate = float(rate)
        self.residuals = np.asarray(residuals, dtype=float)

    def cell_factor(self, n):
        """The decay factor exp(-rate * n) at width n."""
        return math.exp(-self.rate * n)

    def predict(self, n):
        return self.amplitude * math.exp(-self.rate * float(n))

    def __repr__(self):
        return f"DecayFit(amplitude={self.amplitude:.6g}, rate={self.rate:.6g})"


def fit_decay(points):
    """Least squares of log(ratio) against width n.

    points: (n, ratio) pairs with ratio > 0, at least 3 distinct widths.
    Returns DecayFit with amplitude = exp(intercept), rate = -slope, and
    the log-space residuals.
    """
    points = [(float(n), float(r)) for n, r in points]
    if any(r <= 0 for _, r in points):
        raise ValueError("ratios must be positive")
    widths = np.array([n for n, _ in points])
    if len(set(widths.tolist())) < 3:
        raise ValueError("need at least 3 distinct widths to fit a decay")
    logr = np.log([r for _, r in points])
    slope, intercept = np.polyfit(widths, logr, 1)
    residuals = logr - (intercept + slope * widths)
    return DecayFit(np.exp(intercept), -slope, residuals)


def max_subcell_ratios(report):
    """Per deep layer l >= 2: (layer, n_l, max_i |C^l inside parent i| / |C^l|).

    The layer-2 row is the quantity the decay fit models; deeper rows let
    the same relationship be examined per layer.
    """
    if not report.sign_vectors:
        return []
    depth = len(report.sign_vectors[0])
    widths = report.config.get("widths")
    rows = []
    for l in range(2, depth + 1):
        per_parent = {}
        for v in report.sign_vectors:
            per_parent.setdefault(v.prefix(l - 1), set()).add(v.prefix(l))
        total = sum(len(s) for s in per_parent.values())
        biggest = max(len(s) for s in per_parent.values())
        n_l = widths[l] if widths else len(report.sign_vectors[0][l - 1])
        rows.append((l, n_l, biggest / total))
    return rows


def schlafli_bound(n, d):
    """Maximum cells of n hyperplanes in dimension d: sum_{k<=d} C(n, k);
    equals 2^n whenever n <= d."""
    if n < 0 or d < 0:
        raise ValueError("n and d must be non-negative")
    return sum(math.comb(n, k) for k in range(min(n, d) + 1))


def accuracy_eval(mlp, inputs, labels):
    """Fraction of samples whose argmax output matches the label."""
    inputs = np.asarray(inputs, dtype=float)
    labels = np.asarray(labels)
    if inputs.ndim != 2 or inputs.shape[0] == 0:
        raise ValueError("dataset must be a non-empty (N, d) array")
    if labels.shape != (inputs.shape[0],):
        raise ValueError("labels must be one integer per sample")
    outputs, _, _ = forward_batch(mlp, inputs)
    return float(np.mean(np.argmax(outputs, axis=1) == labels))
