"""Seeded random fixtures: networks and arrangements with rich region
structure inside the unit box.

Raw Gaussian biases put most hyperplanes far from the data cube, which
makes boring instances (a handful of cells). The generators here place
each hyperplane near the box on purpose, so fixed seeds give
deterministic, well-populated test instances.
"""

import numpy as np

from .geometry import Arrangement, Hyperplane
from .network import MLP


def random_arrangement(n, d, seed, spread=0.7):
    """n hyperplanes with random unit normals, each through its own random
    point in the central `spread` fraction of the unit box."""
    rng = np.random.default_rng(seed)
    lo = 0.5 - spread / 2
    planes = []
    for _ in range(n):
        normal = rng.normal(size=d)
        normal /= np.linalg.norm(normal)
        point = lo + spread * rng.random(d)
        planes.append(Hyperplane(normal, float(normal @ point)))
    return Arrangement(planes, d=d)


def random_mlp(widths, seed, centered=True, bias_scale=0.1):
    """Random ReLU net with the given [n0, ..., nL, m] widths.

    Weights are N(0, 2/fan-in). With centered=True each hidden
    hyperplane is pulled through the image of the box center plus jitter,
    so deep layers actually cut the earlier regions; with centered=False
    biases are plain N(0, bias_scale) and many deep planes miss the box.
    """
    widths = [int(w) for w in widths]
    if len(widths) < 3:
        raise ValueError("widths must list n0, at least one hidden layer, and m")
    rng = np.random.default_rng(seed)
    weights = []
    biases = []
    h_center = np.full(widths[0], 0.5)
    for l in range(1, len(widths)):
        fan_in = widths[l - 1]
        w = rng.normal(scale=np.sqrt(2.0 / fan_in), size=(widths[l], fan_in))
        is_output = l == len(widths) - 1
        if is_output or not centered:
            b = rng.normal(scale=bias_scale, size=widths[l])
        else:
            row_norms = np.linalg.norm(w, axis=1)
            b = -w @ h_center + bias_scale * row_norms * rng.normal(size=widths[l])
        weights.append(w)
        biases.append(b)
        if not is_output:
            h_center = np.maximum(w @ h_center + b, 0.0)
    return MLP(weights, biases)


def concurrent_first_layer_mlp(n1, n0, seed, deep_widths=(), m=2):
    """Net whose layer-1 hyperplanes all pass through one interior point.

    With n1 <= n0 and independent random normals this realizes all 2^{n1}
    layer-1 cells inside the unit box (every orthant of the common point
    is populated nearby). Deep layers, when requested, are centered random
    layers on top.
    """
    if n1 > n0:
        raise ValueError("concurrent construction needs n1 <= n0")
    rng = np.random.default_rng(seed)
    point = 0.3 + 0.4 * rng.random(n0)
    w1 = rng.normal(size=(n1, n0))
    b1 = -w1 @ point
    widths = [n0, n1, *deep_widths, m]
    base = random_mlp(widths, seed + 1, centered=True)
    weights = [w1] + [np.array(w) for w in base.weights[1:]]
    biases = [b1] + [np.array(b) for b in base.biases[1:]]
    return MLP(weights, biases)
