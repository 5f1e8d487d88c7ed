"""ReLU multilayer perceptrons and their region-local affine structure.

A network input fixed to one activation region sees each hidden layer as a
plain affine map of the input: masking the inactive neurons of earlier
layers composes the per-layer affines into effective weights and biases.
The zero set of each effective neuron is a hyperplane in input space, and
those hyperplanes (oriented so + means ReLU-active) are what the
enumeration machinery partitions.

The MLP is immutable and shared read-only across workers; everything here
is a pure function of its arguments.
"""

import numpy as np

from .geometry import Arrangement, Hyperplane, NEG, POS, SignVector
from .witness import SignedConstraint


class MLP:
    """Fully connected ReLU network: L hidden layers plus a linear output.

    weights[l] has shape (n_{l+1}, n_l) for l = 0..L (the last maps to the
    m output units); biases match the row counts.
    """

    __slots__ = ("weights", "biases")

    def __init__(self, weights, biases):
        weights = tuple(np.ascontiguousarray(w, dtype=float) for w in weights)
        biases = tuple(np.ascontiguousarray(b, dtype=float) for b in biases)
        if len(weights) < 2:
            raise ValueError("an MLP needs at least one hidden layer and an output layer")
        if len(weights) != len(biases):
            raise ValueError("weights and biases count mismatch")
        for l, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ValueError(f"layer {l + 1}: weight {w.shape} and bias {b.shape} do not chain")
            if l > 0 and w.shape[1] != weights[l - 1].shape[0]:
                raise ValueError(f"layer {l + 1}: input width {w.shape[1]} != "
                                 f"previous output width {weights[l - 1].shape[0]}")
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise ValueError(f"layer {l + 1}: non-finite parameters")
        for w in weights:
            w.setflags(write=False)
        for b in biases:
            b.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    def __setattr__(self, name, value):
        raise AttributeError("MLP is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    @property
    def hidden_layers(self):
        return len(self.weights) - 1

    @property
    def input_dim(self):
        return self.weights[0].shape[1]

    @property
    def output_dim(self):
        return self.weights[-1].shape[0]

    @property
    def widths(self):
        """[n_0, n_1, ..., n_L, m]."""
        return [self.input_dim] + [w.shape[0] for w in self.weights]

    def hidden_width(self, layer):
        """Width of hidden layer `layer` (1-based)."""
        if not 1 <= layer <= self.hidden_layers:
            raise ValueError(f"hidden layer {layer} out of range 1..{self.hidden_layers}")
        return self.weights[layer - 1].shape[0]

    def __repr__(self):
        return f"MLP(widths={self.widths})"


class ActivationPattern:
    """Per hidden layer, the 0/1 indicator of which ReLUs fire."""

    __slots__ = ("layers",)

    def __init__(self, layers):
        layers = tuple(np.asarray(z, dtype=np.int8) for z in layers)
        for z in layers:
            if z.ndim != 1 or not np.isin(z, (0, 1)).all():
                raise ValueError("indicator vectors must be 1-D over {0,1}")
        self.layers = layers

    def __len__(self):
        return len(self.layers)

    def __getitem__(self, l):
        return self.layers[l]

    def __eq__(self, other):
        return (isinstance(other, ActivationPattern)
                and len(self.layers) == len(other.layers)
                and all(np.array_equal(a, b) for a, b in zip(self.layers, other.layers)))

    def __repr__(self):
        return f"ActivationPattern({[z.tolist() for z in self.layers]})"


class NetworkSignVector:
    """Tuple of per-layer cell sign vectors naming one activation region."""

    __slots__ = ("layers",)

    def __init__(self, layers):
        layers = tuple(layers)
        for s in layers:
            if not isinstance(s, SignVector):
                raise TypeError("layers must be SignVectors")
            if s.has_zero():
                raise ValueError("network sign vectors describe cells: no 0 entries")
        object.__setattr__(self, "layers", layers)

    def __setattr__(self, name, value):
        raise AttributeError("NetworkSignVector is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    @classmethod
    def from_pattern(cls, pattern):
        return cls(SignVector([POS if z else NEG for z in layer])
                   for layer in pattern.layers)

    def to_pattern(self):
        return ActivationPattern([(np.asarray(s.signs) == POS).astype(np.int8)
                                  for s in self.layers])

    @classmethod
    def from_string(cls, text):
        return cls(SignVector.from_string(part) for part in text.split("|"))

    def to_string(self):
        return "|".join(s.to_string() for s in self.layers)

    def prefix(self, k):
        """Network sign vector prefix up to layer k."""
        if not 0 <= k <= len(self.layers):
            raise ValueError(f"prefix depth {k} out of range")
        return NetworkSignVector(self.layers[:k])

    def append_layer(self, sign_vec):
        return NetworkSignVector(self.layers + (sign_vec,))

    def __len__(self):
        return len(self.layers)

    def __getitem__(self, l):
        return self.layers[l]

    def __iter__(self):
        return iter(self.layers)

    def __eq__(self, other):
        return isinstance(other, NetworkSignVector) and self.layers == other.layers

    def __hash__(self):
        return hash(self.layers)

    def __lt__(self, other):
        return self.to_string() < other.to_string()

    def __repr__(self):
        return f"NetworkSignVector('{self.to_string()}')"


EMPTY_PREFIX = NetworkSignVector(())


class EffectiveAffine:
    """Region-local affine map x -> weight @ x + bias for one layer's
    pre-activations, valid throughout the conditioning region."""

    __slots__ = ("weight", "bias")

    def __init__(self, weight, bias):
        self.weight = np.asarray(weight, dtype=float)
        self.bias = np.asarray(bias, dtype=float)
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise ValueError("weight must be (n, d) with matching bias length n")

    def apply(self, x):
        return self.weight @ np.asarray(x, dtype=float) + self.bias

    def __repr__(self):
        return f"EffectiveAffine({self.weight.shape[0]}x{self.weight.shape[1]})"


def forward(mlp, x):
    """Evaluate the network at x: output vector plus activation pattern.

    Indicator convention follows the ReLU boundary exactly: a unit is
    active iff its pre-activation is strictly positive.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (mlp.input_dim,):
        raise ValueError(f"input dimension {x.shape} != network input {mlp.input_dim}")
    h = x
    indicators = []
    for w, b in zip(mlp.weights[:-1], mlp.biases[:-1]):
        pre = w @ h + b
        indicators.append((pre > 0).astype(np.int8))
        h = np.maximum(pre, 0.0)
    y = mlp.weights[-1] @ h + mlp.biases[-1]
    return y, ActivationPattern(indicators)


def forward_batch(mlp, xs):
    """Vectorized forward over rows of xs.

    Returns (outputs (N, m), list of per-layer indicator matrices (N, n_l),
    boundary_margin (N,)) where boundary_margin is the smallest |pre-
    activation| seen across all hidden units; samples with a tiny margin
    sit numerically on a region boundary and callers may want to skip them.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != mlp.input_dim:
        raise ValueError(f"expected (N, {mlp.input_dim}) inputs, got {xs.shape}")
    h = xs
    indicators = []
    margin = np.full(xs.shape[0], np.inf)
    for w, b in zip(mlp.weights[:-1], mlp.biases[:-1]):
        pre = h @ w.T + b
        indicators.append((pre > 0).astype(np.int8))
        margin = np.minimum(margin, np.abs(pre).min(axis=1))
        h = np.maximum(pre, 0.0)
    ys = h @ mlp.weights[-1].T + mlp.biases[-1]
    return ys, indicators, margin


def effective_affine(mlp, prefix, layer):
    """Effective weights and bias of `layer` conditioned on a region prefix.

    Layer 1 is the raw first layer. For deeper layers the inactive units of
    each earlier layer (prefix sign -) are masked out before composing, so
    the result maps network inputs directly to this layer's
    pre-activations anywhere inside the prefix's region.
    """
    if not 1 <= layer <= mlp.hidden_layers:
        raise ValueError(f"layer {layer} out of range 1..{mlp.hidden_layers}")
    if len(prefix) != layer - 1:
        raise ValueError(f"prefix length {len(prefix)} != layer - 1 = {layer - 1}")
    w_eff = mlp.weights[0]
    b_eff = mlp.biases[0]
    for l in range(2, layer + 1):
        w_eff, b_eff = _compose(mlp, w_eff, b_eff, prefix[l - 2], l)
    return EffectiveAffine(w_eff, b_eff)


def _compose(mlp, w_prev, b_prev, signs_prev, layer):
    """One composition step: mask layer-1 units of `layer - 1` by their
    signs and push through the raw weights of `layer`."""
    if len(signs_prev) != w_prev.shape[0]:
        raise ValueError(f"sign vector length {len(signs_prev)} != layer width {w_prev.shape[0]}")
    mask = np.fromiter((1.0 if s == POS else 0.0 for s in signs_prev),
                       dtype=float, count=len(signs_prev))
    w_raw = mlp.weights[layer - 1]
    b_raw = mlp.biases[layer - 1]
    w_eff = w_raw @ (w_prev * mask[:, None])
    b_eff = w_raw @ (b_prev * mask) + b_raw
    return w_eff, b_eff


def extend_affine(mlp, eff_prev, signs_prev, layer):
    """Effective affine of `layer` from layer - 1's affine and sign vector.

    Incremental form of effective_affine for enumeration paths that extend
    one layer at a time.
    """
    w_eff, b_eff = _compose(mlp, eff_prev.weight, eff_prev.bias, signs_prev, layer)
    return EffectiveAffine(w_eff, b_eff)


def arrangement_from_affine(eff):
    """Hyperplanes of one layer's effective neurons, + side = ReLU-active.

    Neuron i fires where w_i . x + b_i > 0, i.e. on the positive side of
    {x : w_i . x = -b_i}. Rows with (numerically) zero weight become
    flagged degenerate planes carrying the constant b_i.
    """
    planes = [Hyperplane(eff.weight[i], -eff.bias[i])
              for i in range(eff.weight.shape[0])]
    return Arrangement(planes, d=eff.weight.shape[1])


def conditioned_arrangement(mlp, prefix, layer):
    """Arrangement cut by `layer` inside the region named by prefix."""
    return arrangement_from_affine(effective_affine(mlp, prefix, layer))


class _Contradiction:
    """Marker: a prefix demands the impossible sign of a constant neuron."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "CONTRADICTORY_PREFIX"

    def __bool__(self):
        return False


CONTRADICTORY_PREFIX = _Contradiction()


def cell_constraints(mlp, prefix):
    """Signed constraints pinning down the region of a network prefix.

    One constraint per non-degenerate neuron of layers 1..k; degenerate
    neurons contribute none, but a prefix that assigns one the wrong
    constant sign cannot name a region: the CONTRADICTORY_PREFIX marker is
    returned instead (an enumeration prune, not an error).
    """
    if len(prefix) > mlp.hidden_layers:
        raise ValueError(f"prefix depth {len(prefix)} exceeds {mlp.hidden_layers} hidden layers")
    constraints = []
    eff = None
    for l in range(1, len(prefix) + 1):
        eff = effective_affine(mlp, prefix.prefix(l - 1), l) if eff is None \
            else extend_affine(mlp, eff, prefix[l - 2], l)
        arr = arrangement_from_affine(eff)
        signs = prefix[l - 1]
        if len(signs) != len(arr):
            raise ValueError(f"layer {l}: sign vector length {len(signs)} != width {len(arr)}")
        for i, h in enumerate(arr):
            if h.degenerate:
                if h.constant_sign() != signs[i]:
                    return CONTRADICTORY_PREFIX
            else:
                constraints.append(SignedConstraint(h, signs[i]))
    return constraints
