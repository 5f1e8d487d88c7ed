"""Portable on-disk formats: weights, domains, datasets.

Weights travel either as a versioned JSON document (diffable, good for
small fixtures) or as an .npz container with the identical schema (compact
for large nets). Both list, in layer order, each layer's row-major weight
matrix and bias vector, plus the declared widths; loaders validate the
declared widths against the matrices.

Domain files are JSON lists of oriented halfspaces (normal . x >= offset).
Datasets are .npz archives with float inputs `x` (N, d) in the domain and
integer labels `y` (N,).
"""

import hashlib
import json
import os

import numpy as np

from .geometry import BoundedDomain, Hyperplane, unit_box
from .network import MLP

WEIGHTS_FORMAT = "relucell-weights"
WEIGHTS_VERSION = 1
DOMAIN_FORMAT = "relucell-domain"
DOMAIN_VERSION = 1


def model_hash(mlp):
    """sha256 over widths and raw float64 parameter bytes, layer by layer."""
    digest = hashlib.sha256()
    digest.update(np.asarray(mlp.widths, dtype=np.int64).tobytes())
    for w, b in zip(mlp.weights, mlp.biases):
        digest.update(np.ascontiguousarray(w).tobytes())
        digest.update(np.ascontiguousarray(b).tobytes())
    return digest.hexdigest()


def save_weights_json(mlp, path):
    doc = {
        "format": WEIGHTS_FORMAT,
        "version": WEIGHTS_VERSION,
        "widths": mlp.widths,
        "layers": [{"weights": w.tolist(), "bias": b.tolist()}
                   for w, b in zip(mlp.weights, mlp.biases)],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def save_weights_npz(mlp, path):
    arrays = {"widths": np.asarray(mlp.widths, dtype=np.int64)}
    for l, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        arrays[f"W{l + 1}"] = w
        arrays[f"b{l + 1}"] = b
    np.savez(path, **arrays)


def save_weights(mlp, path):
    if str(path).endswith(".npz"):
        save_weights_npz(mlp, path)
    else:
        save_weights_json(mlp, path)


def _check_declared_widths(widths, weights):
    actual = [weights[0].shape[1]] + [w.shape[0] for w in weights]
    if list(widths) != actual:
        raise ValueError(f"declared widths {list(widths)} do not match matrices {actual}")


def load_weights_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != WEIGHTS_FORMAT:
        raise ValueError(f"{path}: not a {WEIGHTS_FORMAT} document")
    if doc.get("version") != WEIGHTS_VERSION:
        raise ValueError(f"{path}: unsupported weights version {doc.get('version')}")
    weights = [np.asarray(layer["weights"], dtype=float) for layer in doc["layers"]]
    biases = [np.asarray(layer["bias"], dtype=float) for layer in doc["layers"]]
    _check_declared_widths(doc["widths"], weights)
    return MLP(weights, biases)


def load_weights_npz(path):
    with np.load(path) as data:
        widths = data["widths"]
        n_layers = len(widths) - 1
        weights = [data[f"W{l + 1}"].astype(float) for l in range(n_layers)]
        biases = [data[f"b{l + 1}"].astype(float) for l in range(n_layers)]
    _check_declared_widths(widths, weights)
    return MLP(weights, biases)


def load_weights(path):
    if not os.path.exists(path):
        raise ValueError(f"weights file not found: {path}")
    if str(path).endswith(".npz"):
        return load_weights_npz(path)
    return load_weights_json(path)


def save_domain(domain, path):
    doc = {
        "format": DOMAIN_FORMAT,
        "version": DOMAIN_VERSION,
        "d": domain.d,
        "halfspaces": [{"normal": h.normal.tolist(), "offset": h.offset}
                       for h in domain.halfspaces],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_domain(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != DOMAIN_FORMAT:
        raise ValueError(f"{path}: not a {DOMAIN_FORMAT} document")
    if doc.get("version") != DOMAIN_VERSION:
        raise ValueError(f"{path}: unsupported domain version {doc.get('version')}")
    halfspaces = [Hyperplane(h["normal"], h["offset"]) for h in doc["halfspaces"]]
    return BoundedDomain(halfspaces, d=doc["d"])


def resolve_domain(spec, input_dim):
    """Domain from a CLI-style spec: None / 'unit-box' for the unit cube of
    the model's input dimension, otherwise a path to a domain file."""
    if spec is None or spec == "unit-box":
        return unit_box(input_dim)
    domain = load_domain(spec)
    if domain.d != input_dim:
        raise ValueError(f"domain dimension {domain.d} != model input dimension {input_dim}")
    return domain


def save_dataset(path, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError("dataset must be x (N, d) with labels y (N,)")
    np.savez(path, x=x, y=y)


def load_dataset(path):
    with np.load(path) as data:
        x = data["x"].astype(float)
        y = data["y"].astype(np.int64)
    if x.ndim != 2 or y.shape != (x.shape[0],):
        raise ValueError(f"{path}: malformed dataset")
    return x, y
