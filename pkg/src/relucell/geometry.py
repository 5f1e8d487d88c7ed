"""Hyperplanes, arrangements, sign vectors, and bounded convex domains.

All geometry is plain float64. Hyperplanes are stored with unit normals
(offset rescaled to match) so that the on-plane tolerance is meaningful
across scales. Orientation is preserved by normalization: the positive
side of ``a . x = b`` is always ``a . x > b``.

Everything here is immutable after construction and safe to share across
threads and processes.
"""

import numpy as np

# Absolute tolerance for "point lies on the hyperplane", applied to
# a.x - b with unit-norm a.
ON_PLANE_TOL = 1e-9

# A normal with 2-norm below this is treated as identically zero
# (degenerate hyperplane). Below LP resolution either way.
DEGENERATE_NORM_TOL = 1e-12

POS, NEG, ZERO = 1, -1, 0

_SIGN_CHARS = {POS: "+", NEG: "-", ZERO: "0"}
_CHAR_SIGNS = {"+": POS, "-": NEG, "0": ZERO}


class SignVector:
    """Immutable sequence over {+, -, 0} locating a point or face.

    Entries are stored as ints (+1, -1, 0). Cells never contain 0.
    """

    __slots__ = ("signs",)

    def __init__(self, signs):
        signs = tuple(int(s) for s in signs)
        for s in signs:
            if s not in (POS, NEG, ZERO):
                raise ValueError(f"sign entries must be +1, -1, or 0, got {s}")
        object.__setattr__(self, "signs", signs)

    def __setattr__(self, name, value):
        raise AttributeError("SignVector is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    @classmethod
    def from_string(cls, text):
        try:
            return cls(_CHAR_SIGNS[c] for c in text)
        except KeyError as exc:
            raise ValueError(f"invalid sign character {exc.args[0]!r}") from None

    def to_string(self):
        return "".join(_SIGN_CHARS[s] for s in self.signs)

    def prefix(self, k):
        """First k entries as a new SignVector (epsilon when k = 0)."""
        if not 0 <= k <= len(self.signs):
            raise ValueError(f"prefix length {k} out of range for length {len(self.signs)}")
        return SignVector(self.signs[:k])

    def append(self, sign):
        return SignVector(self.signs + (int(sign),))

    def count_positive(self):
        return sum(1 for s in self.signs if s == POS)

    def has_zero(self):
        return any(s == ZERO for s in self.signs)

    def __len__(self):
        return len(self.signs)

    def __getitem__(self, i):
        return self.signs[i]

    def __iter__(self):
        return iter(self.signs)

    def __eq__(self, other):
        return isinstance(other, SignVector) and self.signs == other.signs

    def __hash__(self):
        return hash(self.signs)

    def __repr__(self):
        return f"SignVector('{self.to_string()}')"


EPSILON_VECTOR = SignVector(())


class Hyperplane:
    """Oriented hyperplane {x : normal . x = offset} with unit normal.

    The positive side is {x : normal . x > offset}. A zero normal marks a
    degenerate "hyperplane": the affine form is the constant -offset and
    the object only carries that constant (ReLU neurons can have all-zero
    effective weights inside a region). Degenerate planes have no sides;
    their fixed sign is resolved by the enumeration layer, never side_of.
    """

    __slots__ = ("normal", "offset", "degenerate")

    def __init__(self, normal, offset):
        normal = np.asarray(normal, dtype=float)
        offset = float(offset)
        if normal.ndim != 1:
            raise ValueError("normal must be a 1-D vector")
        if not (np.isfinite(normal).all() and np.isfinite(offset)):
            raise ValueError("hyperplane entries must be finite")
        norm = float(np.linalg.norm(normal))
        if norm < DEGENERATE_NORM_TOL:
            normal = np.zeros_like(normal)
            degenerate = True
        else:
            normal = normal / norm
            offset = offset / norm
            degenerate = False
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "degenerate", degenerate)

    def __setattr__(self, name, value):
        raise AttributeError("Hyperplane is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    @property
    def d(self):
        return self.normal.shape[0]

    def value(self, p):
        """Signed affine value normal . p - offset (negative of it is the
        constant term for degenerate planes)."""
        p = np.asarray(p, dtype=float)
        if p.shape != self.normal.shape:
            raise ValueError(f"point dimension {p.shape} != hyperplane dimension {self.normal.shape}")
        return float(self.normal @ p - self.offset)

    def constant_sign(self, tol=ON_PLANE_TOL):
        """Fixed sign of a degenerate plane: the sign of its constant term.

        The affine form of a degenerate plane is the constant -offset.
        A constant within tol of zero resolves to NEG (ReLU maps a zero
        pre-activation to the inactive branch).
        """
        if not self.degenerate:
            raise ValueError("constant_sign is only defined for degenerate hyperplanes")
        const = -self.offset
        return POS if const > tol else NEG

    def flipped(self):
        """Same point set, opposite orientation."""
        return Hyperplane(-self.normal, -self.offset)

    def __repr__(self):
        if self.degenerate:
            return f"Hyperplane(degenerate, const={-self.offset:.6g})"
        return f"Hyperplane(normal={np.array2string(self.normal, precision=4)}, offset={self.offset:.6g})"


def side_of(h, p, tol=ON_PLANE_TOL):
    """Which side of h the point p lies on: +1, -1, or 0 (on the plane)."""
    if h.degenerate:
        raise ValueError("side_of is undefined for degenerate hyperplanes")
    v = h.value(p)
    if v > tol:
        return POS
    if v < -tol:
        return NEG
    return ZERO


class Arrangement:
    """Ordered, immutable collection of hyperplanes of equal dimension d.

    Index i in any sign vector over this arrangement always refers to
    hyperplanes[i]. Duplicate hyperplanes are permitted (they force
    correlated signs downstream). Matrix views are cached for vectorized
    evaluation; degenerate rows are zero.
    """

    __slots__ = ("hyperplanes", "d", "_normals", "_offsets")

    def __init__(self, hyperplanes, d=None):
        hyperplanes = tuple(hyperplanes)
        if d is None:
            if not hyperplanes:
                raise ValueError("dimension d required for an empty arrangement")
            d = hyperplanes[0].d
        d = int(d)
        if d < 1:
            raise ValueError("dimension must be positive")
        for h in hyperplanes:
            if h.d != d:
                raise ValueError(f"hyperplane dimension {h.d} != arrangement dimension {d}")
        object.__setattr__(self, "hyperplanes", hyperplanes)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_normals", None)
        object.__setattr__(self, "_offsets", None)

    def __setattr__(self, name, value):
        raise AttributeError("Arrangement is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    def __len__(self):
        return len(self.hyperplanes)

    def __getitem__(self, i):
        return self.hyperplanes[i]

    def __iter__(self):
        return iter(self.hyperplanes)

    def matrices(self):
        """(normals, offsets) as an (n, d) matrix and length-n vector."""
        if self._normals is None:
            n = len(self.hyperplanes)
            normals = np.zeros((n, self.d))
            offsets = np.zeros(n)
            for i, h in enumerate(self.hyperplanes):
                normals[i] = h.normal
                offsets[i] = h.offset
            normals.setflags(write=False)
            offsets.setflags(write=False)
            object.__setattr__(self, "_normals", normals)
            object.__setattr__(self, "_offsets", offsets)
        return self._normals, self._offsets

    def degenerate_indices(self):
        return [i for i, h in enumerate(self.hyperplanes) if h.degenerate]


def sign_vector(arrangement, p, tol=ON_PLANE_TOL):
    """Sign vector of point p with respect to an ordered arrangement.

    Degenerate members contribute their fixed constant sign (they have the
    same relationship to every point).
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (arrangement.d,):
        raise ValueError(f"point dimension {p.shape} != arrangement dimension {arrangement.d}")
    signs = []
    for h in arrangement:
        if h.degenerate:
            signs.append(h.constant_sign(tol))
        else:
            signs.append(side_of(h, p, tol))
    return SignVector(signs)


def sign_vectors_batch(arrangement, points, tol=ON_PLANE_TOL):
    """Sign matrix (m, n) over {+1,-1,0} for m points, vectorized.

    Same semantics as sign_vector per row.
    """
    points = np.asarray(points, dtype=float)
    normals, offsets = arrangement.matrices()
    vals = points @ normals.T - offsets
    signs = np.where(vals > tol, POS, np.where(vals < -tol, NEG, ZERO)).astype(np.int8)
    for i in arrangement.degenerate_indices():
        signs[:, i] = arrangement[i].constant_sign(tol)
    return signs


class BoundedDomain:
    """Convex region: intersection of the closed positive half-spaces of
    oriented hyperplanes (normal . x >= offset for each member)."""

    __slots__ = ("halfspaces", "d", "_normals", "_offsets")

    def __init__(self, halfspaces, d=None):
        halfspaces = tuple(halfspaces)
        if d is None:
            if not halfspaces:
                raise ValueError("dimension d required for an unconstrained domain")
            d = halfspaces[0].d
        d = int(d)
        if d < 1:
            raise ValueError("dimension must be positive")
        for h in halfspaces:
            if h.degenerate:
                raise ValueError("domain halfspaces must be non-degenerate")
            if h.d != d:
                raise ValueError(f"halfspace dimension {h.d} != domain dimension {d}")
        object.__setattr__(self, "halfspaces", halfspaces)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_normals", None)
        object.__setattr__(self, "_offsets", None)

    def __setattr__(self, name, value):
        raise AttributeError("BoundedDomain is immutable")

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__}

    def __setstate__(self, state):
        for name, value in state.items():
            object.__setattr__(self, name, value)

    def __len__(self):
        return len(self.halfspaces)

    def __iter__(self):
        return iter(self.halfspaces)

    def matrices(self):
        """(D, e) such that the domain is {x : D x >= e}."""
        if self._normals is None:
            n = len(self.halfspaces)
            normals = np.zeros((n, self.d))
            offsets = np.zeros(n)
            for i, h in enumerate(self.halfspaces):
                normals[i] = h.normal
                offsets[i] = h.offset
            normals.setflags(write=False)
            offsets.setflags(write=False)
            object.__setattr__(self, "_normals", normals)
            object.__setattr__(self, "_offsets", offsets)
        return self._normals, self._offsets

    def contains(self, p, margin=0.0):
        """True if every halfspace holds at p with at least the given slack."""
        p = np.asarray(p, dtype=float)
        if p.shape != (self.d,):
            raise ValueError(f"point dimension {p.shape} != domain dimension {self.d}")
        normals, offsets = self.matrices()
        return bool(np.all(normals @ p - offsets >= margin))


def unit_box(d):
    """The axis-aligned unit cube [0, 1]^d as 2d halfspaces."""
    d = int(d)
    if d < 1:
        raise ValueError("unit_box requires d >= 1")
    halfspaces = []
    for i in range(d):
        lo = np.zeros(d)
        lo[i] = 1.0
        halfspaces.append(Hyperplane(lo, 0.0))   # x_i >= 0
        hi = np.zeros(d)
        hi[i] = -1.0
        halfspaces.append(Hyperplane(hi, -1.0))  # -x_i >= -1
    return BoundedDomain(halfspaces, d)
