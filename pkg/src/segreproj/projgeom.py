"""Projective points, linear subspaces, spans, intersections and projection."""
import numpy as np

from . import linalg
from .errors import AmbientMismatch, CenterContainsPoint, EmptyInput, MixedFields


class ProjPoint:
    """A point of P^n, stored with its first nonzero coordinate equal to 1."""

    __slots__ = ("field", "coords", "_key")

    def __init__(self, field, coords):
        v = linalg.normalize_vector(field, field.array(coords) if field.dtype is object else _raw_fp(field, coords))
        self._set(field, v)

    def _set(self, field, v):
        v = np.asarray(v, dtype=field.dtype).copy()
        v.flags.writeable = False
        self.field = field
        self.coords = v
        self._key = linalg.to_key(field, v)

    @classmethod
    def from_raw(cls, field, raw):
        """Normalize raw field entries (no coercion)."""
        self = cls.__new__(cls)
        self._set(field, linalg.normalize_vector(field, raw))
        return self

    @property
    def dim(self):
        return len(self.coords) - 1

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.field.to_elem(x) for x in self.coords)

    def __getitem__(self, i):
        return self.field.to_elem(self.coords[i])

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.field == other.field and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "[" + ":".join(_fmt(self.field, x) for x in self.coords) + "]"

    def to_json(self):
        return linalg.to_jsonable(self.field, self.coords)


def _raw_fp(field, coords):
    return np.array([field.to_raw(c) for c in coords], dtype=np.int64)


def _fmt(field, x):
    from fractions import Fraction

    if isinstance(x, Fraction):
        return str(x)
    return str(x) if field.dtype is object else str(int(x))


def normalize_point(coords, field=None):
    """ProjPoint from raw coordinates, scaled so the first nonzero entry is 1."""
    if field is None:
        from .scalars import RationalField, field_of

        field = next((f for f in (field_of(c) for c in coords) if f is not None), None) or RationalField()
    return ProjPoint(field, coords)


class LinearSubspace:
    """Projective linear subspace of P^ambient_dim given by a canonical RREF basis.

    The empty subspace has a basis with zero rows and projective dimension -1.
    """

    __slots__ = ("field", "ambient_dim", "basis", "pivots", "_key")

    def __init__(self, field, ambient_dim, generators=None):
        n = ambient_dim + 1
        if generators is None or len(generators) == 0:
            R, piv = field.zeros((0, n)), ()
        else:
            G = np.asarray(generators, dtype=field.dtype).reshape(-1, n)
            R, piv = linalg.rref(field, G)
        self._set(field, ambient_dim, R, piv)

    def _set(self, field, ambient_dim, R, piv):
        R = np.asarray(R, dtype=field.dtype).reshape(-1, ambient_dim + 1).copy()
        R.flags.writeable = False
        self.field = field
        self.ambient_dim = int(ambient_dim)
        self.basis = R
        self.pivots = tuple(int(c) for c in piv)
        self._key = (self.ambient_dim, linalg.to_key(field, R))

    @classmethod
    def from_rref(cls, field, ambient_dim, R, pivots):
        """Wrap a basis already known to be in reduced row echelon form."""
        self = cls.__new__(cls)
        self._set(field, ambient_dim, R, pivots)
        return self

    @classmethod
    def empty(cls, field, ambient_dim):
        return cls(field, ambient_dim)

    @classmethod
    def from_equations(cls, field, ambient_dim, forms):
        """Common zero locus of linear forms (rows of ``forms``)."""
        forms = np.asarray(forms, dtype=field.dtype).reshape(-1, ambient_dim + 1)
        K, piv = linalg.nullspace(field, forms, ncols=ambient_dim + 1, return_pivots=True)
        return cls.from_rref(field, ambient_dim, K, piv)

    @property
    def dim(self):
        return self.basis.shape[0] - 1

    @property
    def nonpivots(self):
        piv = set(self.pivots)
        return tuple(c for c in range(self.ambient_dim + 1) if c not in piv)

    def is_empty(self):
        return self.basis.shape[0] == 0

    def equations(self):
        """Basis (RREF) of the linear forms vanishing on the subspace."""
        return linalg.nullspace(self.field, self.basis, ncols=self.ambient_dim + 1)

    def contains(self, x):
        v = x.coords if isinstance(x, ProjPoint) else np.asarray(x, dtype=self.field.dtype)
        if self.is_empty():
            return False
        return linalg.is_zero(self.field, reduce_modulo(self, v))

    def __contains__(self, x):
        return self.contains(x)

    def points(self):
        return [ProjPoint.from_raw(self.field, row) for row in self.basis]

    def __eq__(self, other):
        return isinstance(other, LinearSubspace) and self.field == other.field and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"LinearSubspace(dim={self.dim}, ambient={self.ambient_dim}, rows={self.basis.shape[0]})"

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "dim": self.dim, "basis": linalg.to_jsonable(self.field, self.basis)}


def _check_same(a, b):
    if a.field != b.field:
        raise MixedFields(f"{a.field!r} and {b.field!r}")
    if _ambient(a) != _ambient(b):
        raise AmbientMismatch(f"P^{_ambient(a)} and P^{_ambient(b)}")


def _ambient(x):
    return x.dim if isinstance(x, ProjPoint) else x.ambient_dim


def span(items):
    """Smallest linear subspace containing the given points and subspaces."""
    items = list(items)
    if not items:
        raise EmptyInput("span of nothing")
    first = items[0]
    for it in items[1:]:
        _check_same(first, it)
    rows = [it.coords.reshape(1, -1) if isinstance(it, ProjPoint) else it.basis for it in items]
    G = np.concatenate(rows, axis=0)
    return LinearSubspace(first.field, _ambient(first), G)


def intersect(U, V):
    """Intersection of two subspaces, via the annihilators of their cones."""
    _check_same(U, V)
    F = U.field
    n = U.ambient_dim + 1
    forms = np.concatenate([U.equations().reshape(-1, n), V.equations().reshape(-1, n)], axis=0)
    return LinearSubspace.from_equations(F, U.ambient_dim, forms)


def reduce_modulo(L, v):
    """``v`` minus the combination of L's rows that clears L's pivot columns."""
    F = L.field
    v = np.asarray(v, dtype=F.dtype)
    if L.is_empty():
        return v.copy()
    coeffs = v[list(L.pivots)]
    return linalg.sub(F, v, linalg.matmul(F, coeffs.reshape(1, -1), L.basis).reshape(-1))


def projection_matrix(L):
    """Matrix ``U`` with ``project_from_center(L, x) = [U x]``.

    Rows are indexed by L's non-pivot columns; ``U[:, nonpivots]`` is the
    identity and the pivot columns carry minus the reduced entries of L.
    """
    F = L.field
    n = L.ambient_dim + 1
    nonpiv = list(L.nonpivots)
    U = F.zeros((len(nonpiv), n))
    one = F.to_raw(F.one)
    for i, c in enumerate(nonpiv):
        U[i, c] = one
    if not L.is_empty():
        U[:, list(L.pivots)] = linalg.negate(F, L.basis[:, nonpiv]).T
    return U


def project_from_center(L, x):
    """Image of ``x`` under projection from ``L`` onto the coordinate complement."""
    if x.dim != L.ambient_dim:
        raise AmbientMismatch(f"point in P^{x.dim}, center in P^{L.ambient_dim}")
    if x.field != L.field:
        raise MixedFields(f"{x.field!r} and {L.field!r}")
    r = reduce_modulo(L, x.coords)[list(L.nonpivots)]
    if linalg.is_zero(L.field, r):
        raise CenterContainsPoint(f"{x!r} lies in the center")
    return ProjPoint.from_raw(L.field, r)


def complement_inclusion(L, y):
    """Lift of a target point to the coordinate complement of ``L``."""
    F = L.field
    v = F.zeros(L.ambient_dim + 1)
    v[list(L.nonpivots)] = y.coords
    return ProjPoint.from_raw(F, v)


def count_points(order, a):
    """``|P^a(F_order)|``."""
    return (order ** (a + 1) - 1) // (order - 1)


def enumerate_points(field, a):
    """Raw coordinates of every point of P^a over a finite field.

    Order: by position of the leading 1, then the tail in the field's
    element order, last coordinate fastest.
    """
    from itertools import product as iproduct

    if not field.is_finite:
        raise TypeError("only finite fields can be enumerated")
    elems = [field.to_raw(e) for e in field.elements()]
    one = field.to_raw(field.one)
    for lead in range(a + 1):
        for tail in iproduct(elems, repeat=a - lead):
            v = field.zeros(a + 1)
            v[lead] = one
            for j, x in enumerate(tail):
                v[lead + 1 + j] = x
            yield v
