"""Segre embedding, the center L, the projection pi_L and its inverse.

Conventions
-----------
* Segre coordinates are indexed by multi-indices ``J`` flattened row-major,
  last factor fastest (the order of ``numpy.kron``).
* ``M_i`` puts the form ``h_i`` of ``H_i`` in its first row and completes it
  with standard basis rows, so ``(M_i x)_0 = h_i(x)``.
* The "w-frame" of the target lists ``J = 0`` first, then the multi-indices
  with a single nonzero entry, factor by factor.  Target coordinates ``u``
  are the non-pivot coordinates of ``L``; ``T`` converts ``u`` to ``w``.
"""
from dataclasses import dataclass
from itertools import product as iproduct
from math import prod

import numpy as np

from . import linalg
from ._parallel import map_ranges
from .errors import (
    DimensionMismatch,
    FieldTooSmall,
    GenericityViolation,
    IndexOutOfRange,
    ZeroHyperplane,
)
from .multipoly import Polynomial, RationalMap
from .projgeom import LinearSubspace, ProjPoint, enumerate_points, projection_matrix
from .rng import Stream
from .scalars import RationalField, prime_field

SCHEMA_VERSION = 1
FLATTENING = "row-major, last factor fastest"
MAX_REJECTIONS = 1000
MAX_ENUMERATION = 10**7

_TAG_BIRATIONAL = 0xB1
_TAG_HYPERPLANES = 0x4859


@dataclass(frozen=True)
class ProductDims:
    dims: tuple

    def __init__(self, dims):
        dims = tuple(int(a) for a in dims)
        if not dims:
            raise DimensionMismatch("a product needs at least one factor")
        if any(a < 1 for a in dims):
            raise DimensionMismatch(f"factor dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self):
        return len(self.dims)

    @property
    def N(self):
        """Number of Segre coordinates, ``prod(a_i + 1)``."""
        return prod(a + 1 for a in self.dims)

    @property
    def ambient_dim(self):
        return self.N - 1

    @property
    def target_dim(self):
        return sum(self.dims)

    @property
    def blocks(self):
        return tuple(a + 1 for a in self.dims)

    @property
    def dim_L_expected(self):
        return self.N - sum(self.dims) - 2

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)

    def __repr__(self):
        return f"ProductDims{self.dims}"


def as_dims(dims):
    return dims if isinstance(dims, ProductDims) else ProductDims(dims)


class MultiPoint:
    """A point of ``P^{a_1} x ... x P^{a_n}``."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        factors = tuple(factors)
        if not factors:
            raise DimensionMismatch("a multipoint needs at least one factor")
        field = factors[0].field
        if any(f.field != field for f in factors):
            raise DimensionMismatch("factors live over different fields")
        self.factors = factors

    @classmethod
    def from_coords(cls, field, coords):
        return cls(ProjPoint(field, c) for c in coords)

    @property
    def field(self):
        return self.factors[0].field

    @property
    def dims(self):
        return ProductDims(f.dim for f in self.factors)

    def check(self, dims):
        dims = as_dims(dims)
        if tuple(f.dim for f in self.factors) != dims.dims:
            raise DimensionMismatch(f"point of shape {tuple(f.dim for f in self.factors)} for dims {dims.dims}")

    def __eq__(self, other):
        return isinstance(other, MultiPoint) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)

    def to_json(self):
        return [f.to_json() for f in self.factors]


class FactorHyperplanes:
    """One nonzero linear form per factor, normalized to a leading 1."""

    __slots__ = ("field", "forms")

    def __init__(self, field, forms):
        out = []
        for i, h in enumerate(forms):
            h = _raw_vector(field, h)
            if linalg.first_nonzero(field, h) is None:
                raise ZeroHyperplane(f"hyperplane {i} is the zero form")
            v = linalg.normalize_vector(field, h)
            v.flags.writeable = False
            out.append(v)
        self.field = field
        self.forms = tuple(out)

    @classmethod
    def coordinate(cls, field, dims):
        dims = as_dims(dims)
        return cls(field, [[1] + [0] * a for a in dims])

    @classmethod
    def random(cls, field, dims, seed, path=()):
        stream = Stream(seed, _TAG_HYPERPLANES, *path)
        forms = []
        for a in as_dims(dims):
            while True:
                h = field.random_array(stream, a + 1)
                if linalg.first_nonzero(field, h) is not None:
                    break
            forms.append(h)
        return cls(field, forms)

    def check(self, dims):
        dims = as_dims(dims)
        if tuple(len(h) - 1 for h in self.forms) != dims.dims:
            raise DimensionMismatch(f"hyperplanes of shape {[len(h) for h in self.forms]} for dims {dims.dims}")

    def value(self, i, x):
        """``h_i(x)`` as a raw field entry."""
        return linalg.matmul(self.field, self.forms[i], x.coords if isinstance(x, ProjPoint) else x)

    def __len__(self):
        return len(self.forms)

    def __eq__(self, other):
        return (
            isinstance(other, FactorHyperplanes)
            and self.field == other.field
            and len(self.forms) == len(other.forms)
            and all(linalg.equal(self.field, a, b) for a, b in zip(self.forms, other.forms))
        )

    def to_json(self):
        return [linalg.to_jsonable(self.field, h) for h in self.forms]


def _raw_vector(field, v):
    if isinstance(v, ProjPoint):
        return v.coords.copy()
    if isinstance(v, np.ndarray) and v.dtype == field.dtype and field.dtype is not object:
        return v % field.p
    return field.array(list(v))


# ---- indexing and the embedding


def strides(dims):
    dims = as_dims(dims)
    out, s = [], 1
    for a in reversed(dims.dims):
        out.append(s)
        s *= a + 1
    return tuple(reversed(out))


def flatten_index(dims, J):
    dims = as_dims(dims)
    J = tuple(int(j) for j in J)
    if len(J) != dims.n:
        raise IndexOutOfRange(f"multi-index {J} has {len(J)} entries, expected {dims.n}")
    for j, a in zip(J, dims.dims):
        if not 0 <= j <= a:
            raise IndexOutOfRange(f"multi-index {J} outside dims {dims.dims}")
    return sum(j * s for j, s in zip(J, strides(dims)))


def unflatten_index(dims, m):
    dims = as_dims(dims)
    m = int(m)
    if not 0 <= m < dims.N:
        raise IndexOutOfRange(f"flat index {m} outside [0, {dims.N})")
    J = []
    for s in strides(dims):
        j, m = divmod(m, s)
        J.append(j)
    return tuple(J)


def segre_raw(field, vectors):
    """Unnormalized Segre coordinates of a tuple of coordinate vectors."""
    return linalg.kron(field, [np.asarray(v, dtype=field.dtype).reshape(1, -1) for v in vectors]).reshape(-1)


def segre_embed(dims, x):
    dims = as_dims(dims)
    x.check(dims)
    return ProjPoint.from_raw(x.field, segre_raw(x.field, [f.coords for f in x.factors]))


def segre_map(field, dims):
    """The Segre embedding as a RationalMap (one monomial per coordinate)."""
    dims = as_dims(dims)
    comps = []
    for m in range(dims.N):
        comps.append(Polynomial._raw(field, dims.blocks, {_block_exponents(dims, unflatten_index(dims, m)): field.one}))
    return RationalMap(comps)


def _block_exponents(dims, J):
    exps = []
    for j, a in zip(J, dims.dims):
        block = [0] * (a + 1)
        block[j] = 1
        exps.extend(block)
    return tuple(exps)


def low_indices(dims):
    """Flat indices of the w-frame: ``J = 0``, then one nonzero entry, factor by factor."""
    dims = as_dims(dims)
    out = [0]
    for a, s in zip(dims.dims, strides(dims)):
        out.extend(j * s for j in range(1, a + 1))
    return out


def high_indices(dims):
    """Flat indices whose multi-index has at least two nonzero entries."""
    low = set(low_indices(dims))
    return [m for m in range(as_dims(dims).N) if m not in low]


def change_matrix(field, h):
    """``M`` with the form ``h`` as first row, completed by unit rows off h's pivot."""
    h = np.asarray(h, dtype=field.dtype)
    c = linalg.first_nonzero(field, h)
    if c is None:
        raise ZeroHyperplane("zero form")
    n = len(h)
    M = field.zeros((n, n))
    M[0] = h
    one = field.to_raw(field.one)
    r = 1
    for j in range(n):
        if j != c:
            M[r, j] = one
            r += 1
    return M


# ---- the center


class CenterData:
    """The center ``L`` together with the frames used to build and invert pi_L.

    Attributes: ``dims``, ``hyperplanes``, ``field``, ``M`` / ``Minv`` (per
    factor), ``L`` (LinearSubspace in the Segre ambient space), ``U`` (matrix
    of the projection), ``T`` (u -> w), ``certificates``.
    """

    def __init__(self, dims, hyperplanes, field, M, Minv, L, W, certificates):
        self.dims = dims
        self.hyperplanes = hyperplanes
        self.field = field
        self.M = M
        self.Minv = Minv
        self.L = L
        self.W = W
        self.U = projection_matrix(L)
        self.T = W[:, list(L.nonpivots)]
        self.certificates = certificates
        self._pi = None
        self._sigma = None

    @property
    def dim_L(self):
        return self.L.dim

    @property
    def nonpivots(self):
        return self.L.nonpivots

    def project_raw(self, z):
        """Unnormalized ``U z``."""
        return linalg.matmul(self.field, self.U, np.asarray(z, dtype=self.field.dtype))

    def inverse_matrices(self):
        """Per-factor matrices ``A_i = M_i^{-1} S_i T`` with ``x_i = A_i u``."""
        F = self.field
        low = 0
        out = []
        for i, a in enumerate(self.dims.dims):
            rows = [0] + list(range(1 + low, 1 + low + a))
            low += a
            out.append(linalg.matmul(F, self.Minv[i], self.T[rows]))
        return out

    def to_json(self):
        return {
            "dims": list(self.dims.dims),
            "hyperplanes": self.hyperplanes.to_json(),
            "dim_L_expected": self.dims.dim_L_expected,
            "dim_L_actual": self.dim_L,
            "L": self.L.to_json(),
            "certificates": dict(self.certificates),
        }


def center_L(dims, hyperplanes, field=None):
    """Build ``L`` = span of all ``P_ij`` and certify its dimension.

    In the frame where every ``H_i`` is ``{x_{i,0} = 0}`` the span is the
    coordinate subspace of multi-indices with at least two nonzero entries.
    ``L`` is computed as the kernel of the ``1 + sum a_i`` forms ``W`` (rows of
    ``K = kron(M_i)`` at the w-frame indices); the transported generators
    ``X`` (columns of ``K^{-1}`` at the remaining indices) certify it:
    ``W X = 0`` and ``Y X = I`` for the complementary rows ``Y`` of ``K``.
    """
    dims = as_dims(dims)
    if not isinstance(hyperplanes, FactorHyperplanes):
        if field is None:
            raise DimensionMismatch("a field is needed for raw hyperplane forms")
        hyperplanes = FactorHyperplanes(field, hyperplanes)
    F = hyperplanes.field if field is None else field
    hyperplanes.check(dims)
    M = [change_matrix(F, h) for h in hyperplanes.forms]
    Minv = [linalg.inverse(F, m) for m in M]
    K = linalg.kron(F, M)
    Kinv = linalg.kron(F, Minv)
    low, high = low_indices(dims), high_indices(dims)
    W = K[low]
    basis, pivots = linalg.nullspace(F, W, ncols=dims.N, return_pivots=True)
    L = LinearSubspace.from_rref(F, dims.ambient_dim, basis, pivots)
    rank_W = dims.N - basis.shape[0]
    if high:
        X = Kinv[:, high]
        annihilates = linalg.is_zero(F, linalg.matmul(F, W, X))
        left_inverse = linalg.equal(F, linalg.matmul(F, K[high], X), F.identity(len(high)))
    else:
        annihilates = left_inverse = True
    certificates = {
        "W_annihilates_generators": bool(annihilates),
        "generators_independent": bool(left_inverse),
        "rank_W": int(rank_W),
        "rank_W_expected": len(low),
        "dim_L": L.dim,
        "dim_L_expected": dims.dim_L_expected,
        "verified": bool(annihilates and left_inverse and rank_W == len(low) and L.dim == dims.dim_L_expected),
    }
    return CenterData(dims, hyperplanes, F, M, Minv, L, W, certificates)


def center_L_direct(dims, hyperplanes):
    """``L`` as the row-reduced span of its transported generators (slow cross-check)."""
    dims = as_dims(dims)
    F = hyperplanes.field
    Minv = [linalg.inverse(F, change_matrix(F, h)) for h in hyperplanes.forms]
    Kinv = linalg.kron(F, Minv)
    return LinearSubspace(F, dims.ambient_dim, Kinv[:, high_indices(dims)].T)


# ---- the maps


def pi_L_map(c):
    """pi_L as a RationalMap of ``1 + sum a_i`` multilinear components."""
    if c._pi is None:
        F, dims = c.field, c.dims
        exps = [_block_exponents(dims, unflatten_index(dims, m)) for m in range(dims.N)]
        comps = []
        for row in c.U:
            terms = {e: F.to_elem(v) for e, v in zip(exps, row) if v != 0}
            comps.append(Polynomial._raw(F, dims.blocks, terms))
        c._pi = RationalMap(comps)
    return c._pi


def inverse_sigma_map(c):
    """Inverse of pi_L as one linear RationalMap per factor, on P^{sum a_i}."""
    if c._sigma is None:
        F = c.field
        m = c.dims.target_dim + 1
        maps = []
        for A in c.inverse_matrices():
            comps = [Polynomial.linear_form(F, (m,), [F.to_elem(v) for v in row]) for row in A]
            maps.append(RationalMap(comps))
        c._sigma = tuple(maps)
    return c._sigma


def apply_inverse(c, u):
    """``sigma(u)`` as a MultiPoint, or None when some factor vanishes."""
    F = c.field
    u = u.coords if isinstance(u, ProjPoint) else np.asarray(u, dtype=F.dtype)
    factors = []
    for sigma_i in inverse_sigma_map(c):
        v = sigma_i.evaluate(u)
        if linalg.first_nonzero(F, v) is None:
            return None
        factors.append(ProjPoint.from_raw(F, v))
    return MultiPoint(factors)


def apply_pi(c, x):
    """``pi_L(x)`` through the polynomial map, or None on the base locus."""
    v = pi_L_map(c).evaluate(x)
    if linalg.first_nonzero(c.field, v) is None:
        return None
    return ProjPoint.from_raw(c.field, v)


# ---- randomized verification


def random_point(field, a, stream, avoid=None, height=10):
    """Random point of P^a with ``avoid(x) != 0``; up to MAX_REJECTIONS tries."""
    for _ in range(MAX_REJECTIONS):
        if isinstance(field, RationalField):
            v = field.random_array(stream, a + 1, height=height)
        else:
            v = field.random_array(stream, a + 1)
        if linalg.first_nonzero(field, v) is None:
            continue
        if avoid is not None and linalg.first_nonzero(field, np.atleast_1d(linalg.matmul(field, avoid, v))) is None:
            continue
        return ProjPoint.from_raw(field, v)
    raise FieldTooSmall(f"no usable point of P^{a} over {field!r} after {MAX_REJECTIONS} draws")


def random_multipoint(c, stream, height=10):
    """Random MultiPoint off every H_i."""
    return MultiPoint(
        random_point(c.field, a, stream, avoid=h, height=height) for a, h in zip(c.dims.dims, c.hyperplanes.forms)
    )


def usable_point_count(field, dims):
    """Number of points of S off the union of the H_i (None for infinite fields)."""
    if not field.is_finite:
        return None
    return prod(field.order**a for a in as_dims(dims).dims)


def _check_forward(c, x):
    F = c.field
    u = apply_pi(c, x)
    if u is None:
        return False, {"reason": "pi_L undefined", "x": x.to_json()}
    direct = linalg.normalize_vector(F, c.project_raw(segre_raw(F, [f.coords for f in x.factors])))
    if not linalg.equal(F, direct, u.coords):
        return False, {"reason": "polynomial map disagrees with projection", "x": x.to_json(), "u": u.to_json()}
    back = apply_inverse(c, u)
    if back is None or back != x:
        return False, {"x": x.to_json(), "u": u.to_json(), "sigma_u": None if back is None else back.to_json()}
    return True, None


def _check_backward(c, stream, height):
    F = c.field
    m = c.dims.target_dim + 1
    for _ in range(MAX_REJECTIONS):
        if isinstance(F, RationalField):
            u = F.random_array(stream, m, height=height)
        else:
            u = F.random_array(stream, m)
        w = linalg.matmul(F, c.T, u)
        if w[0] == 0:
            continue
        x = apply_inverse(c, u)
        if x is None:
            continue
        u_pt = ProjPoint.from_raw(F, u)
        image = apply_pi(c, x)
        if image is None or image != u_pt:
            return False, {"u": u_pt.to_json(), "sigma_u": x.to_json(), "pi_sigma_u": None if image is None else image.to_json()}
        return True, None
    raise FieldTooSmall(f"no target point with w_0 != 0 over {F!r} after {MAX_REJECTIONS} draws")


def verify_birational(c, field=None, trials=100, seed=0, workers=1, height=10):
    """Round-trip pi_L and its inverse on random points; returns a report dict.

    Trial ``t`` draws from its own stream keyed by ``(seed, t)``, so the report
    does not depend on ``workers``.
    """
    if field is not None and field != c.field:
        raise DimensionMismatch(f"center built over {c.field!r}, verification requested over {field!r}")
    if trials < 1:
        raise ValueError("trials must be positive")
    F = c.field
    usable = usable_point_count(F, c.dims)
    if usable is not None and usable < trials:
        raise FieldTooSmall(f"only {usable} usable points for {trials} trials")
    pi_L_map(c), inverse_sigma_map(c)

    def run(start, stop):
        out = []
        for t in range(start, stop):
            root = Stream(seed, _TAG_BIRATIONAL, t)
            x = random_multipoint(c, root.child(0), height=height)
            fwd, fwd_info = _check_forward(c, x)
            bwd, bwd_info = _check_backward(c, root.child(1), height)
            out.append((t, fwd, fwd_info, bwd, bwd_info))
        return out

    results = map_ranges(run, trials, workers)
    forward = sum(r[1] for r in results)
    backward = sum(r[3] for r in results)
    passes = sum(1 for r in results if r[1] and r[3])
    first = None
    for t, fwd, fwd_info, bwd, bwd_info in results:
        if not (fwd and bwd):
            first = {"trial": t, "direction": "forward" if not fwd else "backward", "detail": fwd_info or bwd_info}
            break
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "birational",
        "dims": list(c.dims.dims),
        "field": F.describe(),
        "seed": int(seed),
        "flattening": FLATTENING,
        "hyperplanes": c.hyperplanes.to_json(),
        "dim_L_expected": c.dims.dim_L_expected,
        "dim_L_actual": c.dim_L,
        "certificates": dict(c.certificates),
        "trials": int(trials),
        "passes": int(passes),
        "failures": int(trials - passes),
        "forward_passes": int(forward),
        "backward_passes": int(backward),
        "first_counterexample": first,
    }


# ---- brute-force fiber identity on (P^1)^n


def p1_table(p):
    """Rows of P^1(F_p) in enumeration order ``[1:0], [1:1], ..., [1:p-1], [0:1]``."""
    rows = [[1, a] for a in range(p)] + [[0, 1]]
    return np.array(rows, dtype=np.int64)


def _point_form(F, pt):
    """Linear form on P^1 vanishing exactly at ``pt``."""
    a, b = pt.coords
    return linalg.normalize_vector(F, np.array([b, (-a) % F.p], dtype=np.int64))


def _decode(table, n, m):
    digits = []
    t = table.shape[0]
    for _ in range(n):
        m, r = divmod(m, t)
        digits.append(r)
    return tuple(reversed(digits))


def fiber_bruteforce(n, p, pq, hyperplanes=None, workers=1, backend=None):
    """Enumerate ``(P^1(F_p))^n`` and compare ``H cap S_1`` with ``{q} cup P``.

    ``pq = (p_point, q_point)``.  ``H_i`` is the hyperplane through ``p_i``
    (derived from ``p`` when not given).  Each section ``H_i`` is the Segre
    hyperplane cut by ``q_i^perp (x) prod_{j != i} h_j``, whose zero set on
    S is ``Q_i cup P^i``.
    """
    from .kernels import product_zero_masks

    n, p = int(n), int(p)
    F = prime_field(p)
    p_pt, q_pt = pq
    dims = ProductDims((1,) * n)
    p_pt.check(dims)
    q_pt.check(dims)
    if (p + 1) ** n > MAX_ENUMERATION:
        raise FieldTooSmall(f"(P^1(F_{p}))^{n} has {(p + 1) ** n} points, above the {MAX_ENUMERATION} guard")
    for i in range(n):
        if q_pt.factors[i] == p_pt.factors[i]:
            raise GenericityViolation(f"q_{i + 1} = p_{i + 1}; the construction needs q_i != p_i in every factor")
    if hyperplanes is None:
        hyperplanes = FactorHyperplanes(F, [_point_form(F, pi) for pi in p_pt.factors])
    elif not isinstance(hyperplanes, FactorHyperplanes):
        hyperplanes = FactorHyperplanes(F, hyperplanes)
    hyperplanes.check(dims)
    for i in range(n):
        if hyperplanes.value(i, p_pt.factors[i]) != 0:
            raise GenericityViolation(f"H_{i + 1} does not pass through p_{i + 1}")

    c = center_L(dims, hyperplanes)
    h = [np.asarray(f, dtype=np.int64) for f in hyperplanes.forms]
    qperp = [_point_form(F, qi) for qi in q_pt.factors]
    sections = np.stack(
        [segre_raw(F, [qperp[j] if j == i else h[j] for j in range(n)]) for i in range(n)]
    )
    q_seg = segre_raw(F, [f.coords for f in q_pt.factors])
    contains_q = not linalg.matmul(F, sections, q_seg).any()
    contains_L = not linalg.matmul(F, sections, c.L.basis.T).any()
    independent = linalg.rank(F, sections) == n

    table = p1_table(p)
    total = table.shape[0] ** n
    L_forms = c.L.equations()

    mask_h, mask_l = product_zero_masks(table, n, sections, L_forms, p, backend=backend)
    h_idx = np.flatnonzero(mask_h).tolist()
    l_idx = np.flatnonzero(mask_l).tolist()

    def to_mp(m):
        return MultiPoint(ProjPoint.from_raw(F, table[d]) for d in _decode(table, n, m))

    index_of = {tuple(row): k for k, row in enumerate(table.tolist())}

    def index(mp):
        m = 0
        for f in mp.factors:
            m = m * table.shape[0] + index_of[tuple(int(v) for v in f.coords)]
        return m

    p_digits = [index_of[tuple(int(v) for v in f.coords)] for f in p_pt.factors]
    expected_P = []
    for m in range(total):
        d = _decode(table, n, m)
        hits = sum(1 for i in range(n) if d[i] == p_digits[i])
        if hits >= 2:
            expected_P.append(m)
    q_index = index(q_pt)
    expected = sorted(set(expected_P) | {q_index})

    # the direct fiber of pi_L over pi_L(q), among points off L
    fiber = _direct_fiber(c, table, n, q_pt, workers)

    identity_holds = h_idx == expected
    L_meets_S_in_P = l_idx == expected_P
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "fiber",
        "n": n,
        "p": p,
        "p_point": p_pt.to_json(),
        "q_point": q_pt.to_json(),
        "hyperplanes": hyperplanes.to_json(),
        "enumeration_order": "factors row-major over [1:0],[1:1],...,[1:p-1],[0:1]",
        "enumerated": total,
        "sections_contain_L1": bool(contains_L),
        "sections_contain_q": bool(contains_q),
        "sections_independent": bool(independent),
        "H_cap_S1_size": len(h_idx),
        "expected_size": len(expected),
        "P_size": len(expected_P),
        "identity_holds": bool(identity_holds),
        "L_cap_S1_equals_P": bool(L_meets_S_in_P),
        "fiber_over_pi_q": [to_mp(m).to_json() for m in fiber],
        "fiber_is_q": fiber == [q_index],
        "passed": bool(identity_holds and L_meets_S_in_P and contains_L and contains_q and independent and fiber == [q_index]),
    }
    if not identity_holds:
        report["H_cap_S1"] = [to_mp(m).to_json() for m in h_idx]
        report["expected"] = [to_mp(m).to_json() for m in expected]
    return report


def _direct_fiber(c, table, n, q_pt, workers):
    F = c.field
    p = F.p
    target = linalg.normalize_vector(F, c.project_raw(segre_raw(F, [f.coords for f in q_pt.factors])))
    t = table.shape[0]
    total = t**n

    def run(start, stop):
        out = []
        for m in range(start, stop):
            d = _decode(table, n, m)
            u = c.project_raw(segre_raw(F, [table[k] for k in d]))
            if not np.any(u % p):
                continue
            if linalg.equal(F, linalg.normalize_vector(F, u), target):
                out.append(m)
        return out

    return map_ranges(run, total, workers)


def enumerate_multipoints(field, dims):
    """All points of a product over a finite field, in enumeration order."""
    dims = as_dims(dims)
    per = [[ProjPoint.from_raw(field, v) for v in enumerate_points(field, a)] for a in dims.dims]
    for combo in iproduct(*per):
        yield MultiPoint(combo)
