"""Exact dense linear algebra over any field handle.

Matrices are numpy arrays in the field's raw representation.  Prime fields
go through the compiled kernels; Q and F_{p^k} use object arrays and plain
Gauss-Jordan elimination.
"""
import numpy as np

from . import kernels
from .errors import DimensionMismatch, SingularMatrix, ZeroVector
from .scalars import PrimeField


def _is_fp(F):
    return isinstance(F, PrimeField)


def as_matrix(F, A):
    A = np.asarray(A, dtype=F.dtype)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    return A


def rref(F, A):
    """Reduced row echelon form; returns ``(R, pivots)`` with zero rows dropped."""
    A = as_matrix(F, A)
    if _is_fp(F):
        R, piv = kernels.rref_modp(A, F.p)
        return R, tuple(int(c) for c in piv)
    R = A.copy()
    nrows, ncols = R.shape
    pivots = []
    prow = 0
    for col in range(ncols):
        if prow == nrows:
            break
        piv = next((r for r in range(prow, nrows) if R[r, col] != 0), None)
        if piv is None:
            continue
        if piv != prow:
            R[[prow, piv]] = R[[piv, prow]]
        R[prow, col:] = R[prow, col:] * F.inv(R[prow, col])
        for r in range(nrows):
            if r != prow and R[r, col] != 0:
                R[r, col:] = R[r, col:] - R[r, col] * R[prow, col:]
        pivots.append(col)
        prow += 1
    return R[:prow].copy(), tuple(pivots)


def rank(F, A):
    return len(rref(F, A)[1])


def nullspace(F, A, ncols=None, return_pivots=False):
    """Basis of ``{v : A v = 0}`` in reduced row echelon form.

    The kernel's RREF is read off from the RREF of ``A`` with its columns
    reversed: reduced that way, each kernel vector ``v_f`` (one per free
    column ``f``) has its nonzero entries at ``f`` and at pivot columns to
    the right of ``f``.
    """
    A = np.asarray(A, dtype=F.dtype)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, ncols or 0)
    n = A.shape[1] if ncols is None else ncols
    if A.shape[0] == 0:
        return (F.identity(n), tuple(range(n))) if return_pivots else F.identity(n)
    R_rev, piv_rev = rref(F, A[:, ::-1])
    pivots = [n - 1 - c for c in piv_rev]
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    out = F.zeros((len(free), n))
    for i, f in enumerate(free):
        out[i, f] = F.to_raw(F.one)
    if pivots and free:
        rev_free = [n - 1 - f for f in free]
        block = R_rev[:, rev_free]  # rank x nfree
        neg = negate(F, block).T
        out[:, pivots] = neg
    return (out, tuple(free)) if return_pivots else out


def negate(F, A):
    if _is_fp(F):
        return (-np.asarray(A, dtype=np.int64)) % F.p
    return -np.asarray(A, dtype=object)


def add(F, A, B):
    if _is_fp(F):
        return (np.asarray(A, dtype=np.int64) + B) % F.p
    return np.asarray(A, dtype=object) + B


def sub(F, A, B):
    if _is_fp(F):
        return (np.asarray(A, dtype=np.int64) - B) % F.p
    return np.asarray(A, dtype=object) - B


def scale(F, A, c):
    if _is_fp(F):
        return np.asarray(A, dtype=np.int64) * F.to_raw(c) % F.p
    return np.asarray(A, dtype=object) * F.to_raw(c)


def matmul(F, A, B):
    A = np.asarray(A, dtype=F.dtype)
    B = np.asarray(B, dtype=F.dtype)
    if A.shape[-1] != B.shape[0]:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    if _is_fp(F):
        return kernels.matmul_modp(A, B, F.p)
    if A.shape[-1] == 0:
        shape = A.shape[:-1] + B.shape[1:]
        return F.zeros(shape)
    return A @ B


def kron(F, mats):
    if _is_fp(F):
        return kernels.kron_modp(mats, F.p)
    out = F.identity(1)
    for M in mats:
        out = np.kron(out, np.asarray(M, dtype=object))
    return out


def identity(F, n):
    return F.identity(n)


def inverse(F, A):
    A = as_matrix(F, A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatch(f"inverse of a non-square {A.shape} matrix")
    aug = np.concatenate([A, F.identity(n)], axis=1)
    R, piv = rref(F, aug)
    if tuple(piv[:n]) != tuple(range(n)) or len(piv) != n:
        raise SingularMatrix("matrix is not invertible")
    return R[:, n:].copy()


def is_zero(F, A):
    A = np.asarray(A)
    if _is_fp(F):
        return not np.any(A % F.p)
    return all(x == 0 for x in A.reshape(-1))


def equal(F, A, B):
    A, B = np.asarray(A), np.asarray(B)
    if A.shape != B.shape:
        return False
    if _is_fp(F):
        return bool(np.array_equal(A % F.p, B % F.p))
    return all(x == y for x, y in zip(A.reshape(-1), B.reshape(-1)))


def first_nonzero(F, v):
    v = np.asarray(v)
    if _is_fp(F):
        nz = np.flatnonzero(v % F.p)
        return int(nz[0]) if nz.size else None
    for i, x in enumerate(v):
        if x != 0:
            return i
    return None


def normalize_vector(F, v):
    """Scale ``v`` so its first nonzero entry is 1."""
    v = np.asarray(v, dtype=F.dtype)
    i = first_nonzero(F, v)
    if i is None:
        raise ZeroVector("the zero vector is not a projective point")
    if _is_fp(F):
        return v * pow(int(v[i]), -1, F.p) % F.p
    return v * F.inv(v[i])


def normalize_rows(F, A):
    """Normalize every row of a matrix; raises ZeroVector on a zero row."""
    A = as_matrix(F, A)
    if _is_fp(F):
        A = A % F.p
        nz = A != 0
        if not nz.any(axis=1).all():
            raise ZeroVector("zero row")
        lead = A[np.arange(A.shape[0]), nz.argmax(axis=1)]
        invs = np.array([pow(int(x), -1, F.p) for x in lead], dtype=np.int64)
        return A * invs[:, None] % F.p
    return np.stack([normalize_vector(F, row) for row in A]) if A.shape[0] else A.copy()


def frobenius(F, A):
    return F.frobenius_array(A)


def proportional(F, u, v):
    """True when ``u`` and ``v`` are nonzero and define the same projective point."""
    try:
        return equal(F, normalize_vector(F, u), normalize_vector(F, v))
    except ZeroVector:
        return False


def to_key(F, A):
    """Hashable canonical key for an array over ``F``."""
    A = np.asarray(A)
    if _is_fp(F):
        return (A.shape, (A % F.p).astype(np.int64).tobytes())
    return (A.shape, tuple(A.reshape(-1)))


def to_jsonable(F, A):
    """Nested lists of ints / strings for reports."""
    A = np.asarray(A)
    if _is_fp(F):
        return (A % F.p).astype(np.int64).tolist()
    return _obj_to_json(A)


def _obj_to_json(A):
    if isinstance(A, np.ndarray):
        if A.ndim == 0:
            return _scalar_json(A.item())
        return [_obj_to_json(x) for x in A]
    return _scalar_json(A)


def _scalar_json(x):
    from fractions import Fraction

    from .scalars import FqElem

    if isinstance(x, FqElem):
        return list(x.coeffs)
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x.numerator)
    return int(x)
