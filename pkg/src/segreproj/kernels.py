"""Hot loops over prime fields, on int64 arrays holding residues in [0, p).

Each kernel has a compiled loop version and a vectorised numpy version;
``backend=None`` picks numba unless ``SEGRE_NUMBA=0``.  All entries stay below
``p < 2**31`` so every product fits in int64 before reduction.
"""
import numpy as np

from ._accel import backend_name, njit

MAX_PRIME = 2**31 - 1

# float64 represents integers below 2**53 exactly
_FLOAT_EXACT = 2**53


@njit
def _modinv(a, p):
    t, new_t = 0, 1
    r, new_r = p, a % p
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@njit
def _rref_loops(A, p):
    A = A.copy()
    nrows, ncols = A.shape
    pivots = np.empty(min(nrows, ncols), np.int64)
    prow = 0
    for col in range(ncols):
        if prow == nrows:
            break
        piv = -1
        for r in range(prow, nrows):
            if A[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != prow:
            for c in range(col, ncols):
                tmp = A[prow, c]
                A[prow, c] = A[piv, c]
                A[piv, c] = tmp
        inv = _modinv(A[prow, col], p)
        for c in range(col, ncols):
            A[prow, c] = A[prow, c] * inv % p
        for r in range(nrows):
            if r == prow:
                continue
            f = A[r, col]
            if f == 0:
                continue
            for c in range(col, ncols):
                v = A[prow, c]
                if v != 0:
                    A[r, c] = (A[r, c] - f * v) % p
        pivots[prow] = col
        prow += 1
    return A[:prow].copy(), pivots[:prow].copy()


def _rref_numpy(A, p):
    A = A.copy()
    nrows, ncols = A.shape
    pivots = []
    prow = 0
    for col in range(ncols):
        if prow == nrows:
            break
        nz = np.flatnonzero(A[prow:, col])
        if nz.size == 0:
            continue
        piv = prow + int(nz[0])
        if piv != prow:
            A[[prow, piv]] = A[[piv, prow]]
        inv = pow(int(A[prow, col]), -1, p)
        A[prow, col:] = A[prow, col:] * inv % p
        f = A[:, col].copy()
        f[prow] = 0
        rows = np.flatnonzero(f)
        if rows.size:
            A[rows, col:] = (A[rows, col:] - np.outer(f[rows], A[prow, col:])) % p
        pivots.append(col)
        prow += 1
    return A[:prow].copy(), np.asarray(pivots, dtype=np.int64)


def rref_modp(A, p, backend=None):
    """Reduced row echelon form of ``A`` over F_p.

    Returns ``(R, pivots)`` where ``R`` keeps only the nonzero rows.
    """
    A = np.ascontiguousarray(A, dtype=np.int64) % p
    if A.shape[0] == 0 or A.shape[1] == 0:
        return A[:0].copy(), np.zeros(0, dtype=np.int64)
    if backend_name(backend) == "numba":
        return _rref_loops(A, p)
    return _rref_numpy(A, p)


def matmul_modp(A, B, p):
    """Exact ``A @ B mod p`` through float64 BLAS, chunked over the inner axis.

    A chunk of length ``kb`` is exact while ``kb * (p-1)**2 < 2**53``.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    squeeze_a, squeeze_b = A.ndim == 1, B.ndim == 1
    A2 = A[None, :] if squeeze_a else A
    B2 = B[:, None] if squeeze_b else B
    K = A2.shape[1]
    kb = (_FLOAT_EXACT - 1) // ((p - 1) ** 2)
    if kb == 0:
        out = _matmul_obj(A2, B2, p)
    elif kb >= K:
        out = np.fmod(A2.astype(np.float64) @ B2.astype(np.float64), p).astype(np.int64)
    else:
        out = np.zeros((A2.shape[0], B2.shape[1]), dtype=np.int64)
        for s in range(0, K, kb):
            part = A2[:, s:s + kb].astype(np.float64) @ B2[s:s + kb].astype(np.float64)
            out = (out + np.fmod(part, p).astype(np.int64)) % p
    if squeeze_a:
        out = out[0]
    if squeeze_b:
        out = out[..., 0]
    return out


def _matmul_obj(A, B, p):
    return (A.astype(object) @ B.astype(object) % p).astype(np.int64)


def kron_modp(mats, p):
    """Kronecker product of a list of matrices, first factor outermost."""
    out = np.ones((1, 1), dtype=np.int64)
    for M in mats:
        out = np.kron(out, np.asarray(M, dtype=np.int64)) % p
    return out


@njit
def _monomials_loops(points, exps, p):
    n_pts, n_vars = points.shape
    n_mon = exps.shape[0]
    max_e = 0
    for j in range(n_mon):
        for v in range(n_vars):
            if exps[j, v] > max_e:
                max_e = exps[j, v]
    out = np.empty((n_pts, n_mon), np.int64)
    pw = np.empty((n_vars, max_e + 1), np.int64)
    for i in range(n_pts):
        for v in range(n_vars):
            pw[v, 0] = 1
            x = points[i, v] % p
            for e in range(1, max_e + 1):
                pw[v, e] = pw[v, e - 1] * x % p
        for j in range(n_mon):
            acc = 1
            for v in range(n_vars):
                e = exps[j, v]
                if e:
                    acc = acc * pw[v, e] % p
            out[i, j] = acc
    return out


def _monomials_numpy(points, exps, p):
    n_pts, n_vars = points.shape
    max_e = int(exps.max()) if exps.size else 0
    pw = np.empty((max_e + 1, n_pts, n_vars), dtype=np.int64)
    pw[0] = 1
    for e in range(1, max_e + 1):
        pw[e] = pw[e - 1] * points % p
    out = np.ones((n_pts, exps.shape[0]), dtype=np.int64)
    for v in range(n_vars):
        out = out * pw[exps[:, v], :, v].T % p
    return out


def monomial_matrix_modp(points, exps, p, backend=None):
    """Matrix ``V[i, j] = prod_v points[i, v] ** exps[j, v] mod p``."""
    points = np.ascontiguousarray(points, dtype=np.int64) % p
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    if points.shape[0] == 0 or exps.shape[0] == 0:
        return np.zeros((points.shape[0], exps.shape[0]), dtype=np.int64)
    if backend_name(backend) == "numba":
        return _monomials_loops(points, exps, p)
    return _monomials_numpy(points, exps, p)


@njit
def _product_masks_loops(table, n, forms_a, forms_b, p):
    t, d = table.shape
    N = d**n
    total = t**n
    mask_a = np.zeros(total, np.bool_)
    mask_b = np.zeros(total, np.bool_)
    digits = np.zeros(n, np.int64)
    z = np.empty(N, np.int64)
    for m in range(total):
        rem = m
        for i in range(n - 1, -1, -1):
            digits[i] = rem % t
            rem //= t
        # z = table[digits[0]] (x) ... (x) table[digits[n-1]], last factor fastest
        z[0] = 1
        size = 1
        for i in range(n):
            row = digits[i]
            for s in range(size - 1, -1, -1):
                base = z[s]
                for c in range(d - 1, -1, -1):
                    z[s * d + c] = base * table[row, c] % p
            size *= d
        ok = True
        for f in range(forms_a.shape[0]):
            acc = 0
            for J in range(N):
                acc = (acc + forms_a[f, J] * z[J]) % p
            if acc != 0:
                ok = False
                break
        mask_a[m] = ok
        ok = True
        for f in range(forms_b.shape[0]):
            acc = 0
            for J in range(N):
                acc = (acc + forms_b[f, J] * z[J]) % p
            if acc != 0:
                ok = False
                break
        mask_b[m] = ok
    return mask_a, mask_b


def _product_masks_numpy(table, n, forms_a, forms_b, p, chunk=1 << 16):
    t, d = table.shape
    total = t**n
    mask_a = np.zeros(total, dtype=bool)
    mask_b = np.zeros(total, dtype=bool)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.stack(np.unravel_index(idx, (t,) * n), axis=1)
        Z = np.ones((idx.size, 1), dtype=np.int64)
        for i in range(n):
            rows = table[digits[:, i]]
            Z = (Z[:, :, None] * rows[:, None, :]).reshape(idx.size, -1) % p
        for forms, mask in ((forms_a, mask_a), (forms_b, mask_b)):
            if forms.shape[0] == 0:
                mask[idx] = True
                continue
            vals = matmul_modp(Z, forms.T, p)
            mask[idx] = ~vals.any(axis=1)
    return mask_a, mask_b


def product_zero_masks(table, n, forms_a, forms_b, p, backend=None):
    """Enumerate the n-fold product of a point table through the Segre map.

    For every tuple of rows (row-major, last factor fastest) report whether all
    linear forms in ``forms_a`` vanish on the Segre image, and likewise for
    ``forms_b``.  Forms are given on the Segre ambient space.
    """
    table = np.ascontiguousarray(table, dtype=np.int64) % p
    forms_a = np.ascontiguousarray(forms_a, dtype=np.int64).reshape(-1, table.shape[1] ** n) % p
    forms_b = np.ascontiguousarray(forms_b, dtype=np.int64).reshape(-1, table.shape[1] ** n) % p
    if backend_name(backend) == "numba":
        return _product_masks_loops(table, n, forms_a, forms_b, p)
    return _product_masks_numpy(table, n, forms_a, forms_b, p)
