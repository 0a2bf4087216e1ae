import os
import subprocess
import sys

import numpy as np
import pytest

from segreproj import kernels
from segreproj._accel import HAVE_NUMBA, backend_name
from segreproj.multipoly import monomials_of_degree
from segreproj.segre import p1_table

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


def rref_oracle(rows, p):
    """Textbook Gauss-Jordan on Python ints."""
    A = [[v % p for v in r] for r in rows]
    piv, r = [], 0
    for c in range(len(A[0]) if A else 0):
        k = next((i for i in range(r, len(A)) if A[i][c]), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [v * inv % p for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    return A[:r], piv


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("p", [2, 101, 65537, 2**31 - 1])
def test_rref_matches_oracle(backend, p):
    rng = np.random.default_rng(p)
    for trial in range(20):
        m, n = rng.integers(1, 12, size=2)
        A = rng.integers(0, min(p, 2**62), size=(m, n))
        if trial % 3 == 0:
            A[-1] = A[0]  # force a dependency
        R, piv = kernels.rref_modp(A, p, backend=backend)
        R0, piv0 = rref_oracle(A.tolist(), p)
        assert R.tolist() == R0 and piv.tolist() == piv0


def test_rref_empty():
    R, piv = kernels.rref_modp(np.zeros((0, 3), dtype=np.int64), 7)
    assert R.shape == (0, 3) and piv.size == 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_monomials_match_oracle(backend):
    p = 1009
    rng = np.random.default_rng(1)
    pts = rng.integers(0, p, size=(30, 4))
    exps = np.array(monomials_of_degree(4, 3), dtype=np.int64)
    V = kernels.monomial_matrix_modp(pts, exps, p, backend=backend)
    for i, x in enumerate(pts.tolist()):
        for j, e in enumerate(exps.tolist()):
            want = 1
            for xi, ei in zip(x, e):
                want = want * pow(xi, ei, p) % p
            assert V[i, j] == want


def test_matmul_exact_for_large_primes():
    p = 2**31 - 1
    rng = np.random.default_rng(2)
    A = rng.integers(0, p, size=(7, 300))
    B = rng.integers(0, p, size=(300, 5))
    want = [[sum(int(a) * int(b) for a, b in zip(r, c)) % p for c in B.T] for r in A]
    assert kernels.matmul_modp(A, B, p).tolist() == want


@pytest.mark.parametrize("backend", BACKENDS)
def test_product_masks_match_direct_enumeration(backend):
    p, n = 5, 3
    table = p1_table(p)
    rng = np.random.default_rng(3)
    fa = rng.integers(0, p, size=(2, 2**n))
    fb = rng.integers(0, p, size=(1, 2**n))
    ma, mb = kernels.product_zero_masks(table, n, fa, fb, p, backend=backend)
    t = table.shape[0]
    for m in range(t**n):
        rows = [table[(m // t ** (n - 1 - i)) % t] for i in range(n)]
        z = rows[0]
        for r in rows[1:]:
            z = np.kron(z, r) % p
        assert ma[m] == (not ((fa @ z) % p).any())
        assert mb[m] == (not ((fb @ z) % p).any())


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_backends_agree_on_benchmark_sizes():
    rng = np.random.default_rng(4)
    A = rng.integers(0, 65537, size=(60, 80))
    a, b = (kernels.rref_modp(A, 65537, backend=x) for x in ("numpy", "numba"))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    pts = rng.integers(0, 65537, size=(100, 5))
    exps = np.array(monomials_of_degree(5, 3), dtype=np.int64)
    assert np.array_equal(*(kernels.monomial_matrix_modp(pts, exps, 65537, backend=x) for x in ("numpy", "numba")))
    table = p1_table(7)
    fa, fb = rng.integers(0, 7, size=(2, 16)), rng.integers(0, 7, size=(3, 16))
    x = kernels.product_zero_masks(table, 4, fa, fb, 7, backend="numpy")
    y = kernels.product_zero_masks(table, 4, fa, fb, 7, backend="numba")
    assert all(np.array_equal(u, v) for u, v in zip(x, y))


def test_backend_name_validation():
    assert backend_name("numpy") == "numpy"
    with pytest.raises(ValueError):
        backend_name("cuda")


def test_env_flag_forces_numpy():
    code = "from segreproj._accel import backend_name; print(backend_name())"
    env = dict(os.environ, SEGRE_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
