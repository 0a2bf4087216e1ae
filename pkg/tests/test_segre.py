import itertools

import numpy as np
import pytest

from segreproj import linalg
from segreproj.errors import (
    CenterContainsPoint,
    DimensionMismatch,
    FieldTooSmall,
    GenericityViolation,
    IndexOutOfRange,
    ZeroHyperplane,
)
from segreproj.multipoly import multidegree_check, parse_polynomial
from segreproj.projgeom import LinearSubspace, ProjPoint, project_from_center
from segreproj.rng import Stream
from segreproj.scalars import RationalField, prime_field
from segreproj.segre import (
    FactorHyperplanes,
    MultiPoint,
    ProductDims,
    apply_inverse,
    apply_pi,
    center_L,
    center_L_direct,
    fiber_bruteforce,
    flatten_index,
    inverse_sigma_map,
    pi_L_map,
    random_point,
    segre_embed,
    unflatten_index,
    verify_birational,
)

F101 = prime_field(101)
BIG = prime_field(65537)
Q = RationalField()


def mp(field, *coords):
    return MultiPoint.from_coords(field, coords)


def random_mp(field, dims, stream):
    return MultiPoint(random_point(field, a, stream.child(i)) for i, a in enumerate(dims))


def is_rank_one_tensor(field, dims, z):
    T = np.asarray(z, dtype=field.dtype).reshape([a + 1 for a in dims])
    for i in range(len(dims)):
        flat = np.moveaxis(T, i, 0).reshape(dims[i] + 1, -1)
        if linalg.rank(field, flat) > 1:
            return False
    return True


# ---- embedding and indexing


def test_segre_embed_examples():
    assert segre_embed((1, 1), mp(F101, [1, 2], [1, 3])) == ProjPoint(F101, [1, 3, 2, 6])
    assert segre_embed((1, 2), mp(F101, [1, 0], [1, 0, 0])) == ProjPoint(F101, [1, 0, 0, 0, 0, 0])


def test_segre_embed_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        segre_embed((1, 2), mp(F101, [1, 0], [1, 0]))


def test_productdims_rejects_zero():
    with pytest.raises(DimensionMismatch):
        ProductDims((0, 1))


@pytest.mark.parametrize("dims", [(1, 1), (1, 2), (2, 2), (1, 1, 1), (1, 1, 2), (2, 2, 2)])
def test_segre_image_has_vanishing_minors(dims):
    s = Stream(21, *dims)
    for trial in range(200):
        x = random_mp(BIG, dims, s.child(trial))
        assert is_rank_one_tensor(BIG, dims, segre_embed(dims, x).coords)


def test_flatten_examples():
    assert flatten_index((1, 1), (1, 1)) == 3
    assert flatten_index((1, 2), (1, 0)) == 3


def test_flatten_round_trip():
    for dims in [(1,), (3,), (1, 1), (2, 3), (3, 3), (1, 2, 3), (3, 3, 3)]:
        N = int(np.prod([a + 1 for a in dims]))
        seen = set()
        for m in range(N):
            J = unflatten_index(dims, m)
            assert flatten_index(dims, J) == m
            seen.add(J)
        assert seen == set(itertools.product(*[range(a + 1) for a in dims]))


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        flatten_index((1, 2), (2, 0))
    with pytest.raises(IndexOutOfRange):
        unflatten_index((1, 2), 6)


# ---- the center


def test_center_11_coordinate():
    c = center_L((1, 1), FactorHyperplanes.coordinate(F101, (1, 1)))
    assert c.L == LinearSubspace(F101, 3, [[0, 0, 0, 1]])
    assert c.certificates["verified"]


def test_center_111_coordinate():
    c = center_L((1, 1, 1), FactorHyperplanes.coordinate(F101, (1, 1, 1)))
    # multi-indices in {0,1}^3 with at least two ones
    expected = [flatten_index((1, 1, 1), J) for J in itertools.product((0, 1), repeat=3) if sum(J) >= 2]
    assert len(expected) == 4
    assert c.dim_L == 3
    assert c.L == LinearSubspace(F101, 7, np.eye(8, dtype=np.int64)[expected])


def test_center_12_coordinate_is_segre_line():
    dims = (1, 2)
    c = center_L(dims, FactorHyperplanes.coordinate(F101, dims))
    e = np.eye(6, dtype=np.int64)
    assert c.L == LinearSubspace(F101, 5, e[[flatten_index(dims, (1, 1)), flatten_index(dims, (1, 2))]])
    for row in c.L.basis:
        assert is_rank_one_tensor(F101, dims, row)


def test_zero_hyperplane():
    with pytest.raises(ZeroHyperplane):
        FactorHyperplanes(F101, [[0, 0], [1, 0]])


@pytest.mark.parametrize("dims", [(1, 1), (1, 2), (2, 2), (1, 1, 1), (2, 3), (1, 1, 2)])
def test_center_matches_direct_span(dims):
    for seed in range(3):
        H = FactorHyperplanes.random(BIG, dims, seed)
        c = center_L(dims, H)
        assert c.L == center_L_direct(dims, H)
        assert c.dim_L == ProductDims(dims).dim_L_expected


def test_center_equivariance():
    # center for H o G equals the (kron G)-preimage of the center for H
    s = Stream(31)
    for trial in range(20):
        t = s.child(trial)
        dims = [(1, 1), (1, 2), (2, 2), (1, 1, 1)][trial % 4]
        H = FactorHyperplanes.random(BIG, dims, trial)
        G = []
        for i, a in enumerate(dims):
            while True:
                g = BIG.random_array(t.child(i), (a + 1, a + 1))
                if linalg.rank(BIG, g) == a + 1:
                    break
            G.append(g)
        moved = FactorHyperplanes(BIG, [linalg.matmul(BIG, h.reshape(1, -1), g).reshape(-1) for h, g in zip(H.forms, G)])
        Kinv = linalg.kron(BIG, [linalg.inverse(BIG, g) for g in G])
        L = center_L(dims, H).L
        preimage = LinearSubspace(BIG, L.ambient_dim, linalg.matmul(BIG, Kinv, L.basis.T).T)
        assert center_L(dims, moved).L == preimage


def test_projection_constant_along_center():
    s = Stream(32)
    for trial in range(50):
        t = s.child(trial)
        dims = [(1, 2), (2, 2), (1, 1, 1)][trial % 3]
        c = center_L(dims, FactorHyperplanes.random(BIG, dims, trial))
        z = segre_embed(dims, random_mp(BIG, dims, t.child(0)))
        if c.L.contains(z):
            continue
        coeffs = BIG.random_array(t.child(1), (1, c.L.basis.shape[0]))
        ell = linalg.matmul(BIG, coeffs, c.L.basis).reshape(-1)
        moved = ProjPoint.from_raw(BIG, linalg.add(BIG, z.coords, ell))
        assert project_from_center(c.L, z) == project_from_center(c.L, moved)


# ---- the maps


def test_pi_L_coordinate_11():
    c = center_L((1, 1), FactorHyperplanes.coordinate(F101, (1, 1)))
    expected = [parse_polynomial(t, F101, (2, 2)) for t in ("x0*y0", "x0*y1", "x1*y0")]
    assert list(pi_L_map(c).components) == expected
    a, b = 17, 42
    assert apply_pi(c, mp(F101, [1, a], [1, b])) == ProjPoint(F101, [1, b, a])


def test_inverse_coordinate_11():
    c = center_L((1, 1), FactorHyperplanes.coordinate(F101, (1, 1)))
    a, b = 17, 42
    assert apply_inverse(c, ProjPoint(F101, [1, b, a])) == mp(F101, [1, a], [1, b])
    for sigma in inverse_sigma_map(c):
        for comp in sigma.components:
            assert comp.is_zero() or multidegree_check(comp) == (1,)


def _all_dims(max_N):
    out = []

    def rec(prefix, N):
        if prefix:
            out.append(tuple(prefix))
        for a in range(1, max_N):
            if N * (a + 1) > max_N:
                break
            rec(prefix + [a], N * (a + 1))

    rec([], 1)
    return out


def test_pi_L_components_multilinear():
    dims_list = _all_dims(64)
    assert (1, 1, 1, 1, 1, 1) in dims_list
    for dims in dims_list:
        c = center_L(dims, FactorHyperplanes.random(F101, dims, 1))
        m = pi_L_map(c)
        assert len(m.components) == sum(dims) + 1
        for comp in m.components:
            assert multidegree_check(comp) == (1,) * len(dims)


def test_pi_L_agrees_with_projection():
    s = Stream(33)
    for dims in [(1, 2), (2, 2), (1, 1, 1)]:
        c = center_L(dims, FactorHyperplanes.random(BIG, dims, 4))
        for trial in range(30):
            x = random_mp(BIG, dims, s.child(*dims, trial))
            z = segre_embed(dims, x)
            if c.L.contains(z):
                with pytest.raises(CenterContainsPoint):
                    project_from_center(c.L, z)
                continue
            assert apply_pi(c, x) == project_from_center(c.L, z)


def test_verify_birational_examples():
    c = center_L((1, 1), FactorHyperplanes.random(F101, (1, 1), 0))
    r = verify_birational(c, trials=100, seed=0)
    assert (r["passes"], r["failures"], r["first_counterexample"]) == (100, 0, None)
    c = center_L((2, 3), FactorHyperplanes.random(Q, (2, 3), 0))
    assert verify_birational(c, trials=50, seed=1, height=10)["passes"] == 50
    c = center_L((1, 1, 1, 1), FactorHyperplanes.random(BIG, (1, 1, 1, 1), 0))
    assert verify_birational(c, trials=100, seed=2)["passes"] == 100


def test_verify_birational_symbolic_11():
    # sigma o pi_L on (1,1) multiplies each factor by the other factor's h
    from segreproj.multipoly import compose_polytuple

    c = center_L((1, 1), FactorHyperplanes.coordinate(F101, (1, 1)))
    pi = pi_L_map(c)
    var = {v: parse_polynomial(v, F101, (2, 2)) for v in ("x0", "x1", "y0", "y1")}
    expected = [[var["x0"] * var["y0"], var["x1"] * var["y0"]], [var["y0"] * var["x0"], var["y1"] * var["x0"]]]
    for sigma, exp in zip(inverse_sigma_map(c), expected):
        assert [compose_polytuple(comp, pi.components) for comp in sigma.components] == exp


def test_verify_birational_field_too_small():
    F2 = prime_field(2)
    c = center_L((1, 1), FactorHyperplanes.coordinate(F2, (1, 1)))
    with pytest.raises(FieldTooSmall):
        verify_birational(c, trials=100)


def test_verify_birational_independent_of_workers():
    c = center_L((2, 2), FactorHyperplanes.random(BIG, (2, 2), 5))
    reports = [verify_birational(c, trials=40, seed=9, workers=w) for w in (1, 2, 8)]
    assert reports[0] == reports[1] == reports[2]


# ---- fiber identity


def fiber_oracle(n, p, p_pt, q_pt):
    """H cap S_1 and {q} cup P by direct evaluation of the defining products."""
    pts = [(1, a) for a in range(p)] + [(0, 1)]
    P = [tuple(int(v) for v in f.coords) for f in p_pt.factors]
    Qp = [tuple(int(v) for v in f.coords) for f in q_pt.factors]

    def vanish(form_pt, x):
        # the linear form through form_pt, evaluated at x
        return (form_pt[1] * x[0] - form_pt[0] * x[1]) % p == 0

    cut, expected = set(), set()
    for x in itertools.product(pts, repeat=n):
        on_all = all(vanish(Qp[i], x[i]) or any(vanish(P[j], x[j]) for j in range(n) if j != i) for i in range(n))
        if on_all:
            cut.add(x)
        if x == tuple(Qp) or sum(x[i] == P[i] for i in range(n)) >= 2:
            expected.add(x)
    return cut, expected


def test_fiber_example_n2():
    F5 = prime_field(5)
    p_pt, q_pt = mp(F5, [0, 1], [0, 1]), mp(F5, [1, 1], [1, 2])
    r = fiber_bruteforce(2, 5, (p_pt, q_pt))
    assert r["passed"] and r["identity_holds"]
    assert r["enumerated"] == 36
    assert r["H_cap_S1_size"] == 2
    cut, expected = fiber_oracle(2, 5, p_pt, q_pt)
    assert cut == expected == {((0, 1), (0, 1)), ((1, 1), (1, 2))}


def test_fiber_example_n3():
    F3 = prime_field(3)
    p_pt, q_pt = mp(F3, [1, 0], [1, 2], [0, 1]), mp(F3, [1, 1], [1, 0], [1, 2])
    r = fiber_bruteforce(3, 3, (p_pt, q_pt))
    cut, expected = fiber_oracle(3, 3, p_pt, q_pt)
    assert r["enumerated"] == 64
    assert r["passed"]
    assert r["H_cap_S1_size"] == len(cut) == len(expected) == 1 + r["P_size"]
    assert cut == expected


def test_fiber_genericity_violation():
    F5 = prime_field(5)
    with pytest.raises(GenericityViolation):
        fiber_bruteforce(2, 5, (mp(F5, [0, 1], [0, 1]), mp(F5, [0, 1], [1, 2])))


def test_fiber_backends_agree():
    F5 = prime_field(5)
    pq = (mp(F5, [1, 3], [0, 1], [1, 1]), mp(F5, [1, 1], [1, 4], [1, 0]))
    a = fiber_bruteforce(3, 5, pq, backend="numpy")
    b = fiber_bruteforce(3, 5, pq, backend="numba")
    assert a == b and a["passed"]
