import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segreproj import segre
from segreproj.errors import DimensionMismatch, HeterogeneousTuple, SingularMatrix
from segreproj.multipoly import (
    NotHomogeneous,
    NoUniqueEquation,
    Polynomial,
    RationalMap,
    compose_linear,
    compose_polytuple,
    evaluate,
    interpolate_hypersurface,
    monomials_of_degree,
    multidegree_check,
    parse_polynomial,
)
from segreproj.projgeom import ProjPoint
from segreproj.rng import Stream
from segreproj.scalars import RationalField, extension_field, prime_field

F101 = prime_field(101)
BIG = prime_field(65537)


def var(F, blocks, i):
    return Polynomial.variable(F, blocks, i)


def random_homogeneous(F, nvars, d, stream, terms=6):
    mons = monomials_of_degree(nvars, d)
    idx = stream.integers(0, len(mons), size=terms)
    coeffs = F.random_array(stream, terms)
    return Polynomial(F, (nvars,), {mons[i]: F.to_elem(c) for i, c in zip(idx, coeffs)})


def test_evaluate_product():
    f = parse_polynomial("x0*y1", F101, (2, 2))
    assert evaluate(f, [1, 2, 3, 4]) == F101(4)


def test_evaluate_zero():
    assert evaluate(Polynomial.zero(F101, (3,)), [1, 2, 3]) == F101(0)


def test_evaluate_sum_of_squares_f5():
    F5 = prime_field(5)
    f = parse_polynomial("x0^2 + x1^2", F5, (2,))
    assert evaluate(f, [1, 2]) == F5(0)


def test_evaluate_dimension_mismatch():
    f = parse_polynomial("x0*x1", F101, (2,))
    with pytest.raises(DimensionMismatch):
        evaluate(f, [1, 2, 3])


def test_evaluate_over_extension():
    F9 = extension_field(3, (1, 0, 1))
    f = parse_polynomial("x0^2 + x1^2", F9, (2,))
    assert evaluate(f, [F9.gen, F9.one]) == F9(0)


def test_text_round_trip():
    Q = RationalField()
    f = parse_polynomial("3/2*x0^2*y1 - x1*x0*y0 + 7*x1^2*y1", Q, (2, 2))
    g = parse_polynomial(f.to_text(), Q, (2, 2))
    assert g == f


def test_compose_linear_identity_and_swap():
    x0 = var(F101, (2,), 0)
    assert compose_linear(x0, F101.identity(2)) == x0
    swap = np.array([[0, 1], [1, 0]], dtype=np.int64)
    assert compose_linear(x0, swap) == var(F101, (2,), 1)


def test_compose_linear_singular():
    x0 = var(F101, (2,), 0)
    with pytest.raises(SingularMatrix):
        compose_linear(x0, np.array([[1, 1], [2, 2]], dtype=np.int64))


def test_compose_linear_preserves_degree():
    stream = Stream(5)
    for trial in range(100):
        s = stream.child(trial)
        d = int(s.integers(1, 4))
        f = random_homogeneous(BIG, 3, d, s)
        while True:
            M = BIG.random_array(s, (3, 3))
            try:
                g = compose_linear(f, M)
                break
            except SingularMatrix:
                continue
        assert g.total_degree() == f.total_degree()
        assert multidegree_check(g) == (d,)


def test_compose_polytuple_squares():
    blocks = (2,)
    u, v = var(F101, blocks, 0), var(F101, blocks, 1)
    f = parse_polynomial("x0 + x1", F101, (2,))
    assert compose_polytuple(f, [u**2, v**2]) == u**2 + v**2


def test_compose_polytuple_identity():
    f = parse_polynomial("3*x0 + 5*x1 - x2", F101, (3,))
    ident = [var(F101, (3,), i) for i in range(3)]
    assert compose_polytuple(f, ident) == f


def test_compose_polytuple_errors():
    f = parse_polynomial("x0 + x1", F101, (2,))
    u = var(F101, (2,), 0)
    with pytest.raises(DimensionMismatch):
        compose_polytuple(f, [u])
    with pytest.raises(HeterogeneousTuple):
        compose_polytuple(f, [u, u**2])


def test_compose_polytuple_commutes_with_evaluation():
    stream = Stream(9)
    for trial in range(200):
        s = stream.child(trial)
        f = random_homogeneous(BIG, 3, int(s.integers(1, 4)), s.child(0))
        dg = int(s.integers(1, 3))
        g = [random_homogeneous(BIG, 2, dg, s.child(1, i), terms=3) for i in range(3)]
        P = BIG.random_array(s.child(2), 2)
        inner = [BIG.to_raw(evaluate(gi, P)) for gi in g]
        assert evaluate(compose_polytuple(f, g), P) == evaluate(f, inner)


def test_multidegree_examples():
    assert multidegree_check(parse_polynomial("x0*y1", F101, (2, 2))) == (1, 1)
    verdict = multidegree_check(parse_polynomial("x0^2 + x0*y0", F101, (2, 2)))
    assert isinstance(verdict, NotHomogeneous)


@pytest.mark.parametrize("dims", [(1,), (1, 1), (1, 2), (2, 2), (1, 1, 1), (2, 2, 2)])
def test_segre_components_multilinear(dims):
    m = segre.segre_map(F101, segre.ProductDims(dims))
    for comp in m.components:
        assert multidegree_check(comp) == (1,) * len(dims)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_multidegree_additive(seed, d1, d2):
    s = Stream(seed)
    blocks = (2, 3)

    def bihom(s, a, b):
        x = random_homogeneous(BIG, 2, a, s.child(0))
        y = random_homogeneous(BIG, 3, b, s.child(1))
        lift_x = Polynomial(BIG, blocks, {e + (0, 0, 0): c for e, c in x.terms.items()})
        lift_y = Polynomial(BIG, blocks, {(0, 0) + e: c for e, c in y.terms.items()})
        return lift_x * lift_y

    f = bihom(s.child(2), d1, d2)
    g = bihom(s.child(3), d2, d1)
    if f.is_zero() or g.is_zero():
        return
    df, dg = multidegree_check(f), multidegree_check(g)
    assert multidegree_check(f * g) == tuple(a + b for a, b in zip(df, dg))


def _quadric_points(F, n, seed):
    s = Stream(seed)
    out = []
    while len(out) < n:
        a, b, c, d = (int(v) for v in F.random_array(s, 4))
        z = [a * c, a * d, b * c, b * d]
        if any(v % F.p for v in z):
            out.append(ProjPoint(F, z))
    return out


def test_interpolate_segre_quadric():
    pts = _quadric_points(F101, 20, 1)
    f = interpolate_hypersurface(pts, 2)
    expected = parse_polynomial("x0*x3 - x1*x2", F101, (4,))
    assert f == expected


def test_interpolate_generic_points_in_p2():
    pts = [ProjPoint(F101, v) for v in ([1, 0, 0], [0, 1, 0], [0, 0, 1])]
    verdict = interpolate_hypersurface(pts, 1)
    assert verdict == NoUniqueEquation(nullity=0, degree=1)


def test_interpolate_repeated_point():
    pts = [ProjPoint(F101, [1, 2, 3])] * 12
    verdict = interpolate_hypersurface(pts, 2)
    assert isinstance(verdict, NoUniqueEquation)
    assert verdict.nullity == len(monomials_of_degree(3, 2)) - 1


def test_interpolation_recovers_random_hypersurfaces():
    # oracle: sample points on f = 0 by solving for the last coordinate on lines
    from math import comb

    F = prime_field(1009)
    for trial in range(20):
        s = Stream(77, trial)
        d = 1 + trial % 3
        nv = 3 + trial % 2
        # f = x_last * x0^(d-1) + B(x0..x_{n-2}) with B dense: irreducible, linear in x_last
        B = random_homogeneous(F, nv - 1, d, s.child(0), terms=60)
        lead = [0] * nv
        lead[0], lead[-1] = d - 1, 1
        terms = {e + (0,): c for e, c in B.terms.items()}
        terms[tuple(lead)] = F.one
        f = Polynomial(F, (nv,), terms)
        need = 2 * comb(nv - 1 + d, d)
        pts = []
        k = 0
        while len(pts) < need:
            head = [int(v) for v in F.random_array(s.child(1, k), nv - 1)]
            k += 1
            a = evaluate(f, head + [0])
            b = evaluate(f, head + [1]) - a
            if b == 0:
                continue
            last = F.to_raw(-a / b)
            pt = head + [last]
            if any(pt):
                pts.append(ProjPoint(F, pt))
        g = interpolate_hypersurface(pts, d)
        assert isinstance(g, Polynomial)
        lead = f.sorted_terms()[0][1]
        assert g == f * Polynomial.constant(F, (nv,), lead.inverse())


def test_rational_map_requires_common_degree():
    u = var(F101, (2,), 0)
    with pytest.raises(HeterogeneousTuple):
        RationalMap([u, u**2])
    m = RationalMap([u**2, u * var(F101, (2,), 1)])
    assert m.multidegree == (2,)
    assert m([1, 3]) == ProjPoint(F101, [1, 3])
