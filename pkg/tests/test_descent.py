import pytest

from segreproj import linalg
from segreproj.descent import (
    DivisorClassRep,
    apply_ambient,
    apply_semilinear,
    descend_basis,
    divisor_orbit,
    fixed_points,
    invariant_center,
    is_stable,
    make_twist,
    oracle_fixed_points,
    orbit_conflicts,
    perm_order,
    predicted_fixed_count,
    random_multipoint_over,
    verify_descent,
)
from segreproj.errors import CocycleViolation, PermDimMismatch
from segreproj.projgeom import LinearSubspace, ProjPoint
from segreproj.rng import Stream
from segreproj.scalars import extension_field
from segreproj.segre import MultiPoint, segre_embed

F9 = extension_field(3, (1, 0, 1))  # t^2 + 1
t9 = F9.gen


def swap(p=3, field=None, **kw):
    return make_twist(p, 2, (1, 1), perm=[2, 1], field=field, **kw)


def test_swap_twist_is_valid():
    tw = swap(field=F9)
    assert tw.perm == (1, 0)
    assert tw.mu == F9.one


def test_perm_dim_mismatch():
    with pytest.raises(PermDimMismatch):
        make_twist(3, 2, (1, 2), perm=[2, 1])


def test_cocycle_violations():
    with pytest.raises(CocycleViolation):
        make_twist(2, 2, (1, 1, 1), perm=[2, 3, 1])  # 3-cycle with k = 2
    with pytest.raises(CocycleViolation):
        swap(field=F9, matrices=[[[1, 1], [0, 1]], "identity"])


def test_trivial_twist_is_frobenius():
    tw = make_twist(3, 2, (1, 1), field=F9)
    x = MultiPoint([ProjPoint(F9, [1, t9]), ProjPoint(F9, [t9, 1])])
    y = apply_semilinear(tw, x)
    assert y == MultiPoint([ProjPoint(F9, [1, t9.frobenius()]), ProjPoint(F9, [t9.frobenius(), 1])])
    k1 = make_twist(5, 1, (1, 1))
    assert k1.field.order == 5


def test_swap_example_point():
    tw = swap(field=F9)
    x = MultiPoint([ProjPoint(F9, [1, t9]), ProjPoint(F9, [1, 0])])
    assert apply_semilinear(tw, x) == MultiPoint([ProjPoint(F9, [1, 0]), ProjPoint(F9, [1, 2 * t9])])


@pytest.mark.parametrize("spec", [((1, 1), [2, 1], 2), ((1, 2), None, 2), ((1, 1, 1), [2, 3, 1], 3), ((2, 2), [2, 1], 2)])
def test_ambient_action_intertwines_segre(spec):
    dims, perm, k = spec
    tw = make_twist(2 if k == 3 else 3, k, dims, perm=perm, matrices="random:4")
    s = Stream(40)
    for trial in range(100):
        x = random_multipoint_over(tw.field, dims, s.child(trial))
        lhs = segre_embed(dims, apply_semilinear(tw, x))
        rhs = ProjPoint.from_raw(tw.field, apply_ambient(tw, segre_embed(dims, x).coords))
        assert lhs == rhs


def test_phi_k_identity_on_random_points():
    tw = make_twist(5, 2, (2, 2), perm=[2, 1], matrices="random:9")
    s = Stream(41)
    for trial in range(100):
        x = random_multipoint_over(tw.field, tw.dims, s.child(trial))
        assert apply_semilinear(tw, apply_semilinear(tw, x)) == x


def test_trivial_orbit():
    tw = make_twist(3, 2, (1, 1), field=F9)
    D = DivisorClassRep(F9, 0, [1, 2])
    assert divisor_orbit(tw, D) == [D]


def test_swap_orbit():
    tw = swap(field=F9)
    D = DivisorClassRep(F9, 0, [F9.one, t9])
    orbit = divisor_orbit(tw, D)
    assert orbit == [D, DivisorClassRep(F9, 1, [F9.one, 2 * t9])]
    assert orbit_conflicts(orbit) == []


def test_orbit_size_divides_group_order():
    s = Stream(42)
    specs = [((1, 1), [2, 1], 3, 2), ((1, 1), None, 5, 2), ((2, 2), [2, 1], 3, 4), ((1, 1, 1), [2, 3, 1], 2, 3), ((1, 1, 1), [2, 1, 3], 3, 2)]
    for trial in range(50):
        dims, perm, p, k = specs[trial % len(specs)]
        tw = make_twist(p, k, dims, perm=perm, matrices=f"random:{trial}")
        i = int(s.child(trial).integers(0, len(dims)))
        form = tw.field.random_array(s.child(trial, 1), dims[i] + 1)
        if linalg.first_nonzero(tw.field, form) is None:
            continue
        orbit = divisor_orbit(tw, DivisorClassRep(tw.field, i, form))
        assert (k * perm_order(tw.perm)) % len(orbit) == 0


def test_invariant_center_trivial():
    tw = make_twist(3, 2, (1, 1), field=F9)
    seeds = [DivisorClassRep(F9, 0, [1, 0]), DivisorClassRep(F9, 1, [1, 0])]
    center, cert = invariant_center(tw, seeds=seeds)
    assert center.L == LinearSubspace(F9, 3, [[0, 0, 0, 1]])
    assert cert["stable"] and cert["attempts"] == 1


def test_invariant_center_swap_seeded():
    tw = swap(field=F9)
    center, cert = invariant_center(tw, seeds=[DivisorClassRep(F9, 0, [F9.one, t9])])
    assert cert["stable"]
    assert center.dim_L == 0
    assert len(cert["orbits"]) == 1 and len(cert["orbits"][0]) == 2
    # explicit check of Phi(L) = L on the single point
    z = center.L.basis[0]
    assert ProjPoint.from_raw(F9, apply_ambient(tw, z)) == ProjPoint.from_raw(F9, z)


@pytest.mark.parametrize("dims", [(1, 1), (2, 2)])
def test_invariant_center_stable_random_twists(dims):
    for trial in range(20):
        tw = make_twist(3, 2, dims, perm=[2, 1] if trial % 2 else None, matrices=f"random:{trial}")
        center, cert = invariant_center(tw, rng_seed=trial)
        assert cert["stable"]
        assert is_stable(tw, center.L)
        assert center.dim_L == center.dims.dim_L_expected


def test_descend_basis_trivial_twist():
    tw = make_twist(3, 2, (1, 2), field=F9)
    seeds = [DivisorClassRep(F9, 0, [1, 0]), DivisorClassRep(F9, 1, [1, 0, 0])]
    center, _ = invariant_center(tw, seeds=seeds)
    L_p, trans = descend_basis(tw, center.L)
    assert [[int(x.coeffs[0]) for x in row] for row in center.L.basis] == L_p.basis.tolist()
    assert all(F9.in_prime_subfield(x) for x in center.L.basis.reshape(-1))


def test_descend_basis_swap_point():
    tw = swap(field=F9)
    center, _ = invariant_center(tw, seeds=[DivisorClassRep(F9, 0, [F9.one, t9])])
    L_p, trans = descend_basis(tw, center.L)
    assert L_p.dim == 0
    v = trans["fixed"][0]
    # the averaged vector is fixed by the normalized action
    assert linalg.equal(F9, apply_ambient(tw, v, normalized=True), v)
    # and its coordinates in the descended frame are Frobenius-fixed
    coords = linalg.matmul(F9, linalg.inverse(F9, trans["ambient_basis"]), v)
    assert all(x.frobenius() == x for x in coords)


def test_descend_rank_preserved():
    for trial in range(50):
        dims = [(1, 1), (1, 2), (2, 2), (1, 1, 1)][trial % 4]
        perm = [2, 1] if dims in ((1, 1), (2, 2)) and trial % 3 == 0 else None
        tw = make_twist(3, 2, dims, perm=perm, matrices=f"random:{trial}")
        center, _ = invariant_center(tw, rng_seed=trial)
        L_p, trans = descend_basis(tw, center.L, seed=trial)
        assert trans["rank_p"] == trans["rank_q"] == center.L.basis.shape[0]
        assert L_p.dim == center.dim_L


def swap_fixed_oracle(p):
    """Pairs (x, Frob x) with x in P^1(F_{p^2}), listed by hand."""
    tw = swap(p)
    F = tw.field
    from segreproj.projgeom import enumerate_points

    out = set()
    for v in enumerate_points(F, 1):
        x = ProjPoint.from_raw(F, v)
        out.add(MultiPoint([x, ProjPoint.from_raw(F, F.frobenius_array(x.coords))]))
    return tw, out


@pytest.mark.parametrize("p", [2, 3, 5])
def test_swap_fixed_points(p):
    tw, expected = swap_fixed_oracle(p)
    fixed = fixed_points(tw)
    assert len(fixed) == p * p + 1
    assert set(fixed) == expected


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("dims", [(1, 1), (1, 1, 1)])
def test_fixed_counts_match_enumeration(p, k, dims):
    perms = [None]
    if k == 2:
        perms.append([2, 1] if len(dims) == 2 else [2, 1, 3])
    for perm in perms:
        tw = make_twist(p, k, dims, perm=perm, matrices="random:1")
        fixed = fixed_points(tw)
        assert fixed == oracle_fixed_points(tw)
        assert len(fixed) == predicted_fixed_count(tw)


def test_three_cycle_fixed_count():
    tw = make_twist(2, 3, (1, 1, 1), perm=[2, 3, 1])
    fixed = fixed_points(tw)
    assert len(fixed) == 2**3 + 1
    assert fixed == oracle_fixed_points(tw)


def test_verify_descent_swap_p3():
    r = verify_descent(swap(3))
    assert r["fixed_point_count"] == r["oracle_count"] == 10
    assert r["stability"] and r["target_identity_holds"]
    assert r["equivariance_failures"] == 0 and r["equivariance_checked"] > 0
    assert r["trivialization"] == "found"
    assert r["roundtrip"]["passed"]
    assert r["descended_projection_rational"]


def test_verify_descent_trivial_p5():
    r = verify_descent(make_twist(5, 1, (1, 1)))
    assert r["fixed_point_count"] == r["oracle_count"] == 36
    assert r["roundtrip"]["passed"]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_lang_found_small_fields(p):
    r = verify_descent(swap(p, matrices="random:2"), rng_seed=1)
    assert r["trivialization"] == "found"
    assert r["equivariance_failures"] == 0


def test_lang_skipped_beyond_budget():
    r = verify_descent(swap(5), lang_budget=10)
    assert r["trivialization"] == "skipped"
    assert r["roundtrip"] is None
    assert r["equivariance_failures"] == 0


def test_verify_descent_independent_of_workers():
    tw = make_twist(3, 2, (1, 1), perm=[2, 1], matrices="random:3")
    a = verify_descent(tw, rng_seed=2, workers=1)
    b = verify_descent(tw, rng_seed=2, workers=8)
    assert a == b
