"""Hyperplane sections W = H cap (P^a x P^b) and their projections Q_H.

``L_H = L cap {H = 0}``.  Projecting from ``L_H`` sends S into P^{a+b+1}
and ``H`` itself to the hyperplane ``H' = H[nonpivots(L_H)]``; Q_H is the
image of W inside ``H'``, identified with P^{a+b} by dropping the last
coordinate on which ``H'`` is nonzero.
"""
from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from . import _upoly, linalg
from ._parallel import map_ranges
from .errors import DegenerateSection, FieldTooSmall, NoEquation, NoEquationFound
from .multipoly import NoUniqueEquation, Polynomial, compose_polytuple, evaluate, interpolate_hypersurface
from .projgeom import LinearSubspace, ProjPoint, intersect, projection_matrix
from .rng import Stream
from .scalars import PrimeField
from .segre import SCHEMA_VERSION, FactorHyperplanes, ProductDims, center_L, segre_raw

MAX_REJECTIONS = 1000
DEFAULT_MAX_DEGREE = 4

_TAG_SECTION_H = 0x5EC
_TAG_SAMPLE = 0x5A
_TAG_LINE = 0x11
_TAG_CLASSIFY = 0xC1
_TAG_SYNTH = 0x5F


@dataclass
class SectionSetup:
    a: int
    b: int
    field: object
    H: np.ndarray
    center: object
    L_H: LinearSubspace
    generic: bool
    U_H: np.ndarray = dc_field(repr=False)
    H_prime: np.ndarray = dc_field(repr=False)
    drop: int = 0

    @property
    def dim_L(self):
        return self.center.dim_L

    @property
    def dim_LH(self):
        return self.L_H.dim

    def to_qh(self, v):
        """Point of Q_H in P^{a+b} from a point of P^{a+b+1} on ``H'``."""
        keep = [i for i in range(len(v)) if i != self.drop]
        return ProjPoint.from_raw(self.field, np.asarray(v)[keep])


@dataclass
class ImageModel:
    samples: list
    equation: object = None
    degree: object = None
    nullities: dict = dc_field(default_factory=dict)
    degree_oracle: object = None
    oracle_extension: object = None


@dataclass
class Quadric:
    equation: Polynomial
    kind: str = "quadric"


@dataclass
class ScrollEvidence:
    lines_found: float
    points_tested: int
    lines_per_point: list
    kind: str = "scroll_evidence"


def random_section_form(field, a, b, seed):
    stream = Stream(seed, _TAG_SECTION_H)
    N = (a + 1) * (b + 1)
    while True:
        H = field.random_array(stream, N)
        if linalg.first_nonzero(field, H) is not None:
            return H


def make_setup(a, b, H, field, hyperplanes=None):
    """Center of the two-factor product and ``L_H``; flags non-generic ``H``."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be at least 1")
    dims = ProductDims((a, b))
    H = np.asarray(H, dtype=field.dtype) if not isinstance(H, list) else field.array(H)
    if H.shape != (dims.N,):
        raise ValueError(f"H needs {dims.N} coefficients, got {H.shape}")
    if linalg.first_nonzero(field, H) is None:
        raise DegenerateSection("H is the zero form")
    if hyperplanes is None:
        hyperplanes = FactorHyperplanes.coordinate(field, dims)
    center = center_L(dims, hyperplanes)
    L_H = intersect(center.L, LinearSubspace.from_equations(field, dims.ambient_dim, H.reshape(1, -1)))
    generic = L_H.dim == center.dim_L - 1
    U_H = projection_matrix(L_H)
    H_prime = H[list(L_H.nonpivots)]
    nz = [i for i in range(len(H_prime)) if H_prime[i] != 0]
    if not nz:
        raise DegenerateSection("H contains the whole center")
    return SectionSetup(a, b, field, H, center, L_H, generic, U_H, H_prime, nz[-1])


def _sample_one(setup, stream, height=10):
    F, a, b = setup.field, setup.a, setup.b
    Hmat = setup.H.reshape(a + 1, b + 1)
    for _ in range(MAX_REJECTIONS):
        x1 = _rand(F, stream, a + 1, height)
        if linalg.first_nonzero(F, x1) is None:
            continue
        ell = linalg.matmul(F, x1, Hmat)
        nz = [i for i in range(b + 1) if ell[i] != 0]
        if not nz:
            continue
        j = nz[-1]
        x2 = _rand(F, stream, b + 1, height)
        x2[j] = F.to_raw(F.zero)
        rest = linalg.matmul(F, ell, x2)
        x2[j] = F.to_raw(-F.to_elem(rest) * F.inv(F.to_elem(ell[j])))
        if linalg.first_nonzero(F, x2) is None:
            continue
        z = segre_raw(F, [x1, x2])
        v = linalg.matmul(F, setup.U_H, z)
        if linalg.first_nonzero(F, v) is None:
            continue  # on L_H
        return ProjPoint.from_raw(F, x1), ProjPoint.from_raw(F, x2), setup.to_qh(v)
    raise FieldTooSmall(f"no usable section point over {F!r} after {MAX_REJECTIONS} draws")


def _rand(F, stream, size, height):
    if F.is_finite:
        return F.random_array(stream, size)
    return F.random_array(stream, size, height=height)


def section_project(a, b, H, field, n_samples, seed, hyperplanes=None, workers=1):
    """Setup plus ``n_samples`` distinct points of Q_H."""
    if H is None or (isinstance(H, str) and H == "random"):
        H = random_section_form(field, a, b, seed)
    setup = make_setup(a, b, H, field, hyperplanes)

    def run(start, stop):
        return [_sample_one(setup, Stream(seed, _TAG_SAMPLE, s))[2] for s in range(start, stop)]

    # oversample in index order, then keep the first n_samples distinct points
    samples, seen, drawn = [], set(), 0
    batch = n_samples
    while len(samples) < n_samples:
        if drawn > MAX_REJECTIONS * max(1, n_samples):
            raise FieldTooSmall(f"could not find {n_samples} distinct points of Q_H")
        pts = map_ranges(lambda s, e: run(drawn + s, drawn + e), batch, workers)
        drawn += batch
        for pt in pts:
            if pt not in seen:
                seen.add(pt)
                samples.append(pt)
                if len(samples) == n_samples:
                    break
    return setup, samples


def required_samples(dim, max_degree):
    return 2 * comb(dim + max_degree, max_degree)


def interpolate_QH(samples, max_degree=DEFAULT_MAX_DEGREE, seed=0, check_count=True):
    """First degree with a one-dimensional interpolation null space, plus the line oracle."""
    if not samples:
        raise NoEquationFound("no samples")
    F = samples[0].field
    dim = samples[0].dim
    if check_count and len(samples) < required_samples(dim, max_degree):
        raise ValueError(f"{len(samples)} samples; need at least {required_samples(dim, max_degree)}")
    model = ImageModel(samples=list(samples))
    for d in range(1, max_degree + 1):
        res = interpolate_hypersurface(samples, d, F)
        if isinstance(res, NoUniqueEquation):
            model.nullities[d] = res.nullity
            if res.nullity > 1:
                break
            continue
        model.nullities[d] = 1
        model.equation = res
        model.degree = d
        break
    if model.equation is None:
        raise NoEquationFound(f"no unique equation up to degree {max_degree}; null-space dims {model.nullities}")
    model.degree_oracle, model.oracle_extension = line_degree(model.equation, seed)
    return model


def line_degree(f, seed, attempts=100):
    """Roots (with multiplicity, in F_{p^e}) of ``f`` on a random line ``P0 + s P1``.

    ``P1`` is resampled until ``f(P1) != 0`` so no root sits at infinity.
    """
    F = f.field
    if not isinstance(F, PrimeField):
        raise TypeError("the line oracle runs over prime fields")
    p, n = F.p, f.nvars
    stream = Stream(seed, _TAG_LINE)
    for _ in range(attempts):
        P0 = F.random_array(stream, n)
        P1 = F.random_array(stream, n)
        if int(evaluate(f, P1)) == 0:
            continue
        g = restrict_to_line(f, P0, P1)
        count, e = _upoly.count_roots_in_extension(g, p)
        return count, e
    raise FieldTooSmall("no line avoiding the hypersurface at infinity")


def restrict_to_line(f, P0, P1):
    """Coefficients (low to high) of ``s -> f(P0 + s P1)`` over F_p."""
    F = f.field
    s = Polynomial.variable(F, (2,), 1)
    one = Polynomial.variable(F, (2,), 0)
    g = [one * int(P0[i]) + s * int(P1[i]) for i in range(f.nvars)]
    h = compose_polytuple(f, g)
    d = max((e[1] for e in h.terms), default=0)
    coeffs = [0] * (d + 1)
    for e, c in h.terms.items():
        coeffs[e[1]] = int(c)
    return _upoly.trim(coeffs)


# ---- line evidence


def _gradient(f):
    return [f.derivative(i) for i in range(f.nvars)]


def _plane_coefficients(f, P, u1, u2):
    """Binary forms ``c_j(s, t)``, j = 0..d, of ``f(r P + s u1 + t u2)`` by powers of r."""
    F = f.field
    blocks = (3,)
    r, s, t = (Polynomial.variable(F, blocks, i) for i in range(3))
    g = [r * int(P[i]) + s * int(u1[i]) + t * int(u2[i]) for i in range(f.nvars)]
    h = compose_polytuple(f, g)
    d = max((sum(e) for e in h.terms), default=0)
    coeffs = {j: {} for j in range(d + 1)}
    for e, c in h.terms.items():
        j = e[1] + e[2]
        coeffs[j][e[2]] = int(c)  # binary form in (s, t), keyed by the power of t
    return coeffs, d


def _common_root(forms, p):
    """True when nonzero binary forms share a root over the algebraic closure.

    ``forms`` holds ``(j, form)`` pairs: ``form`` is homogeneous of degree
    ``j`` in ``(s, t)``, keyed by the power of ``t``.
    """
    live = [(j, fm) for j, fm in forms if any(v % p for v in fm.values())]
    if not live:
        return True
    # root [1:0] makes every s^j coefficient vanish
    if all(fm.get(0, 0) % p == 0 for _, fm in live):
        return True
    g = None
    for j, fm in live:
        # dehomogenize at t = 1: coefficient of s^i is fm[j - i]
        poly = _upoly.trim([fm.get(j - i, 0) % p for i in range(j + 1)])
        g = poly if g is None else _upoly.gcd(g, poly, p)
        if _upoly.deg(g) <= 0:
            return False
    return _upoly.deg(g) > 0


def line_through_point(f, P, stream, tries=3):
    """Search for a line through a smooth point ``P`` inside ``{f = 0}``.

    A random plane through ``P`` inside the tangent hyperplane meets the
    hypersurface in a curve with a point at ``P``; a line through ``P`` in the
    plane exists iff the forms ``c_2, ..., c_d`` share a root.
    """
    F = f.field
    p = F.p
    grad = np.array([int(evaluate(g, P)) for g in _gradient(f)], dtype=np.int64)
    if not grad.any():
        return None  # singular point
    T = linalg.nullspace(F, grad.reshape(1, -1))
    for _ in range(tries):
        c1 = F.random_array(stream, T.shape[0])
        c2 = F.random_array(stream, T.shape[0])
        u1 = linalg.matmul(F, c1, T)
        u2 = linalg.matmul(F, c2, T)
        if linalg.rank(F, np.stack([np.asarray(P, dtype=np.int64), u1, u2])) < 3:
            continue
        coeffs, d = _plane_coefficients(f, P, u1, u2)
        return _common_root([(j, coeffs[j]) for j in range(2, d + 1)], p)
    return None


def classify_QH(model, field=None, seed=0, n_points=20):
    if model.equation is None:
        raise NoEquation("the model has no equation")
    if model.degree == 2:
        return Quadric(model.equation)
    f = model.equation
    stream = Stream(seed, _TAG_CLASSIFY)
    results = []
    for k, P in enumerate(model.samples):
        if len(results) == n_points:
            break
        found = line_through_point(f, P.coords, stream.child(k))
        if found is None:
            continue
        results.append(bool(found))
    frac = sum(results) / len(results) if results else 0.0
    return ScrollEvidence(lines_found=frac, points_tested=len(results), lines_per_point=results)


# ---- synthetic controls


def sample_cuspidal_cone(field, n, seed):
    """Points of the cone ``y^2 z = x^3`` in P^3 (vertex [0:0:0:1])."""
    stream = Stream(seed, _TAG_SYNTH, 1)
    p = field.p
    out, seen = [], set()
    while len(out) < n:
        s, t, rho, w = (int(v) for v in field.random_array(stream, 4))
        v = np.array([s * s * t * rho % p, s**3 * rho % p, t**3 * rho % p, w], dtype=np.int64)
        if not v.any():
            continue
        pt = ProjPoint.from_raw(field, v)
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out


def sample_fermat_cubic(field, n, seed):
    """Points of ``x^3 + y^3 + z^3 + w^3 = 0`` over F_p with ``p = 2 mod 3``."""
    p = field.p
    if p % 3 != 2:
        raise ValueError("cube roots are unique only when p = 2 mod 3")
    e = (2 * p - 1) // 3
    stream = Stream(seed, _TAG_SYNTH, 2)
    out, seen = [], set()
    while len(out) < n:
        x, y, z = (int(v) for v in field.random_array(stream, 3))
        w = pow(-(x**3 + y**3 + z**3) % p, e, p)
        v = np.array([x, y, z, w], dtype=np.int64)
        if not v.any():
            continue
        pt = ProjPoint.from_raw(field, v)
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out


def sample_quadric(field, n, seed):
    """Points of ``z0 z3 - z1 z2 = 0`` via ``(s, t) x (u, v) -> (su, sv, tu, tv)``."""
    stream = Stream(seed, _TAG_SYNTH, 3)
    p = field.p
    out, seen = [], set()
    while len(out) < n:
        s, t, u, v = (int(c) for c in field.random_array(stream, 4))
        vec = np.array([s * u % p, s * v % p, t * u % p, t * v % p], dtype=np.int64)
        if not vec.any():
            continue
        pt = ProjPoint.from_raw(field, vec)
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out


# ---- end-to-end


def analyze_section(a, b, field, seed, H=None, hyperplanes=None, n_samples=None, max_degree=DEFAULT_MAX_DEGREE, workers=1, n_points=20):
    """section_project, interpolate_QH and classify_QH; returns a report dict."""
    dim = a + b
    if n_samples is None:
        n_samples = required_samples(dim, max_degree)
    setup, samples = section_project(a, b, H, field, n_samples, seed, hyperplanes=hyperplanes, workers=workers)
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "section",
        "a": a,
        "b": b,
        "field": field.describe(),
        "seed": int(seed),
        "H": linalg.to_jsonable(field, setup.H),
        "hyperplanes": setup.center.hyperplanes.to_json(),
        "dim_L": setup.dim_L,
        "dim_LH": setup.dim_LH,
        "generic_H": bool(setup.generic),
        "below_range": a == 1 and b == 1,
        "n_samples": len(samples),
        "max_degree": max_degree,
    }
    try:
        model = interpolate_QH(samples, max_degree, seed=seed)
    except NoEquationFound as exc:
        report.update({"equation": None, "degree_candidate": None, "degree_oracle": None, "error": str(exc)})
        return report
    satisfied = all(int(evaluate(model.equation, s.coords)) == 0 for s in samples)
    cls = classify_QH(model, field, seed, n_points=n_points)
    report.update(
        {
            "equation": model.equation.to_text(),
            "nullities": {str(k): v for k, v in sorted(model.nullities.items())},
            "degree_candidate": model.degree,
            "degree_oracle": model.degree_oracle,
            "oracle_extension_degree": model.oracle_extension,
            "degrees_agree": model.degree == model.degree_oracle,
            "samples_satisfy_equation": bool(satisfied),
            "classification": cls.kind,
            "lines_found_fraction": None if isinstance(cls, Quadric) else cls.lines_found,
            "line_points_tested": None if isinstance(cls, Quadric) else cls.points_tested,
        }
    )
    return report
