"""Sparse multivariate polynomials with variables grouped into blocks.

Each block holds the homogeneous coordinates of one projective factor, so a
polynomial on ``P^a x P^b`` has blocks ``(a+1, b+1)``.  Terms are stored in a
dict keyed by exponent tuples; zero coefficients are never stored.

Canonical term order: blocks in factor order, graded lexicographic inside
each block (``x0^2 > x0*x1 > x1^2 > ...``), leading term first.
"""
import re
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from . import kernels, linalg
from .errors import DimensionMismatch, HeterogeneousTuple, SingularMatrix
from .scalars import ExtensionField, PrimeField

PREFIXES = "xyzwuvabcdefghijklmnopqrs"


@dataclass(frozen=True)
class NotHomogeneous:
    """Verdict of :func:`multidegree_check` for a non-multihomogeneous polynomial."""

    reason: str = ""


@dataclass(frozen=True)
class NoUniqueEquation:
    """Verdict of :func:`interpolate_hypersurface` when the null space is not a line."""

    nullity: int
    degree: int


def _block_slices(blocks):
    out, start = [], 0
    for size in blocks:
        out.append(slice(start, start + size))
        start += size
    return out


def term_key(exps, blocks):
    """Sort key realising the canonical order (larger key = earlier term)."""
    key = []
    for sl in _block_slices(blocks):
        part = exps[sl]
        key.append((sum(part), part))
    return tuple(key)


class Polynomial:
    __slots__ = ("field", "blocks", "terms")

    def __init__(self, field, blocks, terms=None):
        self.field = field
        self.blocks = tuple(int(b) for b in blocks)
        n = sum(self.blocks)
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionMismatch(f"monomial {exps} has {len(exps)} exponents, expected {n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = field(c)
            if c != 0:
                clean[exps] = c
        self.terms = clean

    # ---- constructors

    @classmethod
    def _raw(cls, field, blocks, terms):
        self = cls.__new__(cls)
        self.field = field
        self.blocks = blocks
        self.terms = terms
        return self

    @classmethod
    def zero(cls, field, blocks):
        return cls._raw(field, tuple(blocks), {})

    @classmethod
    def constant(cls, field, blocks, c):
        return cls(field, blocks, {(0,) * sum(blocks): c})

    @classmethod
    def variable(cls, field, blocks, index):
        n = sum(blocks)
        if not 0 <= index < n:
            raise DimensionMismatch(f"variable {index} out of range for {n} variables")
        exps = tuple(1 if i == index else 0 for i in range(n))
        return cls._raw(field, tuple(blocks), {exps: field.one})

    @classmethod
    def linear_form(cls, field, blocks, coeffs, offset=0):
        """``sum coeffs[i] * var[offset + i]``."""
        n = sum(blocks)
        terms = {}
        for i, c in enumerate(coeffs):
            c = field.to_elem(c) if not hasattr(c, "field") else c
            if c != 0:
                exps = [0] * n
                exps[offset + i] = 1
                terms[tuple(exps)] = field(c)
        return cls._raw(field, tuple(blocks), terms)

    # ---- basic properties

    @property
    def nvars(self):
        return sum(self.blocks)

    def is_zero(self):
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: term_key(kv[0], self.blocks), reverse=True)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self.blocks == other.blocks and self.terms == other.terms
        if isinstance(other, int) and other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.blocks, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    # ---- arithmetic

    def _check(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial.constant(self.field, self.blocks, other)
        if other.blocks != self.blocks:
            raise DimensionMismatch(f"block structures {self.blocks} and {other.blocks} differ")
        if other.field != self.field:
            from .errors import MixedFields

            raise MixedFields(f"{self.field!r} and {other.field!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e)
            s = c if s is None else s + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return Polynomial._raw(self.field, self.blocks, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.field, self.blocks, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.field(other)
            if c == 0:
                return Polynomial.zero(self.field, self.blocks)
            return Polynomial._raw(self.field, self.blocks, {e: v * c for e, v in self.terms.items()})
        other = self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e)
                terms[e] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._raw(self.field, self.blocks, {e: c for e, c in terms.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.field, self.blocks, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derivative(self, index):
        terms = {}
        for e, c in self.terms.items():
            if e[index]:
                d = list(e)
                d[index] -= 1
                terms[tuple(d)] = c * e[index]
        return Polynomial._raw(self.field, self.blocks, {e: c for e, c in terms.items() if c != 0})

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.field.zero)

    # ---- evaluation

    def __call__(self, point):
        return evaluate(self, point)

    # ---- text format

    def to_text(self, prefixes=PREFIXES):
        if not self.terms:
            return "0"
        names = variable_names(self.blocks, prefixes)
        parts = []
        for exps, c in self.sorted_terms():
            mono = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]
            neg, ctext = _coeff_text(c)
            if not mono:
                body = ctext
            elif ctext == "1":
                body = "*".join(mono)
            else:
                body = "*".join([ctext] + mono)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    @classmethod
    def parse(cls, text, field, blocks, prefixes=PREFIXES):
        return parse_polynomial(text, field, blocks, prefixes)


def variable_names(blocks, prefixes=PREFIXES):
    if len(blocks) > len(prefixes):
        raise ValueError(f"{len(blocks)} blocks but only {len(prefixes)} prefixes")
    return [f"{prefixes[b]}{i}" for b, size in enumerate(blocks) for i in range(size)]


def _coeff_text(c):
    from fractions import Fraction

    from .scalars import FqElem

    if isinstance(c, Fraction):
        return (c < 0), str(abs(c))
    if isinstance(c, FqElem):
        s = repr(c)
        return False, (f"({s})" if ("+" in s or "*" in s) else s)
    return False, str(int(c))


# ---- parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z])(\d*)|(\^)|([-+*/()]))")


def parse_polynomial(text, field, blocks, prefixes=PREFIXES):
    """Parse the textual format (``3*x0^2*y1 + 2*x1*y0``).

    Accepts ``+``, ``-``, ``*``, ``^``, parentheses, integer constants,
    ``/`` by integer constants, and ``t`` for the generator of an extension
    field.
    """
    blocks = tuple(blocks)
    names = {n: i for i, n in enumerate(variable_names(blocks, prefixes))}
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {text[pos:]!r}")
        num, letter, idx, caret, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif letter is not None:
            name = letter + idx
            if name == "t" and isinstance(field, ExtensionField):
                tokens.append(("poly", Polynomial.constant(field, blocks, field.gen)))
            elif name in names:
                tokens.append(("poly", Polynomial.variable(field, blocks, names[name])))
            else:
                raise ValueError(f"unknown variable {name!r}")
        elif caret:
            tokens.append(("op", "^"))
        else:
            tokens.append(("op", op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    state = {"i": 0}

    def peek():
        return tokens[state["i"]] if state["i"] < len(tokens) else (None, None)

    def take():
        tok = peek()
        state["i"] += 1
        return tok

    def as_poly(v):
        return v if isinstance(v, Polynomial) else Polynomial.constant(field, blocks, v)

    def expr():
        sign = 1
        if peek() == ("op", "-"):
            take()
            sign = -1
        elif peek() == ("op", "+"):
            take()
        val = as_poly(term()) * sign
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = as_poly(term())
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = power()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = power()
            if op == "*":
                val = as_poly(val) * rhs if isinstance(rhs, Polynomial) else as_poly(val) * rhs
            else:
                if isinstance(rhs, Polynomial):
                    if rhs.total_degree() > 0:
                        raise ValueError("division by a non-constant")
                    rhs = rhs.coefficient((0,) * sum(blocks))
                val = as_poly(val) * field.inv(field(rhs))
        return val

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, e = take()
            if kind != "num":
                raise ValueError("exponent must be an integer")
            base = as_poly(base) ** e
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return val
        if kind == "poly":
            return val
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return inner
        if (kind, val) == ("op", "-"):
            return as_poly(atom()) * -1
        raise ValueError(f"unexpected token {val!r}")

    if not tokens:
        raise ValueError("empty polynomial text")
    result = as_poly(expr())
    if state["i"] != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    return result


# ---- operations


def point_coords(point):
    """Flat coordinate sequence of a ProjPoint, MultiPoint or array-like."""
    if hasattr(point, "factors"):
        return np.concatenate([np.asarray(f.coords) for f in point.factors])
    if hasattr(point, "coords"):
        return np.asarray(point.coords)
    return np.asarray(point, dtype=object)


def evaluate(f, point):
    """Exact value of ``f`` at a coordinate vector."""
    xs = point_coords(point)
    if len(xs) != f.nvars:
        raise DimensionMismatch(f"point has {len(xs)} coordinates, polynomial has {f.nvars} variables")
    F = f.field
    if isinstance(F, PrimeField):
        p = F.p
        xs = [int(F.to_raw(x)) for x in xs]
        acc = 0
        for exps, c in f.terms.items():
            t = c.value
            for x, e in zip(xs, exps):
                if e:
                    t = t * pow(x, e, p) % p
            acc += t
        return F.to_elem(acc % p)
    xs = [F(x) for x in xs]
    acc = F.zero
    for exps, c in f.terms.items():
        t = c
        for x, e in zip(xs, exps):
            if e:
                t = t * x**e
        acc = acc + t
    return acc


def multidegree_check(f):
    """Per-block degree vector, or a :class:`NotHomogeneous` verdict."""
    if not f.terms:
        return NotHomogeneous("the zero polynomial has no degree")
    slices = _block_slices(f.blocks)
    degs = None
    for exps in f.terms:
        d = tuple(sum(exps[sl]) for sl in slices)
        if degs is None:
            degs = d
        elif d != degs:
            return NotHomogeneous(f"terms of multidegree {degs} and {d}")
    return degs


def _substitute(f, g, blocks, field):
    result = {}
    powers = {}
    for exps, c in f.terms.items():
        t = Polynomial.constant(field, blocks, c)
        for v, e in enumerate(exps):
            if e:
                key = (v, e)
                if key not in powers:
                    powers[key] = g[v] ** e
                t = t * powers[key]
        for e2, c2 in t.terms.items():
            s = result.get(e2)
            result[e2] = c2 if s is None else s + c2
    return Polynomial._raw(field, tuple(blocks), {e: c for e, c in result.items() if c != 0})


def compose_polytuple(f, g):
    """Substitute the polynomials ``g`` for the variables of ``f``."""
    g = list(g)
    if len(g) != f.nvars:
        raise DimensionMismatch(f"{len(g)} polynomials for {f.nvars} variables")
    if not g:
        raise DimensionMismatch("empty substitution tuple")
    blocks = g[0].blocks
    degs = set()
    for gi in g:
        if gi.blocks != blocks:
            raise HeterogeneousTuple("substituted polynomials have different block structures")
        if gi.field != f.field:
            raise HeterogeneousTuple("substituted polynomials live over different fields")
        if gi.terms:
            d = multidegree_check(gi)
            if isinstance(d, NotHomogeneous):
                raise HeterogeneousTuple(f"component {gi} is not multihomogeneous")
            degs.add(d)
    if len(degs) > 1:
        raise HeterogeneousTuple(f"components have multidegrees {sorted(degs)}")
    return _substitute(f, g, blocks, f.field)


def compose_linear(f, M, block=0):
    """Replace the variables of one block by ``M`` times that block's variables."""
    F = f.field
    slices = _block_slices(f.blocks)
    sl = slices[block]
    size = f.blocks[block]
    M = np.asarray(M, dtype=F.dtype)
    if M.shape != (size, size):
        raise DimensionMismatch(f"matrix of shape {M.shape} for a block of {size} variables")
    if linalg.rank(F, M) != size:
        raise SingularMatrix("coordinate change must be invertible")
    g = [Polynomial.variable(F, f.blocks, v) for v in range(f.nvars)]
    for j in range(size):
        g[sl.start + j] = Polynomial.linear_form(F, f.blocks, [F.to_elem(x) for x in M[j]], offset=sl.start)
    return _substitute(f, g, f.blocks, F)


def monomials_of_degree(nvars, d):
    """Exponent tuples of degree ``d`` in canonical (graded lex, leading first) order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), d):
        exps = [0] * nvars
        for v in combo:
            exps[v] += 1
        out.append(tuple(exps))
    out.sort(key=lambda e: term_key(e, (nvars,)), reverse=True)
    return out


def evaluation_matrix(field, points, exps):
    """``V[i, j]`` = monomial ``j`` evaluated at point ``i`` (raw field entries)."""
    pts = np.asarray(points, dtype=field.dtype)
    exps_arr = np.asarray(exps, dtype=np.int64).reshape(len(exps), -1)
    if isinstance(field, PrimeField):
        return kernels.monomial_matrix_modp(pts, exps_arr, field.p)
    V = field.zeros((pts.shape[0], len(exps)))
    for i, row in enumerate(pts):
        xs = [field(x) for x in row]
        for j, e in enumerate(exps):
            t = field.one
            for x, k in zip(xs, e):
                if k:
                    t = t * x**k
            V[i, j] = t
    return V


def interpolate_hypersurface(points, degree, field=None):
    """Equation of the unique degree-``d`` hypersurface through ``points``.

    Returns the generating polynomial of a one-dimensional null space of the
    evaluation matrix, scaled so its leading coefficient is 1, or a
    :class:`NoUniqueEquation` verdict carrying the null-space dimension.
    """
    rows = [point_coords(pt) for pt in points]
    if not rows:
        raise DimensionMismatch("no points to interpolate")
    if field is None:
        field = points[0].field
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("points live in different projective spaces")
    exps = monomials_of_degree(n, degree)
    V = evaluation_matrix(field, np.array(rows, dtype=field.dtype) if field.dtype is not object else _obj_rows(rows), exps)
    kernel = linalg.nullspace(field, V, ncols=len(exps))
    if kernel.shape[0] != 1:
        return NoUniqueEquation(nullity=int(kernel.shape[0]), degree=degree)
    vec = linalg.normalize_vector(field, kernel[0])
    terms = {e: field.to_elem(c) for e, c in zip(exps, vec)}
    return Polynomial(field, (n,), terms)


def _obj_rows(rows):
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = x
    return out


class RationalMap:
    """A tuple of multihomogeneous polynomials of one common multidegree.

    Represents a map from a product of projective spaces (the block
    structure) to ``P^target_dim``.
    """

    def __init__(self, components, source_blocks=None, target_dim=None):
        comps = list(components)
        if not comps:
            raise DimensionMismatch("a rational map needs at least one component")
        blocks = tuple(source_blocks) if source_blocks is not None else comps[0].blocks
        field = comps[0].field
        degs = set()
        for c in comps:
            if c.blocks != blocks:
                raise HeterogeneousTuple("components disagree on the block structure")
            if c.field != field:
                raise HeterogeneousTuple("components live over different fields")
            if c.terms:
                d = multidegree_check(c)
                if isinstance(d, NotHomogeneous):
                    raise HeterogeneousTuple(f"component {c} is not multihomogeneous")
                degs.add(d)
        if not degs:
            raise ValueError("all components are identically zero")
        if len(degs) > 1:
            raise HeterogeneousTuple(f"components have multidegrees {sorted(degs)}")
        if target_dim is not None and target_dim != len(comps) - 1:
            raise DimensionMismatch(f"{len(comps)} components cannot map to P^{target_dim}")
        self.components = tuple(comps)
        self.source_blocks = blocks
        self.target_dim = len(comps) - 1
        self.field = field
        self.multidegree = degs.pop()

    def evaluate(self, point):
        """Unnormalised image coordinates (raw field entries)."""
        return np.array([self.field.to_raw(evaluate(c, point)) for c in self.components], dtype=self.field.dtype)

    def __call__(self, point):
        from .projgeom import ProjPoint

        return ProjPoint.from_raw(self.field, self.evaluate(point))

    def compose(self, inner):
        """``self`` after ``inner``; ``inner`` must land in this map's source.

        Only single-block sources are supported, matching maps out of a
        projective space.
        """
        if len(self.source_blocks) != 1:
            raise DimensionMismatch("composition needs a single-block source")
        return RationalMap([compose_polytuple(c, inner.components) for c in self.components])

    def __len__(self):
        return len(self.components)

    def __repr__(self):
        return f"RationalMap({[str(c) for c in self.components]})"
