"""Exact scalar fields: the rationals, prime fields F_p and extensions F_{p^k}.

A field handle (``RationalField``, ``PrimeField``, ``ExtensionField``) is a
value: two handles with the same parameters compare equal and elements of
equal handles mix freely.  Elements are immutable and canonical (reduced
fractions, residues in ``[0, p)``, reduced polynomial representatives), so
equality is structural.

Bulk data lives in numpy arrays.  Over F_p the arrays hold ``int64``
residues so the compiled kernels can run on them; over Q and F_{p^k} they
are ``object`` arrays of elements.  ``to_raw`` / ``to_elem`` convert between
the two views.
"""
import os
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _upoly
from .errors import DivisionByZero, HeightExceeded, MixedFields, NotPrime
from .kernels import MAX_PRIME

DEFAULT_MAX_BITS = 1_000_000


def is_prime(n):
    if n < 2:
        return False
    from sympy import isprime

    return bool(isprime(n))


# --------------------------------------------------------------------------
# Q


class Rational(Fraction):
    """A reduced fraction that refuses to grow beyond a bit-length bound."""

    __slots__ = ("_bound",)

    def __new__(cls, numerator=0, denominator=None, bound=DEFAULT_MAX_BITS):
        self = super().__new__(cls, numerator, denominator)
        self._bound = bound
        if self._numerator.bit_length() + self._denominator.bit_length() > bound:
            raise HeightExceeded(
                f"rational of {self._numerator.bit_length() + self._denominator.bit_length()} "
                f"bits exceeds the bound of {bound}"
            )
        return self

    def _wrap(self, value, other=None):
        if value is NotImplemented:
            return value
        bound = self._bound
        if isinstance(other, Rational):
            bound = min(bound, other._bound)
        return Rational(value.numerator, value.denominator, bound)

    @staticmethod
    def _check(other):
        if isinstance(other, (FpElem, FqElem)):
            raise MixedFields("cannot combine a rational with a finite-field element")
        if isinstance(other, float):
            raise TypeError("floats are not exact scalars")

    def __add__(self, other):
        self._check(other)
        return self._wrap(Fraction.__add__(self, other), other)

    def __radd__(self, other):
        self._check(other)
        return self._wrap(Fraction.__radd__(self, other), other)

    def __sub__(self, other):
        self._check(other)
        return self._wrap(Fraction.__sub__(self, other), other)

    def __rsub__(self, other):
        self._check(other)
        return self._wrap(Fraction.__rsub__(self, other), other)

    def __mul__(self, other):
        self._check(other)
        return self._wrap(Fraction.__mul__(self, other), other)

    def __rmul__(self, other):
        self._check(other)
        return self._wrap(Fraction.__rmul__(self, other), other)

    def __truediv__(self, other):
        self._check(other)
        if other == 0:
            raise DivisionByZero("division by zero in Q")
        return self._wrap(Fraction.__truediv__(self, other), other)

    def __rtruediv__(self, other):
        self._check(other)
        if self == 0:
            raise DivisionByZero("division by zero in Q")
        return self._wrap(Fraction.__rtruediv__(self, other), other)

    def __neg__(self):
        return Rational(-self._numerator, self._denominator, self._bound)

    def __pos__(self):
        return self

    def __pow__(self, e):
        if not isinstance(e, int):
            raise TypeError("only integer powers are exact")
        if e < 0 and self == 0:
            raise DivisionByZero("0 has no inverse")
        return self._wrap(Fraction.__pow__(self, e))

    def inverse(self):
        if self == 0:
            raise DivisionByZero("0 has no inverse")
        return Rational(self._denominator, self._numerator, self._bound)

    def __hash__(self):
        return Fraction.__hash__(self)

    def __eq__(self, other):
        if isinstance(other, (FpElem, FqElem)):
            return False
        return Fraction.__eq__(self, other)

    def __repr__(self):
        return f"Rational({self._numerator}, {self._denominator})"

    def __reduce__(self):
        return (Rational, (self._numerator, self._denominator, self._bound))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def bits(self):
        return self._numerator.bit_length() + self._denominator.bit_length()


class RationalField:
    """The field Q with a guard on coefficient growth.

    The guard bound comes from ``max_bits`` or the ``SEGRE_MAX_BITS``
    environment variable, defaulting to one million bits.
    """

    is_finite = False
    characteristic = 0
    order = None
    dtype = object

    def __init__(self, max_bits=None):
        if max_bits is None:
            max_bits = int(os.environ.get("SEGRE_MAX_BITS", DEFAULT_MAX_BITS))
        self.max_bits = int(max_bits)
        self.zero = Rational(0, 1, self.max_bits)
        self.one = Rational(1, 1, self.max_bits)

    def __call__(self, x, denominator=None):
        if isinstance(x, (FpElem, FqElem)):
            raise MixedFields("finite-field element cannot be coerced into Q")
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        if denominator is None:
            if isinstance(x, Rational) and x._bound == self.max_bits:
                return x
            f = Fraction(x)
            return Rational(f.numerator, f.denominator, self.max_bits)
        return Rational(x, denominator, self.max_bits)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"

    def spec(self):
        return "Q"

    def describe(self):
        return {"field": "Q", "max_bits": self.max_bits}

    def to_raw(self, x):
        return self(x)

    def to_elem(self, raw):
        return raw

    def array(self, data):
        arr = np.array(data, dtype=object)
        flat = arr.reshape(-1)
        for i, v in enumerate(flat):
            flat[i] = self(v)
        return arr

    def zeros(self, shape):
        return np.full(shape, self.zero, dtype=object)

    def identity(self, n):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def random(self, stream, height=10):
        """Random rational with numerator and denominator of absolute value <= height."""
        num = stream.integers(-height, height + 1)
        den = stream.integers(1, height + 1)
        return Rational(num, den, self.max_bits)

    def random_array(self, stream, size, height=10):
        nums = stream.integers(-height, height + 1, size=size)
        dens = stream.integers(1, height + 1, size=size)
        out = np.empty(size, dtype=object)
        flat = out.reshape(-1)
        for i, (n, d) in enumerate(zip(nums.reshape(-1), dens.reshape(-1))):
            flat[i] = Rational(int(n), int(d), self.max_bits)
        return out

    def frobenius(self, x):
        raise TypeError("Frobenius is only defined over finite fields")

    def inv(self, x):
        return self(x).inverse()


# --------------------------------------------------------------------------
# F_p


class FpElem:
    """A residue modulo a prime."""

    __slots__ = ("value", "field")

    def __init__(self, value, field):
        self.value = value
        self.field = field

    def _coerce(self, other):
        if isinstance(other, FpElem):
            if other.field.p != self.field.p:
                raise MixedFields(f"F_{self.field.p} and F_{other.field.p}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        if isinstance(other, (Fraction, FqElem)):
            raise MixedFields(f"cannot combine an F_{self.field.p} element with {other!r}")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem((self.value + o) % self.field.p, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem((self.value - o) % self.field.p, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem((o - self.value) % self.field.p, self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem(self.value * o % self.field.p, self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o == 0:
            raise DivisionByZero(f"division by zero in F_{self.field.p}")
        return FpElem(self.value * pow(o, -1, self.field.p) % self.field.p, self.field)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FpElem(o, self.field) / self

    def __neg__(self):
        return FpElem(-self.value % self.field.p, self.field)

    def __pos__(self):
        return self

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FpElem(pow(self.value, e, self.field.p), self.field)

    def inverse(self):
        if self.value == 0:
            raise DivisionByZero(f"0 has no inverse in F_{self.field.p}")
        return FpElem(pow(self.value, -1, self.field.p), self.field)

    def frobenius(self):
        return self

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.p
        if isinstance(other, FqElem):
            return other == self
        return False

    def __hash__(self):
        return hash(("Fp", self.field.p, self.value))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return str(self.value)

    def __reduce__(self):
        return (FpElem, (self.value, self.field))


class PrimeField:
    """The prime field F_p, ``p < 2**31``."""

    is_finite = True
    dtype = np.int64
    degree = 1

    def __init__(self, p):
        p = int(p)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if p > MAX_PRIME:
            raise ValueError(f"prime fields are limited to p < 2**31, got {p}")
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero = FpElem(0, self)
        self.one = FpElem(1, self)

    @property
    def prime_field(self):
        return self

    def __call__(self, x):
        if isinstance(x, FpElem):
            if x.field.p != self.p:
                raise MixedFields(f"F_{x.field.p} element into F_{self.p}")
            return x
        if isinstance(x, FqElem):
            raise MixedFields("extension-field element cannot be coerced into a prime field")
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"denominator divisible by {self.p}")
            return FpElem(x.numerator * pow(x.denominator, -1, self.p) % self.p, self)
        if isinstance(x, (int, np.integer)):
            return FpElem(int(x) % self.p, self)
        raise TypeError(f"cannot coerce {x!r} into F_{self.p}")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F_{self.p}"

    def __reduce__(self):
        return (prime_field, (self.p,))

    def spec(self):
        return f"Fp:{self.p}"

    def describe(self):
        return {"field": self.spec(), "p": self.p}

    def to_raw(self, x):
        return self(x).value

    def to_elem(self, raw):
        return FpElem(int(raw) % self.p, self)

    def array(self, data):
        arr = np.array(data, dtype=object)
        flat = arr.reshape(-1)
        out = np.empty(flat.shape, dtype=np.int64)
        for i, v in enumerate(flat):
            out[i] = self.to_raw(v)
        return out.reshape(arr.shape)

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n):
        return np.eye(n, dtype=np.int64)

    def random(self, stream):
        return FpElem(stream.integers(0, self.p), self)

    def random_array(self, stream, size):
        return stream.integers(0, self.p, size=size)

    def frobenius(self, x):
        return self(x)

    def frobenius_array(self, A):
        return np.asarray(A, dtype=np.int64).copy()

    def inv(self, x):
        return self(x).inverse()

    def elements(self):
        for v in range(self.p):
            yield FpElem(v, self)


@lru_cache(maxsize=None)
def prime_field(p):
    return PrimeField(p)


# --------------------------------------------------------------------------
# F_{p^k}


class FqElem:
    """An element of F_p[t]/(m(t)), stored as ``k`` coefficients, lowest first."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs, field):
        self.coeffs = coeffs
        self.field = field

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.field != self.field:
                raise MixedFields(f"{self.field!r} and {other.field!r}")
            return other.coeffs
        if isinstance(other, FpElem):
            if other.field.p != self.field.p:
                raise MixedFields(f"{self.field!r} and F_{other.field.p}")
            return self.field._const(other.value)
        if isinstance(other, (int, np.integer)):
            return self.field._const(int(other))
        if isinstance(other, Fraction):
            raise MixedFields("cannot combine a rational with an extension-field element")
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FqElem(tuple((a + b) % p for a, b in zip(self.coeffs, o)), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FqElem(tuple((a - b) % p for a, b in zip(self.coeffs, o)), self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = self.field.p
        return FqElem(tuple((b - a) % p for a, b in zip(self.coeffs, o)), self.field)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FqElem(self.field._mul(self.coeffs, o), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * FqElem(o, self.field).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FqElem(o, self.field) * self.inverse()

    def __neg__(self):
        p = self.field.p
        return FqElem(tuple(-a % p for a in self.coeffs), self.field)

    def __pos__(self):
        return self

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if not any(self.coeffs):
            raise DivisionByZero(f"0 has no inverse in {self.field!r}")
        F = self.field
        d, s, _ = _upoly.egcd(list(self.coeffs), list(F.modulus), F.p)
        return FqElem(F._pad(s), F)

    def frobenius(self):
        """``x ** p`` by square-and-multiply."""
        return self ** self.field.p

    def is_prime_subfield(self):
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        if isinstance(other, FqElem):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, FpElem):
            return other.field.p == self.field.p and self.coeffs == self.field._const(other.value)
        if isinstance(other, (int, np.integer)):
            return self.coeffs == self.field._const(int(other))
        return False

    def __hash__(self):
        if self.is_prime_subfield():
            return hash(("Fp", self.field.p, self.coeffs[0]))
        return hash(("Fq", self.field.p, self.field.modulus, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms) if terms else "0"

    def __reduce__(self):
        return (FqElem, (self.coeffs, self.field))


class ExtensionField:
    """F_{p^k} = F_p[t]/(m(t)) for a monic irreducible ``m`` of degree ``k >= 2``.

    ``modulus`` is the coefficient list of ``m``, lowest degree first.
    """

    is_finite = True
    dtype = object

    def __init__(self, p, modulus, check=True):
        p = int(p)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        m = tuple(int(c) % p for c in modulus)
        while m and m[-1] == 0:
            m = m[:-1]
        if len(m) < 3 or m[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 2")
        if check and not _upoly.is_irreducible(list(m), p):
            raise ValueError(f"modulus {list(m)} is reducible over F_{p}")
        self.p = p
        self.characteristic = p
        self.modulus = m
        self.degree = len(m) - 1
        self.order = p**self.degree
        self._tail = [(-c) % p for c in m[:-1]]
        self.zero = FqElem(self._const(0), self)
        self.one = FqElem(self._const(1), self)
        self.gen = FqElem(tuple(1 if i == 1 else 0 for i in range(self.degree)), self)

    @property
    def prime_field(self):
        return prime_field(self.p)

    def _const(self, c):
        return (c % self.p,) + (0,) * (self.degree - 1)

    def _pad(self, coeffs):
        coeffs = list(coeffs)[: self.degree]
        return tuple(coeffs + [0] * (self.degree - len(coeffs)))

    def _mul(self, a, b):
        p, k = self.p, self.degree
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        tail = self._tail
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i] % p
            if c:
                base = i - k
                for j in range(k):
                    prod[base + j] += c * tail[j]
        return tuple(c % p for c in prod[:k])

    def __call__(self, x):
        if isinstance(x, FqElem):
            if x.field != self:
                raise MixedFields(f"{x.field!r} element into {self!r}")
            return x
        if isinstance(x, FpElem):
            if x.field.p != self.p:
                raise MixedFields(f"F_{x.field.p} element into {self!r}")
            return FqElem(self._const(x.value), self)
        if isinstance(x, (int, np.integer)):
            return FqElem(self._const(int(x)), self)
        if isinstance(x, (list, tuple)):
            return FqElem(self._pad([int(c) % self.p for c in x]), self)
        if isinstance(x, Fraction):
            raise MixedFields("rational cannot be coerced into a finite field")
        raise TypeError(f"cannot coerce {x!r} into {self!r}")

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and other.p == self.p and other.modulus == self.modulus

    def __hash__(self):
        return hash(("Fq", self.p, self.modulus))

    def __repr__(self):
        return f"F_{self.p}^{self.degree}[{list(self.modulus)}]"

    def __reduce__(self):
        return (extension_field, (self.p, self.modulus))

    def spec(self):
        return f"Fq:{self.p}:{self.degree}"

    def describe(self):
        return {"field": self.spec(), "p": self.p, "k": self.degree, "modulus": list(self.modulus)}

    def to_raw(self, x):
        return self(x)

    def to_elem(self, raw):
        return raw

    def array(self, data):
        arr = np.empty(np.shape(np.array(data, dtype=object)), dtype=object)
        src = np.array(data, dtype=object)
        if src.ndim and src.shape != arr.shape:
            raise ValueError("ragged data")
        flat, sflat = arr.reshape(-1), src.reshape(-1)
        for i, v in enumerate(sflat):
            flat[i] = self(v)
        return arr

    def zeros(self, shape):
        return np.full(shape, self.zero, dtype=object)

    def identity(self, n):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def random(self, stream):
        return FqElem(tuple(int(c) for c in stream.integers(0, self.p, size=self.degree)), self)

    def random_array(self, stream, size):
        raw = stream.integers(0, self.p, size=tuple(np.atleast_1d(size)) + (self.degree,))
        out = np.empty(raw.shape[:-1], dtype=object)
        flat, rflat = out.reshape(-1), raw.reshape(-1, self.degree)
        for i, row in enumerate(rflat):
            flat[i] = FqElem(tuple(int(c) for c in row), self)
        return out

    def frobenius(self, x):
        return self(x).frobenius()

    def frobenius_array(self, A):
        out = np.empty(np.shape(A), dtype=object)
        flat, src = out.reshape(-1), np.asarray(A, dtype=object).reshape(-1)
        for i, v in enumerate(src):
            flat[i] = v.frobenius()
        return out

    def inv(self, x):
        return self(x).inverse()

    def elements(self):
        """All elements, ordered by their coefficient vectors read as base-p integers."""
        p, k = self.p, self.degree
        for n in range(self.order):
            coeffs = []
            for _ in range(k):
                n, r = divmod(n, p)
                coeffs.append(r)
            yield FqElem(tuple(coeffs), self)

    def in_prime_subfield(self, x):
        return self(x).is_prime_subfield()

    def to_prime(self, x):
        x = self(x)
        if not x.is_prime_subfield():
            raise ValueError(f"{x!r} is not in the prime subfield")
        return FpElem(x.coeffs[0], self.prime_field)


@lru_cache(maxsize=None)
def extension_field(p, modulus):
    return ExtensionField(p, modulus)


# --------------------------------------------------------------------------
# construction helpers


def make_extension_field(p, k, seed=0):
    """Deterministic search for a monic irreducible degree-``k`` modulus over F_p.

    Candidates are drawn from a stream keyed by ``seed``; ``k = 1`` returns
    the prime field itself.
    """
    from .rng import Stream

    p, k = int(p), int(k)
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise ValueError("extension degree must be positive")
    if k == 1:
        return prime_field(p)
    stream = Stream(seed, 0x4D4F44)  # "MOD"
    while True:
        tail = [int(c) for c in stream.integers(0, p, size=k)]
        m = tail + [1]
        if _upoly.is_irreducible(m, p):
            return extension_field(p, tuple(m))


def parse_field(spec, seed=0):
    """Parse "Q", "Fp:<p>", "Fq:<p>:<k>" or "Fq:<p>:<k>:<c0,c1,...,1>"."""
    spec = spec.strip()
    if spec == "Q":
        return RationalField()
    parts = spec.split(":")
    if parts[0] == "Fp" and len(parts) == 2:
        return prime_field(int(parts[1]))
    if parts[0] == "Fq" and len(parts) in (3, 4):
        p, k = int(parts[1]), int(parts[2])
        if len(parts) == 4:
            coeffs = tuple(int(c) for c in parts[3].split(","))
            if len(coeffs) != k + 1:
                raise ValueError(f"modulus of {spec!r} does not have degree {k}")
            if k == 1:
                return prime_field(p)
            return extension_field(p, coeffs)
        return make_extension_field(p, k, seed)
    raise ValueError(f"unrecognised field spec {spec!r}")


def field_of(x):
    """Field handle of an element, or None for plain ints."""
    if isinstance(x, (FpElem, FqElem)):
        return x.field
    if isinstance(x, Rational):
        return RationalField(x._bound)
    if isinstance(x, Fraction):
        return RationalField()
    return None
