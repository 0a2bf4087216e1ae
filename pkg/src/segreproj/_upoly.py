"""Dense univariate polynomials over F_p as coefficient lists, lowest degree first.

Used for extension-field moduli, the irreducibility test and root counting.
The zero polynomial is the empty list.
"""
from math import lcm


def trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def deg(f):
    return len(f) - 1


def add(f, g, p):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)])


def sub(f, g, p):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim([c % p for c in out])


def scale(f, c, p):
    return trim([a * c % p for a in f])


def divmod_(f, g, p):
    g = trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = trim(f)
    inv = pow(g[-1], -1, p)
    q = [0] * max(0, len(f) - len(g) + 1)
    r = list(f)
    dg = len(g) - 1
    for i in range(len(f) - len(g), -1, -1):
        c = r[i + dg] * inv % p
        q[i] = c
        if c:
            for j, b in enumerate(g):
                r[i + j] = (r[i + j] - c * b) % p
    return trim(q), trim(r[:dg])


def mod(f, g, p):
    return divmod_(f, g, p)[1]


def monic(f, p):
    f = trim(f)
    if not f:
        return f
    return scale(f, pow(f[-1], -1, p), p)


def gcd(f, g, p):
    f, g = trim(f), trim(g)
    while g:
        f, g = g, mod(f, g, p)
    return monic(f, p)


def egcd(f, g, p):
    """Return ``(d, s, t)`` with ``s*f + t*g = d`` and ``d`` monic."""
    r0, r1 = trim(f), trim(g)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    if not r0:
        return [], [], []
    c = pow(r0[-1], -1, p)
    return scale(r0, c, p), scale(s0, c, p), scale(t0, c, p)


def powmod(f, e, m, p):
    result = [1]
    base = mod(f, m, p)
    while e:
        if e & 1:
            result = mod(mul(result, base, p), m, p)
        base = mod(mul(base, base, p), m, p)
        e >>= 1
    return mod(result, m, p)


def frobenius_power_x(m, p, times):
    """``x ** (p ** times) mod m`` by repeated p-th powering."""
    x = mod([0, 1], m, p)
    for _ in range(times):
        x = powmod(x, p, m, p)
    return x


def evaluate(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def derivative(f, p):
    return trim([i * c % p for i, c in enumerate(f)][1:])


def _divisors(k):
    return [d for d in range(1, k + 1) if k % d == 0]


def is_irreducible(m, p):
    """Irreducibility of a degree-k polynomial over F_p.

    ``m`` is irreducible iff it divides ``x^(p^k) - x`` and is coprime to
    ``x^(p^d) - x`` for every proper divisor ``d`` of ``k`` (``d = 1`` is the
    no-roots test).
    """
    m = trim(m)
    k = deg(m)
    if k < 1:
        return False
    if k == 1:
        return True
    for d in _divisors(k):
        if d == k:
            continue
        h = sub(frobenius_power_x(m, p, d), [0, 1], p)
        if deg(gcd(m, h, p)) > 0:
            return False
    return not sub(frobenius_power_x(m, p, k), [0, 1], p)


def count_roots_in_extension(f, p, e=None):
    """Count roots of ``f`` with multiplicity in F_{p^e}.

    By default ``e = lcm(1..deg f)``, an extension over which ``f`` splits.
    Returns ``(count, e)``.
    """
    f = trim(f)
    if not f:
        raise ValueError("zero polynomial has every element as a root")
    if e is None:
        e = lcm(*range(1, max(1, deg(f)) + 1))
    total = 0
    h = monic(f, p)
    while deg(h) > 0:
        split = gcd(h, sub(frobenius_power_x(h, p, e), [0, 1], p), p)
        if deg(split) <= 0:
            break
        total += deg(split)
        h, rem = divmod_(h, split, p)
        assert not rem
        h = monic(h, p)
    return total, e
