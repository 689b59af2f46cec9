"""Dense univariate polynomial arithmetic over the rationals.

Polynomials are lists of ``Fraction`` coefficients, lowest degree first,
with no trailing zeros; ``[]`` is the zero polynomial.  These kernels back
the cyclotomic field arithmetic and the coefficient-field handling of
newform data, so everything here is exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import divisors

Poly = list  # list[Fraction], lowest degree first, trimmed

_ZERO = Fraction(0)
_ONE = Fraction(1)


def trim(f: list) -> list:
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: list) -> int:
    """Degree with the convention deg 0 = -1."""
    return len(f) - 1


def from_ints(coeffs) -> list:
    return trim([Fraction(c) for c in coeffs])


def constant(c) -> list:
    c = Fraction(c)
    return [c] if c else []


def add(f: list, g: list) -> list:
    n = max(len(f), len(g))
    out = [_ZERO] * n
    for i, c in enumerate(f):
        out[i] += c
    for i, c in enumerate(g):
        out[i] += c
    return trim(out)


def neg(f: list) -> list:
    return [-c for c in f]


def sub(f: list, g: list) -> list:
    return add(f, neg(g))


def mul(f: list, g: list) -> list:
    if not f or not g:
        return []
    out = [_ZERO] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return trim(out)


def scale(f: list, c) -> list:
    c = Fraction(c)
    if not c:
        return []
    return [a * c for a in f]


def shift(f: list, n: int) -> list:
    """Multiply by x**n."""
    if not f:
        return []
    return [_ZERO] * n + list(f)


def divmod_poly(f: list, g: list) -> tuple[list, list]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    q = [_ZERO] * max(0, len(f) - len(g) + 1)
    inv_lead = _ONE / g[-1]
    while len(f) >= len(g):
        c = f[-1] * inv_lead
        d = len(f) - len(g)
        if c:
            q[d] = c
            for i, b in enumerate(g):
                f[d + i] -= c * b
        f.pop()
    return trim(q), trim(f)


def mod(f: list, g: list) -> list:
    return divmod_poly(f, g)[1]


def evaluate(f: list, x):
    acc = _ZERO
    for c in reversed(f):
        acc = acc * x + c
    return acc


def monic(f: list) -> list:
    if not f:
        return []
    return scale(f, _ONE / f[-1])


def derivative(f: list) -> list:
    return trim([i * c for i, c in enumerate(f)][1:])


def gcd(f: list, g: list) -> list:
    while g:
        f, g = g, mod(f, g)
    return monic(f)


def ext_gcd(f: list, g: list) -> tuple[list, list, list]:
    """Return (u, v, d) with u*f + v*g = d, d the monic gcd."""
    r0, r1 = list(f), list(g)
    u0, u1 = [_ONE], []
    v0, v1 = [], [_ONE]
    while r1:
        q, r = divmod_poly(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, sub(u0, mul(q, u1))
        v0, v1 = v1, sub(v0, mul(q, v1))
    if not r0:
        return [], [], []
    lead = r0[-1]
    inv = _ONE / lead
    return scale(u0, inv), scale(v0, inv), scale(r0, inv)


def resultant(f: list, g: list) -> Fraction:
    """Res(f, g), normalised so that for monic f it equals the product of
    g over the roots of f."""
    if not f or not g:
        return _ZERO
    sign = 1
    acc = _ONE
    while True:
        if degree(g) == 0:
            return sign * acc * g[0] ** degree(f)
        r = mod(f, g)
        if not r:
            return _ZERO
        acc *= g[-1] ** (degree(f) - degree(r))
        if degree(f) % 2 == 1 and degree(g) % 2 == 1:
            sign = -sign
        f, g = g, r


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first.

    Built by exact division of x**n - 1 by the proper-divisor cyclotomics.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    f = [_ZERO] * (n + 1)
    f[0], f[n] = Fraction(-1), _ONE
    f = trim(f)
    for d in divisors(n):
        if d < n:
            q, r = divmod_poly(f, list(cyclotomic_poly(d)))
            assert not r
            f = q
    return tuple(f)
