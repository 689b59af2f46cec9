"""Dirichlet characters in the Conrey labelling.

A character mod q is named by a Conrey index a coprime to q (label
"q.a").  Evaluation goes through discrete logarithms on each prime-power
factor of the modulus: odd prime powers use the smallest integer that is
a primitive root mod p and mod p^2 (hence mod every p^e); powers of two
use the {-1, 5} generator pair.  Values are exact roots of unity
(:class:`~eiscong.cyclotomic.CycNum`), and character structure (order,
conductor, parity) is derived from the same local data.

Discrete-log tables are built per prime power and cached; readers may
share them freely, initialisation is idempotent.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from sympy import factorint, primefactors

from .cyclotomic import CycNum
from .errors import NotAMultiple, NotPrimitive, NotSquareFree

_ZERO = Fraction(0)


@lru_cache(maxsize=None)
def _factor(q: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(q).items()))


@lru_cache(maxsize=None)
def conrey_generator(p: int) -> int:
    """Smallest g that generates (Z/p^e)^x for every e >= 1 (p odd)."""
    rads = primefactors(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in rads) and pow(g, p - 1, p * p) != 1:
            return g
        g += 1


@lru_cache(maxsize=None)
def _dlog_table_odd(p: int, e: int) -> dict[int, int]:
    q = p**e
    g = conrey_generator(p)
    table = {}
    acc = 1
    for i in range(q - q // p):
        table[acc] = i
        acc = acc * g % q
    return table


@lru_cache(maxsize=None)
def _dlog_table_two(e: int) -> dict[int, int]:
    """n -> t with n = 5^t mod 2^e over n = 1 mod 4 (e >= 3)."""
    q = 1 << e
    table = {}
    acc = 1
    for t in range(1 << (e - 2)):
        table[acc] = t
        acc = acc * 5 % q
    return table


def _two_decompose(n: int, e: int) -> tuple[int, int]:
    """(s, t) with n = (-1)^s * 5^t mod 2^e, for odd n and e >= 3."""
    q = 1 << e
    n %= q
    if n % 4 == 1:
        return 0, _dlog_table_two(e)[n]
    return 1, _dlog_table_two(e)[(-n) % q]


class DirichletChar:
    """Dirichlet character of given modulus in the Conrey convention."""

    __slots__ = ("modulus", "index", "_local", "_order", "_conductor", "_values")

    def __init__(self, modulus: int, index: int):
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        index %= max(modulus, 1)
        if index == 0:
            index = modulus  # canonical representative in [1, q]
        if modulus == 1:
            index = 1
        if gcd(index, modulus) != 1:
            raise ValueError(f"index {index} not coprime to modulus {modulus}")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "index", index)
        local = []
        for p, e in _factor(modulus):
            if p == 2:
                if e == 1:
                    local.append((2, 1, None))
                elif e == 2:
                    local.append((2, 2, index % 4 == 3))
                else:
                    local.append((2, e, _two_decompose(index, e)))
            else:
                local.append((p, e, _dlog_table_odd(p, e)[index % p**e]))
        object.__setattr__(self, "_local", tuple(local))
        object.__setattr__(self, "_order", None)
        object.__setattr__(self, "_conductor", None)
        object.__setattr__(self, "_values", {})

    def __setattr__(self, *args):
        raise AttributeError("DirichletChar is immutable")

    # -- identification -------------------------------------------------

    @property
    def label(self) -> str:
        return f"{self.modulus}.{self.index}"

    @classmethod
    def from_label(cls, label: str) -> "DirichletChar":
        try:
            q, a = label.split(".")
            return cls(int(q), int(a))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"bad character label {label!r}; expected 'modulus.index'") from exc

    def __eq__(self, other):
        return (isinstance(other, DirichletChar)
                and self.modulus == other.modulus and self.index == other.index)

    def __hash__(self):
        return hash((self.modulus, self.index))

    def __repr__(self):
        return f"chi({self.label})"

    # -- evaluation -------------------------------------------------------

    def exponent(self, n: int) -> Fraction | None:
        """chi(n) = e^(2 pi i * exponent); None encodes the value 0."""
        q = self.modulus
        if q == 1:
            return _ZERO
        n %= q
        if gcd(n, q) != 1:
            return None
        total = _ZERO
        for p, e, data in self._local:
            if p == 2:
                if e == 1:
                    continue
                if e == 2:
                    if data and n % 4 == 3:
                        total += Fraction(1, 2)
                else:
                    sa, ta = data
                    sn, tn = _two_decompose(n, e)
                    total += Fraction(sa * sn, 2) + Fraction(ta * tn, 1 << (e - 2))
            else:
                pe = p**e
                ln = _dlog_table_odd(p, e)[n % pe]
                total += Fraction(data * ln, pe - pe // p)
        return Fraction(total.numerator % total.denominator, total.denominator)

    def __call__(self, n: int) -> CycNum:
        n %= max(self.modulus, 1)
        val = self._values.get(n)
        if val is None:
            expo = self.exponent(n)
            if expo is None:
                val = CycNum.zero(1)
            else:
                o = self.order
                val = CycNum.zeta(o, int(expo * o))
            self._values[n] = val  # values are immutable; idempotent writes
        return val

    # -- structure ----------------------------------------------------------

    @property
    def order(self) -> int:
        if self._order is None:
            o = 1
            for p, e, data in self._local:
                if p == 2:
                    if e == 1:
                        lo = 1
                    elif e == 2:
                        lo = 2 if data else 1
                    else:
                        sa, ta = data
                        half = 1 << (e - 2)
                        lo = lcm(2 if sa else 1, half // gcd(ta, half))
                else:
                    pe = p**e
                    phi = pe - pe // p
                    lo = phi // gcd(data, phi)
                o = lcm(o, lo)
            object.__setattr__(self, "_order", o)
        return self._order

    @property
    def conductor(self) -> int:
        if self._conductor is None:
            f = 1
            for p, e, data in self._local:
                if p == 2:
                    if e == 1:
                        continue
                    if e == 2:
                        f *= 4 if data else 1
                    else:
                        sa, ta = data
                        half = 1 << (e - 2)
                        d5 = half // gcd(ta, half)
                        f *= 4 * d5 if d5 > 1 else (4 if sa else 1)
                else:
                    pe = p**e
                    phi = pe - pe // p
                    d = phi // gcd(data, phi)
                    if d > 1:
                        a = 0
                        while d % p == 0:
                            d //= p
                            a += 1
                        f *= p ** (a + 1)
            object.__setattr__(self, "_conductor", f)
        return self._conductor

    @property
    def parity(self) -> int:
        expo = self.exponent(-1)
        return 1 if expo == 0 else -1

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def is_trivial(self) -> bool:
        return self.index % self.modulus == 1 % self.modulus

    # -- arithmetic on characters ------------------------------------------

    def lift(self, new_modulus: int) -> "DirichletChar":
        """Character mod new_modulus induced by this one."""
        q = self.modulus
        if new_modulus % q:
            raise NotAMultiple(f"{new_modulus} is not a multiple of modulus {q}")
        if new_modulus == q:
            return self
        residues, moduli = [], []
        for p, E in _factor(new_modulus):
            pE = p**E
            e = 0
            qq = q
            while qq % p == 0:
                qq //= p
                e += 1
            if p == 2:
                if e <= 1:
                    b = 1
                elif e == 2:
                    b = pE - 1 if self.index % 4 == 3 else 1
                else:
                    sa, ta = _two_decompose(self.index, e)
                    b = pow(5, ta << (E - e), pE)
                    if sa:
                        b = (-b) % pE
            else:
                if e == 0:
                    b = 1
                else:
                    la = _dlog_table_odd(p, e)[self.index % p**e]
                    b = pow(conrey_generator(p), la * p ** (E - e), pE)
            residues.append(b)
            moduli.append(pE)
        return DirichletChar(new_modulus, _crt(residues, moduli))

    def primitive(self) -> "DirichletChar":
        """The primitive character inducing this one."""
        f = self.conductor
        if f == self.modulus:
            return self
        if f == 1:
            return DirichletChar(1, 1)
        residues, moduli = [], []
        for p, e, data in self._local:
            pc = 1
            if p == 2:
                if e >= 2:
                    if e == 2:
                        if data:
                            pc, b = 4, 3
                    else:
                        sa, ta = data
                        half = 1 << (e - 2)
                        d5 = half // gcd(ta, half)
                        if d5 > 1:
                            j = (4 * d5).bit_length() - 1
                            b = pow(5, ta >> (e - j), 1 << j)
                            if sa:
                                b = (-b) % (1 << j)
                            pc = 1 << j
                        elif sa:
                            pc, b = 4, 3
            else:
                pe = p**e
                phi = pe - pe // p
                d = phi // gcd(data, phi)
                if d > 1:
                    a = 0
                    dd = d
                    while dd % p == 0:
                        dd //= p
                        a += 1
                    pc = p ** (a + 1)
                    b = pow(conrey_generator(p), data // p ** (e - a - 1), pc)
            if pc > 1:
                residues.append(b)
                moduli.append(pc)
        return DirichletChar(f, _crt(residues, moduli) if moduli else 1)

    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        if not isinstance(other, DirichletChar):
            return NotImplemented
        q = lcm(self.modulus, other.modulus)
        a = self.lift(q).index * other.lift(q).index % q
        return DirichletChar(q, a)

    def inverse(self) -> "DirichletChar":
        q = self.modulus
        if q == 1:
            return self
        return DirichletChar(q, pow(self.index, -1, q))

    def power(self, s: int) -> "DirichletChar":
        q = self.modulus
        if q == 1:
            return self
        return DirichletChar(q, pow(self.index, s % self.order, q))

    def galois_conjugates(self) -> list["DirichletChar"]:
        """All chi^s with gcd(s, order) = 1, this character first."""
        o = self.order
        out = [self.power(s) for s in range(1, o + 1) if gcd(s, o) == 1]
        seen, uniq = set(), []
        for ch in out:
            if ch.index not in seen:
                seen.add(ch.index)
                uniq.append(ch)
        return uniq


def _crt(residues, moduli) -> int:
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        h = (r - x) * pow(m, -1, q) % q
        x += m * h
        m *= q
    return x % m


def gauss_sum(phi: DirichletChar) -> CycNum:
    """g(phi) = sum_{n=0}^{v-1} phi(n) zeta_v^n for primitive phi of
    conductor v; the result lives in conductor lcm(v, order).

    Every term is a single root of unity in the target field, so the sum
    is accumulated as one exponent vector and reduced once.
    """
    if not phi.is_primitive():
        raise NotPrimitive(f"{phi!r} is imprimitive (conductor {phi.conductor})")
    v = phi.modulus
    if v == 1:
        return CycNum.one()
    o = phi.order
    big = lcm(v, o)
    vec = [0] * big
    for n in range(v):
        expo = phi.exponent(n)
        if expo is None:
            continue
        vec[(int(expo * o) * (big // o) + n * (big // v)) % big] += 1
    return CycNum(big, vec)


def is_square_free(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in _factor(n))


def primitive_characters(m: int) -> list[DirichletChar]:
    out = []
    for a in range(1, m + 1):
        if gcd(a, m) == 1:
            ch = DirichletChar(m, a)
            if ch.is_primitive():
                out.append(ch)
    return out


def enumerate_pairs(n: int) -> list[tuple[DirichletChar, DirichletChar]]:
    """All ordered pairs (psi, phi) of primitive characters with conductor
    product n, over all factorisations u*v = n."""
    if not is_square_free(n):
        raise NotSquareFree(f"{n} is not square-free")
    pairs = []
    for u in sorted(d for d in range(1, n + 1) if n % d == 0):
        v = n // u
        for psi in primitive_characters(u):
            for phi in primitive_characters(v):
                pairs.append((psi, phi))
    return pairs


def parity_matches(psi: DirichletChar, phi: DirichletChar, k: int) -> bool:
    """Whether (psi*phi)(-1) = (-1)^k, the weight-consistency constraint."""
    return psi.parity * phi.parity == (-1) ** k
