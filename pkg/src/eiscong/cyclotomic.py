"""Exact arithmetic in cyclotomic fields Q(zeta_n).

A :class:`CycNum` is a vector of rationals on the power basis
zeta_n^0, ..., zeta_n^(phi(n)-1), reduced modulo the n-th cyclotomic
polynomial.  Elements carry their own conductor; binary operations coerce
both sides into Q(zeta_lcm) through the ring embedding
zeta_n -> zeta_lcm^(lcm/n).  There is no automatic conductor
minimisation: an element of Q(zeta_6) that happens to be rational keeps
conductor 6 unless :meth:`CycNum.try_descend` is called explicitly.

Values are immutable after construction and safe to share between
threads; the per-conductor reduction tables are built once and only
appended to.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from sympy import totient

from . import qpoly

_ZERO = Fraction(0)
_ONE = Fraction(1)

# x^j mod Phi_n for j = phi(n) .. 2*phi(n)-2, used to fold products.
_FOLD_ROWS: dict[int, list[tuple[Fraction, ...]]] = {}
_PHI: dict[int, int] = {}


def _phi(n: int) -> int:
    try:
        return _PHI[n]
    except KeyError:
        _PHI[n] = int(totient(n))
        return _PHI[n]


def _fold_rows(n: int) -> list[tuple[Fraction, ...]]:
    rows = _FOLD_ROWS.get(n)
    if rows is None:
        d = _phi(n)
        phi_n = list(qpoly.cyclotomic_poly(n))
        rows = []
        # iterate x^j = x * x^(j-1) reduced, starting from x^d
        prev = [-c for c in phi_n[:-1]]  # x^d mod Phi_n (Phi_n monic)
        rows.append(tuple(prev + [_ZERO] * (d - len(prev))))
        for _ in range(d - 2):
            nxt = [_ZERO] + prev
            if len(nxt) > d:
                top = nxt.pop()
                if top:
                    for i in range(d):
                        nxt[i] += top * rows[0][i]
            nxt += [_ZERO] * (d - len(nxt))
            rows.append(tuple(nxt))
            prev = nxt
        _FOLD_ROWS[n] = rows
    return rows


def _reduce(n: int, coeffs: list[Fraction]) -> list[Fraction]:
    """Reduce an arbitrary-length coefficient vector mod Phi_n, returning a
    dense vector of length phi(n)."""
    d = _phi(n)
    if len(coeffs) <= d:
        return list(coeffs) + [_ZERO] * (d - len(coeffs))
    if len(coeffs) <= 2 * d - 1:
        rows = _fold_rows(n)
        out = list(coeffs[:d])
        for j in range(d, len(coeffs)):
            c = coeffs[j]
            if c:
                row = rows[j - d]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return out
    if all(c.denominator == 1 for c in coeffs):
        rem = _int_mod_cyclotomic([c.numerator for c in coeffs], n)
        return [Fraction(c) for c in rem] + [_ZERO] * (d - len(rem))
    rem = qpoly.mod(qpoly.trim(list(coeffs)), list(qpoly.cyclotomic_poly(n)))
    return rem + [_ZERO] * (d - len(rem))


def _int_mod_cyclotomic(coeffs: list[int], n: int) -> list[int]:
    """Remainder of an integer vector modulo the (monic, integer) Phi_n."""
    phi_n = [int(c) for c in qpoly.cyclotomic_poly(n)]
    f = list(coeffs)
    deg_g = len(phi_n) - 1
    while len(f) > deg_g:
        c = f[-1]
        if c:
            off = len(f) - 1 - deg_g
            for i in range(deg_g):
                if phi_n[i]:
                    f[off + i] -= c * phi_n[i]
        f.pop()
    while f and f[-1] == 0:
        f.pop()
    return f


class CycNum:
    """Element of Q(zeta_n) on the reduced power basis."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs):
        if conductor < 1:
            raise ValueError("conductor must be >= 1")
        object.__setattr__(self, "conductor", conductor)
        vec = _reduce(conductor, [Fraction(c) for c in coeffs])
        object.__setattr__(self, "coeffs", tuple(vec))

    def __setattr__(self, *args):
        raise AttributeError("CycNum is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, r, conductor: int = 1) -> "CycNum":
        return cls(conductor, [Fraction(r)])

    @classmethod
    def zero(cls, conductor: int = 1) -> "CycNum":
        return cls(conductor, [])

    @classmethod
    def one(cls, conductor: int = 1) -> "CycNum":
        return cls(conductor, [_ONE])

    @classmethod
    def zeta(cls, n: int, power: int = 1) -> "CycNum":
        """zeta_n**power as an element of conductor n."""
        power %= n
        vec = [_ZERO] * power + [_ONE]
        return cls(n, vec)

    # -- structure ----------------------------------------------------

    def coerce(self, m: int) -> "CycNum":
        """Image under zeta_n -> zeta_m^(m/n); requires conductor | m."""
        n = self.conductor
        if m == n:
            return self
        if m % n:
            raise ValueError(f"cannot coerce conductor {n} into {m}")
        step = m // n
        out = [_ZERO] * ((len(self.coeffs) - 1) * step + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            if c:
                out[i * step] = c
        return CycNum(m, out)

    def try_descend(self, d: int) -> "CycNum | None":
        """Rewrite in Q(zeta_d) when possible (d | conductor), else None."""
        n = self.conductor
        if n % d:
            raise ValueError("target conductor must divide the current one")
        if d == n:
            return self
        cols = [CycNum.zeta(d, j).coerce(n).coeffs for j in range(_phi(d))]
        sol = _solve_columns(cols, self.coeffs)
        if sol is None:
            return None
        return CycNum(d, sol)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0] if self.coeffs else _ZERO

    # -- arithmetic ---------------------------------------------------

    def _pair(self, other) -> tuple["CycNum", "CycNum"]:
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_rational(other)
        elif not isinstance(other, CycNum):
            return NotImplemented, NotImplemented
        m = lcm(self.conductor, other.conductor)
        return self.coerce(m), other.coerce(m)

    def __add__(self, other):
        a, b = self._pair(other)
        if a is NotImplemented:
            return NotImplemented
        return CycNum(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is NotImplemented:
            return NotImplemented
        return CycNum(a.conductor, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return CycNum(self.conductor, [x * c for x in self.coeffs])
        if not isinstance(other, CycNum):
            return NotImplemented
        if other.conductor == 1:
            c = other.coeffs[0] if other.coeffs else _ZERO
            return CycNum(self.conductor, [x * c for x in self.coeffs])
        if self.conductor == 1:
            c = self.coeffs[0] if self.coeffs else _ZERO
            return CycNum(other.conductor, [x * c for x in other.coeffs])
        a, b = self._pair(other)
        n = a.conductor
        d = _phi(n)
        out = [_ZERO] * (2 * d - 1)
        bc = b.coeffs
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(bc):
                    if y:
                        out[i + j] += x * y
        return CycNum(n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                raise ZeroDivisionError("division by zero")
            return CycNum(self.conductor, [x / c for x in self.coeffs])
        if not isinstance(other, CycNum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        acc = CycNum.one(self.conductor)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_rational(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        if self.conductor == other.conductor:
            return self.coeffs == other.coeffs
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # cross-conductor equality makes a consistent hash costly

    def inverse(self) -> "CycNum":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        n = self.conductor
        if n == 1 or self.is_rational():
            inv = _ONE / self.coeffs[0]
            return CycNum(n, [inv])
        u, _v, d = qpoly.ext_gcd(qpoly.trim(list(self.coeffs)),
                                 list(qpoly.cyclotomic_poly(n)))
        assert d == [_ONE], "cyclotomic polynomial must be coprime to a unit"
        return CycNum(n, u)

    def norm(self) -> Fraction:
        """Field norm down to Q: the product of all conjugates, computed as
        the resultant of Phi_n with the representing polynomial."""
        if not self:
            return _ZERO
        if self.conductor == 1:
            return self.coeffs[0]
        return qpoly.resultant(list(qpoly.cyclotomic_poly(self.conductor)),
                               qpoly.trim(list(self.coeffs)))

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            out = out * c.denominator // gcd(out, c.denominator)
        return out

    # -- serialisation ------------------------------------------------

    def to_json(self) -> dict:
        return {
            "conductor": self.conductor,
            "coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CycNum":
        coeffs = [Fraction(int(p), int(q)) for p, q in obj["coeffs"]]
        return cls(int(obj["conductor"]), coeffs)

    def __repr__(self):
        n = self.conductor
        if self.is_rational():
            return str(self.rational_value())
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                z = f"z{n}" if i == 1 else f"z{n}^{i}"
                terms.append(z if c == 1 else f"-{z}" if c == -1 else f"{c}*{z}")
        return " + ".join(terms).replace("+ -", "- ")


def _solve_columns(cols, target):
    """Solve sum_j y_j * cols[j] = target over Q; None if inconsistent."""
    nrows = len(target)
    ncols = len(cols)
    aug = [[cols[j][i] for j in range(ncols)] + [target[i]] for i in range(nrows)]
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = _ONE / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if aug[i][ncols]:
            return None
    sol = [_ZERO] * ncols
    for row, c in enumerate(piv_cols):
        sol[c] = aug[row][ncols]
    return sol
