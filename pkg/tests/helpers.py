"""Shared independent oracles for the test suite.

Numeric embeddings go through mpmath at high precision so that exact
values computed by the package can be cross-checked against an
implementation-independent path (direct complex sums, Hurwitz zeta).
"""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath as mp

from eiscong.cyclotomic import CycNum

mp.mp.dps = 60


def cyc_to_complex(x: CycNum) -> mp.mpc:
    """Embed zeta_n -> exp(2 pi i / n)."""
    z = mp.e ** (2j * mp.pi / x.conductor)
    acc = mp.mpc(0)
    for c in reversed(x.coeffs):
        acc = acc * z + mp.mpf(c.numerator) / mp.mpf(c.denominator)
    return acc


def assert_close(x: CycNum, target, tol=1e-35):
    got = cyc_to_complex(x)
    assert abs(got - target) < tol, f"{got} != {target}"


def char_to_complex(chi, n) -> mp.mpc:
    e = chi.exponent(n)
    if e is None:
        return mp.mpc(0)
    return mp.e ** (2j * mp.pi * mp.mpf(e.numerator) / mp.mpf(e.denominator))


def random_cycnum(rng: random.Random, conductor: int, size: int = 9) -> CycNum:
    from sympy import totient
    coeffs = [Fraction(rng.randrange(-size, size + 1),
                       rng.randrange(1, 4)) for _ in range(int(totient(conductor)))]
    return CycNum(conductor, coeffs)
