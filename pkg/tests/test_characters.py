import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st
from sympy import legendre_symbol, totient

from eiscong.characters import (DirichletChar, conrey_generator, enumerate_pairs,
                                gauss_sum, is_square_free, parity_matches,
                                primitive_characters)
from eiscong.cyclotomic import CycNum
from eiscong.errors import NotAMultiple, NotPrimitive, NotSquareFree
from helpers import char_to_complex, cyc_to_complex


def test_quadratic_character_mod5_is_legendre():
    chi = DirichletChar(5, 4)
    for n in range(1, 20):
        if n % 5 == 0:
            assert not chi(n)
        else:
            assert chi(n) == int(legendre_symbol(n, 5))
    assert chi(2) == -1


def test_conrey_7_3_at_3():
    chi = DirichletChar(7, 3)
    assert chi(3) == CycNum.zeta(6)
    assert chi.order == 6


def test_vanishing_off_units():
    chi = DirichletChar(10, 9)
    for n in (0, 2, 4, 5, 6, 15):
        assert not chi(n)


def test_trivial_character_mod_1():
    one = DirichletChar(1, 1)
    assert one(0) == 1 and one(17) == 1 and one(-3) == 1
    assert one.order == 1 and one.conductor == 1 and one.parity == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_complete_multiplicativity_and_periodicity(seed):
    rng = random.Random(seed)
    q = rng.choice([3, 4, 5, 7, 8, 9, 12, 15, 16, 21, 40])
    units = [a for a in range(1, q + 1) if gcd(a, q) == 1]
    chi = DirichletChar(q, rng.choice(units))
    m, n = rng.choice(units), rng.choice(units)
    assert chi(m * n) == chi(m) * chi(n)
    t = rng.randrange(-3, 4)
    assert chi(n + t * q) == chi(n)


def test_parity_matches_value_at_minus_one():
    for q in (1, 3, 4, 5, 7, 8, 12, 21):
        for a in range(1, q + 1):
            if gcd(a, q) == 1:
                chi = DirichletChar(q, a)
                assert chi(-1) == chi.parity
                assert chi.parity in (1, -1)


def test_order_conductor_against_brute_force():
    for q in (3, 4, 5, 7, 8, 9, 12, 16, 24, 21, 45):
        for a in range(1, q + 1):
            if gcd(a, q) != 1:
                continue
            chi = DirichletChar(q, a)
            # brute-force order: smallest t with all values^t = 1
            t = 1
            while True:
                if all(chi.exponent(n) is None or (chi.exponent(n) * t).denominator == 1
                       for n in range(1, q + 1)):
                    break
                t += 1
            assert chi.order == t
            # brute-force conductor: smallest divisor c with chi trivial on
            # units congruent to 1 mod c
            cond = next(c for c in sorted(d for d in range(1, q + 1) if q % d == 0)
                        if all(chi.exponent(n) == 0 for n in range(1, q + 1)
                               if n % c == 1 % c and gcd(n, q) == 1))
            assert chi.conductor == cond


def test_primitive_part_matches_on_units():
    for q, a in [(12, 5), (12, 7), (20, 9), (45, 8), (10, 9), (8, 5)]:
        chi = DirichletChar(q, a)
        prim = chi.primitive()
        assert prim.modulus == chi.conductor
        assert prim.is_primitive()
        for n in range(1, q + 1):
            if gcd(n, q) == 1:
                assert prim(n) == chi(n)


def test_lift_definition_and_conductor():
    chi = DirichletChar(5, 4)
    lifted = chi.lift(10)
    assert lifted.modulus == 10 and lifted.conductor == 5
    for n in range(1, 21):
        if gcd(n, 10) == 1:
            assert lifted(n) == chi(n)
        else:
            assert not lifted(n)
    assert DirichletChar(1, 1).lift(10).is_trivial()
    assert chi.lift(5) == chi
    with pytest.raises(NotAMultiple):
        chi.lift(12)


def test_lift_evaluation_agreement_two_power():
    chi = DirichletChar(8, 3)
    lifted = chi.lift(48)
    assert lifted.conductor == chi.conductor == 8
    for n in range(1, 49):
        if gcd(n, 48) == 1:
            assert lifted(n) == chi(n)
        else:
            assert not lifted(n)


def test_lift_conductor_preserved_many():
    for q, a, m in [(3, 2, 12), (4, 3, 8), (7, 3, 42), (5, 2, 40), (8, 5, 48)]:
        chi = DirichletChar(q, a)
        assert chi.lift(m * 1).conductor == chi.conductor


def test_char_mul_and_inverse():
    phi = DirichletChar(5, 4)
    one1 = DirichletChar(1, 1)
    assert one1 * phi == phi
    assert (phi * phi.inverse()).is_trivial()
    assert (phi * phi).is_trivial()  # quadratic
    # different moduli multiply at the lcm
    chi3 = DirichletChar(3, 2)
    prod = chi3 * phi
    assert prod.modulus == 15
    for n in range(1, 16):
        if gcd(n, 15) == 1:
            assert prod(n) == chi3(n) * phi(n)


def test_mul_matches_pointwise_at_lcm():
    rng = random.Random(3)
    for _ in range(20):
        q1, q2 = rng.choice([3, 4, 5, 7, 8]), rng.choice([3, 4, 5, 9, 16])
        a1 = rng.choice([a for a in range(1, q1 + 1) if gcd(a, q1) == 1])
        a2 = rng.choice([a for a in range(1, q2 + 1) if gcd(a, q2) == 1])
        c1, c2 = DirichletChar(q1, a1), DirichletChar(q2, a2)
        prod = c1 * c2
        from math import lcm
        q = lcm(q1, q2)
        for n in range(1, q + 1):
            if gcd(n, q) == 1:
                assert prod(n) == c1(n) * c2(n)


def test_gauss_sum_trivial_and_quadratic():
    assert gauss_sum(DirichletChar(1, 1)) == 1
    g = gauss_sum(DirichletChar(5, 4))
    assert g * g == 5
    with pytest.raises(NotPrimitive):
        gauss_sum(DirichletChar(10, 9))


def test_gauss_sum_norm_identity_small():
    # g(phi) g(phi_bar) = phi(-1) v, checked exactly for v <= 24
    for v in range(1, 25):
        for phi in primitive_characters(v):
            g1 = gauss_sum(phi)
            g2 = gauss_sum(phi.inverse())
            assert g1 * g2 == phi(-1) * Fraction(v)


def test_gauss_sum_matches_numeric_oracle():
    import mpmath as mp
    for v, a in [(5, 2), (7, 3), (12, 11)]:
        phi = DirichletChar(v, a)
        target = mp.mpc(0)
        for n in range(v):
            target += char_to_complex(phi, n) * mp.e ** (2j * mp.pi * n / v)
        assert abs(cyc_to_complex(gauss_sum(phi)) - target) < 1e-30


def test_enumerate_pairs():
    assert [(p.label, q.label) for p, q in enumerate_pairs(1)] == [("1.1", "1.1")]
    pairs5 = enumerate_pairs(5)
    # brute force: primitive characters mod 5 are the three with conductor 5
    prim5 = [a for a in range(1, 6) if gcd(a, 5) == 1
             and DirichletChar(5, a).conductor == 5]
    assert len(prim5) == 3
    assert len(pairs5) == 2 * len(prim5)
    with pytest.raises(NotSquareFree):
        enumerate_pairs(12)


def test_parity_filter():
    pairs = [pq for pq in enumerate_pairs(7) if parity_matches(*pq, 7)]
    assert pairs and all((p * q).parity == -1 for p, q in pairs)


def test_conrey_generator_values():
    assert conrey_generator(7) == 3
    assert conrey_generator(5) == 2


def test_galois_conjugates():
    chi = DirichletChar(7, 3)
    orbit = chi.galois_conjugates()
    assert orbit[0] == chi and len(orbit) == 2
    assert {c.index for c in orbit} == {3, 5}


def test_is_square_free():
    assert is_square_free(42) and not is_square_free(12)
