import random
from fractions import Fraction
from math import gcd

import pytest
from sympy import divisors, primefactors, primerange

from eiscong.characters import DirichletChar
from eiscong.cyclotomic import CycNum
from eiscong.eisenstein import (CuspMatrix, DeltaChoice, EisensteinParams,
                                alpha_m, c_gamma, constant_term_alpha_m,
                                constant_term_e_delta, cusp_matrix_for,
                                cusp_representatives, e_delta, e_delta_via_hecke,
                                eisenstein_qexp, hecke_tp, sigma_power_div)
from eiscong.errors import InsufficientPrecision, NotSquareFree

TRIV = DirichletChar(1, 1)
PHI5 = DirichletChar(5, 4)
PHI74 = DirichletChar(7, 4)

P0 = EisensteinParams(1, 1, 12, TRIV, TRIV)
P51 = EisensteinParams(5, 2, 8, TRIV, PHI5)
P53 = EisensteinParams(7, 6, 6, TRIV, PHI74)


def random_gamma(rng, bound=60):
    while True:
        a = rng.randrange(-bound, bound + 1)
        b = rng.randrange(-bound, bound + 1)
        if (a, b) != (0, 0) and gcd(a, b) == 1:
            return cusp_matrix_for(a, b)


def test_params_validation():
    with pytest.raises(NotSquareFree):
        EisensteinParams(4, 1, 12, TRIV, TRIV)
    with pytest.raises(ValueError):
        EisensteinParams(1, 1, 2, TRIV, TRIV)  # k must exceed 2
    with pytest.raises(ValueError):
        EisensteinParams(5, 2, 7, TRIV, PHI5)  # parity mismatch
    with pytest.raises(ValueError):
        EisensteinParams(5, 5, 8, TRIV, PHI5)  # N, M not coprime
    with pytest.raises(ValueError):
        EisensteinParams(10, 1, 8, TRIV, PHI5)  # u*v != N


def test_sigma_examples():
    assert sigma_power_div(1, 8, TRIV, PHI5) == 1
    assert sigma_power_div(2, 12, TRIV, TRIV) == 2049
    assert sigma_power_div(3, 8, TRIV, PHI5) == -2186  # 1 + (-1) * 3^7


def test_eisenstein_qexp_level_one():
    e = eisenstein_qexp(P0, 2)
    assert e.coeffs[0] == Fraction(691, 65520)
    assert e.coeffs[1] == 1
    assert e.coeffs[2] == 2049
    assert e.level == 1 and e.weight == 12


def test_eisenstein_qexp_nontrivial_psi_has_zero_a0():
    params = EisensteinParams(5, 1, 8, PHI5, TRIV)
    e = eisenstein_qexp(params, 3)
    assert not e.coeffs[0]
    assert e.coeffs[1] == 1


def test_alpha_m():
    e = eisenstein_qexp(P0, 8)
    d = alpha_m(e, 2)
    assert d.precision == e.precision
    assert not d.coeffs[1] and d.coeffs[2] == e.coeffs[1] and d.coeffs[4] == e.coeffs[2]
    assert d.level == 2
    assert alpha_m(e, 1) is e


def test_hecke_a1_reads_ap():
    e = eisenstein_qexp(P51, 30)
    t3 = hecke_tp(e, 3, 10)
    assert t3.coeffs[1] == e.coeffs[3]


def test_hecke_eigenvalue_on_eisenstein_series():
    # T_p E = sigma_{k-1}(p) E for all p coprime to N, to the precision cap
    e = eisenstein_qexp(P51, 60)
    for p in (2, 3, 7):
        lam = sigma_power_div(p, P51.k, P51.psi, P51.phi)
        out = hecke_tp(e, p, 60 // p)
        expect = e.truncate(60 // p).scale(lam)
        assert out.coeffs == expect.coeffs


def test_hecke_insufficient_precision():
    e = eisenstein_qexp(P51, 10)
    with pytest.raises(InsufficientPrecision):
        hecke_tp(e, 3, 5)


def test_powerdiv_identity_randomized():
    # sigma(np) + chi(p) p^(k-1) sigma(n/p) = (psi(p)+phi(p)p^(k-1)) sigma(n)
    rng = random.Random(40)
    cases = 0
    while cases < 60:
        params = rng.choice([P0, P51, P53])
        p = rng.choice([q for q in primerange(2, 20) if params.N % q])
        n = rng.randrange(1, 50)
        k, psi, phi = params.k, params.psi, params.phi
        chi_p = params.chi(p)
        lhs = sigma_power_div(n * p, k, psi, phi)
        if n % p == 0:
            lhs = lhs + chi_p * Fraction(p) ** (k - 1) * sigma_power_div(n // p, k, psi, phi)
        rhs = (psi(p) + phi(p) * Fraction(p) ** (k - 1)) * sigma_power_div(n, k, psi, phi)
        assert lhs == rhs
        cases += 1


def test_e_delta_m1_is_plain_series():
    dc = DeltaChoice(P0, {})
    assert e_delta(P0, dc, 6).coeffs == eisenstein_qexp(P0, 6).coeffs


def test_e_delta_prime_m_two_divisor_form():
    for dc in DeltaChoice.all_choices(P51):
        f = e_delta(P51, dc, 14)
        base = eisenstein_qexp(P51, 14)
        d2 = dc.delta(2)
        for n in range(1, 15):
            expect = base.coeffs[n]
            if n % 2 == 0:
                expect = expect - d2 * base.coeffs[n // 2]
            assert f.coeffs[n] == expect
        assert f.coeffs[1] == 1  # normalised
        assert f.level == 10 and f.character == P51.chi_tilde


def test_e_delta_equals_operator_form():
    for params in (P51, P53):
        for dc in DeltaChoice.all_choices(params):
            assert e_delta(params, dc, 10).coeffs == \
                e_delta_via_hecke(params, dc, 10).coeffs


def test_lifted_series_eigenvalues_small():
    params = P51
    b = 6
    for dc in DeltaChoice.all_choices(params):
        f = e_delta(params, dc, b * 13)
        for p in (2, 3, 5, 7, 11, 13):
            out = hecke_tp(f, p, b)
            if p in params.m_primes:
                lam = dc.eps(p)
            elif params.N % p == 0:
                continue  # eigenvalue statement covers p | M and p coprime to NM
            else:
                lam = params.psi(p) + params.phi(p) * Fraction(p) ** (params.k - 1)
            assert out.coeffs == f.truncate(b).scale(lam).coeffs


def test_cusp_matrix_validation():
    with pytest.raises(ValueError):
        CuspMatrix(1, 1, 1, 1)
    g = cusp_matrix_for(3, 5)
    assert (g.a, g.b) == (3, 5) and g.a * g.d - g.beta * g.b == 1


def test_cusp_representatives_count():
    # number of cusps of Gamma_0(N) is sum over b | N of phi(gcd(b, N/b))
    from sympy import totient
    for level in (1, 6, 10, 42, 36):
        expect = sum(int(totient(gcd(b, level // b))) for b in divisors(level))
        got = cusp_representatives(level)
        assert len(got) == expect
        assert all(g.a * g.d - g.beta * g.b == 1 for g in got)


def test_c_gamma_level_one():
    assert c_gamma(P0, CuspMatrix(1, 0, 0, 1)) == Fraction(-691, 65520)


def test_c_gamma_character_factors_are_units():
    # the Gauss-sum ratio has norm +- a power of v, character values norm 1
    from eiscong.characters import gauss_sum
    for params in (P51, P53):
        ratio = gauss_sum(params.psi * params.phi.inverse()) * \
            gauss_sum(params.phi.inverse()).inverse()
        n = ratio.norm()
        v = params.v
        num = abs(n.numerator * n.denominator)
        while num % v == 0:
            num //= v
        assert num == 1


def test_constant_term_alpha_m_reduces_to_c_gamma():
    rng = random.Random(9)
    for params in (P51, P53):
        for _ in range(8):
            g = random_gamma(rng)
            if g.b % params.v:
                continue
            assert constant_term_alpha_m(params, 1, g) == c_gamma(params, g)


def test_constant_term_zero_when_v_does_not_divide():
    g = cusp_matrix_for(1, 3)  # b = 3, v = 5 does not divide
    assert not constant_term_alpha_m(P51, 2, g)
    dc = DeltaChoice.constant(P51, "psi")
    assert not constant_term_e_delta(P51, dc, g)


def test_inclusion_exclusion_matches_closed_form():
    rng = random.Random(77)
    for params in (P51, P53):
        for dc in DeltaChoice.all_choices(params):
            for _ in range(10):
                g = random_gamma(rng)
                total = CycNum.zero(1)
                for m in divisors(params.M):
                    w = dc.delta_m(m) * (-1) ** len(primefactors(m))
                    total = total + w * constant_term_alpha_m(params, m, g)
                assert total == constant_term_e_delta(params, dc, g)


def test_cusp_constant_factorisations():
    # all-psi choice at a cusp with gcd(b, M) = 1: the closed form equals
    # (-1)^(#P_M) C_gamma/M^k prod(psi(p) - phi(p) p^k) times a unit
    params = P51
    dc = DeltaChoice.constant(params, "psi")
    g = cusp_matrix_for(3, 5)
    lhs = constant_term_e_delta(params, dc, g)
    rhs = c_gamma(params, g) * Fraction((-1) ** 1, params.M ** params.k)
    for p in params.m_primes:
        rhs = rhs * (params.psi(p) - params.phi(p) * Fraction(p) ** params.k)
    unit = params.phi.inverse()(params.M)
    assert lhs == rhs * unit
    # all-phi choice at a cusp with M | b: product collapses to the
    # (1 - psi^-1(p) phi(p) p^(k-1)) form
    dc2 = DeltaChoice.constant(params, "phi")
    g2 = cusp_matrix_for(3, 10)
    lhs2 = constant_term_e_delta(params, dc2, g2)
    rhs2 = c_gamma(params, g2)
    for p in params.m_primes:
        rhs2 = rhs2 * (CycNum.one() - params.psi.inverse()(p) * params.phi(p)
                       * Fraction(p) ** (params.k - 1))
    assert lhs2 == rhs2


def test_a0_of_e_delta_uses_indicator_of_trivial_psi():
    # psi nontrivial: a_0 = 0 after any delta choice
    params = EisensteinParams(5, 1, 8, PHI5, TRIV)
    dc = DeltaChoice(params, {})
    assert not e_delta(params, dc, 4).coeffs[0]


def test_qexpansion_json():
    e = eisenstein_qexp(P51, 3)
    obj = e.to_json()
    assert obj["weight"] == 8 and obj["level"] == 5
    assert obj["character"] == "5.4"
    assert len(obj["coeffs"]) == 4
