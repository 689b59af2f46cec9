import pytest

from eiscong.characters import DirichletChar
from eiscong.congruence import (bk_report, check_conditions, condition_one_quantity,
                                diamond_hypothesis, search_congruence_primes,
                                value_conductor)
from eiscong.cyclotomic import CycNum
from eiscong.eisenstein import EisensteinParams
from eiscong.lvalues import euler_factor
from eiscong.residue import FFElem, ord_exact, ord_positive, primes_above, reduce_cyc

TRIV = DirichletChar(1, 1)
P0 = EisensteinParams(1, 1, 12, TRIV, TRIV)
P51 = EisensteinParams(5, 2, 8, TRIV, DirichletChar(5, 4))
P52 = EisensteinParams(7, 2, 7, TRIV, DirichletChar(7, 3))
P53 = EisensteinParams(7, 6, 6, TRIV, DirichletChar(7, 4))


def test_search_ramanujan():
    out = search_congruence_primes(P0)
    assert [(e, lam.factor) for e, lam, _ in out] == [(691, (690, 1))]
    rep = out[0][2]
    assert rep.cond1 and rep.cond2 == {} and rep.admissible


def test_search_level10_returns_only_257():
    out = search_congruence_primes(P51)
    assert [e for e, _, _ in out] == [257]
    rep = out[0][2]
    assert rep.cond1 and rep.cond2[2]["factor_k"] and not rep.cond2[2]["factor_k2"]


def test_level10_ell_13_fails():
    lam = primes_above(13, value_conductor(P51))[0]
    rep = check_conditions(P51, 13, lam)
    assert not rep.satisfied
    assert not rep.cond1
    # 13 divides 65 = 1 + 2^6 but not 257
    assert rep.cond2[2] == {"factor_k": False, "factor_k2": True}


def test_level10_19_fails_condition_two():
    # 19^2 divides the L-value numerator but neither Euler factor
    lam = primes_above(19, value_conductor(P51))[0]
    rep = check_conditions(P51, 19, lam)
    assert rep.cond1 and not rep.cond2_ok and rep.admissible
    assert not rep.satisfied


def test_search_level14():
    out = search_congruence_primes(P52)
    assert len(out) == 1
    ell, lam, rep = out[0]
    assert ell == 337 and lam.m == 6 and lam.factor == (128, 1)
    assert lam.pretty() == "<337, z6 + 128>"
    # local origin: the weight-k Euler factor vanishes mod lambda'
    assert rep.cond2[2]["factor_k"]


def test_search_level42_and_ideal_identity():
    out = search_congruence_primes(P53)
    assert len(out) == 1
    ell, lam, rep = out[0]
    assert ell == 73 and lam.m == 3
    # the same prime is often written in terms of zeta_6 as <73, zeta_6 + 64>
    # since Q(zeta_3) = Q(zeta_6); zeta_6 + 64 = zeta_3 + 65 lies in lam
    gen = CycNum.zeta(6) + 64
    assert gen.try_descend(3) == CycNum.zeta(3) + 65
    assert ord_positive(CycNum.zeta(3) + 65, lam)
    # equality of ideals: same residue degree, same ell, generator contained
    lam6 = [p for p in primes_above(73, 6) if p.factor == (64, 1)][0]
    assert ord_positive(gen, lam6)
    # the Galois conjugate does not satisfy the conditions
    other = [p for p in primes_above(73, 3) if p != lam][0]
    assert not check_conditions(P53, 73, other).satisfied


def test_search_determinism_and_replay():
    a = search_congruence_primes(P53)
    b = search_congruence_primes(P53)
    assert [(e, lam) for e, lam, _ in a] == [(e, lam) for e, lam, _ in b]
    c = search_congruence_primes(P53, ell_max=10**6)
    assert [(e, lam) for e, lam, _ in c] == [(e, lam) for e, lam, _ in a]
    for ell, lam, rep in a:
        rep2 = check_conditions(P53, ell, lam)
        assert rep2.to_json() == rep.to_json()


def test_search_include_failures_reports_diagnostics():
    out = search_congruence_primes(P51, include_failures=True)
    ells = {e for e, _, _ in out}
    assert 257 in ells
    # 13 divides the k-2 Euler factor norm: scanned as a diagnostic
    assert 13 in ells
    failed = [rep for e, _, rep in out if e == 13]
    assert failed and not failed[0].satisfied


def test_condition_one_quantity_value():
    assert condition_one_quantity(P51).rational_value().numerator % 257 == 0


def test_check_conditions_wrong_ell_rejected():
    lam = primes_above(257, 1)[0]
    with pytest.raises(ValueError):
        check_conditions(P51, 13, lam)


def test_m1_reduces_to_lvalue_divisibility():
    lam = primes_above(691, 1)[0]
    rep = check_conditions(P0, 691, lam)
    assert rep.cond1 and rep.cond2 == {} and rep.cond2_ok


def test_bk_report_level10():
    lam = primes_above(257, value_conductor(P51))[0]
    rep = bk_report(P51, lam, 1)
    assert rep.order_k == 1          # 257 || 257/256
    assert rep.order_k2 == 0         # 65/64 is a 257-unit
    assert rep.p_new_primes == (2,)  # S = {2}
    j = rep.to_json()
    assert j["order_k"] == 1 and j["p_new_primes"] == [2]


def test_bk_report_m1_trivial():
    lam = primes_above(691, 1)[0]
    rep = bk_report(P0, lam, 1)
    assert rep.order_k == 0 and rep.order_k2 == 0 and rep.p_new_primes == ()


def test_bk_report_level42():
    out = search_congruence_primes(P53)
    _, lam, _ = out[0]
    rep = bk_report(P53, lam, 1)
    # cond2 at 73 holds through the k-factor at p = 3 only
    crep = check_conditions(P53, 73, lam)
    expected_s = tuple(p for p in (2, 3) if crep.cond2[p]["factor_k"])
    assert rep.p_new_primes == expected_s
    assert rep.order_k >= 1


def test_diamond_hypothesis_branches():
    # symbolic check in the residue field: a_p = psi(p)(1 + p^-1) when
    # psi(p) = phi(p) p^k, and a_p = psi(p)(1 + p) when psi(p) = phi(p) p^(k-2)
    params = P51
    p = 2
    k = params.k
    lam = primes_above(257, value_conductor(params))[0]
    # at ell = 257: psi(2) = 1 = phi(2) 2^8 mod 257 (the k-branch)
    psi_p = reduce_cyc(params.psi(p), lam)
    p_inv = FFElem.from_int(257, lam.factor, p).inverse()
    one = FFElem.one(257, lam.factor)
    a_p = psi_p * (one + p_inv)
    assert diamond_hypothesis(params, a_p, lam)
    # at ell = 13: psi(2) = phi(2) 2^6 mod 13 (the k-2 branch)
    lam13 = primes_above(13, value_conductor(params))[0]
    a_p = reduce_cyc(params.psi(p), lam13) * FFElem.from_int(13, lam13.factor, 1 + p)
    assert diamond_hypothesis(params, a_p, lam13)
    # generic wrong value fails
    bad = FFElem.from_int(257, lam.factor, 5)
    assert not diamond_hypothesis(params, bad, lam)


def test_diamond_requires_prime_m():
    lam = primes_above(73, 3)[0]
    with pytest.raises(ValueError):
        diamond_hypothesis(P53, FFElem.from_int(73, lam.factor, 1), lam)
