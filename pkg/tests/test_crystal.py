from fractions import Fraction
from math import factorial

import pytest
import sympy

from htcrystal import (
    HTCrystal,
    KMatrix,
    Outcome,
    PadicScalar,
    binomial_series,
    cocycle_check,
    conjugate_by_shears,
    convergence_oracle,
    field_make,
    mat_mul,
    nearly_ht_check,
    shift,
    stratify,
)
from htcrystal.crystal import StratificationSeries
from htcrystal.errors import PrecisionInsufficient
from htcrystal.padic import vp_int
from htcrystal.pd_series import PDSeries, pd_geom_inv, pd_mul, pd_substitute

import oracles

Q5 = field_make(5, [-5, 1], 30)
R3 = field_make(3, [-3, 0, 1], 30)


def scalar_crystal(K, a):
    return HTCrystal(K, KMatrix.from_rows(K, [[K.element(a)]]))


def random_crystal(rng, d=None, allow_negative=True):
    p, E, K = oracles.random_setting(rng)
    d = d or rng.randint(1, 3)
    M = oracles.random_qmatrix(rng, p, K.e, d, allow_negative)
    return HTCrystal(K, oracles.to_kmatrix(K, M)), M, E


# -- stratify / closed form -------------------------------------------------


def test_zero_operator_gives_identity_stratification():
    c = HTCrystal(R3, KMatrix.zero(R3, 2))
    s = stratify(c, 5)
    assert s.matrices[0].equals(KMatrix.identity(R3, 2))
    assert all(A.is_zero() for A in s.matrices[1:])
    assert binomial_series(c, 5).agrees_with(s)


def test_scalar_recursion_instances():
    a = R3.element([Fraction(1, 2), 3])
    c = scalar_crystal(R3, a)
    Ep = R3.E_prime_pi
    s = stratify(c, 3)
    assert s.matrices[2][0, 0].equals(a * (a + Ep))
    assert s.matrices[3][0, 0].equals(a * (a + Ep) * (a + Ep * 2))


def test_factor_hits_zero():
    s = stratify(scalar_crystal(Q5, -3), 7)
    assert s.matrices[3][0, 0].equals(Q5.element(-6))
    assert all(A.is_zero() for A in s.matrices[4:])


def test_shift_factors_reproduce_A4():
    rng = oracles.seeded(31)
    c, M, E = random_crystal(rng, d=2)
    Ep = c.field.E_prime_pi
    factors = [shift(c.A1, Ep * i) for i in range(4)]
    prod = factors[0]
    for f in factors[1:]:
        prod = mat_mul(prod, f)
    assert prod.equals(stratify(c, 4).matrices[4])


def test_factors_commute():
    rng = oracles.seeded(32)
    for _ in range(10):
        c, M, E = random_crystal(rng)
        Ep = c.field.E_prime_pi
        factors = [shift(c.A1, Ep * i) for i in range(5)]
        forward = factors[0]
        for f in factors[1:]:
            forward = mat_mul(forward, f)
        backward = factors[-1]
        for f in reversed(factors[:-1]):
            backward = mat_mul(backward, f)
        assert forward.equals(backward)


def test_stratify_against_exact_rational_products():
    rng = oracles.seeded(33)
    for _ in range(10):
        c, M, E = random_crystal(rng)
        d, e = c.rank, c.field.e
        Ep = [Fraction(i * E[i]) for i in range(1, e + 1)]
        P = [[oracles.qconst(1 if i == j else 0, E) for j in range(d)] for i in range(d)]
        s = stratify(c, 5)
        for n in range(1, 6):
            F = [[oracles.qadd(M[i][j], [Fraction(n - 1) * x for x in Ep] if i == j else [Fraction(0)] * e)
                  for j in range(d)] for i in range(d)]
            P = oracles.qmatmul(P, F, E)
            assert s.matrices[n].equals(oracles.to_kmatrix(c.field, P))


@pytest.mark.parametrize("a", [3, Fraction(2, 3), -1, Fraction(7, 5)])
def test_binomial_series_against_symbolic_binomial(a):
    # E = u - 5 has E'(pi) = 1, so A_n is n! times the X^n coefficient of (1 - X)^(-a)
    X = sympy.symbols("X")
    D = 6
    ser = sympy.series((1 - X) ** (-sympy.Rational(a)), X, 0, D + 1).removeO()
    s = binomial_series(scalar_crystal(Q5, a), D)
    for n in range(D + 1):
        coeff = ser.coeff(X, n) * factorial(n)
        assert s.matrices[n][0, 0].equals(Q5.element(Fraction(int(coeff.p), int(coeff.q))))


def test_binomial_equals_recursion_random():
    rng = oracles.seeded(34)
    for _ in range(15):
        c, M, E = random_crystal(rng)
        assert binomial_series(c, 8).agrees_with(stratify(c, 8))


# -- cocycle ----------------------------------------------------------------


def test_stratification_satisfies_cocycle():
    rng = oracles.seeded(35)
    for _ in range(8):
        c, M, E = random_crystal(rng)
        r = cocycle_check(stratify(c, 6))
        assert r.holds and r.degree == 6


def test_identity_stratification_holds():
    s = StratificationSeries(R3, tuple([KMatrix.identity(R3, 2)] + [KMatrix.zero(R3, 2)] * 6))
    assert cocycle_check(s).holds


def test_truncated_after_degree_one_fails_at_two():
    for K, a in ((Q5, 2), (R3, R3.element([1, 1]))):
        a = K.element(a)
        c = scalar_crystal(K, a)
        s = stratify(c, 4)
        zero = KMatrix.zero(K, 1)
        broken = StratificationSeries(K, (s.matrices[0], s.matrices[1], zero, zero, zero))
        r = cocycle_check(broken)
        assert not r.holds and r.degree == 2 and not r.difference.is_zero()
        expected = a * (a + K.E_prime_pi)
        # X1 X2 and X1^2 (= 2 X1^[2]) coefficients are off by a(a + E'(pi)) up to sign
        F = broken.to_pd()
        X1 = PDSeries.variable(K, 2, 0, 4)
        X2 = PDSeries.variable(K, 2, 1, 4)
        g = pd_mul(X2 - X1, pd_geom_inv(K.E_prime_pi, 0, 4, nvars=2))
        rhs = pd_mul(F.relabel(0), pd_substitute(F, g))
        lhs = F.relabel(1)
        mixed = (lhs[(1, 1)] - rhs[(1, 1)])[0, 0]
        square = (lhs[(2, 0)] - rhs[(2, 0)])[0, 0] * Fraction(1, 2)
        assert mixed.equals(expected) or mixed.equals(-expected)
        assert square.equals(expected) or square.equals(-expected)


def test_unit_perturbations_fail_at_predicted_degree():
    rng = oracles.seeded(36)
    for _ in range(12):
        c, M, E = random_crystal(rng)
        s = stratify(c, 6)
        n = rng.randint(1, 6)
        i, j = rng.randrange(c.rank), rng.randrange(c.rank)
        r = cocycle_check(s.perturb(n, i, j, 1))
        assert not r.holds
        assert r.degree == (2 if n == 1 else n) <= n + 1
        assert not r.difference.is_zero()


def test_cocycle_needs_degree_two():
    with pytest.raises(ValueError):
        cocycle_check(stratify(scalar_crystal(Q5, 1), 1))


# -- nearly Hodge-Tate ------------------------------------------------------


def test_verdict_examples():
    v = nearly_ht_check(scalar_crystal(Q5, -3))
    assert v.nearly_ht and v.residues == {3: 1}
    for K in (Q5, R3, field_make(2, [2, 2, 0, 1])):
        v = nearly_ht_check(scalar_crystal(K, Fraction(1, K.p)))
        assert not v.nearly_ht
        assert sum(m for _, m in v.evidence) == 1
    v = nearly_ht_check(scalar_crystal(R3, R3.pi))
    assert v.nearly_ht and v.weight_condition_holds and v.v_E_prime == 1 and v.e_minus_1 == 1


def test_wild_ramification_discrepancy_is_reported():
    K = field_make(2, [-2, 0, 1])
    v = nearly_ht_check(scalar_crystal(K, K.pi))
    assert v.nearly_ht and v.v_E_prime == 3 and v.e_minus_1 == 1
    assert not v.weight_condition_holds


def test_bad_residue_and_non_integral_evidence():
    K = field_make(3, [-3, 1], 30)
    # x^2 + 1 is irreducible mod 3
    c = HTCrystal(K, KMatrix.from_rows(K, [[0, -1], [1, 0]]))
    v = nearly_ht_check(c)
    assert not v.nearly_ht and v.witness == "bad-residue" and v.evidence == (("bad-residue", 2),)
    c = HTCrystal(K, KMatrix.from_rows(K, [[Fraction(1, 3), 0], [0, 1]]))
    v = nearly_ht_check(c)
    assert v.witness == "non-integral" and dict(v.evidence) == {"non-integral": 1, "integral": 1}


def test_uncertain_coefficient_raises():
    c = HTCrystal(R3, KMatrix.from_rows(R3, [[R3.element(PadicScalar.zero(3, 0))]]))
    with pytest.raises(PrecisionInsufficient):
        nearly_ht_check(c)


def test_conjugation_and_twist_invariance():
    rng = oracles.seeded(37)
    for _ in range(20):
        c, M, E = random_crystal(rng, allow_negative=rng.random() < 0.5)
        v = nearly_ht_check(c)
        if c.rank > 1:
            shears = [(*rng.sample(range(c.rank), 2), c.field.element(rng.randint(-3, 3))) for _ in range(2)]
            assert nearly_ht_check(HTCrystal(c.field, conjugate_by_shears(c.A1, shears))).verdict == v.verdict
        for k in range(-2, 3):
            t = nearly_ht_check(c.twist(k))
            assert t.verdict == v.verdict
            if c.field.e == 1 and v.nearly_ht:
                assert t.residues == {(i + k) % c.field.p: m for i, m in v.residues.items()}


# -- convergence oracle -----------------------------------------------------


def test_oracle_examples():
    assert convergence_oracle(HTCrystal(Q5, KMatrix.zero(Q5, 2))).steps == 1
    r = convergence_oracle(scalar_crystal(Q5, 2))
    # independent count: v_5 of (2)(3)...(n+1) = v_5((n+1)!) first reaches 8
    n = next(n for n in range(1, 400) if vp_int(factorial(n + 1), 5) >= 8)
    assert r.outcome is Outcome.CONVERGED and r.steps == n == 34
    r = convergence_oracle(scalar_crystal(Q5, Fraction(1, 5)))
    assert r.outcome is Outcome.BOUNDED_BELOW and r.det_valuation == -r.steps
    r = convergence_oracle(scalar_crystal(R3, Fraction(1, 3)))
    assert r.outcome is Outcome.BOUNDED_BELOW and r.min_valuation == -2 * r.steps


def test_oracle_undetermined_with_small_budget():
    r = convergence_oracle(scalar_crystal(Q5, 2), budget=5)
    assert r.outcome is Outcome.UNDETERMINED and r.steps == 5
    with pytest.raises(ValueError):
        convergence_oracle(scalar_crystal(Q5, 2), threshold=0)


def test_oracle_tracks_exact_hits():
    r = convergence_oracle(scalar_crystal(Q5, -3))
    assert r.outcome is Outcome.CONVERGED and r.steps == 4
