from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from htcrystal import KPoly, field_make, k_inv, newton_polygon, residue_reduce, valuation
from htcrystal.errors import NotEisenstein, NotIntegral, NotMonic, PrecisionInsufficient, ZeroDivisor
from htcrystal.local_field import fp_linear_factors, fp_mul

import oracles


def test_field_make_examples():
    K = field_make(5, [-5, 1])
    assert K.e == 1 and K.E_prime_pi.equals(K.one) and K.E0.equals(K.element(-5))
    K = field_make(3, [-3, 0, 1])
    assert K.e == 2 and K.E_prime_pi.equals(K.pi * 2) and K.E0.equals(K.element(-3))
    assert field_make(5, [10, -5, 1]).e == 2


def test_field_make_rejections():
    with pytest.raises(NotEisenstein):
        field_make(5, [5, -1, 1])
    with pytest.raises(NotEisenstein):
        field_make(5, [1, 1])
    with pytest.raises(NotEisenstein):
        field_make(5, [25, 1])
    with pytest.raises(NotMonic):
        field_make(5, [5, 2])
    with pytest.raises(ValueError):
        field_make(6, [6, 1])


def test_k_mul_examples():
    K = field_make(3, [-3, 0, 1])
    assert (K.pi * K.pi).equals(K.element(3))
    x = K.element([Fraction(1, 2), 4])
    assert (x * K.one).equals(x)
    assert ((K.one + K.pi) * (K.one - K.pi)).equals(K.element(-2))


def test_k_inv_examples():
    K = field_make(3, [-3, 0, 1])
    assert k_inv(K.pi).equals(K.element([0, Fraction(1, 3)]))
    assert k_inv(K.one).equals(K.one)
    with pytest.raises(ZeroDivisor):
        k_inv(K.zero)
    with pytest.raises(ZeroDivisor):
        k_inv(K.element(3 ** 50))


def test_k_inv_against_extended_euclid():
    u = sympy.symbols("u")
    K = field_make(3, [-3, 0, 1], 30)
    inv = sympy.invert(1 + u, u ** 2 - 3, domain=sympy.QQ)
    coeffs = sympy.Poly(inv, u).all_coeffs()[::-1]
    expected = K.element([Fraction(int(c.p), int(c.q)) for c in coeffs])
    assert k_inv(K.one + K.pi).equals(expected)


def test_valuation_examples():
    for p, E in ((3, [-3, 0, 1]), (2, [2, 2, 0, 1]), (5, [-5, 1])):
        K = field_make(p, E)
        assert valuation(K.pi) == 1 and valuation(K.element(p)) == K.e
    K = field_make(2, [-2, 0, 1])
    assert valuation(K.element([2, 1])) == 1
    assert valuation(K.zero) == float("inf")


def test_valuation_multiplicative_random():
    rng = oracles.seeded(11)
    for _ in range(100):
        p, E, K = oracles.random_setting(rng)
        a = oracles.random_qelement(rng, p, K.e)
        b = oracles.random_qelement(rng, p, K.e)
        if not any(a) or not any(b):
            continue
        x, y = K.element(a), K.element(b)
        assert valuation(x) == oracles.qval(a, E, p)
        assert valuation(x * y) == valuation(x) + valuation(y)
        assert valuation(x + y) >= min(valuation(x), valuation(y))
        assert (x * y).equals(K.element(oracles.qmul(a, b, E)))


def test_inverse_round_trip_random():
    rng = oracles.seeded(12)
    for _ in range(60):
        p, E, K = oracles.random_setting(rng)
        a = oracles.random_qelement(rng, p, K.e)
        if not any(a):
            continue
        x = K.element(a)
        err = x * k_inv(x) - K.one
        # relative working precision is kept
        assert err.is_zero() or valuation(err) >= K.prec * K.e - valuation(x) - K.e


# -- Newton polygons --------------------------------------------------------


def poly(K, coeffs):
    return KPoly(K, [K.element(c) for c in coeffs])


def test_newton_polygon_examples():
    K = field_make(5, [-5, 1])
    f = poly(K, [5, -6, 1])  # (x - 1)(x - 5)
    assert sorted(newton_polygon(f).root_valuations()) == [0, 1]
    g = poly(K, [-5, 0, 1])
    np_ = newton_polygon(g)
    assert np_.segments == ((Fraction(-1, 2), 2),)
    h = poly(K, [0, 0, 0, 1])
    np_ = newton_polygon(h)
    assert np_.segments == () and np_.order_at_zero == 3


def test_newton_polygon_uncertain_vertex():
    K = field_make(5, [-5, 1], 4)
    # constant term zero at precision 4 sits below the hull: cannot certify
    f = KPoly(K, [K.element(5 ** 6), K.element(25), K.one])
    with pytest.raises(PrecisionInsufficient):
        newton_polygon(f)


def test_newton_polygon_minkowski_sum():
    rng = oracles.seeded(13)
    for _ in range(40):
        p, E, K = oracles.random_setting(rng)
        f = KPoly(K, [K.element(oracles.random_qelement(rng, p, K.e)) for _ in range(rng.randint(1, 3))] + [K.one])
        g = KPoly(K, [K.element(oracles.random_qelement(rng, p, K.e)) for _ in range(rng.randint(1, 3))] + [K.one])
        if f[0].is_zero() or g[0].is_zero():
            continue
        rf = newton_polygon(f).root_valuations()
        rg = newton_polygon(g).root_valuations()
        assert sorted(newton_polygon(f * g).root_valuations()) == sorted(rf + rg)
        np_ = newton_polygon(f)
        assert sum(s * n for s, n in np_.segments) == -valuation(f[0])


def test_residue_reduce_examples():
    K = field_make(5, [-5, 1])
    assert residue_reduce(poly(K, [5, -6, 1])) == [0, 4, 1]
    L = field_make(3, [-3, 0, 1])
    assert residue_reduce(KPoly(L, [-L.pi, L.one])) == [0, 1]
    with pytest.raises(NotIntegral):
        residue_reduce(poly(K, [Fraction(1, 5), 1]))


def test_residue_reduce_is_ring_morphism():
    rng = oracles.seeded(14)
    for _ in range(40):
        p, E, K = oracles.random_setting(rng)
        f = KPoly(K, [K.element(oracles.random_qelement(rng, p, K.e, False)) for _ in range(3)])
        g = KPoly(K, [K.element(oracles.random_qelement(rng, p, K.e, False)) for _ in range(2)])
        lhs = residue_reduce(f * g)
        rhs = fp_mul(residue_reduce(f), residue_reduce(g), p)
        n = max(len(lhs), len(rhs))
        assert lhs + [0] * (n - len(lhs)) == rhs + [0] * (n - len(rhs))


def test_fp_linear_factors():
    # (x + 1)^2 (x + 3) (x^2 + 2) over F_5
    f = [1]
    for g in ([1, 1], [1, 1], [3, 1], [2, 0, 1]):
        f = fp_mul(f, g, 5)
    found, rest = fp_linear_factors(f, 5)
    assert found == {1: 2, 3: 1} and rest == [2, 0, 1]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(-30, 30), min_size=1, max_size=3),
       st.integers(-20, 20))
def test_shift_moves_roots(p, cs, s):
    K = field_make(p, [-p, 1], 20)
    f = poly(K, cs + [1])
    g = f.shift(K.element(s))
    # g(x) = f(x + s): compare values at a few points
    for x in range(3):
        assert g(K.element(x)).equals(f(K.element(x + s)))
