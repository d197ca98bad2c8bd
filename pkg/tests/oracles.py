"""Independent reference computations for the tests.

Everything here works with exact rationals in Q[u]/E (pi-basis lists of
Fractions) and never touches the library's p-adic precision tracking, so
agreement with the library is a genuine cross-check.
"""
from fractions import Fraction
from itertools import permutations
import random

from htcrystal import KMatrix, field_make

PRIMES = (2, 3, 5)


def qreduce(c, E):
    e = len(E) - 1
    c = [Fraction(x) for x in c] + [Fraction(0)] * max(0, e - len(c))
    for k in range(len(c) - 1, e - 1, -1):
        t = c[k]
        if t:
            for i in range(e):
                c[k - e + i] -= t * E[i]
            c[k] = Fraction(0)
    return c[:e]


def qmul(a, b, E):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return qreduce(out, E)


def qadd(a, b):
    return [x + y for x, y in zip(a, b)]


def qneg(a):
    return [-x for x in a]


def qconst(r, E):
    return qreduce([Fraction(r)], E)


def vp(x: Fraction, p: int):
    if x == 0:
        return None
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def qval(a, E, p):
    """pi-adic valuation of an exact element: min e*v_p(a_i) + i."""
    e = len(E) - 1
    vals = [e * vp(x, p) + i for i, x in enumerate(a) if x != 0]
    return min(vals) if vals else None


def perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def qdet(M, E):
    """Leibniz determinant over Q[u]/E."""
    d = len(M)
    e = len(E) - 1
    total = [Fraction(0)] * e
    for perm in permutations(range(d)):
        term = qconst(perm_sign(perm), E)
        for i, j in enumerate(perm):
            term = qmul(term, M[i][j], E)
        total = qadd(total, term)
    return total


def qcharpoly(M, E):
    """Coefficients (low to high) of det(xI - M), by evaluating at d+1 integers and interpolating."""
    d = len(M)
    e = len(E) - 1
    xs = list(range(d + 1))
    values = []
    for x in xs:
        N = [[qadd(qconst(x if i == j else 0, E), qneg(M[i][j])) for j in range(d)] for i in range(d)]
        values.append(qdet(N, E))
    # Lagrange interpolation, coefficientwise in the pi-basis
    coeffs = [[Fraction(0)] * e for _ in range(d + 1)]
    for k, xk in enumerate(xs):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for m, xm in enumerate(xs):
            if m == k:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xm * basis[t + 1]
            denom *= xk - xm
        for t, b in enumerate(basis):
            coeffs[t] = qadd(coeffs[t], [v * b / denom for v in values[k]])
    return coeffs


def qmatmul(A, B, E):
    d = len(A)
    e = len(E) - 1
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = [Fraction(0)] * e
            for k in range(d):
                acc = qadd(acc, qmul(A[i][k], B[k][j], E))
            row.append(acc)
        out.append(row)
    return out


def random_eisenstein(rng, p, e):
    unit = rng.choice([u for u in range(1, p * p) if u % p])
    E = [Fraction(rng.choice((1, -1)) * p * unit)]
    E += [Fraction(p * rng.randint(-2, 2)) for _ in range(e - 1)]
    return E + [Fraction(1)]


def random_qelement(rng, p, e, allow_negative=True):
    out = []
    for _ in range(e):
        num = rng.randint(-p * p, p * p)
        den = p ** rng.randint(1, 2) if allow_negative and rng.random() < 0.15 else 1
        out.append(Fraction(num, den))
    return out


def random_qmatrix(rng, p, e, d, allow_negative=True):
    return [[random_qelement(rng, p, e, allow_negative) for _ in range(d)] for _ in range(d)]


def to_kmatrix(K, M):
    return KMatrix.from_rows(K, [[K.element(x) for x in row] for row in M])


def random_setting(rng, prec=30):
    p = rng.choice(PRIMES)
    e = rng.randint(1, 3)
    E = random_eisenstein(rng, p, e)
    return p, E, field_make(p, E, prec)


def seeded(seed):
    return random.Random(seed)
