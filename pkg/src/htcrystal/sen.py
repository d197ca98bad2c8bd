"""Sen operator of a crystal, the formal tau-cocycle and the constant theta(u lambda').

The Sen matrix of a crystal is ``Phi = -A1 / E'(pi)``.  The tau action is
modelled by ``U(z) = (1 - z)^Phi`` in a formal variable ``z`` standing for
the period constant, and ``Phi`` comes back as minus the linear
coefficient of ``log U``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .crystal import HTCrystal
from .errors import PrecisionExhausted, PrecisionInsufficient, ShapeMismatch
from .linalg import KMatrix, charpoly, mat_mul, shift
from .local_field import (
    INF,
    KElement,
    KPoly,
    LocalField,
    fp_linear_factors,
    k_inv,
    newton_polygon,
    residue_reduce,
    valuation,
)

DEFAULT_DEGREE = 6


@dataclass(frozen=True)
class SenData:
    field: LocalField
    Phi: KMatrix
    charpoly_Phi: KPoly
    # ((valuation, multiplicity), ...) of the weights, None if not certified
    weight_valuations: tuple
    # e = 1 with integral weights: {i: multiplicity} of weights congruent to i mod p
    residues: dict = None
    # {i: lower bound for v(weight - i)} over the weights in class i
    residue_distance: dict = None


def _root_valuations(f: KPoly):
    try:
        np_ = newton_polygon(f)
    except PrecisionInsufficient:
        return None
    out = []
    if np_.order_at_zero:
        out.append((INF, np_.order_at_zero))
    for slope, length in reversed(np_.segments):
        out.append((-slope, length))
    return tuple(out)


def _class_distance(f: KPoly, m: int):
    """Lower bound for the valuations of the ``m`` roots of ``f`` in the maximal ideal.

    ``f`` has exactly ``m`` such roots and the rest are units, so ``(m, 0)``
    is a vertex of its Newton polygon and the steepest root valuation is
    ``min_k v(f_k) / (m - k)``; zero-at-precision coefficients enter with
    their precision, which keeps the bound valid.
    """
    return min(Fraction(valuation(f[k]), m - k) if valuation(f[k]) != INF else INF
               for k in range(m))


def sen_from_crystal(c: HTCrystal) -> SenData:
    field = c.field
    Phi = c.A1 * (-k_inv(field.E_prime_pi))
    chi = charpoly(Phi)
    vals = _root_valuations(chi)
    residues = distance = None
    if field.e == 1 and all(valuation(chi[k]) >= 0 for k in range(chi.degree)):
        try:
            found, rest = fp_linear_factors(residue_reduce(chi), field.p, field.p - 1)
        except PrecisionInsufficient:
            found, rest = {}, [0, 1]
        if len(rest) == 1:
            residues = dict(sorted(found.items()))
            distance = {i: _class_distance(chi.shift(field.element(i)), m)
                        for i, m in residues.items()}
    return SenData(field, Phi, chi, vals, residues, distance)


class FormalMatrixSeries:
    """``sum_n M_n z^n`` truncated at degree ``D``, ``M_n`` square over K."""

    __slots__ = ("field", "d", "coeffs")

    def __init__(self, field: LocalField, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ShapeMismatch("a series needs at least the constant coefficient")
        d = coeffs[0].d
        if any(M.d != d for M in coeffs):
            raise ShapeMismatch("coefficients of different sizes")
        self.field = field
        self.d = d
        self.coeffs = coeffs

    @classmethod
    def identity(cls, field: LocalField, d: int, D: int) -> FormalMatrixSeries:
        zero = KMatrix.zero(field, d)
        return cls(field, [KMatrix.identity(field, d)] + [zero] * D)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> KMatrix:
        return self.coeffs[n]

    def _check(self, other: FormalMatrixSeries) -> None:
        if other.d != self.d or other.degree != self.degree:
            raise ShapeMismatch("series of different shape or degree")

    def __add__(self, other):
        self._check(other)
        return FormalMatrixSeries(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return FormalMatrixSeries(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other):
        if isinstance(other, FormalMatrixSeries):
            self._check(other)
            D = self.degree
            out = []
            for n in range(D + 1):
                acc = KMatrix.zero(self.field, self.d)
                for i in range(n + 1):
                    a, b = self.coeffs[i], other.coeffs[n - i]
                    if a.is_exact_zero() or b.is_exact_zero():
                        continue
                    acc = acc + mat_mul(a, b)
                out.append(acc)
            return FormalMatrixSeries(self.field, out)
        if isinstance(other, (int, Fraction, KElement)):
            return FormalMatrixSeries(self.field, [M * other for M in self.coeffs])
        return NotImplemented

    def equals(self, other: FormalMatrixSeries) -> bool:
        self._check(other)
        return all(a.equals(b) for a, b in zip(self.coeffs, other.coeffs))

    @property
    def precision(self):
        return min((M.precision for M in self.coeffs if not M.is_exact_zero()), default=INF)

    def __str__(self):
        return "\n".join(f"z^{n}: {M}" for n, M in enumerate(self.coeffs) if not M.is_exact_zero()) or "0"


def binomial_power(Phi: KMatrix, D: int) -> FormalMatrixSeries:
    """``(1 - z)^Phi = sum_n (-1)^n binom(Phi, n) z^n``."""
    field = Phi.field
    binom = KMatrix.identity(field, Phi.d)
    out = [binom]
    for n in range(1, D + 1):
        binom = mat_mul(binom, shift(Phi, -(n - 1))) * Fraction(1, n)
        out.append(-binom if n % 2 else binom)
    return FormalMatrixSeries(field, out)


def tau_cocycle(c: HTCrystal, D: int = DEFAULT_DEGREE) -> FormalMatrixSeries:
    return binomial_power(sen_from_crystal(c).Phi, D)


def _require_constant(U: FormalMatrixSeries, identity: bool) -> None:
    target = KMatrix.identity(U.field, U.d) if identity else KMatrix.zero(U.field, U.d)
    if not U[0].equals(target):
        what = "the identity" if identity else "zero"
        raise ValueError(f"constant term must be {what}, got {U[0]}")


def series_log(U: FormalMatrixSeries, min_precision=None) -> FormalMatrixSeries:
    """``log U = -sum_{k>=1} (I - U)^k / k``."""
    _require_constant(U, True)
    D = U.degree
    N = FormalMatrixSeries.identity(U.field, U.d, D) - U
    N = FormalMatrixSeries(U.field, [KMatrix.zero(U.field, U.d)] + list(N.coeffs[1:]))
    acc = N * -1
    power = N
    for k in range(2, D + 1):
        power = power * N
        acc = acc - power * Fraction(1, k)
    if min_precision is not None and acc.precision < min_precision:
        raise PrecisionExhausted(f"logarithm known only to pi^{acc.precision}")
    return acc


def series_exp(L: FormalMatrixSeries) -> FormalMatrixSeries:
    """``exp L = sum_k L^k / k!`` for ``L`` without constant term."""
    _require_constant(L, False)
    D = L.degree
    acc = FormalMatrixSeries.identity(L.field, L.d, D)
    power = acc
    for k in range(1, D + 1):
        power = power * L * Fraction(1, k)
        acc = acc + power
    return acc


def recover_sen(U: FormalMatrixSeries) -> KMatrix:
    if U.degree < 1:
        raise ValueError("need degree >= 1")
    return -series_log(U)[1]


def _wpowers(D: int):
    """Integer coefficient dicts of ``(z1 + z2 - z1 z2)^n`` truncated at degree D."""
    w = {(1, 0): 1, (0, 1): 1, (1, 1): -1}
    out = [{(0, 0): 1}]
    for _ in range(D):
        prev = out[-1]
        nxt = {}
        for (a, b), x in prev.items():
            for (c, d), y in w.items():
                if a + b + c + d <= D:
                    k = (a + c, b + d)
                    nxt[k] = nxt.get(k, 0) + x * y
        out.append({k: v for k, v in nxt.items() if v})
    return out


def multiplicativity_check(Phi: KMatrix, D: int = DEFAULT_DEGREE):
    """Compare ``(1-z1)^Phi (1-z2)^Phi`` with ``((1-z1)(1-z2))^Phi`` to total degree D.

    Returns ``(True, None)`` or ``(False, (a, b))`` for the first differing
    coefficient of ``z1^a z2^b``.
    """
    U = binomial_power(Phi, D)
    field, d = Phi.field, Phi.d
    rhs = {}
    for n, wn in enumerate(_wpowers(D)):
        for k, m in wn.items():
            term = U[n] * m
            rhs[k] = rhs[k] + term if k in rhs else term
    zero = KMatrix.zero(field, d)
    for total in range(D + 1):
        for a in range(total, -1, -1):
            b = total - a
            lhs = mat_mul(U[a], U[b])
            if not lhs.equals(rhs.get((a, b), zero)):
                return False, (a, b)
    return True, None


def theta_u_lambda_prime(field: LocalField, N: int) -> KElement:
    """``pi * E'(pi)/E(0) * prod_{n>=1} E(pi^(p^n))/E(0)`` modulo ``p^N``.

    The n-th factor is ``1 + O(pi^t)`` with ``t = min(p^n, e (p^n - 1))``;
    the product stops once ``t >= e N``.
    """
    if N < 1:
        raise ValueError("precision must be at least 1")
    p, e = field.p, field.e
    target = e * N
    work = field.with_precision(N + field.v_E_prime // e + 2)
    inv_c0 = 1 / Fraction(work.E[0])
    result = work.pi * work.E_prime_pi * inv_c0
    n = 1
    while min(p ** n, e * (p ** n - 1)) < target:
        x = work.pi_power(p ** n)
        acc = work.zero
        for c in reversed(work.E):
            acc = acc * x + work.element(c)
        result = result * (acc * inv_c0)
        n += 1
    return KElement(field, result.with_precision(target).coeffs)
