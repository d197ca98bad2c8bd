"""Rational Hodge-Tate crystals given by a matrix ``A1`` over ``K``.

The stratification of a crystal is ``sum_n A_n X^[n]`` with ``A_0 = I`` and
``A_{n+1} = A_1 (E'(pi) + A_1) ... (n E'(pi) + A_1)``; it is a genuine
stratification iff these products tend to zero, which happens iff every
eigenvalue ``alpha`` of ``A_1`` has ``i E'(pi) + alpha`` in the maximal ideal
for some integer ``i``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction

from .errors import PrecisionExhausted, PrecisionInsufficient, ShapeMismatch
from .linalg import KMatrix, charpoly, mat_mul, min_entry_valuation, shift
from .local_field import (
    INF,
    KPoly,
    LocalField,
    fp_linear_factors,
    k_inv,
    newton_polygon,
    residue_reduce,
    valuation,
)
from .pd_series import PDSeries, monomials, pd_geom_inv, pd_mul, pd_substitute

DEFAULT_THRESHOLD = 8
DEFAULT_BUDGET = 400


@dataclass(frozen=True)
class HTCrystal:
    field: LocalField
    A1: KMatrix

    def __post_init__(self):
        if self.A1.field != self.field:
            raise ShapeMismatch("A1 is not defined over the crystal's field")

    @property
    def rank(self) -> int:
        return self.A1.d

    def twist(self, k: int) -> HTCrystal:
        """The crystal with ``A1 - k E'(pi) I``."""
        return HTCrystal(self.field, shift(self.A1, -(self.field.E_prime_pi * k)))


@dataclass(frozen=True)
class StratificationSeries:
    field: LocalField
    matrices: tuple  # A_0, ..., A_D: coefficients of X^n / n!

    @property
    def degree(self) -> int:
        return len(self.matrices) - 1

    @property
    def rank(self) -> int:
        return self.matrices[0].d

    def to_pd(self) -> PDSeries:
        return PDSeries.from_matrices(self.field, list(self.matrices))

    def guaranteed_precision(self):
        """Digits (pi-units) certified in every coefficient.

        Absolute precision for integral coefficients, relative precision for
        coefficients whose entries have negative valuation.
        """
        out = INF
        for A in self.matrices:
            if A.is_exact_zero():
                continue
            v = min_entry_valuation(A)
            out = min(out, A.precision - min(v, 0))
        return out

    def agrees_with(self, other: StratificationSeries) -> bool:
        return len(self.matrices) == len(other.matrices) and all(
            A.equals(B) for A, B in zip(self.matrices, other.matrices))

    def perturb(self, n: int, i: int, j: int, delta=1) -> StratificationSeries:
        """Add ``delta`` to entry ``(i, j)`` of ``A_n``."""
        A = self.matrices[n]
        rows = A.rows()
        rows[i][j] = rows[i][j] + self.field.element(delta)
        mats = list(self.matrices)
        mats[n] = KMatrix(self.field, A.d, [x for row in rows for x in row])
        return StratificationSeries(self.field, tuple(mats))


def stratify(c: HTCrystal, D: int) -> StratificationSeries:
    if D < 0:
        raise ValueError("degree must be non-negative")
    field, A1 = c.field, c.A1
    mats = [KMatrix.identity(field, c.rank)]
    if D >= 1:
        mats.append(A1)
    for n in range(1, D):
        mats.append(mat_mul(mats[n], shift(A1, field.E_prime_pi * n)))
    return StratificationSeries(field, tuple(mats))


def binomial_series(c: HTCrystal, D: int) -> StratificationSeries:
    """Termwise expansion of ``(1 - E'(pi) X)^(-A1/E'(pi))``.

    With ``Phi = -A1/E'(pi)`` the coefficient of ``X^n`` is
    ``binom(Phi, n) (-E'(pi))^n``, so the coefficient of ``X^n/n!`` is
    ``n! binom(Phi, n) (-E'(pi))^n``.
    """
    field = c.field
    Ep = field.E_prime_pi
    d = c.rank
    Phi = c.A1 * (-k_inv(Ep))
    I = KMatrix.identity(field, d)
    binom = I
    power = field.one
    mats = [I]
    fact = 1
    for n in range(1, D + 1):
        binom = mat_mul(binom, shift(Phi, -(n - 1))) * Fraction(1, n)
        power = power * (-Ep)
        fact *= n
        mats.append(binom * (power * fact))
    return StratificationSeries(field, tuple(mats))


# ----------------------------------------------------------------------
# cocycle condition


@dataclass(frozen=True)
class CocycleResult:
    holds: bool
    degree: int  # D when the check holds, else the first failing total degree
    index: tuple = None  # differing multi-index (X1 power, X2 power)
    difference: KMatrix = None
    precision: object = INF  # smallest precision among compared coefficients

    def __bool__(self):
        return self.holds


def cocycle_check(s: StratificationSeries, min_precision=1) -> CocycleResult:
    """Compare ``F(X2)`` with ``F(X1) * F((X2 - X1)(1 - E'(pi) X1)^-1)`` up to degree D."""
    D = s.degree
    if D < 2:
        raise ValueError("cocycle check needs degree >= 2")
    field = s.field
    F = s.to_pd()
    X1 = PDSeries.variable(field, 2, 0, D)
    X2 = PDSeries.variable(field, 2, 1, D)
    g = pd_mul(X2 - X1, pd_geom_inv(field.E_prime_pi, 0, D, nvars=2))
    rhs = pd_mul(F.relabel(0), pd_substitute(F, g))
    lhs = F.relabel(1)
    achieved = INF
    for deg in range(D + 1):
        for k in monomials(2, deg):
            diff = lhs[k] - rhs[k]
            if not diff.is_zero():
                return CocycleResult(False, deg, k, diff, achieved)
            prec = diff.precision
            if prec < min_precision:
                raise PrecisionExhausted(
                    f"coefficient of X1^[{k[0]}] X2^[{k[1]}] only known modulo pi^{prec}")
            achieved = min(achieved, prec)
    return CocycleResult(True, D, precision=achieved)


# ----------------------------------------------------------------------
# nearly Hodge-Tate decision


NEARLY_HT = "NearlyHT"
NOT_NEARLY_HT = "NotNearlyHT"


@dataclass(frozen=True)
class NhtVerdict:
    verdict: str
    evidence: tuple  # ((label, multiplicity), ...); multiplicities sum to the rank
    witness: str  # "", "non-integral", "bad-residue" or "not-in-maximal-ideal"
    v_E_prime: int
    e_minus_1: int
    weight_condition_holds: bool  # the weight condition Z + p^(-(e-1)/e) m, for comparison
    charpoly: KPoly = dc_field(repr=False, compare=False)

    @property
    def nearly_ht(self) -> bool:
        return self.verdict == NEARLY_HT

    @property
    def residues(self) -> dict:
        """``{i: multiplicity}`` for residue-class labels (unramified case)."""
        return {lab: m for lab, m in self.evidence if isinstance(lab, int)}


def _exceeds(c, bound) -> bool:
    """Certified ``v(c) > bound``; raises when the digits cannot decide."""
    v = valuation(c)
    if c.is_zero():
        if c.is_exact_zero() or v > bound:
            return True
        raise PrecisionInsufficient(f"coefficient known only modulo pi^{v}, cannot compare with {bound}")
    return v > bound


def _roots_above(chi: KPoly, delta) -> bool:
    """All roots of the monic ``chi`` have valuation ``> delta``."""
    d = chi.degree
    return all(_exceeds(chi[k], delta * (d - k)) for k in range(d))


def _root_counts(chi: KPoly):
    """(#roots with v > 0, #v = 0, #v < 0) from the Newton polygon, or None."""
    try:
        np_ = newton_polygon(chi)
    except PrecisionInsufficient:
        return None
    pos = np_.order_at_zero
    zero = neg = 0
    for slope, length in np_.segments:
        if slope < 0:
            pos += length
        elif slope == 0:
            zero += length
        else:
            neg += length
    return pos, zero, neg


def nearly_ht_check(c: HTCrystal) -> NhtVerdict:
    field = c.field
    e, p, d = field.e, field.p, c.rank
    chi = charpoly(c.A1)
    vE = field.v_E_prime
    weight_ok = _roots_above(chi, vE - (e - 1)) if e > 1 else None

    if e > 1:
        # E'(pi) lies in m, so the condition is: every eigenvalue lies in m
        if _roots_above(chi, 0):
            return NhtVerdict(NEARLY_HT, (("maximal-ideal", d),), "", vE, e - 1, weight_ok, chi)
        counts = _root_counts(chi)
        if counts is None:
            evidence = (("unresolved", d),)
        else:
            evidence = tuple((lab, m) for lab, m in
                             zip(("maximal-ideal", "unit", "non-integral"), counts) if m)
        return NhtVerdict(NOT_NEARLY_HT, evidence, "not-in-maximal-ideal", vE, e - 1, weight_ok, chi)

    if not _roots_above(chi, -1):
        # v >= 0 fails for some root: count the non-integral ones
        counts = _root_counts(chi)
        if counts is None:
            evidence = (("non-integral", d),)
        else:
            pos, zero, neg = counts
            evidence = tuple((lab, m) for lab, m in (("non-integral", neg), ("integral", pos + zero)) if m)
        return NhtVerdict(NOT_NEARLY_HT, evidence, "non-integral", vE, 0, False, chi)

    chibar = residue_reduce(chi)
    cbar = field.E_prime_pi.residue()
    found, rest = fp_linear_factors(chibar, p, cbar)
    leftover = len(rest) - 1
    evidence = tuple(sorted(found.items()))
    if leftover:
        evidence += (("bad-residue", leftover),)
        return NhtVerdict(NOT_NEARLY_HT, evidence, "bad-residue", vE, 0, False, chi)
    return NhtVerdict(NEARLY_HT, evidence, "", vE, 0, True, chi)


# ----------------------------------------------------------------------
# convergence oracle


class Outcome(str, Enum):
    CONVERGED = "ConvergedAt"
    BOUNDED_BELOW = "BoundedBelowEvidence"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class OracleResult:
    outcome: Outcome
    steps: int
    min_valuation: object
    det_valuation: object  # v(det P_n), None once a factor determinant is not certified

    def __str__(self):
        if self.outcome is Outcome.CONVERGED:
            return f"ConvergedAt({self.steps})"
        return f"{self.outcome.value}(n={self.steps})"


def convergence_oracle(c: HTCrystal, threshold=DEFAULT_THRESHOLD, budget=DEFAULT_BUDGET) -> OracleResult:
    """Multiply out ``P_n = prod_{i<n} (i E'(pi) + A1)`` and watch it.

    Returns ``ConvergedAt(n)`` once every entry of ``P_n`` has valuation
    ``>= threshold``.  Returns ``BoundedBelowEvidence`` when the factor
    determinants contribute no growth (``v(det)`` of each factor ``<= 0``) for
    ``p`` consecutive steps while ``v(det P_n) < d * threshold``: in every
    window of ``p`` steps an eigenvalue satisfying the nearly Hodge-Tate
    condition contributes positive valuation, so this certifies a violator.
    """
    if threshold <= 0 or budget < 1:
        raise ValueError("threshold must be positive and budget at least 1")
    field = c.field
    p, d = field.p, c.rank
    Ep = field.E_prime_pi
    window = deque(maxlen=p)
    det_val = 0
    P = None
    mv = None
    for n in range(1, budget + 1):
        factor = shift(c.A1, Ep * (n - 1)) if n > 1 else c.A1
        P = factor if P is None else mat_mul(P, factor)
        mv = min_entry_valuation(P)
        if mv >= threshold:
            return OracleResult(Outcome.CONVERGED, n, mv, det_val)
        fdet = factor.det()
        if fdet.is_zero():
            window.append(None)
            det_val = None
        else:
            inc = valuation(fdet)
            window.append(inc)
            if det_val is not None:
                det_val += inc
        if (det_val is not None and len(window) == p and det_val < d * threshold
                and all(x is not None and x <= 0 for x in window)):
            return OracleResult(Outcome.BOUNDED_BELOW, n, mv, det_val)
    return OracleResult(Outcome.UNDETERMINED, budget, mv, det_val)
