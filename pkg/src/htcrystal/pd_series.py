"""Truncated divided-power polynomial rings ``K{X}_pd`` and ``K{X1, X2}_pd``.

A series is ``sum_k C_k X^[k]`` with ``X^[k] = X^k / k!`` (componentwise for
multi-indices) and is truncated at total degree ``D``.  Coefficients are
either all :class:`KElement` or all :class:`KMatrix`; matrix coefficients
multiply in the order written, so products are not commutative in general.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import FieldMismatch, NonzeroConstantTerm, PrecisionExhausted, ShapeMismatch
from .linalg import KMatrix
from .local_field import INF, KElement, LocalField

DEFAULT_DEGREE = 6


def monomials(nvars: int, degree: int):
    """Multi-indices of total degree ``degree``, ``X1`` powers descending."""
    if nvars == 1:
        return [(degree,)]
    return [(i, degree - i) for i in range(degree, -1, -1)]


class PDSeries:
    __slots__ = ("field", "nvars", "D", "dim", "coeffs")

    def __init__(self, field: LocalField, nvars: int, D: int, coeffs, dim=None):
        if nvars not in (1, 2):
            raise ValueError("only one or two variables are supported")
        self.field = field
        self.nvars = nvars
        self.D = D
        self.dim = dim  # None for scalar coefficients, d for d x d matrices
        kept = {}
        for k, c in coeffs.items():
            if len(k) != nvars:
                raise ShapeMismatch(f"multi-index {k} in a {nvars}-variable ring")
            if sum(k) > D or c.is_exact_zero():
                continue
            kept[tuple(k)] = c
        self.coeffs = kept

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, field: LocalField, nvars: int, D: int, c) -> PDSeries:
        dim = c.d if isinstance(c, KMatrix) else None
        return cls(field, nvars, D, {(0,) * nvars: c}, dim)

    @classmethod
    def variable(cls, field: LocalField, nvars: int, index: int, D: int) -> PDSeries:
        k = [0] * nvars
        k[index] = 1
        return cls(field, nvars, D, {tuple(k): field.one})

    @classmethod
    def from_matrices(cls, field: LocalField, matrices, D=None) -> PDSeries:
        """One-variable series ``sum A_n X^[n]``."""
        D = len(matrices) - 1 if D is None else D
        return cls(field, 1, D, {(n,): A for n, A in enumerate(matrices)}, matrices[0].d)

    # -- access ---------------------------------------------------------

    def zero_coefficient(self):
        if self.dim is None:
            return self.field.zero
        return KMatrix.zero(self.field, self.dim)

    def __getitem__(self, k):
        if isinstance(k, int):
            k = (k,)
        c = self.coeffs.get(tuple(k))
        return self.zero_coefficient() if c is None else c

    def relabel(self, index: int, nvars: int = 2) -> PDSeries:
        """View a one-variable series as a series in ``X_index`` of an ``nvars`` ring."""
        if self.nvars != 1:
            raise ShapeMismatch("relabel expects a one-variable series")
        out = {}
        for (n,), c in self.coeffs.items():
            k = [0] * nvars
            k[index] = n
            out[tuple(k)] = c
        return PDSeries(self.field, nvars, self.D, out, self.dim)

    def truncate(self, D: int) -> PDSeries:
        return PDSeries(self.field, self.nvars, D, self.coeffs, self.dim)

    def _compatible(self, other: PDSeries) -> None:
        if other.nvars != self.nvars or other.D != self.D:
            raise ShapeMismatch(f"({self.nvars} vars, D={self.D}) vs ({other.nvars} vars, D={other.D})")
        if other.field is not self.field and other.field != self.field:
            raise FieldMismatch("series over different fields")

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other: PDSeries) -> PDSeries:
        self._compatible(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return PDSeries(self.field, self.nvars, self.D, out, self.dim or other.dim)

    def __neg__(self) -> PDSeries:
        return PDSeries(self.field, self.nvars, self.D, {k: -c for k, c in self.coeffs.items()}, self.dim)

    def __sub__(self, other: PDSeries) -> PDSeries:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PDSeries):
            return pd_mul(self, other)
        if isinstance(other, (KElement, int, Fraction)):
            return PDSeries(self.field, self.nvars, self.D,
                            {k: c * other for k, c in self.coeffs.items()}, self.dim)
        return NotImplemented

    @property
    def precision(self):
        return min((c.precision for c in self.coeffs.values()), default=INF)

    def __str__(self):
        names = ["X"] if self.nvars == 1 else ["X1", "X2"]
        lines = []
        for deg in range(self.D + 1):
            for k in monomials(self.nvars, deg):
                if k in self.coeffs:
                    mono = "*".join(f"{names[i]}^[{n}]" for i, n in enumerate(k) if n) or "1"
                    lines.append(f"{mono}: {self.coeffs[k]}")
        return "\n".join(lines) or "0"


def _binom(a, b) -> int:
    out = 1
    for x, y in zip(a, b):
        out *= comb(x + y, x)
    return out


def pd_mul(f: PDSeries, g: PDSeries) -> PDSeries:
    """Product using ``X^[a] X^[b] = C(a+b, a) X^[a+b]``, truncated at ``D``."""
    f._compatible(g)
    D = f.D
    out = {}
    for a, ca in f.coeffs.items():
        da = sum(a)
        for b, cb in g.coeffs.items():
            if da + sum(b) > D:
                continue
            k = tuple(x + y for x, y in zip(a, b))
            term = ca * cb
            n = _binom(a, b)
            if n != 1:
                term = term * n
            out[k] = out[k] + term if k in out else term
    dim = f.dim if f.dim is not None else g.dim
    return PDSeries(f.field, f.nvars, D, out, dim)


def pd_geom_inv(a: KElement, var: int, D: int, nvars: int = 1) -> PDSeries:
    """``(1 - a X_var)^-1 = sum_n a^n n! X_var^[n]``."""
    field = a.field
    out = {}
    power = field.one
    fact = 1
    for n in range(D + 1):
        k = [0] * nvars
        k[var] = n
        out[tuple(k)] = power * fact
        power = power * a
        fact *= n + 1
    return PDSeries(field, nvars, D, out)


def pd_substitute(f: PDSeries, g: PDSeries, min_precision=None) -> PDSeries:
    """``f(g) = sum_n C_n g^[n]`` where ``g^[n] = g^n / n!``.

    ``g`` must have scalar coefficients and no constant term.  With
    ``min_precision`` set, a result coefficient known to fewer pi-adic digits
    raises :class:`PrecisionExhausted`.
    """
    if f.nvars != 1:
        raise ShapeMismatch("substitution needs a one-variable series")
    if g.dim is not None:
        raise ShapeMismatch("the substituted series must have scalar coefficients")
    const = g.coeffs.get((0,) * g.nvars)
    if const is not None:
        raise NonzeroConstantTerm(f"constant term {const} is not exactly zero")
    D = min(f.D, g.D)
    g = g.truncate(D)
    c0 = f.coeffs.get((0,))
    out = PDSeries(g.field, g.nvars, D, {}, f.dim)
    if c0 is not None:
        out = out + PDSeries.constant(g.field, g.nvars, D, c0)
    power = None
    for n in range(1, D + 1):
        power = g if power is None else pd_mul(power, g) * Fraction(1, n)
        cn = f.coeffs.get((n,))
        if cn is None:
            continue
        out = out + PDSeries(g.field, g.nvars, D, {k: cn * c for k, c in power.coeffs.items()}, f.dim)
    if min_precision is not None:
        for k, c in out.coeffs.items():
            if c.precision < min_precision:
                raise PrecisionExhausted(
                    f"coefficient of {k} known to pi^{c.precision}, below the required pi^{min_precision}")
    return out
