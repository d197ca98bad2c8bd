"""Totally ramified extensions ``K = Q_p[u]/(E(u))`` for Eisenstein ``E``.

Elements are stored in the basis ``1, pi, ..., pi^(e-1)`` with
:class:`~htcrystal.padic.PadicScalar` coordinates.  Valuations are normalized
so that ``v(pi) = 1`` and ``v(p) = e``; precisions are measured in the same
units (an element of precision ``P`` is known modulo ``pi^P``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    FieldMismatch,
    NotEisenstein,
    NotIntegral,
    NotMonic,
    PrecisionInsufficient,
    ZeroDivisor,
)
from .padic import INF, PadicScalar, split_rational

DEFAULT_PRECISION = 40


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class LocalField:
    """``Q_p[u]/(E(u))``; ``E`` holds the exact coefficients ``c_0, ..., c_e = 1``.

    ``prec`` is the absolute p-adic precision given to constants the field
    manufactures (``E'(pi)``, promoted integers, ``pi^-1``).
    """

    p: int
    E: tuple
    prec: int = DEFAULT_PRECISION

    @cached_property
    def e(self) -> int:
        return len(self.E) - 1

    @cached_property
    def _reduction(self):
        # u^e = -sum c_i u^i; only the nonzero terms matter
        return tuple((i, -c) for i, c in enumerate(self.E[:-1]) if c != 0)

    def scalar(self, x, prec=None) -> PadicScalar:
        if isinstance(x, PadicScalar):
            return x
        return PadicScalar.from_rational(self.p, x, self.prec if prec is None else prec)

    def element(self, value, prec=None) -> KElement:
        """Build an element from a rational, a PadicScalar or a pi-basis list.

        Lists longer than ``e`` are reduced modulo ``E``.
        """
        if isinstance(value, KElement):
            return value
        if not isinstance(value, (list, tuple)):
            value = [value]
        zero = PadicScalar.exact_zero(self.p)
        # a literal rational zero is exact; it needs no digits
        coeffs = [zero if not isinstance(c, PadicScalar) and c == 0 else self.scalar(c, prec)
                  for c in value]
        if len(coeffs) <= self.e:
            return KElement(self, coeffs + [zero] * (self.e - len(coeffs)))
        return KElement(self, _reduce(self, coeffs))

    @cached_property
    def zero(self) -> KElement:
        return KElement(self, [PadicScalar.exact_zero(self.p)] * self.e)

    @cached_property
    def one(self) -> KElement:
        return self.element(1)

    @cached_property
    def pi(self) -> KElement:
        if self.e == 1:
            return self.element(-self.E[0])
        return self.element([0, 1])

    @cached_property
    def pi_inverse(self) -> KElement:
        # pi * (pi^(e-1) + c_{e-1} pi^(e-2) + ... + c_1) = -c_0
        c0 = self.E[0]
        return self.element([-self.E[j + 1] / c0 for j in range(self.e)])

    def pi_power(self, k: int) -> KElement:
        if k >= 0:
            return k_pow(self.pi, k)
        return k_pow(self.pi_inverse, -k)

    @cached_property
    def E_prime_pi(self) -> KElement:
        """``E'(pi)`` in the pi-basis."""
        return self.element([i * c for i, c in enumerate(self.E)][1:])

    @cached_property
    def E0(self) -> KElement:
        return self.element(self.E[0])

    @cached_property
    def E0_scalar(self) -> PadicScalar:
        return self.scalar(self.E[0])

    @cached_property
    def v_E_prime(self) -> int:
        return valuation(self.E_prime_pi)

    def with_precision(self, prec: int) -> LocalField:
        return LocalField(self.p, self.E, prec)

    def describe(self) -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.E))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("u" if i == 1 else f"u^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")


def field_make(p: int, E_coeffs, prec: int = DEFAULT_PRECISION) -> LocalField:
    """Validate ``E`` (coefficients low to high) and build the field."""
    if not _is_prime(p):
        raise ValueError(f"p={p} is not prime")
    E = tuple(Fraction(c) for c in E_coeffs)
    while len(E) > 1 and E[-1] == 0:
        E = E[:-1]
    if len(E) < 2:
        raise NotEisenstein("E must have degree at least 1")
    if E[-1] != 1:
        raise NotMonic(f"leading coefficient of E is {E[-1]}, expected 1")
    for i, c in enumerate(E[:-1]):
        if c == 0:
            if i == 0:
                raise NotEisenstein("E(0) = 0 has infinite valuation, expected 1")
            continue
        v = split_rational(c, p)[0]
        if i == 0 and v != 1:
            raise NotEisenstein(f"v_{p}(c_0) = v_{p}({c}) = {v}, expected 1")
        if v < 1:
            raise NotEisenstein(f"v_{p}(c_{i}) = v_{p}({c}) = {v}, expected >= 1")
    return LocalField(p, E, prec)


def _reduce(field: LocalField, coeffs: list) -> list:
    """Reduce a coefficient list of any length modulo E, in place."""
    e = field.e
    red = field._reduction
    for k in range(len(coeffs) - 1, e - 1, -1):
        t = coeffs[k]
        if t.prec == INF:
            continue
        base = k - e
        for i, c in red:
            coeffs[base + i] = coeffs[base + i] + t.scale(c)
    return coeffs[:e]


class KElement:
    """``sum a_i pi^i`` with canonical precision bookkeeping."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: LocalField, coeffs):
        self.field = field
        e = field.e
        P = INF
        for i, c in enumerate(coeffs):
            if c.prec != INF:
                q = e * c.prec + i
                if q < P:
                    P = q
        if P != INF:
            # coefficient i is only meaningful modulo p^ceil((P - i)/e)
            coeffs = [c if c.prec <= _ceil_div(P - i, e) else c.with_precision(_ceil_div(P - i, e))
                      for i, c in enumerate(coeffs)]
        self.coeffs = tuple(coeffs)

    # -- queries -------------------------------------------------------

    @property
    def precision(self):
        """Absolute precision in pi-units (INF only for the exact zero)."""
        e = self.field.e
        P = INF
        for i, c in enumerate(self.coeffs):
            if c.prec != INF:
                q = e * c.prec + i
                if q < P:
                    P = q
        return P

    def is_zero(self) -> bool:
        return all(c.val == INF for c in self.coeffs)

    def is_exact_zero(self) -> bool:
        return all(c.prec == INF for c in self.coeffs)

    def valuation(self):
        return valuation(self)

    def residue(self) -> int:
        """Image in the residue field F_p."""
        v = self.valuation()
        if self.is_zero():
            if v < 1:
                raise PrecisionInsufficient(f"residue of {self} is not determined")
            return 0
        if v < 0:
            raise NotIntegral(f"{self} has valuation {v}")
        return self.coeffs[0].residue()

    def with_precision(self, P) -> KElement:
        if P >= self.precision:
            return self
        e = self.field.e
        return KElement(self.field, [c.with_precision(min(c.prec, _ceil_div(P - i, e)))
                                     for i, c in enumerate(self.coeffs)])

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def lift(self) -> list:
        return [c.lift() for c in self.coeffs]

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, KElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return KElement(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return KElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return KElement(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, KElement):
            return k_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        if isinstance(other, KElement):
            return k_mul(self, k_inv(other))
        return NotImplemented

    def __pow__(self, n: int):
        return k_pow(self, n)

    def scale(self, r) -> KElement:
        if r == 0:
            return self.field.zero
        return KElement(self.field, [a.scale(r) for a in self.coeffs])

    # -- comparison / display -----------------------------------------

    def __eq__(self, other):
        if not isinstance(other, KElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        if self.is_exact_zero():
            return "0"
        if self.field.e == 1:
            return str(self.coeffs[0])
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.val == INF:
                continue
            mono = "" if i == 0 else ("pi" if i == 1 else f"pi^{i}")
            body = c.format(with_o=False)
            if mono and body == "1":
                body = mono
            elif mono:
                body = f"({body})*{mono}" if " " in body or "*" in body else f"{body}*{mono}"
            parts.append(body)
        parts.append(f"O(pi^{self.precision})")
        return " + ".join(parts)

    def __repr__(self):
        return f"KElement({self})"


def k_add(x: KElement, y: KElement) -> KElement:
    return x + y


def k_mul(x: KElement, y: KElement) -> KElement:
    field = x.field
    if y.field is not field and y.field != field:
        raise FieldMismatch("elements of different fields")
    e = field.e
    a, b = x.coeffs, y.coeffs
    if e == 1:
        return KElement(field, [a[0] * b[0]])
    zero = PadicScalar.exact_zero(field.p)
    prod = [zero] * (2 * e - 1)
    for i, ai in enumerate(a):
        if ai.prec == INF:
            continue
        for j, bj in enumerate(b):
            if bj.prec == INF:
                continue
            prod[i + j] = prod[i + j] + ai * bj
    return KElement(field, _reduce(field, prod))


def k_pow(x: KElement, n: int) -> KElement:
    if n < 0:
        return k_pow(k_inv(x), -n)
    result = x.field.one
    base = x
    first = True
    while n:
        if n & 1:
            result = base if first else k_mul(result, base)
            first = False
        n >>= 1
        if n:
            base = k_mul(base, base)
    return result


def k_inv(x: KElement) -> KElement:
    """Inverse by Newton iteration on the unit part."""
    field = x.field
    if x.is_zero():
        raise ZeroDivisor(f"inverse of {x}, which is zero at precision {x.precision}")
    v = valuation(x)
    w = x if v == 0 else k_mul(x, field.pi_power(-v))
    P = w.precision
    if P < 1:
        raise ZeroDivisor(f"unit part of {x} is not determined")
    y = field.element(pow(w.coeffs[0].residue(), -1, field.p))
    for _ in range(128):
        err = field.one - k_mul(w, y)
        if err.is_zero():
            P = min(P, err.precision)
            break
        y = y + k_mul(y, err)
    else:  # pragma: no cover - Newton always converges on units
        raise ArithmeticError("inverse did not converge")
    y = y.with_precision(P)
    return y if v == 0 else k_mul(y, field.pi_power(-v))


def valuation(x: KElement):
    """``min_i (e * v_p(a_i) + i)``; for a zero at precision ``P`` returns the bound ``P``."""
    e = x.field.e
    v = INF
    P = INF
    for i, c in enumerate(x.coeffs):
        if c.prec != INF:
            q = e * c.prec + i
            if q < P:
                P = q
        if c.val != INF:
            q = e * c.val + i
            if q < v:
                v = q
    return v if v < P else P


# ----------------------------------------------------------------------
# polynomials over K


class KPoly:
    """Polynomial with KElement coefficients, lowest degree first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: LocalField, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_exact_zero():
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_values(cls, field: LocalField, values) -> KPoly:
        return cls(field, [field.element(v) for v in values])

    @classmethod
    def x(cls, field: LocalField) -> KPoly:
        return cls(field, [field.zero, field.one])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> KElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    def __add__(self, other: KPoly) -> KPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        return KPoly(self.field, [self[i] + other[i] for i in range(n)])

    def __neg__(self) -> KPoly:
        return KPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other: KPoly) -> KPoly:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, KPoly):
            if not self.coeffs or not other.coeffs:
                return KPoly(self.field, [])
            out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return KPoly(self.field, out)
        if isinstance(other, (KElement, int, Fraction)):
            return KPoly(self.field, [c * other for c in self.coeffs])
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, x: KElement) -> KElement:
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, s) -> KPoly:
        """``f(x + s)``, by Horner's scheme in ``K[x]``."""
        lin = KPoly(self.field, [self.field.element(s) if not isinstance(s, KElement) else s,
                                 self.field.one])
        acc = KPoly(self.field, [])
        for c in reversed(self.coeffs):
            acc = acc * lin + KPoly(self.field, [c])
        return acc

    def equals(self, other: KPoly) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        return all((self[i] - other[i]).is_zero() for i in range(n))

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_exact_zero():
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(reversed(terms)) or "0"

    __repr__ = __str__


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of ``(i, v(f_i))`` after removing the order at zero."""

    segments: tuple  # ((slope, horizontal_length), ...), slopes increasing
    vertices: tuple
    order_at_zero: int

    def root_valuations(self) -> list:
        out = []
        for slope, length in self.segments:
            out.extend([-slope] * length)
        return out


def _lower_hull(points):
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (pt[1] - y0) - (y1 - y0) * (pt[0] - x0) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(f: KPoly) -> NewtonPolygon:
    if not f.coeffs or all(c.is_zero() for c in f.coeffs):
        raise ValueError("Newton polygon of the zero polynomial")
    lead = f.coeffs[-1]
    if lead.is_zero():
        raise PrecisionInsufficient("leading coefficient is zero at its precision")
    certain, uncertain = [], []
    for i, c in enumerate(f.coeffs):
        if c.is_exact_zero():
            continue
        if c.is_zero():
            uncertain.append((i, c.precision))
        else:
            certain.append((i, Fraction(valuation(c))))
    x0 = certain[0][0]
    if any(i < x0 for i, _ in uncertain):
        raise PrecisionInsufficient("order of vanishing at zero is not determined")
    hull = _lower_hull(certain)
    segments = []
    for (xa, ya), (xb, yb) in zip(hull, hull[1:]):
        segments.append((Fraction(yb - ya, 1) / (xb - xa), xb - xa))
    for i, bound in uncertain:
        for (xa, ya), (xb, yb) in zip(hull, hull[1:]):
            if xa <= i <= xb:
                at = ya + (yb - ya) * Fraction(i - xa, xb - xa)
                if at > bound:
                    raise PrecisionInsufficient(
                        f"coefficient {i} is zero modulo pi^{bound}, below the hull value {at}")
                break
    return NewtonPolygon(tuple(segments), tuple(hull), x0)


# ----------------------------------------------------------------------
# residue field F_p


def residue_reduce(f: KPoly) -> list:
    """Coefficientwise image in ``F_p[x]`` (lowest degree first, trimmed)."""
    out = []
    for c in f.coeffs:
        if not c.is_zero() and valuation(c) < 0:
            raise NotIntegral(f"coefficient {c} has negative valuation")
        out.append(c.residue())
    return fp_trim(out)


def fp_trim(f: list) -> list:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def fp_mul(f: list, g: list, p: int) -> list:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % p
    return fp_trim(out)


def fp_div_linear(f: list, r: int, p: int):
    """Divide by ``x - r``; returns ``(quotient, remainder)``."""
    if not f:
        return [], 0
    n = len(f) - 1
    q = [0] * n
    acc = 0
    for k in range(n, 0, -1):
        acc = (acc * r + f[k]) % p
        q[k - 1] = acc
    rem = (acc * r + f[0]) % p
    return q, rem


def fp_linear_factors(f: list, p: int, scale: int = 1):
    """Strip factors ``(x + i*scale)``, ``i = 0..p-1``, by trial division.

    Returns ``({i: multiplicity}, leftover_quotient)``.
    """
    found = {}
    f = fp_trim(f)
    if f and f[-1] != 1:
        inv = pow(f[-1], -1, p)
        f = [c * inv % p for c in f]
    for i in range(p):
        root = (-i * scale) % p
        while len(f) > 1:
            q, rem = fp_div_linear(f, root, p)
            if rem:
                break
            found[i] = found.get(i, 0) + 1
            f = q
    return found, f
