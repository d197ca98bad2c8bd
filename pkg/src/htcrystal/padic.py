"""Elements of Q_p carried to a capped absolute precision.

A :class:`PadicScalar` stores ``p**val * unit`` where ``unit`` is a p-adic unit
known modulo ``p**(prec - val)``.  Two zero states exist: the exact zero
(``val = prec = INF``) and a zero at precision ``N`` (``val = INF``, ``prec = N``),
meaning every tracked digit vanished.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

from .errors import NotIntegral, PrecisionInsufficient, PrimeMismatch, ZeroDivisor

INF = math.inf


@lru_cache(maxsize=4096)
def ppow(p: int, k: int) -> int:
    return p ** k


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def split_rational(x, p: int):
    """Return ``(v, num, den)`` with ``x = p**v * num / den`` and num, den prime to p."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no unit part")
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v, num, den


class PadicScalar:
    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val, unit: int, prec):
        # raw constructor: callers guarantee the canonical form
        self.p = p
        self.val = val
        self.unit = unit
        self.prec = prec

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def exact_zero(cls, p: int) -> PadicScalar:
        return cls(p, INF, 0, INF)

    @classmethod
    def zero(cls, p: int, prec) -> PadicScalar:
        """Zero known modulo ``p**prec``."""
        return cls(p, INF, 0, prec)

    @classmethod
    def from_rational(cls, p: int, x, prec: int) -> PadicScalar:
        """The rational ``x`` (int, Fraction or ``"a/b"`` string) modulo ``p**prec``."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        v, num, den = split_rational(x, p)
        if v >= prec:
            return cls.zero(p, prec)
        m = ppow(p, prec - v)
        return cls(p, v, num * pow(den, -1, m) % m, prec)

    @classmethod
    def from_parts(cls, p: int, val: int, unit: int, prec) -> PadicScalar:
        """Normalize ``p**val * unit`` modulo ``p**prec``; ``unit`` may be divisible by p."""
        return _normalize(p, val, unit, prec)

    # ------------------------------------------------------------------
    # queries

    def is_exact_zero(self) -> bool:
        return self.prec == INF

    def is_zero(self) -> bool:
        """True when every tracked digit is zero (includes the exact zero)."""
        return self.val == INF

    @property
    def valuation(self):
        """The valuation; for a zero at precision N this is the lower bound N."""
        if self.val == INF:
            return self.prec
        return self.val

    @property
    def precision(self):
        return self.prec

    @property
    def relative_precision(self):
        if self.val == INF:
            return 0
        return self.prec - self.val

    def lift(self) -> Fraction:
        """The canonical rational representative ``p**val * unit``."""
        if self.val == INF:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self) -> int:
        """Image in F_p of an integral element."""
        if self.val == INF:
            if self.prec < 1:
                raise PrecisionInsufficient("residue of a zero known only below p^1")
            return 0
        if self.val < 0:
            raise NotIntegral(f"{self} is not integral")
        return self.unit % self.p if self.val == 0 else 0

    def with_precision(self, prec) -> PadicScalar:
        """Forget digits beyond ``p**prec``; raising the precision is refused."""
        if prec > self.prec:
            raise ValueError("cannot extend precision")
        if prec == self.prec:
            return self
        if self.val == INF:
            return PadicScalar.zero(self.p, prec)
        if self.val >= prec:
            return PadicScalar.zero(self.p, prec)
        return PadicScalar(self.p, self.val, self.unit % ppow(self.p, prec - self.val), prec)

    def equals(self, other) -> bool:
        """Equality at the smaller of the two precisions."""
        return (self - other).is_zero()

    # ------------------------------------------------------------------
    # arithmetic

    def __neg__(self) -> PadicScalar:
        if self.val == INF:
            return self
        m = ppow(self.p, self.prec - self.val)
        return PadicScalar(self.p, self.val, (-self.unit) % m, self.prec)

    def __add__(self, other):
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return padic_add(self, other)

    def __sub__(self, other):
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return padic_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, PadicScalar):
            return padic_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, PadicScalar):
            return padic_mul(self, padic_inv(other))
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def scale(self, r) -> PadicScalar:
        """Multiply by an exact rational; relative precision is unchanged."""
        if r == 0:
            return PadicScalar.exact_zero(self.p)
        if self.prec == INF:
            return self
        v, num, den = split_rational(r, self.p)
        if self.val == INF:
            return PadicScalar.zero(self.p, self.prec + v)
        rel = self.prec - self.val
        m = ppow(self.p, rel)
        if den == 1:
            u = self.unit * num % m
        else:
            u = self.unit * num * pow(den, -1, m) % m
        return PadicScalar(self.p, self.val + v, u, self.prec + v)

    # ------------------------------------------------------------------
    # comparison and display

    def __eq__(self, other):
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return (self.p, self.val, self.unit, self.prec) == (other.p, other.val, other.unit, other.prec)

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, least significant first."""
        if self.val == INF:
            return []
        out = []
        u = self.unit
        for _ in range(self.prec - self.val):
            u, d = divmod(u, self.p)
            out.append(d)
        return out

    def __str__(self):
        return self.format()

    def format(self, with_o: bool = True) -> str:
        """Digit expansion ``d0 + d1*p + ... + O(p^N)``."""
        p = self.p
        if self.prec == INF:
            return "0"
        terms = []
        if self.val != INF:
            for k, d in enumerate(self.digits(), start=self.val):
                if d == 0:
                    continue
                mono = "" if k == 0 else (f"{p}" if k == 1 else f"{p}^{k}")
                if not mono:
                    terms.append(f"{d}")
                elif d == 1:
                    terms.append(mono)
                else:
                    terms.append(f"{d}*{mono}")
        if with_o:
            terms.append(f"O({p}^{self.prec})")
        return " + ".join(terms) or "0"

    def __repr__(self):
        return f"PadicScalar({self})"


def _normalize(p: int, v, u: int, prec) -> PadicScalar:
    if prec == INF:
        if u != 0:
            raise ValueError("only zero can be exact")
        return PadicScalar.exact_zero(p)
    if v == INF or v >= prec:
        return PadicScalar.zero(p, prec)
    u %= ppow(p, prec - v)
    if u == 0:
        return PadicScalar.zero(p, prec)
    while u % p == 0:
        u //= p
        v += 1
    return PadicScalar(p, v, u, prec)


def padic_add(a: PadicScalar, b: PadicScalar) -> PadicScalar:
    if a.p != b.p:
        raise PrimeMismatch(f"p={a.p} vs p={b.p}")
    prec = a.prec if a.prec < b.prec else b.prec
    if a.val == INF:
        return b if b.prec == prec else b.with_precision(prec)
    if b.val == INF:
        return a if a.prec == prec else a.with_precision(prec)
    p = a.p
    if a.val <= b.val:
        v = a.val
        u = a.unit + b.unit * ppow(p, b.val - v)
    else:
        v = b.val
        u = b.unit + a.unit * ppow(p, a.val - v)
    if a.val != b.val:
        # leading unit survives: no stripping needed
        if v >= prec:
            return PadicScalar.zero(p, prec)
        return PadicScalar(p, v, u % ppow(p, prec - v), prec)
    return _normalize(p, v, u, prec)


def padic_mul(a: PadicScalar, b: PadicScalar) -> PadicScalar:
    if a.p != b.p:
        raise PrimeMismatch(f"p={a.p} vs p={b.p}")
    p = a.p
    if a.prec == INF or b.prec == INF:
        return PadicScalar.exact_zero(p)
    if a.val == INF:
        return PadicScalar.zero(p, a.prec + (b.prec if b.val == INF else b.val))
    if b.val == INF:
        return PadicScalar.zero(p, b.prec + a.val)
    ra = a.prec - a.val
    rb = b.prec - b.val
    rel = ra if ra < rb else rb
    v = a.val + b.val
    return PadicScalar(p, v, a.unit * b.unit % ppow(p, rel), v + rel)


def padic_inv(a: PadicScalar) -> PadicScalar:
    if a.val == INF:
        raise ZeroDivisor(f"inverse of {a}")
    rel = a.prec - a.val
    m = ppow(a.p, rel)
    return PadicScalar(a.p, -a.val, pow(a.unit, -1, m), rel - a.val)


# ----------------------------------------------------------------------
# textual literals

_TOKEN = re.compile(r"\s*(?:(O\()|(\d+)|(\*\*|\*|\^|/|\+-|±|\+|-|\(|\)))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        if m.group(1):
            out.append(("O", pos))
        elif m.group(2):
            out.append((int(m.group(2)), pos))
        else:
            tok = m.group(3)
            out.append(("^" if tok == "**" else "±" if tok == "+-" else tok, pos))
        pos = m.end()
    return out


def parse_padic(text: str, p: int, prec: int) -> PadicScalar:
    """Parse ``a/b``, ``u*p^v + O(p^N)`` or a digit expansion ``d0 + d1*p + ... + O(p^N)``.

    Without an ``O(p^N)`` term the value is taken modulo ``p**prec``.
    """
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i][0] if i < len(toks) else None

    def take(expected=None):
        nonlocal i
        if i >= len(toks):
            raise ValueError(f"unexpected end of literal {text!r}")
        tok = toks[i]
        if expected is not None and tok[0] != expected:
            raise ValueError(f"expected {expected!r} at column {tok[1] + 1} in {text!r}")
        i += 1
        return tok[0]

    def power_of_p():
        # p [ ^ [-] int ]
        base = take()
        if base != p:
            raise ValueError(f"power base {base} does not match p={p}")
        if peek() == "^":
            take()
            sign = 1
            if peek() == "-":
                take()
                sign = -1
            return sign * take()
        return 1

    def term():
        # rational [* p^k]  |  p^k  (a bare integer equal to p followed by ^ is a power)
        first = take()
        if not isinstance(first, int):
            raise ValueError(f"expected a number in {text!r}")
        if peek() == "^":
            if first != p:
                raise ValueError(f"power base {first} does not match p={p}")
            take()
            sign = 1
            if peek() == "-":
                take()
                sign = -1
            return Fraction(p) ** (sign * take())
        coef = Fraction(first)
        if peek() == "/":
            take()
            coef /= take()
        if peek() == "*":
            take()
            coef *= Fraction(p) ** power_of_p()
        return coef

    if not toks:
        raise ValueError("empty literal")
    total = Fraction(0)
    cap = None
    sign = 1
    if peek() == "-":
        take()
        sign = -1
    while i < len(toks):
        if peek() == "O":
            take()
            cap = power_of_p()
            take(")")
            if i != len(toks):
                raise ValueError(f"O(...) must be the last term in {text!r}")
            break
        total += sign * term()
        if i == len(toks):
            break
        op = take()
        if op in ("+", "±"):
            sign = 1
        elif op == "-":
            sign = -1
        else:
            raise ValueError(f"unexpected {op!r} in {text!r}")
        if i == len(toks):
            raise ValueError(f"dangling {op!r} at the end of {text!r}")
    if cap is None:
        cap = prec
    return PadicScalar.from_rational(p, total, cap)
