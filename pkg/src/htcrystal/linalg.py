"""Square matrices over K and their characteristic polynomials."""
from __future__ import annotations

from fractions import Fraction

from .errors import FieldMismatch, ShapeMismatch
from .local_field import INF, KElement, KPoly, LocalField, valuation


class KMatrix:
    """A ``d x d`` matrix over K, entries stored row-major."""

    __slots__ = ("field", "d", "entries")

    def __init__(self, field: LocalField, d: int, entries):
        entries = tuple(entries)
        if d < 1 or len(entries) != d * d:
            raise ShapeMismatch(f"{len(entries)} entries for a {d}x{d} matrix")
        self.field = field
        self.d = d
        self.entries = entries

    @classmethod
    def from_rows(cls, field: LocalField, rows) -> KMatrix:
        d = len(rows)
        for r, row in enumerate(rows):
            if len(row) != d:
                raise ShapeMismatch(f"row {r} has {len(row)} entries, expected {d}")
        return cls(field, d, [field.element(x) for row in rows for x in row])

    @classmethod
    def identity(cls, field: LocalField, d: int) -> KMatrix:
        one, zero = field.one, field.zero
        return cls(field, d, [one if i == j else zero for i in range(d) for j in range(d)])

    @classmethod
    def zero(cls, field: LocalField, d: int) -> KMatrix:
        return cls(field, d, [field.zero] * (d * d))

    @classmethod
    def scalar(cls, field: LocalField, d: int, s) -> KMatrix:
        s = field.element(s)
        zero = field.zero
        return cls(field, d, [s if i == j else zero for i in range(d) for j in range(d)])

    @classmethod
    def elementary(cls, field: LocalField, d: int, i: int, j: int, t) -> KMatrix:
        """``I + t*E_ij``; for ``i != j`` its inverse is ``elementary(..., -t)``."""
        rows = [[field.one if a == b else field.zero for b in range(d)] for a in range(d)]
        rows[i][j] = rows[i][j] + field.element(t)
        return cls(field, d, [x for row in rows for x in row])

    def __getitem__(self, ij) -> KElement:
        i, j = ij
        return self.entries[i * self.d + j]

    def rows(self) -> list:
        d = self.d
        return [list(self.entries[i * d:(i + 1) * d]) for i in range(d)]

    def _same(self, other: KMatrix) -> None:
        if other.d != self.d:
            raise ShapeMismatch(f"{self.d}x{self.d} vs {other.d}x{other.d}")
        if other.field is not self.field and other.field != self.field:
            raise FieldMismatch("matrices over different fields")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: KMatrix) -> KMatrix:
        if not isinstance(other, KMatrix):
            return NotImplemented
        self._same(other)
        return KMatrix(self.field, self.d, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: KMatrix) -> KMatrix:
        if not isinstance(other, KMatrix):
            return NotImplemented
        self._same(other)
        return KMatrix(self.field, self.d, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> KMatrix:
        return KMatrix(self.field, self.d, [-a for a in self.entries])

    def __mul__(self, other):
        if isinstance(other, KMatrix):
            return mat_mul(self, other)
        if isinstance(other, (KElement, int, Fraction)):
            return KMatrix(self.field, self.d, [a * other for a in self.entries])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, KElement):
            return KMatrix(self.field, self.d, [other * a for a in self.entries])
        if isinstance(other, (int, Fraction)):
            return KMatrix(self.field, self.d, [a * other for a in self.entries])
        return NotImplemented

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.entries)

    def is_exact_zero(self) -> bool:
        return all(a.is_exact_zero() for a in self.entries)

    def equals(self, other: KMatrix) -> bool:
        """Entrywise equality at tracked precision."""
        return (self - other).is_zero()

    @property
    def precision(self):
        """Smallest absolute precision (pi-units) among the entries."""
        return min(a.precision for a in self.entries)

    def trace(self) -> KElement:
        acc = self.field.zero
        for i in range(self.d):
            acc = acc + self[i, i]
        return acc

    def det(self) -> KElement:
        chi = charpoly(self)
        c0 = chi[0]
        return c0 if self.d % 2 == 0 else -c0

    def __eq__(self, other):
        if not isinstance(other, KMatrix):
            return NotImplemented
        return self.d == other.d and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows()) + "]"

    __repr__ = __str__


def mat_mul(A: KMatrix, B: KMatrix) -> KMatrix:
    A._same(B)
    d = A.d
    a, b = A.entries, B.entries
    zero = A.field.zero
    out = []
    for i in range(d):
        row = a[i * d:(i + 1) * d]
        for j in range(d):
            acc = zero
            for k in range(d):
                x = row[k]
                y = b[k * d + j]
                if x.is_exact_zero() or y.is_exact_zero():
                    continue
                acc = acc + x * y
            out.append(acc)
    return KMatrix(A.field, d, out)


def shift(A: KMatrix, s) -> KMatrix:
    """``A + s*I``."""
    s = A.field.element(s)
    d = A.d
    return KMatrix(A.field, d, [x + s if i % (d + 1) == 0 else x for i, x in enumerate(A.entries)])


def min_entry_valuation(A: KMatrix):
    """Smallest entry valuation; zero-at-precision entries count with their precision."""
    return min(valuation(x) for x in A.entries)


def charpoly(A: KMatrix) -> KPoly:
    """``det(x*I - A)`` by Berkowitz's division-free recursion."""
    field, d = A.field, A.d
    M = A.rows()
    # vect holds the characteristic polynomial of the trailing principal
    # submatrix, highest degree first
    vect = [field.one, -M[d - 1][d - 1]]
    for k in range(d - 2, -1, -1):
        size = d - k - 1
        R = M[k][k + 1:]
        C = [M[r][k] for r in range(k + 1, d)]
        S = [row[k + 1:] for row in M[k + 1:]]
        col = [field.one, -M[k][k]]
        v = C
        for _ in range(size):
            acc = field.zero
            for r, x in zip(R, v):
                acc = acc + r * x
            col.append(-acc)
            v = [sum_products(S[r], v, field) for r in range(size)]
        new = []
        for i in range(size + 2):
            acc = field.zero
            for j in range(min(i, size) + 1):
                acc = acc + col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return KPoly(field, list(reversed(vect)))


def sum_products(xs, ys, field: LocalField) -> KElement:
    acc = field.zero
    for x, y in zip(xs, ys):
        if x.is_exact_zero() or y.is_exact_zero():
            continue
        acc = acc + x * y
    return acc


def conjugate_by_shears(A: KMatrix, shears) -> KMatrix:
    """``S A S^-1`` for ``S`` a product of elementary shears ``(i, j, t)``, ``i != j``.

    Each shear's inverse is written down exactly, so no inversion happens.
    """
    field, d = A.field, A.d
    for i, j, t in shears:
        if i == j:
            raise ValueError("shear needs distinct indices")
        S = KMatrix.elementary(field, d, i, j, t)
        S_inv = KMatrix.elementary(field, d, i, j, -field.element(t))
        A = mat_mul(mat_mul(S, A), S_inv)
    return A


__all__ = [
    "INF",
    "KMatrix",
    "charpoly",
    "conjugate_by_shears",
    "mat_mul",
    "min_entry_valuation",
    "shift",
]
