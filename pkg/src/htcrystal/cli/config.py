"""Crystal config files: ``key = value`` lines, ``#`` comments, ``[..]`` lists.

Example::

    p = 5
    E = [-5, 1]          # u - 5, coefficients low to high
    A1 = [[-3]]          # rows of pi-basis lists or plain scalars
    precision = 12

Scalars are rationals ``n/d`` or p-adic literals such as ``3*5^2 + O(5^6)``.
A bracketed list inside ``A1`` is an element in the pi-power basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import factorial

from ..crystal import HTCrystal
from ..errors import HTCrystalError
from ..linalg import KMatrix
from ..local_field import LocalField, field_make
from ..padic import PadicScalar, parse_padic, vp_int

DEFAULT_PRECISION = 12
DEFAULT_DEGREE = 6
INT_KEYS = ("p", "precision", "degree", "seed", "count")
KNOWN_KEYS = INT_KEYS + ("E", "A1")


class ConfigError(HTCrystalError, ValueError):
    def __init__(self, message: str, line: int = None, col: int = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


@dataclass
class CrystalConfig:
    p: int
    E: tuple  # exact rationals, low to high
    A1: list  # rows of entries; an entry is a list of pi-basis scalars
    precision: int = DEFAULT_PRECISION
    degree: int = DEFAULT_DEGREE
    seed: int = None
    count: int = None
    _field: LocalField = dc_field(default=None, repr=False, compare=False)

    @property
    def rank(self) -> int:
        return len(self.A1)

    def margin(self, degree=None) -> int:
        """Extra p-digits for the ``n!`` divisions of a degree-``D`` computation."""
        D = self.degree if degree is None else degree
        return (len(self.E) - 1) * vp_int(factorial(D), self.p) + 2

    def field(self, degree=None) -> LocalField:
        if degree is None and self._field is not None:
            return self._field
        K = field_make(self.p, self.E, self.precision + self.margin(degree))
        if degree is None:
            self._field = K
        return K

    def crystal(self, degree=None) -> HTCrystal:
        K = self.field(degree)
        return HTCrystal(K, KMatrix.from_rows(K, [[K.element(list(x)) for x in row] for row in self.A1]))


# ----------------------------------------------------------------------
# lexing and list structure


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _logical_lines(text: str):
    """Yield ``(line_no, col_offset, key, value_chunks)``; values may continue over lines."""
    pending = None
    depth = 0
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if pending is None:
            if not line.strip():
                continue
            if "=" not in line:
                col = len(line) - len(line.lstrip()) + 1
                raise ConfigError("expected 'key = value'", no, col)
            k = line.index("=")
            key = line[:k].strip()
            if not key:
                raise ConfigError("missing key before '='", no, 1)
            pending = (no, key, [(no, k + 1, line[k + 1:])])
            chunk = line[k + 1:]
        else:
            pending[2].append((no, 0, line))
            chunk = line
        for ch in chunk:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
        if depth <= 0:
            yield pending
            pending = None
            depth = 0
    if pending is not None:
        raise ConfigError(f"unterminated '[' in value of {pending[1]!r}", pending[0])


def _parse_value(chunks):
    """Parse a value into nested lists of :class:`Atom`."""
    chars = [(c, no, off + i + 1) for no, off, s in chunks for i, c in enumerate(s + "\n")]
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(chars) and chars[pos][0].isspace():
            pos += 1

    def where():
        if pos < len(chars):
            return chars[pos][1], chars[pos][2]
        return chars[-1][1], chars[-1][2]

    def value():
        nonlocal pos
        skip_ws()
        if pos >= len(chars):
            raise ConfigError("missing value", *where())
        if chars[pos][0] == "[":
            pos += 1
            items = []
            skip_ws()
            if pos < len(chars) and chars[pos][0] == "]":
                pos += 1
                return items
            while True:
                items.append(value())
                skip_ws()
                if pos >= len(chars):
                    raise ConfigError("unterminated list", *where())
                c = chars[pos][0]
                pos += 1
                if c == "]":
                    return items
                if c != ",":
                    pos -= 1
                    raise ConfigError(f"expected ',' or ']' but found {c!r}", *where())
        if chars[pos][0] in ",]":
            raise ConfigError(f"expected a value before {chars[pos][0]!r}", *where())
        start = pos
        paren = 0
        while pos < len(chars):
            c = chars[pos][0]
            if c == "(":
                paren += 1
            elif c == ")":
                paren -= 1
            elif paren == 0 and c in ",[]":
                break
            pos += 1
        text = "".join(c for c, _, _ in chars[start:pos]).strip()
        if "[" == (chars[pos][0] if pos < len(chars) else None):
            raise ConfigError("unexpected '['", *where())
        return Atom(text, chars[start][1], chars[start][2])

    out = value()
    skip_ws()
    if pos < len(chars):
        raise ConfigError(f"unexpected trailing text {chars[pos][0]!r}", *where())
    return out


# ----------------------------------------------------------------------
# interpretation


def _int(v, key):
    if not isinstance(v, Atom):
        raise ConfigError(f"{key} must be an integer, not a list")
    try:
        return int(v.text)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {v.text!r}", v.line, v.col) from None


def _rational(a: Atom) -> Fraction:
    try:
        return Fraction(a.text.replace(" ", ""))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a rational number, got {a.text!r}", a.line, a.col) from None


def _scalar(a: Atom, p: int, prec: int):
    """Exact rational when possible, else a p-adic literal."""
    try:
        return Fraction(a.text.replace(" ", ""))
    except ZeroDivisionError:
        raise ConfigError("division by zero", a.line, a.col) from None
    except ValueError:
        pass
    try:
        return parse_padic(a.text, p, prec)
    except (ValueError, HTCrystalError) as exc:
        raise ConfigError(f"bad literal {a.text!r}: {exc}", a.line, a.col) from None


def parse_config(text: str, overrides: dict = None) -> CrystalConfig:
    raw = {}
    where = {}
    for no, key, chunks in _logical_lines(text):
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", no, 1)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first set on line {where[key]})", no, 1)
        raw[key] = _parse_value(chunks)
        where[key] = no
    for key, val in (overrides or {}).items():
        if val is not None:
            raw[key] = Atom(str(val), None, None)
    for key in ("p", "E", "A1"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    ints = {k: _int(raw[k], k) for k in INT_KEYS if k in raw}
    p = ints["p"]
    precision = ints.get("precision", DEFAULT_PRECISION)
    degree = ints.get("degree", DEFAULT_DEGREE)
    if precision < 1:
        raise ConfigError("precision must be at least 1", where.get("precision"))
    if degree < 0:
        raise ConfigError("degree must be non-negative", where.get("degree"))

    E_val = raw["E"]
    if not isinstance(E_val, list) or not all(isinstance(x, Atom) for x in E_val):
        raise ConfigError("E must be a flat list of rationals", where["E"])
    E = tuple(_rational(a) for a in E_val)
    try:
        K = field_make(p, E, precision)
    except HTCrystalError as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}", where["E"]) from None
    except ValueError as exc:
        raise ConfigError(str(exc), where.get("p")) from None

    rows = raw["A1"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ConfigError("A1 must be a non-empty list of rows", where["A1"])
    d = len(rows)
    cap = precision + (K.e * vp_int(factorial(degree), p) + 2)
    A1 = []
    for r, row in enumerate(rows):
        if len(row) != d:
            first = _first_atom(row)
            raise ConfigError(f"row {r} of A1 has {len(row)} entries, expected {d}",
                              first.line if first else where["A1"], first.col if first else None)
        out_row = []
        for entry in row:
            parts = entry if isinstance(entry, list) else [entry]
            if not parts or not all(isinstance(x, Atom) for x in parts):
                first = _first_atom(entry)
                raise ConfigError("an entry must be a scalar or a flat pi-basis list",
                                  first.line if first else where["A1"], first.col if first else None)
            out_row.append([_scalar(a, p, cap) for a in parts])
        A1.append(out_row)
    return CrystalConfig(p, E, A1, precision, degree, ints.get("seed"), ints.get("count"))


def _first_atom(v):
    if isinstance(v, Atom):
        return v
    for x in v:
        a = _first_atom(x)
        if a is not None:
            return a
    return None


# ----------------------------------------------------------------------
# printing


def _fmt_scalar(x) -> str:
    if isinstance(x, PadicScalar):
        return x.format()
    return str(Fraction(x))


def format_config(cfg: CrystalConfig) -> str:
    """Text that :func:`parse_config` reads back to an equal config."""
    lines = [f"p = {cfg.p}", "E = [" + ", ".join(str(c) for c in cfg.E) + "]",
             f"precision = {cfg.precision}", f"degree = {cfg.degree}"]
    rows = []
    for row in cfg.A1:
        rows.append("[" + ", ".join("[" + ", ".join(_fmt_scalar(x) for x in entry) + "]" for entry in row) + "]")
    lines.append("A1 = [" + (",\n      ".join(rows)) + "]")
    if cfg.seed is not None:
        lines.append(f"seed = {cfg.seed}")
    if cfg.count is not None:
        lines.append(f"count = {cfg.count}")
    return "\n".join(lines) + "\n"
