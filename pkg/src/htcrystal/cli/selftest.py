"""Seeded random self-test over three families of crystals.

Stratum ``a``: nearly Hodge-Tate by construction (upper triangular, diagonal
``-i E'(pi) + m`` with ``m`` in the maximal ideal, integral off-diagonal part,
conjugated by integral shears).

Stratum ``b``: violators whose eigenvalues all fail the condition, at least one
of them with negative valuation.

Stratum ``c`` (e = 1 only): integral violators whose characteristic
polynomial is irreducible of degree 2 or 3 modulo p, so no eigenvalue has a
residue in F_p.  Such a matrix cannot be triangular over K, so these are
companion matrices lifted by multiples of p and conjugated by shears.
"""
from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from ..crystal import (
    Outcome,
    binomial_series,
    cocycle_check,
    convergence_oracle,
    nearly_ht_check,
    stratify,
)
from ..errors import HTCrystalError
from ..linalg import KMatrix, shift
from ..sen import multiplicativity_check, recover_sen, sen_from_crystal, tau_cocycle
from .config import CrystalConfig, format_config
from .report import EXIT_FAILURE, Report

STRATA = ("a", "b", "c")
SUITES = ("recursion", "cocycle", "nearly_ht", "sen", "twist")
TARGET_PRECISION = 12
SERIES_DEGREE = 8
COCYCLE_DEGREE = 6
THRESHOLD = 8


# ----------------------------------------------------------------------
# exact arithmetic in Q[u]/E on pi-basis lists


def _qreduce(c, E):
    e = len(E) - 1
    c = list(c) + [Fraction(0)] * max(0, e - len(c))
    for k in range(len(c) - 1, e - 1, -1):
        t = c[k]
        if t:
            for i in range(e):
                c[k - e + i] -= t * E[i]
            c[k] = Fraction(0)
    return c[:e]


def _qmul(a, b, E):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _qreduce(out, E)


def _qadd(a, b):
    return [x + y for x, y in zip(a, b)]


def _qscale(a, r):
    return [x * r for x in a]


def _conjugate(A, E, rng, count):
    """``S A S^-1`` for random integral shears ``S = I + t E_ij``, done exactly."""
    d = len(A)
    e = len(E) - 1
    A = [[list(x) for x in row] for row in A]
    for _ in range(count if d > 1 else 0):
        i, j = rng.sample(range(d), 2)
        t = [Fraction(rng.randint(-2, 2)) for _ in range(e)]
        # row i += t * row j, then column j -= t * column i
        A[i] = [_qadd(A[i][k], _qmul(t, A[j][k], E)) for k in range(d)]
        for r in range(d):
            A[r][j] = _qadd(A[r][j], _qscale(_qmul(t, A[r][i], E), -1))
    return A


# ----------------------------------------------------------------------
# case generation


@dataclass
class Case:
    stratum: str
    index: int
    config: CrystalConfig
    nearly_ht: bool
    rng: random.Random


def _random_field(rng, e):
    p = rng.choice((2, 3, 5))
    unit = rng.choice([u for u in range(1, 2 * p) if u % p])
    E = [Fraction(rng.choice((1, -1)) * p * unit)]
    E += [Fraction(p * rng.randint(-1, 1)) for _ in range(e - 1)]
    return p, E + [Fraction(1)]


def _integral(rng, p, e):
    return [Fraction(rng.randint(-p, p)) for _ in range(e)]


def _unit(rng, p, e):
    x = _integral(rng, p, e)
    x[0] = Fraction(rng.choice([u for u in range(-p, p + 1) if u % p]))
    return x


def _pi(E):
    e = len(E) - 1
    return [-E[0]] if e == 1 else [Fraction(0), Fraction(1)] + [Fraction(0)] * (e - 2)


def _has_root_mod_p(g, p):
    return any(sum(c * pow(x, k, p) for k, c in enumerate(g)) % p == 0 for x in range(p))


def _stratum_a(rng, p, E, d):
    e = len(E) - 1
    Ep = [Fraction(i * E[i]) for i in range(1, e + 1)]
    A = []
    for r in range(d):
        row = []
        for c in range(d):
            if c < r:
                row.append([Fraction(0)] * e)
            elif c > r:
                row.append(_integral(rng, p, e))
            else:
                i = rng.randint(-p, p)
                m = [Fraction(0)] * e if rng.random() < 0.25 else _qmul(_pi(E), _integral(rng, p, e), E)
                row.append(_qadd(_qscale(Ep, -i), m))
        A.append(row)
    return A


def _stratum_b(rng, p, E, d):
    e = len(E) - 1
    bad = rng.randrange(d)
    A = []
    for r in range(d):
        row = []
        for c in range(d):
            if c < r:
                row.append([Fraction(0)] * e)
            elif c > r:
                row.append(_integral(rng, p, e))
            elif r == bad or e == 1 or rng.random() < 0.5:
                # valuation -e*k: a unit divided by p^k
                row.append(_qscale(_unit(rng, p, e), Fraction(1, p ** rng.randint(1, 2))))
            else:
                row.append(_unit(rng, p, e))
        A.append(row)
    return A


def _stratum_c(rng, p, E, d):
    while True:
        g = [rng.randrange(p) for _ in range(d)] + [1]
        if not _has_root_mod_p(g, p):
            break
    # companion matrix of g, lifted by multiples of p
    A = [[[Fraction(0)] for _ in range(d)] for _ in range(d)]
    for r in range(1, d):
        A[r][r - 1] = [Fraction(1)]
    for r in range(d):
        A[r][d - 1] = [Fraction(-g[r])]
    for r in range(d):
        for c in range(d):
            A[r][c] = [A[r][c][0] + p * rng.randint(-1, 1)]
    return A


def make_case(seed: int, stratum: str, index: int) -> Case:
    rng = random.Random(f"{seed}/{stratum}/{index}")
    if stratum == "c":
        p, E = _random_field(rng, 1)
        d = rng.choice((2, 3))
        A = _stratum_c(rng, p, E, d)
    else:
        p, E = _random_field(rng, rng.choice((1, 2, 3)))
        d = rng.randint(1, 3)
        A = (_stratum_a if stratum == "a" else _stratum_b)(rng, p, E, d)
    A = _conjugate(A, E, rng, rng.randint(1, 3))
    cfg = CrystalConfig(p, tuple(E), A, TARGET_PRECISION, SERIES_DEGREE)
    return Case(stratum, index, cfg, stratum == "a", rng)


# ----------------------------------------------------------------------
# suites


def _suite_recursion(case, c):
    s = stratify(c, SERIES_DEGREE)
    b = binomial_series(c, SERIES_DEGREE)
    if not s.agrees_with(b):
        return "stratify and binomial_series differ"
    target = c.field.e * TARGET_PRECISION
    if s.guaranteed_precision() < target:
        return f"guaranteed precision {s.guaranteed_precision()} below {target}"
    return None


def _suite_cocycle(case, c):
    s = stratify(c, COCYCLE_DEGREE)
    r = cocycle_check(s)
    if not r.holds:
        return f"stratification fails the cocycle check at degree {r.degree}, index {r.index}"
    n = case.rng.randint(1, COCYCLE_DEGREE)
    i, j = case.rng.randrange(c.rank), case.rng.randrange(c.rank)
    bad = cocycle_check(s.perturb(n, i, j, 1))
    expected = 2 if n == 1 else n
    if bad.holds or bad.degree != expected or bad.difference.is_zero():
        return f"perturbing A_{n}[{i},{j}]: expected failure at degree {expected}, got {bad}"
    return None


def _suite_nearly_ht(case, c):
    v = nearly_ht_check(c)
    o = convergence_oracle(c, THRESHOLD)
    p, d = c.field.p, c.rank
    if v.nearly_ht != case.nearly_ht:
        return f"verdict {v.verdict}, expected {'NearlyHT' if case.nearly_ht else 'NotNearlyHT'}"
    if case.nearly_ht:
        bound = p * (d * THRESHOLD + d)
        if o.outcome is not Outcome.CONVERGED or o.steps > bound:
            return f"oracle {o}, expected ConvergedAt(n <= {bound})"
    elif o.outcome is not Outcome.BOUNDED_BELOW:
        return f"oracle {o}, expected BoundedBelowEvidence"
    return None


def _suite_sen(case, c):
    sd = sen_from_crystal(c)
    if not (sd.Phi * c.field.E_prime_pi).equals(-c.A1):
        return "Phi * E'(pi) differs from -A1"
    if not recover_sen(tau_cocycle(c, COCYCLE_DEGREE)).equals(sd.Phi):
        return "recover_sen(tau_cocycle) differs from Phi"
    if case.nearly_ht:
        ok, where = multiplicativity_check(sd.Phi, COCYCLE_DEGREE)
        if not ok:
            return f"(1-z1)^Phi (1-z2)^Phi differs at z1^{where[0]} z2^{where[1]}"
    return None


def _suite_twist(case, c):
    v = nearly_ht_check(c)
    sd = sen_from_crystal(c)
    p = c.field.p
    for k in range(-2, 3):
        t = c.twist(k)
        tv = nearly_ht_check(t)
        if tv.verdict != v.verdict:
            return f"twist by {k} changes the verdict"
        if c.field.e == 1 and v.nearly_ht:
            moved = {(i + k) % p: m for i, m in v.residues.items()}
            if tv.residues != moved:
                return f"twist by {k}: residues {tv.residues}, expected {moved}"
        tsd = sen_from_crystal(t)
        if not tsd.Phi.equals(shift(sd.Phi, k)):
            return f"twist by {k}: Phi does not shift by {k}"
        if sd.residues is not None:
            moved = {(i + k) % p: m for i, m in sd.residues.items()}
            if tsd.residues != moved:
                return f"twist by {k}: weight residues {tsd.residues}, expected {moved}"
    return None


_RUNNERS = {
    "recursion": _suite_recursion,
    "cocycle": _suite_cocycle,
    "nearly_ht": _suite_nearly_ht,
    "sen": _suite_sen,
    "twist": _suite_twist,
}


def run_case(seed: int, stratum: str, index: int):
    """Returns ``[(suite, failure message or None), ...]`` in suite order."""
    case = make_case(seed, stratum, index)
    c = case.config.crystal()
    out = []
    for name in SUITES:
        try:
            msg = _RUNNERS[name](case, c)
        except HTCrystalError as exc:
            msg = f"{type(exc).__name__}: {exc}"
        out.append((name, msg))
    return out


def _run_packed(args):
    return run_case(*args)


def run_selftest(seed: int, count: int, strata=STRATA, jobs: int = 1) -> Report:
    if count < 1:
        raise ValueError("count must be at least 1")
    unknown = [s for s in strata if s not in STRATA]
    if unknown:
        raise ValueError(f"unknown strata {unknown}; choose from {','.join(STRATA)}")
    jobs_list = [(seed, s, i) for s in strata for i in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_run_packed, jobs_list, chunksize=4))
    else:
        results = [run_case(*j) for j in jobs_list]

    report = Report("selftest")
    report.put("seed", seed)
    report.put("count", count)
    report.put("strata", ",".join(strata))
    passed = {name: 0 for name in SUITES}
    failed = {name: 0 for name in SUITES}
    first = None
    for (seed_, stratum, index), res in zip(jobs_list, results):
        for name, msg in res:
            if msg is None:
                passed[name] += 1
            else:
                failed[name] += 1
                if first is None:
                    first = (stratum, index, name, msg)
    report.line(f"seed {seed}, {count} case(s) per stratum, strata {','.join(strata)}")
    for name in SUITES:
        report.line(f"  {name:<10} {passed[name]:>4} passed  {failed[name]:>4} failed")
        report.put(f"suite.{name}.passed", passed[name])
        report.put(f"suite.{name}.failed", failed[name])
    report.put("cases", len(jobs_list))
    if first is None:
        report.line("all suites passed")
        report.put("status", "pass")
    else:
        stratum, index, name, msg = first
        cfg = make_case(seed, stratum, index).config
        report.fail(EXIT_FAILURE)
        report.line(f"first counterexample: stratum {stratum}, case {index}, suite {name}: {msg}")
        report.line("config:")
        report.line(format_config(cfg).rstrip("\n"))
        report.put("status", "fail")
        report.put("counterexample.stratum", stratum)
        report.put("counterexample.index", index)
        report.put("counterexample.suite", name)
        report.put("counterexample.message", msg)
        report.put("counterexample.config", format_config(cfg))
    return report
