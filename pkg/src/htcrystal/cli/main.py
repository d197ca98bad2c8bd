"""Command line entry point.

Exit codes: 0 all checks passed, 1 a property check failed, 2 the input could
not be parsed or is invalid, 3 tracked precision ran out.
"""
from __future__ import annotations

import argparse
import sys

from ..crystal import (
    DEFAULT_BUDGET,
    DEFAULT_THRESHOLD,
    Outcome,
    binomial_series,
    cocycle_check,
    convergence_oracle,
    nearly_ht_check,
    stratify,
)
from ..errors import HTCrystalError, PrecisionExhausted, PrecisionInsufficient
from ..sen import sen_from_crystal, theta_u_lambda_prime
from .config import ConfigError, parse_config
from .report import EXIT_FAILURE, EXIT_PARSE, EXIT_PRECISION, Report, describe_field
from .selftest import STRATA, run_selftest


def _load(args):
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {args.file}: {exc.strerror}") from None
    overrides = {"precision": args.precision, "degree": args.degree}
    return parse_config(text, overrides)


def _verdict_lines(report: Report, v) -> None:
    report.line(f"verdict: {v.verdict}")
    ev = ", ".join(f"{lab} x{m}" for lab, m in v.evidence)
    report.line(f"  eigenvalue classes: {ev}")
    if v.witness:
        report.line(f"  witness: {v.witness}")
    report.line(f"  thresholds: v(E'(pi)) = {v.v_E_prime}, e - 1 = {v.e_minus_1}")
    report.line(f"  weights in Z + p^(-(e-1)/e) m: {'yes' if v.weight_condition_holds else 'no'}")
    report.put("verdict", v.verdict)
    report.put("evidence", [f"{lab}:{m}" for lab, m in v.evidence])
    report.put("witness", v.witness or None)
    report.put("threshold.v_E_prime", v.v_E_prime)
    report.put("threshold.e_minus_1", v.e_minus_1)
    report.put("weight_condition_holds", v.weight_condition_holds)
    report.put("charpoly_A1", v.charpoly)


def cmd_check(args, report: Report) -> None:
    cfg = _load(args)
    c = cfg.crystal()
    describe_field(report, c.field)
    report.line(f"A1 = {c.A1}")
    v = nearly_ht_check(c)
    _verdict_lines(report, v)
    o = convergence_oracle(c, args.threshold, args.budget)
    report.line(f"convergence oracle (T = {args.threshold}, budget {args.budget}): {o}")
    report.put("oracle", str(o))
    report.put("oracle.min_valuation", o.min_valuation)
    report.put("oracle.det_valuation", o.det_valuation)
    contradiction = ((v.nearly_ht and o.outcome is Outcome.BOUNDED_BELOW)
                     or (not v.nearly_ht and o.outcome is Outcome.CONVERGED))
    report.put("consistent", not contradiction)
    if contradiction:
        report.line("oracle contradicts the verdict")
        report.fail(EXIT_FAILURE)


def cmd_stratify(args, report: Report) -> None:
    cfg = _load(args)
    D = cfg.degree
    c = cfg.crystal()
    describe_field(report, c.field)
    s = stratify(c, D)
    for n, A in enumerate(s.matrices):
        report.line(f"A_{n} = {A}")
    agree = s.agrees_with(binomial_series(c, D))
    report.line(f"closed form (1 - E'(pi) X)^(-A1/E'(pi)) agrees: {'yes' if agree else 'NO'}")
    report.line(f"guaranteed precision: {s.guaranteed_precision()} (pi-adic digits)")
    report.put("degree", D)
    report.put("matrices", [str(A) for A in s.matrices])
    report.put("closed_form_agrees", agree)
    report.put("guaranteed_precision", s.guaranteed_precision())
    if not agree:
        report.fail(EXIT_FAILURE)


def cmd_cocycle(args, report: Report) -> None:
    cfg = _load(args)
    D = cfg.degree
    c = cfg.crystal()
    describe_field(report, c.field)
    r = cocycle_check(stratify(c, D))
    report.put("degree", D)
    report.put("holds", r.holds)
    report.put("precision", r.precision)
    if r.holds:
        report.line(f"cocycle condition holds to degree {D} (compared to pi^{r.precision})")
    else:
        report.line(f"cocycle condition FAILS at degree {r.degree}: "
                    f"coefficient of X1^[{r.index[0]}] X2^[{r.index[1]}] differs by {r.difference}")
        report.put("failing_degree", r.degree)
        report.put("witness", list(r.index))
        report.fail(EXIT_FAILURE)


def cmd_sen(args, report: Report) -> None:
    cfg = _load(args)
    c = cfg.crystal()
    describe_field(report, c.field)
    sd = sen_from_crystal(c)
    report.line(f"Phi = -A1/E'(pi) = {sd.Phi}")
    report.line(f"charpoly(Phi) = {sd.charpoly_Phi}")
    report.put("Phi", sd.Phi)
    report.put("charpoly_Phi", sd.charpoly_Phi)
    if sd.weight_valuations is None:
        report.line("weight valuations: not certified at this precision")
    else:
        report.line("weight valuations: " + ", ".join(f"{v} x{m}" for v, m in sd.weight_valuations))
    report.put("weight_valuations", None if sd.weight_valuations is None
               else [f"{v}:{m}" for v, m in sd.weight_valuations])
    if sd.residues is not None:
        report.line("weight residues mod p: " + ", ".join(
            f"{i} x{m} (v(w - {i}) >= {sd.residue_distance[i]})" for i, m in sd.residues.items()))
        report.put("residues", {i: m for i, m in sd.residues.items()})
        report.put("residue_distance", sd.residue_distance)
    _verdict_lines(report, nearly_ht_check(c))
    theta = theta_u_lambda_prime(c.field, cfg.precision)
    report.line(f"theta(u lambda') = {theta}")
    report.put("theta", theta)
    report.put("theta.precision", theta.precision)


def cmd_selftest(args) -> Report:
    strata = tuple(s.strip() for s in args.strata.split(",") if s.strip())
    return run_selftest(args.seed, args.count, strata, args.jobs)


COMMANDS = {
    "check": cmd_check,
    "stratify": cmd_stratify,
    "cocycle": cmd_cocycle,
    "sen": cmd_sen,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print only the machine-readable section as JSON")
    common.add_argument("--precision", type=int, help="target precision N in p-adic digits")
    common.add_argument("--degree", type=int, help="divided-power truncation degree D")

    parser = argparse.ArgumentParser(prog="htcrystal", description="Hodge-Tate crystal calculator")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="decide the nearly Hodge-Tate condition")
    p.add_argument("file")
    p.add_argument("--threshold", type=int, default=DEFAULT_THRESHOLD)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    for name, text in (("stratify", "print the stratification matrices"),
                       ("cocycle", "verify the cocycle condition")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
    p = sub.add_parser("sen", parents=[common], help="Sen operator, weights and theta(u lambda')")
    p.add_argument("file")
    p = sub.add_parser("selftest", parents=[common], help="seeded random self-test")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--strata", default=",".join(STRATA))
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output is identical)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = Report(args.command)
    try:
        if args.command == "selftest":
            report = cmd_selftest(args)
        else:
            COMMANDS[args.command](args, report)
    except ConfigError as exc:
        report.line(f"error: {exc}")
        report.put("error", str(exc))
        report.fail(EXIT_PARSE)
    except (PrecisionExhausted, PrecisionInsufficient) as exc:
        report.line(f"precision exhausted: {exc}")
        report.put("error", f"{type(exc).__name__}: {exc}")
        report.fail(EXIT_PRECISION)
    except (HTCrystalError, ValueError) as exc:
        report.line(f"error: {type(exc).__name__}: {exc}")
        report.put("error", f"{type(exc).__name__}: {exc}")
        report.fail(EXIT_PARSE)
    sys.stdout.write(report.render(args.json))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
