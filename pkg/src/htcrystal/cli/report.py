"""Deterministic reports: a human section followed by ``key = value`` lines."""
from __future__ import annotations

import json
from fractions import Fraction

from ..local_field import INF, LocalField

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_PRECISION = 3


def plain(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    if value == INF:
        return "inf"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    return str(value)


def _text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return "[" + ", ".join(_text(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_text(v)}" for k, v in value.items()) + "}"
    return str(value)


class Report:
    def __init__(self, command: str):
        self.command = command
        self.human = []
        self.machine = {"command": command}
        self.exit_code = EXIT_OK

    def line(self, text: str = "") -> None:
        self.human.extend(str(text).split("\n"))

    def put(self, key: str, value) -> None:
        self.machine[key] = plain(value)

    def fail(self, code: int = EXIT_FAILURE) -> None:
        self.exit_code = max(self.exit_code, code)

    def render(self, as_json: bool = False) -> str:
        machine = dict(self.machine)
        machine["exit_code"] = self.exit_code
        if as_json:
            return json.dumps(machine, indent=2) + "\n"
        out = [f"== {self.command} =="]
        out += self.human
        out += ["", "-- machine --"]
        out += [f"{k} = {_text(v)}" for k, v in machine.items()]
        return "\n".join(out) + "\n"


def describe_field(report: Report, K: LocalField) -> None:
    report.line(f"field: Q_{K.p}[u]/({K.describe()}), e = {K.e}")
    report.line(f"  E'(pi) = {K.E_prime_pi}  (valuation {K.v_E_prime})")
    report.line(f"  E(0) = {K.E0}")
    report.put("field.p", K.p)
    report.put("field.E", [str(c) for c in K.E])
    report.put("field.e", K.e)
    report.put("field.v_E_prime", K.v_E_prime)
    report.put("field.E0", K.E0)
    report.put("field.working_digits", K.prec)
