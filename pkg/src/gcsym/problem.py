"""Line-oriented problem-file format.

A problem file is a sequence of `key: value` lines; `#` starts a comment.
Expression values use the input grammar with the declared dependent
variable.  Example:

    depvar: v
    equation.r: 2
    equation.H: (v*v_2 - (5/6)*v_1^2)/x^2 + v_1
    operator.form: reduced
    operator.eta: x^3*v_3 - 12*x^2*v_2 + 60*x*v_1 - 120*v + 12*x^3
    ansatz.params: phi4 phi5 phi6
    ansatz.F: 2*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6

Sections are built independently; each command checks that the sections it
needs are present.  Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .expr import Expr, ParseError, parse
from .oracle import SamplePlan
from .reduction import Ansatz, SolutionFamily
from .symmetry import (
    CanonicalOperator, EvolutionEquation, GcsOperator, ReducedOperator,
    UsualOperator,
)

__all__ = ["Problem", "ProblemError", "load_problem", "load_problem_file"]

_KNOWN_KEYS = {
    "depvar",
    "equation.r", "equation.H",
    "operator.form", "operator.eta", "operator.rho", "operator.eta_check",
    "operator.tau", "operator.xi",
    "ansatz.params", "ansatz.F",
    "family.params", "family.f",
    "oracle.seed", "oracle.points", "oracle.threshold",
}


class ProblemError(ValueError):
    """Malformed problem file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line


@dataclass
class Problem:
    depvar: str = "u"
    equation: EvolutionEquation | None = None
    operator_form: str | None = None
    operator: GcsOperator | None = None
    usual: UsualOperator | None = None
    ansatz: Ansatz | None = None
    family: SolutionFamily | None = None
    plan: SamplePlan | None = None

    def require(self, *sections: str) -> None:
        missing = [s for s in sections if getattr(self, s) is None]
        if missing:
            raise ProblemError("problem file is missing the "
                               + ", ".join(missing) + " section(s)")


def load_problem_file(path: str | Path) -> Problem:
    return load_problem(Path(path).read_text(encoding="utf-8"))


def load_problem(text: str) -> Problem:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ProblemError(f"expected 'key: value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split(":", 1))
        if key not in _KNOWN_KEYS:
            raise ProblemError(f"unknown key {key!r}", lineno)
        if key in entries:
            raise ProblemError(f"duplicate key {key!r}", lineno)
        entries[key] = (value, lineno)
    return _build(entries)


def _take(entries, key):
    return entries.pop(key, (None, None))


def _parse_expr(text: str, lineno: int, depvar: str,
                params: list[str] | None) -> Expr:
    try:
        return parse(text, depvar=depvar, params=params)
    except ParseError as err:
        raise ProblemError(f"bad expression for this key: {err}", lineno) from None


def _parse_int(value: str, lineno: int, key: str) -> int:
    try:
        return int(value, 0)
    except ValueError:
        raise ProblemError(f"{key} must be an integer", lineno) from None


def _build(entries: dict[str, tuple[str, int]]) -> Problem:
    problem = Problem()
    value, _ = _take(entries, "depvar")
    if value is not None:
        problem.depvar = value
    dv = problem.depvar

    r_text, r_line = _take(entries, "equation.r")
    h_text, h_line = _take(entries, "equation.H")
    if (r_text is None) != (h_text is None):
        raise ProblemError("equation.r and equation.H must appear together",
                           r_line or h_line)
    if r_text is not None:
        r = _parse_int(r_text, r_line, "equation.r")
        h = _parse_expr(h_text, h_line, dv, params=[])
        try:
            problem.equation = EvolutionEquation(r, h, depvar=dv)
        except ValueError as err:
            raise ProblemError(str(err), h_line) from None

    form, form_line = _take(entries, "operator.form")
    if form is not None:
        problem.operator_form = form
        if form == "reduced":
            eta_text, eta_line = _take(entries, "operator.eta")
            if eta_text is None:
                raise ProblemError("reduced operator needs operator.eta", form_line)
            eta = _parse_expr(eta_text, eta_line, dv, params=[])
            try:
                problem.operator = ReducedOperator(eta)
            except ValueError as err:
                raise ProblemError(str(err), eta_line) from None
        elif form == "canonical":
            rho_text, rho_line = _take(entries, "operator.rho")
            chk_text, chk_line = _take(entries, "operator.eta_check")
            if rho_text is None or chk_text is None:
                raise ProblemError(
                    "canonical operator needs operator.rho and operator.eta_check",
                    form_line)
            rho = _parse_int(rho_text, rho_line, "operator.rho")
            eta_check = _parse_expr(chk_text, chk_line, dv, params=[])
            try:
                problem.operator = CanonicalOperator(rho, eta_check)
            except ValueError as err:
                raise ProblemError(str(err), chk_line) from None
        elif form == "usual":
            pieces = {}
            for coeff in ("tau", "xi", "eta"):
                c_text, c_line = _take(entries, f"operator.{coeff}")
                if c_text is None:
                    raise ProblemError(f"usual operator needs operator.{coeff}",
                                       form_line)
                pieces[coeff] = _parse_expr(c_text, c_line, dv, params=[])
            try:
                problem.usual = UsualOperator(**pieces)
            except ValueError as err:
                raise ProblemError(str(err), form_line) from None
        else:
            raise ProblemError(
                f"operator.form must be reduced, canonical, or usual, got {form!r}",
                form_line)

    names_text, names_line = _take(entries, "ansatz.params")
    f_text, f_line = _take(entries, "ansatz.F")
    if (names_text is None) != (f_text is None):
        raise ProblemError("ansatz.params and ansatz.F must appear together",
                           names_line or f_line)
    if names_text is not None:
        names = tuple(names_text.split())
        f = _parse_expr(f_text, f_line, dv, params=list(names))
        try:
            problem.ansatz = Ansatz(names, f)
        except ValueError as err:
            raise ProblemError(str(err), f_line) from None

    names_text, names_line = _take(entries, "family.params")
    f_text, f_line = _take(entries, "family.f")
    if (names_text is None) != (f_text is None):
        raise ProblemError("family.params and family.f must appear together",
                           names_line or f_line)
    if names_text is not None:
        names = tuple(names_text.split())
        f = _parse_expr(f_text, f_line, dv, params=list(names))
        try:
            problem.family = SolutionFamily(names, f)
        except ValueError as err:
            raise ProblemError(str(err), f_line) from None

    plan = SamplePlan()
    value, line = _take(entries, "oracle.seed")
    if value is not None:
        plan.seed = _parse_int(value, line, "oracle.seed")
    value, line = _take(entries, "oracle.points")
    if value is not None:
        plan.n_points = _parse_int(value, line, "oracle.points")
    value, line = _take(entries, "oracle.threshold")
    if value is not None:
        try:
            plan.threshold = float(value)
        except ValueError:
            raise ProblemError("oracle.threshold must be a number", line) from None
    problem.plan = plan

    if entries:
        key, (_, line) = next(iter(entries.items()))
        raise ProblemError(f"key {key!r} is not valid without its section", line)
    return problem
