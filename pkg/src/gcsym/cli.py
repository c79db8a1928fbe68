"""Command-line interface.

Subcommands: check, reduce, convert, derive-operator, verify-solution, demo.
Every report is available as human-readable text or JSON (--json); the JSON
schema is stable and embeds expressions as strings in the input grammar.

Exit codes: 0 positive verdict, 1 negative verdict, 2 error, inconclusive
verdict, or oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from .corpus import demo_case, demo_names
from .expr import to_text
from .oracle import (
    IntegrationPlan, SamplePlan, ZeroStatus, ZeroVerdict,
    integrate_reduced, pde_residual,
)
from .problem import Problem, ProblemError, load_problem_file
from .reduction import (
    Ansatz, NotReducible, ansatz_to_operator, essentiality_det,
    inversion_identities, reduce as reduce_equation, verify_solution,
)
from .oracle import is_zero
from .symmetry import (
    CheckResult, EvolutionEquation, GcsOperator, SymmetryStatus,
    as_canonical, canonical_equal, check_gcs, check_involutivity,
    integrability_probe, to_canonical, usual_to_generalized,
)

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

DEMO_PROBE_XS = (0.8, 1.0, 1.3, 1.7, 2.1)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ProblemError, ValueError, KeyError, RuntimeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcsym",
        description="Decide and exploit generalized conditional symmetries "
                    "of (1+1)-dimensional evolution equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                       help="oracle seed (default 0xC0FFEE)")
        p.add_argument("--points", type=int, default=None,
                       help="zero-test sample points (default 50)")
        p.add_argument("--threshold", type=float, default=None,
                       help="zero-test threshold (default 1e-9)")
        p.add_argument("--step", type=float, default=1e-3,
                       help="integration step (default 1e-3)")
        p.add_argument("--tspan", type=_parse_tspan, default=(0.0, 0.05),
                       metavar="A:B", help="integration span (default 0:0.05)")
        p.add_argument("--out", type=Path, default=None,
                       help="write the report to this path instead of stdout")

    for name, handler, needs_file, doc in (
        ("check", cmd_check, True,
         "run all three symmetry oracles on equation + operator"),
        ("reduce", cmd_reduce, True,
         "reduce equation + ansatz to an ODE system"),
        ("convert", cmd_convert, True,
         "convert a point operator to reduced and canonical form"),
        ("derive-operator", cmd_derive_operator, True,
         "derive the canonical constraint of an ansatz"),
        ("verify-solution", cmd_verify_solution, True,
         "check a parametric solution family against the equation"),
        ("demo", cmd_demo, False,
         "run the full pipeline on a bundled example"),
    ):
        p = sub.add_parser(name, help=doc)
        if needs_file:
            p.add_argument("problem", type=Path, help="problem file path")
        else:
            p.add_argument("name", choices=demo_names(), help="bundled example")
        common(p)
        p.set_defaults(handler=handler)
    return parser


def _parse_tspan(text: str) -> tuple[float, float]:
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError("expected A:B with numbers") from None


def _plan_for(args, problem: Problem | None = None) -> SamplePlan:
    plan = problem.plan if problem is not None and problem.plan else SamplePlan()
    if args.seed is not None:
        plan.seed = args.seed
    if args.points is not None:
        plan.n_points = args.points
    if args.threshold is not None:
        plan.threshold = args.threshold
    return plan


def _emit(args, report: dict, lines: list[str]) -> None:
    body = json.dumps(report, indent=2) if args.json else "\n".join(lines)
    if args.out is not None:
        args.out.write_text(body + "\n", encoding="utf-8")
    else:
        print(body)


def _zero_json(z: ZeroVerdict, depvar: str) -> dict:
    return {
        "status": z.status.value,
        "points": z.points,
        "witness": z.witness_text(depvar),
        "value": z.value,
    }


def _check_json(c: CheckResult, depvar: str) -> dict:
    return {
        "oracle": c.oracle,
        "verdict": c.status.value,
        "residual": to_text(c.residual, depvar),
        "zero": _zero_json(c.zero, depvar),
    }


def _check_line(c: CheckResult, depvar: str) -> str:
    line = f"  {c.oracle + ':':<23} {c.status.value}"
    if c.status is SymmetryStatus.NOT_SYMMETRY:
        line += f"   residual {to_text(c.residual, depvar)}"
        witness = c.zero.witness_text(depvar)
        if witness:
            line += f"   at {witness}"
    return line


def _run_three(eq: EvolutionEquation, op: GcsOperator,
               plan: SamplePlan) -> tuple[list[CheckResult], bool]:
    results = [
        check_gcs(eq, op, plan),
        check_involutivity(eq, op, plan),
        integrability_probe(eq, op, plan),
    ]
    kinds = {c.status.is_positive for c in results}
    conclusive = all(c.status is not SymmetryStatus.INCONCLUSIVE for c in results)
    return results, conclusive and len(kinds) == 1


# ---------------------------------------------------------------------------
# commands

def cmd_check(args) -> int:
    problem = load_problem_file(args.problem)
    plan = _plan_for(args, problem)
    problem.require("equation")
    eq = problem.equation
    report: dict = {"command": "check", "seed": plan.seed,
                    "points": plan.n_points, "threshold": plan.threshold,
                    "equation": eq.text()}
    lines = [f"equation: {eq.text()}   [r={eq.r}]"]

    if problem.usual is not None:
        op: GcsOperator = usual_to_generalized(eq, problem.usual, plan)
        report["converted_from"] = "usual"
        lines.append(f"operator (from point field): eta = {to_text(op.eta, eq.depvar)}")
    elif problem.operator is not None:
        op = problem.operator
    else:
        raise ProblemError("check needs an operator section")

    can = as_canonical(op, plan)
    report["operator"] = {"rho": can.rho,
                          "eta_check": to_text(can.eta_check, eq.depvar)}
    lines.append(f"operator: {eq.depvar}_{can.rho} = "
                 f"{to_text(can.eta_check, eq.depvar)}")

    results, agree = _run_three(eq, can, plan)
    report["checks"] = [_check_json(c, eq.depvar) for c in results]
    report["agreement"] = agree
    lines += [_check_line(c, eq.depvar) for c in results]
    lines.append(f"agreement: {'yes' if agree else 'NO'}   seed: {plan.seed}")

    if agree and results[0].status.is_positive:
        code = EXIT_POSITIVE
    elif agree and all(c.status is SymmetryStatus.NOT_SYMMETRY for c in results):
        code = EXIT_NEGATIVE
    else:
        code = EXIT_ERROR
    report["exit_code"] = code
    _emit(args, report, lines)
    return code


def cmd_reduce(args) -> int:
    problem = load_problem_file(args.problem)
    plan = _plan_for(args, problem)
    problem.require("equation", "ansatz")
    eq, ansatz = problem.equation, problem.ansatz
    report: dict = {"command": "reduce", "seed": plan.seed,
                    "equation": eq.text(),
                    "ansatz": {"params": list(ansatz.params),
                               "F": to_text(ansatz.f, eq.depvar)}}
    lines = [f"equation: {eq.text()}",
             f"ansatz: {eq.depvar} = {to_text(ansatz.f, eq.depvar)}"]

    outcome = reduce_equation(eq, ansatz, plan)
    if isinstance(outcome, NotReducible):
        report["reduced"] = False
        report["failure"] = {
            "index": outcome.index,
            "G": to_text(outcome.g, eq.depvar),
            "dG_dx": to_text(outcome.dg_dx, eq.depvar),
            "witness": outcome.zero.witness_text(eq.depvar),
        }
        report["exit_code"] = EXIT_NEGATIVE
        lines.append(f"not reducible: G^{outcome.index} depends on x")
        lines.append(f"  d(G^{outcome.index})/dx = {to_text(outcome.dg_dx, eq.depvar)}")
        witness = outcome.zero.witness_text(eq.depvar)
        if witness:
            lines.append(f"  witness: {witness}")
        _emit(args, report, lines)
        return EXIT_NEGATIVE

    report["reduced"] = True
    report["G"] = [to_text(g) for g in outcome.rhs]
    report["exit_code"] = EXIT_POSITIVE
    lines.append("reduced system:")
    lines += [f"  {line}" for line in outcome.text()]
    lines.append(f"seed: {plan.seed}")
    _emit(args, report, lines)
    return EXIT_POSITIVE


def cmd_convert(args) -> int:
    problem = load_problem_file(args.problem)
    plan = _plan_for(args, problem)
    problem.require("equation", "usual")
    eq = problem.equation
    reduced = usual_to_generalized(eq, problem.usual, plan)
    can = to_canonical(reduced, plan)
    verdict = check_gcs(eq, can, plan)
    report = {
        "command": "convert", "seed": plan.seed,
        "equation": eq.text(),
        "reduced_eta": to_text(reduced.eta, eq.depvar),
        "canonical": {"rho": can.rho,
                      "eta_check": to_text(can.eta_check, eq.depvar)},
        "check": _check_json(verdict, eq.depvar),
        "exit_code": EXIT_POSITIVE,
    }
    lines = [
        f"equation: {eq.text()}",
        f"reduced form: eta = {to_text(reduced.eta, eq.depvar)}",
        f"canonical form: {eq.depvar}_{can.rho} = {to_text(can.eta_check, eq.depvar)}",
        _check_line(verdict, eq.depvar),
        f"seed: {plan.seed}",
    ]
    _emit(args, report, lines)
    return EXIT_POSITIVE


def cmd_derive_operator(args) -> int:
    problem = load_problem_file(args.problem)
    plan = _plan_for(args, problem)
    problem.require("ansatz")
    ansatz = problem.ansatz
    depvar = problem.depvar
    can = ansatz_to_operator(ansatz, plan)
    ok, identities = _round_trip(ansatz, plan)
    report = {
        "command": "derive-operator", "seed": plan.seed,
        "ansatz": {"params": list(ansatz.params), "F": to_text(ansatz.f, depvar)},
        "canonical": {"rho": can.rho, "eta_check": to_text(can.eta_check, depvar)},
        "round_trip": identities,
        "exit_code": EXIT_POSITIVE if ok else EXIT_ERROR,
    }
    lines = [
        f"ansatz: {depvar} = {to_text(ansatz.f, depvar)}",
        f"canonical constraint: {depvar}_{can.rho} = {to_text(can.eta_check, depvar)}",
        f"round-trip identities: {'pass' if ok else 'FAIL'}",
        f"seed: {plan.seed}",
    ]
    _emit(args, report, lines)
    return EXIT_POSITIVE if ok else EXIT_ERROR


def _round_trip(ansatz: Ansatz, plan: SamplePlan) -> tuple[bool, list[str]]:
    """Zero-test the u_{a-1} = F_{a-1} identities of the solved ansatz."""
    statuses = []
    ok = True
    for residual in inversion_identities(ansatz, plan):
        verdict = is_zero(residual, plan)
        statuses.append(verdict.status.value)
        ok = ok and verdict.is_zeroish
    return ok, statuses


def cmd_verify_solution(args) -> int:
    problem = load_problem_file(args.problem)
    plan = _plan_for(args, problem)
    problem.require("equation", "family")
    eq, family = problem.equation, problem.family
    check = verify_solution(eq, family.f, plan)
    ess = is_zero(essentiality_det(family), plan)
    report = {
        "command": "verify-solution", "seed": plan.seed,
        "equation": eq.text(),
        "family": {"params": list(family.params), "f": to_text(family.f, eq.depvar)},
        "solution": _zero_json(check.zero, eq.depvar),
        "essentiality": _zero_json(ess, eq.depvar),
        "residual": to_text(check.residual, eq.depvar),
    }
    lines = [
        f"equation: {eq.text()}",
        f"family: {eq.depvar} = {to_text(family.f, eq.depvar)}",
        f"  solves equation: {check.zero.status.value} ({check.zero.points} points)",
        f"  parameters essential: "
        f"{'yes' if ess.status is ZeroStatus.NONZERO else 'NO (' + ess.status.value + ')'}",
        f"seed: {plan.seed}",
    ]
    if check.zero.is_zeroish and ess.status is ZeroStatus.NONZERO:
        code = EXIT_POSITIVE
    elif check.zero.status is ZeroStatus.NONZERO or ess.is_zeroish:
        code = EXIT_NEGATIVE
    else:
        code = EXIT_ERROR
    report["exit_code"] = code
    _emit(args, report, lines)
    return code


def _family_step(eq: EvolutionEquation, fc, plan: SamplePlan) -> tuple[str, bool, str]:
    """One demo row: does the family solve the equation, and does its
    essentiality verdict match what the example expects?"""
    fam = fc.family
    chk = verify_solution(eq, fam.f, plan)
    ess = is_zero(essentiality_det(fam), plan)
    essential = ess.status is ZeroStatus.NONZERO
    good = chk.zero.is_zeroish and essential == fc.essential
    detail = (f"{eq.depvar} = {to_text(fam.f, eq.depvar)}: {chk.zero.status.value}, "
              f"essential: {'yes' if essential else 'no'}"
              + ("" if fc.essential else " (as expected: only a ratio matters)"))
    return "verify-solution", good, detail


def _seeded_initial_conditions(seed: int, tag: str, n_params: int, count: int,
                               low: float = 0.5, high: float = 2.5):
    out = []
    for i in range(count):
        rng = random.Random(f"{seed}:ic:{tag}:{i}")
        out.append(tuple(rng.uniform(low, high) for _ in range(n_params)))
    return out


def cmd_demo(args) -> int:
    case = demo_case(args.name)
    plan = _plan_for(args)
    eq = case.equation
    report: dict = {"command": "demo", "name": case.name, "seed": plan.seed,
                    "title": case.title, "steps": []}
    lines = [f"demo {case.name}: {case.title}"]
    ok = True

    def step(name: str, good: bool, detail: str, extra: dict | None = None):
        nonlocal ok
        ok = ok and good
        entry = {"step": name, "ok": good, "detail": detail}
        if extra:
            entry.update(extra)
        report["steps"].append(entry)
        lines.append(f"  [{'ok' if good else 'FAIL'}] {name:<18} {detail}")

    if case.usual is not None:
        ueq, uop = case.usual.equation, case.usual.operator
        reduced = usual_to_generalized(ueq, uop, plan)
        verdict = check_gcs(ueq, reduced, plan)
        step("convert", verdict.status.is_positive,
             f"point operator on {ueq.text()} -> order {reduced.rho}; "
             f"check: {verdict.status.value}",
             {"eta": to_text(reduced.eta, ueq.depvar)})
        for fc in case.usual.families:
            step(*_family_step(ueq, fc, plan))

    results, agree = _run_three(eq, case.operator, plan)
    for c in results:
        step(c.oracle, c.status.is_positive, c.status.value)
    step("agreement", agree, "all three oracles agree" if agree else "oracles disagree")

    derived = ansatz_to_operator(case.ansatz, plan)
    consistent = canonical_equal(derived, case.operator, plan)
    step("derive-operator", consistent,
         f"{eq.depvar}_{derived.rho} = {to_text(derived.eta_check, eq.depvar)}")

    outcome = reduce_equation(eq, case.ansatz, plan)
    if isinstance(outcome, NotReducible):
        step("reduce", False, f"G^{outcome.index} depends on x")
        report["exit_code"] = EXIT_ERROR
        _emit(args, report, lines)
        return EXIT_ERROR
    step("reduce", True, "; ".join(outcome.text()),
         {"G": [to_text(g) for g in outcome.rhs]})

    t0, t1 = args.tspan
    worst = 0.0
    for ic in _seeded_initial_conditions(plan.seed, case.name, len(outcome.params), 2):
        traj = integrate_reduced(outcome.rhs, outcome.params,
                                 IntegrationPlan(initial=ic, t0=t0, t1=t1, step=args.step))
        residual = pde_residual(eq.h, eq.r, case.ansatz.f, case.ansatz.params,
                                traj, DEMO_PROBE_XS)
        worst = max(worst, residual)
    step("pde-residual", worst < 1e-5,
         f"max |u_t - H| = {worst:.3e} over {len(DEMO_PROBE_XS)} probes, "
         f"t in [{t0}, {t1}]")

    for fc in case.families:
        step(*_family_step(eq, fc, plan))

    lines.append(f"seed: {plan.seed}")
    code = EXIT_POSITIVE if ok else EXIT_ERROR
    report["exit_code"] = code
    _emit(args, report, lines)
    return code


if __name__ == "__main__":
    sys.exit(main())
