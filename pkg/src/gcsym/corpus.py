"""Bundled worked examples used by the demo command and the test suite.

`sl2` is the variable-coefficient diffusion-convection equation with an
sl(2)-related third-order conditional symmetry and a quartic-to-sextic
polynomial ansatz; `fast-diffusion-w` is the semilinear diffusion equation
with a non-Lie point operator whose chain runs through a linearizing
w-equation; `heat` exercises the trivial translation cases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Expr, parse
from .reduction import Ansatz, SolutionFamily
from .symmetry import (
    EvolutionEquation, GcsOperator, ReducedOperator, UsualOperator,
)

__all__ = ["DemoCase", "FamilyCase", "UsualStage", "demo_names", "demo_case"]


@dataclass(frozen=True)
class FamilyCase:
    """A solution family plus whether all its parameters are essential.

    A family printed with more parameters than are essential (only a ratio
    matters, say) is still a valid solution family; its essentiality
    determinant is expected to vanish.
    """
    family: SolutionFamily
    essential: bool = True


@dataclass(frozen=True)
class UsualStage:
    """A point operator on a (possibly different) equation, plus solution
    families of that equation."""
    equation: EvolutionEquation
    operator: UsualOperator
    families: tuple[FamilyCase, ...] = ()


@dataclass(frozen=True)
class DemoCase:
    name: str
    title: str
    equation: EvolutionEquation
    operator: GcsOperator
    ansatz: Ansatz
    families: tuple[FamilyCase, ...] = ()
    usual: UsualStage | None = None
    expected_rhs: tuple[Expr, ...] = ()


def _sl2() -> DemoCase:
    dv = "v"
    eq = EvolutionEquation(2, parse("(v*v_2 - (5/6)*v_1^2)/x^2 + v_1", depvar=dv), depvar=dv)
    op = ReducedOperator(
        parse("x^3*v_3 - 12*x^2*v_2 + 60*x*v_1 - 120*v + 12*x^3", depvar=dv))
    ansatz = Ansatz(
        ("phi4", "phi5", "phi6"),
        parse("2*x^3 + phi4*x^4 + phi5*x^5 + phi6*x^6", depvar=dv))
    expected = (
        parse("7*phi5 - (4/3)*phi4^2"),
        parse("18*phi6 - (4/3)*phi4*phi5"),
        parse("-(5/6)*phi5^2 + 2*phi4*phi6"),
    )
    return DemoCase(
        name="sl2",
        title="x^2 v_t = v v_2 - 5/6 v_1^2 + x^2 v_1 with a third-order constraint",
        equation=eq, operator=op, ansatz=ansatz, expected_rhs=expected)


def _fast_diffusion_w() -> DemoCase:
    weq = EvolutionEquation(2, parse("3*w_2 + 3*w_1/x - 3*w/x^2", depvar="w"), depvar="w")
    wop = ReducedOperator(parse("x^3*w_3 - 3*x*w_1 + 3*w", depvar="w"))
    wansatz = Ansatz(("psi0", "psi1", "psi2"),
                     parse("psi0*x^3 + psi1*x + psi2*x^(-1)", depvar="w"))
    wfamily = SolutionFamily(
        ("c0", "c1", "c2"),
        parse("c0*x^3 + (24*c0*t + c1)*x + c2*x^(-1)", depvar="w"))

    veq = EvolutionEquation(2, parse("v_2 - v^3/x^3 + (9/4)*v/x^2", depvar="v"), depvar="v")
    vop = UsualOperator(
        tau=parse("1", depvar="v"),
        xi=parse("(3/2)*2^(1/2)*v/x^(3/2) - 3/x", depvar="v"),
        eta=parse("-(3/2)*(v^3/x^3 - (3/2)*2^(1/2)*v^2/x^(5/2)"
                  " - v/x^2 + 2*2^(1/2)/x^(3/2))", depvar="v"),
    )
    vfam_moving = SolutionFamily(
        ("c1", "c2"),
        parse("(2*x)^(1/2)*(3*x^4 + (24*t + c1)*x^2 - c2)"
              "/(x^4 + (24*t + c1)*x^2 + c2)", depvar="v"))
    vfam_stationary = SolutionFamily(
        ("c1", "c2"),
        parse("(2*x)^(1/2)*(c1*x^2 - c2)/(c1*x^2 + c2)", depvar="v"))
    # the final display: homogeneous in (c0, c1, c2), so one parameter absorbs
    vfam_full = SolutionFamily(
        ("c0", "c1", "c2"),
        parse("(2*x)^(1/2)*(3*c0*x^4 + (24*c0*t + c1)*x^2 - c2)"
              "/(c0*x^4 + (24*c0*t + c1)*x^2 + c2)", depvar="v"))

    return DemoCase(
        name="fast-diffusion-w",
        title="v_t = v_2 - v^3/x^3 + 9/4 v/x^2 via the linearizing w-equation",
        equation=weq, operator=wop, ansatz=wansatz,
        families=(FamilyCase(wfamily),),
        usual=UsualStage(veq, vop, (FamilyCase(vfam_moving),
                                    FamilyCase(vfam_stationary, essential=False),
                                    FamilyCase(vfam_full, essential=False))),
        expected_rhs=(parse("0"), parse("24*psi0"), parse("0")))


def _heat() -> DemoCase:
    eq = EvolutionEquation(2, parse("u_2"))
    return DemoCase(
        name="heat",
        title="heat equation with translation invariance",
        equation=eq,
        operator=ReducedOperator(parse("u_1")),
        ansatz=Ansatz(("phi1",), parse("phi1")),
        families=(FamilyCase(SolutionFamily(("kappa1",), parse("kappa1"))),),
        expected_rhs=(parse("0"),))


_BUILDERS = {
    "sl2": _sl2,
    "fast-diffusion-w": _fast_diffusion_w,
    "heat": _heat,
}

_CACHE: dict[str, DemoCase] = {}


def demo_names() -> list[str]:
    return list(_BUILDERS)


def demo_case(name: str) -> DemoCase:
    if name not in _BUILDERS:
        known = ", ".join(demo_names())
        raise KeyError(f"unknown demo {name!r} (known: {known})")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]
