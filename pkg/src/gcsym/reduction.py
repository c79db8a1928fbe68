"""Ansatz/operator conversion, reduction to ODE systems, and solution checks.

An ansatz u = F(t, x, phi_1(t), ..., phi_rho(t)), affine in the phi's with a
nondegenerate Wronskian-type matrix Phi = (d F_{a-1} / d phi_b), corresponds
to the differential constraint u_rho = eta_check obtained by solving the
linear system u_{a-1} = F_{a-1} for the phi's.  Substituting the ansatz into
the evolution equation and solving for the phi_t's yields candidate
right-hand sides G^a; the ansatz reduces the equation exactly when every G^a
is independent of x.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    Expr, Jet, Param, T, X, ZERO, ONE, MINUS_ONE,
    add, free_atoms, jet_keys, mul, partial_derivative, substitute, to_text,
)
from .matrix import SymbolicMatrix
from .oracle import SamplePlan, ZeroStatus, ZeroVerdict, is_zero
from .symmetry import CanonicalOperator, EvolutionEquation

__all__ = [
    "Ansatz", "ReducedSystem", "NotReducible", "SolutionFamily", "SolutionCheck",
    "SingularAnsatzError", "NonAffineError", "InessentialFamilyError", "NotSolutionError",
    "phi_matrix", "ansatz_to_operator", "inversion_identities", "reduce",
    "verify_solution",
    "essentiality_det", "family_to_ansatz",
]


class SingularAnsatzError(ValueError):
    """det Phi fails the nonzero test; the ansatz cannot be inverted."""


class NonAffineError(ValueError):
    """F is not affine in the unknown functions of t."""


class InessentialFamilyError(ValueError):
    """Some family parameter can be absorbed (the criterion determinant vanishes)."""


class NotSolutionError(ValueError):
    """The family fails to satisfy the equation."""


@dataclass(frozen=True)
class Ansatz:
    """u = F(t, x, params...), affine in the params, invariant variable t."""
    params: tuple[str, ...]
    f: Expr

    def __post_init__(self):
        if not self.params:
            raise ValueError("ansatz needs at least one unknown function")
        if len(set(self.params)) != len(self.params):
            raise ValueError("duplicate parameter names")
        if jet_keys(self.f):
            raise ValueError("ansatz must not contain jet variables")
        _require_affine(self.f, self.params, what="ansatz")

    @property
    def rho(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ReducedSystem:
    """Normal first-order system phi^a_t = G^a(t, phi)."""
    params: tuple[str, ...]
    rhs: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.params) != len(self.rhs):
            raise ValueError("one right-hand side per unknown function")
        allowed = {T} | {Param(p) for p in self.params}
        for g in self.rhs:
            extra = free_atoms(g) - allowed
            if extra:
                bad = ", ".join(sorted(to_text(a) for a in extra))
                raise ValueError(f"right-hand side depends on {bad}")

    def text(self) -> list[str]:
        return [f"{p}_t = {to_text(g)}" for p, g in zip(self.params, self.rhs)]


@dataclass
class NotReducible:
    """Reduction failure: the a-th right-hand side still involves x."""
    index: int  # 1-based
    g: Expr
    dg_dx: Expr
    zero: ZeroVerdict


@dataclass(frozen=True)
class SolutionFamily:
    """Parametric family u = f(t, x, kappa_1, ..., kappa_rho)."""
    params: tuple[str, ...]
    f: Expr

    def __post_init__(self):
        if not self.params:
            raise ValueError("family needs at least one parameter")
        if len(set(self.params)) != len(self.params):
            raise ValueError("duplicate parameter names")
        if jet_keys(self.f):
            raise ValueError("family must not contain jet variables")

    @property
    def rho(self) -> int:
        return len(self.params)


@dataclass
class SolutionCheck:
    zero: ZeroVerdict
    residual: Expr


def _require_affine(f: Expr, params: tuple[str, ...], what: str) -> None:
    for a in params:
        da = partial_derivative(f, Param(a))
        for b in params:
            if partial_derivative(da, Param(b)) != ZERO:
                raise NonAffineError(f"{what} is not affine in {a}, {b}")


def _x_derivatives(f: Expr, n: int) -> list[Expr]:
    out = [f]
    for _ in range(n):
        out.append(partial_derivative(out[-1], X))
    return out


def phi_matrix(ansatz: Ansatz) -> SymbolicMatrix:
    """Phi[a][b] = d(d^{a-1}F/dx^{a-1}) / d(phi_b)."""
    fx = _x_derivatives(ansatz.f, ansatz.rho - 1)
    return SymbolicMatrix.from_rows([
        [partial_derivative(fx[a], Param(b)) for b in ansatz.params]
        for a in range(ansatz.rho)
    ])


def _inverted_parameters(ansatz: Ansatz, plan: SamplePlan | None) -> list[Expr]:
    """Solve u_{a-1} = F_{a-1} for the ansatz parameters.

    Returns expressions I^b(t, x, u_0..u_{rho-1}), one per parameter.
    """
    rho = ansatz.rho
    phi = phi_matrix(ansatz)
    if is_zero(phi.det(), plan).status is not ZeroStatus.NONZERO:
        raise SingularAnsatzError("det Phi fails the nonzero test")
    phi_hat = phi.inverse()
    zero_params = {Param(p): ZERO for p in ansatz.params}
    fx = _x_derivatives(ansatz.f, rho - 1)
    shifted = [add(Jet(0, a), mul(MINUS_ONE, substitute(fx[a], zero_params)))
               for a in range(rho)]
    return [add(*(mul(phi_hat[b, c], shifted[c]) for c in range(rho)))
            for b in range(rho)]


def ansatz_to_operator(ansatz: Ansatz, plan: SamplePlan | None = None) -> CanonicalOperator:
    """The constraint u_rho = eta_check whose general solution is the ansatz."""
    rho = ansatz.rho
    inverted = _inverted_parameters(ansatz, plan)
    f_rho = _x_derivatives(ansatz.f, rho)[rho]
    bindings = {Param(p): inv for p, inv in zip(ansatz.params, inverted)}
    return CanonicalOperator(rho, substitute(f_rho, bindings))


def inversion_identities(ansatz: Ansatz, plan: SamplePlan | None = None) -> list[Expr]:
    """Residuals F_{a-1}|_{phi = solved} - u_{a-1} for a = 1..rho.

    All of them vanish exactly when solving the ansatz for its parameters
    round-trips; callers zero-test.
    """
    inverted = _inverted_parameters(ansatz, plan)
    bindings = {Param(p): inv for p, inv in zip(ansatz.params, inverted)}
    fx = _x_derivatives(ansatz.f, ansatz.rho - 1)
    return [add(substitute(fx[a], bindings), mul(MINUS_ONE, Jet(0, a)))
            for a in range(ansatz.rho)]


def reduce(eq: EvolutionEquation, ansatz: Ansatz,
           plan: SamplePlan | None = None) -> ReducedSystem | NotReducible:
    """Substitute the ansatz into the equation and solve for the phi_t's.

    Returns the reduced system when every right-hand side passes the
    x-independence zero test (an x that only occurs in unsimplified,
    provably-x-free combinations is pinned to 1), or NotReducible with the
    first offending index.
    """
    rho = ansatz.rho
    phi = phi_matrix(ansatz)
    if is_zero(phi.det(), plan).status is not ZeroStatus.NONZERO:
        raise SingularAnsatzError("det Phi fails the nonzero test")
    phi_hat = phi.inverse()
    fx = _x_derivatives(ansatz.f, eq.r)
    h_tilde = substitute(eq.h, {Jet(0, k): fx[k] for k in range(eq.r + 1)})
    rhs0 = add(h_tilde, mul(MINUS_ONE, partial_derivative(ansatz.f, T)))
    shifted = _x_derivatives(rhs0, rho - 1)
    system = []
    for a in range(rho):
        g = add(*(mul(phi_hat[a, b], shifted[b]) for b in range(rho)))
        dg = partial_derivative(g, X)
        zero = is_zero(dg, plan)
        if not zero.is_zeroish:
            return NotReducible(index=a + 1, g=g, dg_dx=dg, zero=zero)
        if X in free_atoms(g):
            g = substitute(g, {X: ONE})
        system.append(g)
    return ReducedSystem(ansatz.params, tuple(system))


def verify_solution(eq: EvolutionEquation, u_expr: Expr,
                    plan: SamplePlan | None = None) -> SolutionCheck:
    """Zero-test u_t - H(t, x, u, u_x, ...) with parameters as indeterminates."""
    if jet_keys(u_expr):
        raise ValueError("candidate solution must not contain jet variables")
    ux = _x_derivatives(u_expr, eq.r)
    residual = add(partial_derivative(u_expr, T),
                   mul(MINUS_ONE, substitute(eq.h, {Jet(0, k): ux[k]
                                                    for k in range(eq.r + 1)})))
    return SolutionCheck(is_zero(residual, plan), residual)


def essentiality_det(fam: SolutionFamily) -> Expr:
    """det d(f_0, ..., f_{rho-1}) / d(kappa_1, ..., kappa_rho); the family's
    parameters are all essential exactly when this does not vanish."""
    fx = _x_derivatives(fam.f, fam.rho - 1)
    m = SymbolicMatrix.from_rows([
        [partial_derivative(fx[a], Param(b)) for b in fam.params]
        for a in range(fam.rho)
    ])
    return m.det()


def family_to_ansatz(fam: SolutionFamily, eq: EvolutionEquation,
                     plan: SamplePlan | None = None) -> Ansatz:
    """Re-read an affine solution family as an ansatz (its parameters become
    the unknown functions of t); the resulting reduced system is phi^a_t = 0."""
    _require_affine(fam.f, fam.params, what="family")
    if is_zero(essentiality_det(fam), plan).status is not ZeroStatus.NONZERO:
        raise InessentialFamilyError("family parameters are not all essential")
    check = verify_solution(eq, fam.f, plan)
    if not check.zero.is_zeroish:
        raise NotSolutionError("family does not solve the equation")
    return Ansatz(fam.params, fam.f)
