"""Evolution equations, conditional-symmetry operators, and three mutually
independent decision routes for the invariance criterion.

`check_gcs` decides the determining equation on the constraint manifold;
`check_involutivity` recasts the question as commutativity of two vector
fields in renamed variables; `integrability_probe` tests the single
integrability condition of the joint orthonomic system.  All three must
agree on any input, which the test suite exploits as a cross-validation
oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .expr import (
    Expr, Jet, Param, T, X, ZERO, ONE, MINUS_ONE,
    add, free_atoms, jet_keys, max_x_order, mul, partial_derivative, pow_,
    substitute, to_text,
)
from .jet import (
    ConstraintFrame, eliminate_t_derivatives,
    total_derivative_t, total_derivative_x,
)
from .oracle import SamplePlan, ZeroStatus, ZeroVerdict, is_zero

__all__ = [
    "EvolutionEquation", "ReducedOperator", "CanonicalOperator", "GcsOperator",
    "UsualOperator", "NonQuasilinearError", "TrivialOperatorError",
    "SymmetryStatus", "CheckResult",
    "build_hhat", "constraint_frame", "to_reduced_form", "to_canonical",
    "as_canonical", "usual_to_generalized", "canonical_equal",
    "check_gcs", "check_involutivity", "integrability_probe",
    "VectorField", "commutator",
]


class NonQuasilinearError(ValueError):
    """Operator is not affine in its top derivative; out of scope."""


class TrivialOperatorError(ValueError):
    """Operator vanishes identically on solutions of the equation."""


@dataclass(frozen=True)
class EvolutionEquation:
    """u_t = H(t, x, u_0, ..., u_r) with H_{u_r} not identically zero."""
    r: int
    h: Expr
    depvar: str = "u"

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("equation order must be positive")
        for a0, a1 in jet_keys(self.h):
            if a0 >= 1:
                raise ValueError("right-hand side contains a t-derivative")
            if a1 > self.r:
                raise ValueError(f"right-hand side contains u_{a1} beyond order {self.r}")
        hu_r = partial_derivative(self.h, Jet(0, self.r))
        if is_zero(hu_r).status is not ZeroStatus.NONZERO:
            raise ValueError(f"right-hand side must depend on u_{self.r}")

    def text(self) -> str:
        return f"{self.depvar}_t = {to_text(self.h, self.depvar)}"


@dataclass(frozen=True)
class ReducedOperator:
    """Evolutionary field eta * d/du with eta free of t-derivatives."""
    eta: Expr

    def __post_init__(self):
        keys = jet_keys(self.eta)
        if any(a0 for a0, _ in keys):
            raise ValueError("reduced form must not contain t-derivatives")
        if not keys:
            raise ValueError("operator must involve the dependent variable")

    @property
    def rho(self) -> int:
        return max_x_order(self.eta)


@dataclass(frozen=True)
class CanonicalOperator:
    """Constraint u_rho = eta_check(t, x, u_0, ..., u_{rho-1})."""
    rho: int
    eta_check: Expr

    def __post_init__(self):
        if self.rho < 1:
            raise ValueError("constraint order must be positive")
        for a0, a1 in jet_keys(self.eta_check):
            if a0 >= 1:
                raise ValueError("canonical form must not contain t-derivatives")
            if a1 >= self.rho:
                raise ValueError(f"canonical form contains u_{a1} (order >= {self.rho})")

    @property
    def eta(self) -> Expr:
        """The operator coefficient u_rho - eta_check in reduced form."""
        return add(Jet(0, self.rho), mul(MINUS_ONE, self.eta_check))


GcsOperator = ReducedOperator | CanonicalOperator


@dataclass(frozen=True)
class UsualOperator:
    """Point field tau d/dt + xi d/dx + eta d/du, coefficients over (t, x, u)."""
    tau: Expr
    xi: Expr
    eta: Expr

    def __post_init__(self):
        for name, coeff in (("tau", self.tau), ("xi", self.xi), ("eta", self.eta)):
            for key in jet_keys(coeff):
                if key != (0, 0):
                    raise ValueError(f"{name} may depend on t, x, u only")
        if self.tau == ZERO and self.xi == ZERO and self.eta == ZERO:
            raise ValueError("vector field must not vanish identically")


class SymmetryStatus(str, Enum):
    SYMMETRY = "symmetry"
    PROBABLE = "probable"
    NOT_SYMMETRY = "not-a-symmetry"
    INCONCLUSIVE = "inconclusive"

    @property
    def is_positive(self) -> bool:
        return self in (SymmetryStatus.SYMMETRY, SymmetryStatus.PROBABLE)


@dataclass
class CheckResult:
    oracle: str
    status: SymmetryStatus
    residual: Expr
    zero: ZeroVerdict


_STATUS_FROM_ZERO = {
    ZeroStatus.PROVEN_ZERO: SymmetryStatus.SYMMETRY,
    ZeroStatus.PROBABLY_ZERO: SymmetryStatus.PROBABLE,
    ZeroStatus.NONZERO: SymmetryStatus.NOT_SYMMETRY,
    ZeroStatus.INCONCLUSIVE: SymmetryStatus.INCONCLUSIVE,
}


def _result(oracle: str, residual: Expr, plan: SamplePlan | None) -> CheckResult:
    zero = is_zero(residual, plan)
    return CheckResult(oracle, _STATUS_FROM_ZERO[zero.status], residual, zero)


# ---------------------------------------------------------------------------
# representation conversions

def constraint_frame(eq: EvolutionEquation, op: CanonicalOperator) -> ConstraintFrame:
    return ConstraintFrame(eq.r, eq.h, op.rho, op.eta_check)


def build_hhat(eq: EvolutionEquation, op: CanonicalOperator) -> Expr:
    """H restricted to the constraint: unchanged for rho > r, otherwise H
    with u_{rho+j} replaced by the j-th restricted x-derivative of eta_check."""
    return constraint_frame(eq, op).hhat


def to_reduced_form(eq: EvolutionEquation, eta: Expr) -> ReducedOperator:
    """Eliminate t-derivatives from eta using the equation; equivalent on
    solutions.  Raises TrivialOperatorError when nothing is left."""
    reduced = eliminate_t_derivatives(eta, eq.h)
    if reduced == ZERO:
        raise TrivialOperatorError("operator vanishes on solutions of the equation")
    if not jet_keys(reduced):
        raise TrivialOperatorError("operator reduces to a jet-free expression")
    return ReducedOperator(reduced)


def to_canonical(op: ReducedOperator, plan: SamplePlan | None = None) -> CanonicalOperator:
    """Solve eta = 0 for the top derivative.  Requires eta affine in u_rho."""
    rho = op.rho
    if rho < 1:
        raise NonQuasilinearError("operator has order zero; no derivative to solve for")
    top = Jet(0, rho)
    a = partial_derivative(op.eta, top)
    if not is_zero(partial_derivative(a, top), plan).is_zeroish:
        raise NonQuasilinearError(f"operator is not affine in u_{rho}")
    if is_zero(a, plan).status is not ZeroStatus.NONZERO:
        raise NonQuasilinearError(
            f"coefficient of u_{rho} vanishes at sample points (maximal rank fails)")
    b = add(op.eta, mul(MINUS_ONE, a, top))
    if (0, rho) in jet_keys(b) or (0, rho) in jet_keys(a):
        raise NonQuasilinearError(f"operator is not affine in u_{rho}")
    return CanonicalOperator(rho, mul(MINUS_ONE, b, pow_(a, -1)))


def as_canonical(op: GcsOperator, plan: SamplePlan | None = None) -> CanonicalOperator:
    if isinstance(op, CanonicalOperator):
        return op
    return to_canonical(op, plan)


def usual_to_generalized(eq: EvolutionEquation, uop: UsualOperator,
                         plan: SamplePlan | None = None) -> ReducedOperator:
    """Characteristic of a point field, reduced on solutions:
    eta^ = eta - tau*H - xi*u_1, of order r when tau does not vanish and
    order 1 otherwise."""
    eta_hat = add(uop.eta, mul(MINUS_ONE, uop.tau, eq.h),
                  mul(MINUS_ONE, uop.xi, Jet(0, 1)))
    if eta_hat == ZERO or not jet_keys(eta_hat):
        raise TrivialOperatorError("characteristic vanishes on solutions")
    op = ReducedOperator(eta_hat)
    if is_zero(uop.tau, plan).status is ZeroStatus.NONZERO:
        expected = eq.r
    elif is_zero(uop.xi, plan).status is ZeroStatus.NONZERO:
        expected = 1
    else:
        raise ValueError("point field with tau = xi = 0 gives an algebraic "
                         "constraint, not a differential one")
    if op.rho != expected:
        raise ValueError(f"characteristic has order {op.rho}, expected {expected}")
    return op


def canonical_equal(a: GcsOperator, b: GcsOperator,
                    plan: SamplePlan | None = None) -> bool:
    """Equality as vector fields, decided at canonical-form level."""
    ca, cb = as_canonical(a, plan), as_canonical(b, plan)
    if ca.rho != cb.rho:
        return False
    return is_zero(add(ca.eta_check, mul(MINUS_ONE, cb.eta_check)), plan).is_zeroish


# ---------------------------------------------------------------------------
# route 1: the determining equation

def check_gcs(eq: EvolutionEquation, op: GcsOperator,
              plan: SamplePlan | None = None) -> CheckResult:
    """Zero-test the single determining equation dt^ eta_check = dx^^rho H^."""
    can = as_canonical(op, plan)
    frame = constraint_frame(eq, can)
    residual = add(frame.dt(can.eta_check),
                   mul(MINUS_ONE, frame.dx_power(frame.hhat, can.rho)))
    return _result("determining-equation", residual, plan)


# ---------------------------------------------------------------------------
# route 2: involutivity of the restricted flows

@dataclass
class VectorField:
    """First-order operator sum_i coeff[i] * d/d(coordinate i)."""
    coeffs: dict[Expr, Expr]

    def apply(self, f: Expr) -> Expr:
        pieces = []
        for coord, coeff in self.coeffs.items():
            d = partial_derivative(f, coord)
            if d != ZERO and coeff != ZERO:
                pieces.append(mul(coeff, d))
        return add(*pieces)


def commutator(a: VectorField, b: VectorField) -> VectorField:
    coords = list(a.coeffs.keys())
    coords += [c for c in b.coeffs if c not in a.coeffs]
    out = {}
    for coord in coords:
        out[coord] = add(a.apply(b.coeffs.get(coord, ZERO)),
                         mul(MINUS_ONE, b.apply(a.coeffs.get(coord, ZERO))))
    return VectorField(out)


def _fresh_coordinates(rho: int, taken: set[str]) -> list[Param]:
    prefix = "v"
    while any(f"{prefix}{a}" in taken for a in range(rho)):
        prefix += "v"
    return [Param(f"{prefix}{a}") for a in range(rho)]


def check_involutivity(eq: EvolutionEquation, op: GcsOperator,
                       plan: SamplePlan | None = None) -> CheckResult:
    """Decide the criterion as commutativity of the restricted flows.

    Works in renamed variables v0..v_{rho-1} and takes a literal commutator
    of two first-order vector fields; the only coefficient that is not
    structurally zero sits on d/d(v_{rho-1}) and gets zero-tested.
    """
    can = as_canonical(op, plan)
    rho, r = can.rho, eq.r
    taken = {a.name for e in (can.eta_check, eq.h)
             for a in free_atoms(e) if isinstance(a, Param)}
    vs = _fresh_coordinates(rho, taken)
    renaming = {Jet(0, a): vs[a] for a in range(rho)}
    eta_v = substitute(can.eta_check, renaming)

    dx_coeffs: dict[Expr, Expr] = {X: ONE}
    for a in range(rho - 1):
        dx_coeffs[vs[a]] = vs[a + 1]
    dx_coeffs[vs[rho - 1]] = eta_v
    d_x = VectorField(dx_coeffs)

    if rho > r:
        h_check = substitute(eq.h, {Jet(0, k): vs[k] for k in range(r + 1)})
    else:
        bindings: dict[Expr, Expr] = {Jet(0, k): vs[k] for k in range(rho)}
        d = eta_v
        for j in range(r - rho + 1):
            bindings[Jet(0, rho + j)] = d
            if j < r - rho:
                d = d_x.apply(d)
        h_check = substitute(eq.h, bindings)

    dt_coeffs: dict[Expr, Expr] = {T: ONE}
    coeff = h_check
    for a in range(rho):
        dt_coeffs[vs[a]] = coeff
        if a < rho - 1:
            coeff = d_x.apply(coeff)
    d_t = VectorField(dt_coeffs)

    bracket = commutator(d_t, d_x)
    for coord, coeff in bracket.coeffs.items():
        if coord == vs[rho - 1]:
            continue
        if coeff != ZERO:
            raise RuntimeError(
                f"commutator coefficient on {to_text(coord)} did not vanish "
                "structurally; flows were assembled inconsistently")
    return _result("involutivity", bracket.coeffs[vs[rho - 1]], plan)


# ---------------------------------------------------------------------------
# route 3: the integrability condition of the joint system

def integrability_probe(eq: EvolutionEquation, op: GcsOperator,
                        plan: SamplePlan | None = None) -> CheckResult:
    """Zero-test F = D_t eta^ - H_{u_r} D_x^r eta^ - eta^_{u_rho} D_x^rho(u_t - H)
    after substituting the joint-manifold relations."""
    if isinstance(op, CanonicalOperator):
        reduced = ReducedOperator(op.eta)
        can = op
    else:
        reduced = op
        can = to_canonical(op, plan)
    eta_hat = reduced.eta
    rho, r = can.rho, eq.r

    e_expr = add(Jet(1, 0), mul(MINUS_ONE, eq.h))
    dxr_eta = eta_hat
    for _ in range(r):
        dxr_eta = total_derivative_x(dxr_eta)
    dxrho_e = e_expr
    for _ in range(rho):
        dxrho_e = total_derivative_x(dxrho_e)
    f_expr = add(total_derivative_t(eta_hat),
                 mul(MINUS_ONE, partial_derivative(eq.h, Jet(0, r)), dxr_eta),
                 mul(MINUS_ONE, partial_derivative(eta_hat, Jet(0, rho)), dxrho_e))

    # manifold relations: first u_{1,k} -> D_x^k H, then u_m -> dx^^(m-rho) eta_check
    tkeys = sorted(k for k in jet_keys(f_expr) if k[0] >= 1)
    if any(a0 > 1 for a0, _ in tkeys):
        raise RuntimeError("unexpected higher t-derivative in the probe")
    bindings: dict[Expr, Expr] = {}
    if tkeys:
        k_max = max(a1 for _, a1 in tkeys)
        dh = eq.h
        for k in range(k_max + 1):
            if (1, k) in tkeys:
                bindings[Jet(1, k)] = dh
            if k < k_max:
                dh = total_derivative_x(dh)
        f_expr = substitute(f_expr, bindings)

    frame = ConstraintFrame(eq.r, eq.h, rho, can.eta_check)
    xkeys = sorted(a1 for _, a1 in jet_keys(f_expr) if a1 >= rho)
    if xkeys:
        m_max = max(xkeys)
        bindings = {}
        d = can.eta_check
        for j in range(m_max - rho + 1):
            if rho + j in xkeys:
                bindings[Jet(0, rho + j)] = d
            if j < m_max - rho:
                d = frame.dx(d)
        f_expr = substitute(f_expr, bindings)

    return _result("integrability", f_expr, plan)
