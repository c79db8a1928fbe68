"""Jet-space calculus: weights, the derivative ranking, and the total,
reduced, and constraint-restricted differentiation operators.

The weight of u_{a0,a1} for an equation of order r is r*a0 + a1, which makes
u_t and u_r comparable.  The ranking orders derivatives by weight and breaks
ties by the t-order; it is a total order compatible with differentiation.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from .expr import (
    DerivKey, Expr, Fun, Jet, Param, Pow, Prod, Rat, Sum, Var,
    T, X, ZERO, ONE,
    add, fun_, jet_keys, mul, partial_derivative, pow_, substitute,
)

__all__ = [
    "weight_of_key", "weight", "rank_compare", "leading_derivative",
    "DerivClass", "classify_derivative",
    "total_derivative_t", "total_derivative_x",
    "reduced_dt_on_solutions", "frechet", "apply_frechet",
    "eliminate_t_derivatives", "ConstraintFrame",
]


def weight_of_key(key: DerivKey, r: int) -> int:
    a0, a1 = key
    return r * a0 + a1


def weight(e: Expr, r: int) -> int:
    """Max weight of a jet variable in e; 0 for jet-free expressions."""
    keys = jet_keys(e)
    if not keys:
        return 0
    return max(weight_of_key(k, r) for k in keys)


def rank_compare(a: DerivKey, b: DerivKey, r: int) -> int:
    """-1, 0, or 1: weight first, then t-order as tie-break."""
    wa, wb = weight_of_key(a, r), weight_of_key(b, r)
    if wa != wb:
        return -1 if wa < wb else 1
    if a[0] != b[0]:
        return -1 if a[0] < b[0] else 1
    return 0


def leading_derivative(e: Expr, r: int) -> DerivKey | None:
    """The max-ranked jet variable occurring in e, if any."""
    keys = jet_keys(e)
    if not keys:
        return None
    best = None
    for k in keys:
        if best is None or rank_compare(best, k, r) < 0:
            best = k
    return best


class DerivClass(Enum):
    PRINCIPAL = "principal"
    PARAMETRIC = "parametric"


def classify_derivative(key: DerivKey, rho: int) -> DerivClass:
    """Classification relative to the orthonomic pair u_t = H^, u_rho = eta^.

    Principal derivatives are exactly those with a0 >= 1 or a1 >= rho; the
    parametric ones are u_0, ..., u_{rho-1}.
    """
    a0, a1 = key
    if a0 >= 1 or a1 >= rho:
        return DerivClass.PRINCIPAL
    return DerivClass.PARAMETRIC


# ---------------------------------------------------------------------------
# total derivatives

def total_derivative_x(e: Expr) -> Expr:
    """D_x: each jet u_{a0,a1} contributes u_{a0,a1+1}."""
    return _total(e, 0)


def total_derivative_t(e: Expr) -> Expr:
    """D_t: each jet u_{a0,a1} contributes u_{a0+1,a1}."""
    return _total(e, 1)


def _total(e: Expr, slot: int) -> Expr:
    if isinstance(e, Rat) or isinstance(e, Param):
        return ZERO
    if isinstance(e, Var):
        if slot == 0:
            return ONE if e.name == "x" else ZERO
        return ONE if e.name == "t" else ZERO
    if isinstance(e, Jet):
        return Jet(e.a0, e.a1 + 1) if slot == 0 else Jet(e.a0 + 1, e.a1)
    if isinstance(e, Sum):
        return add(*(_total(t, slot) for t in e.terms))
    if isinstance(e, Prod):
        fs = e.factors
        pieces = []
        for i, f in enumerate(fs):
            df = _total(f, slot)
            if df == ZERO:
                continue
            pieces.append(mul(*fs[:i], *fs[i + 1:], df))
        return add(*pieces)
    if isinstance(e, Pow):
        db = _total(e.base, slot)
        if db == ZERO:
            return ZERO
        return mul(Rat(e.exponent), pow_(e.base, e.exponent - 1), db)
    if isinstance(e, Fun):
        da = _total(e.arg, slot)
        if da == ZERO:
            return ZERO
        if e.name == "exp":
            return mul(fun_("exp", e.arg), da)
        return mul(pow_(e.arg, -1), da)
    raise TypeError(f"not an expression node: {e!r}")


def reduced_dt_on_solutions(e: Expr, h_expr: Expr) -> Expr:
    """D~_t e = e_t + sum_k (D_x^k H) * e_{u_k}, for t-derivative-free e."""
    keys = jet_keys(e)
    if any(a0 for a0, _ in keys):
        raise ValueError("expression contains t-derivatives")
    out = partial_derivative(e, T)
    if not keys:
        return out
    m = max(a1 for _, a1 in keys)
    dh = h_expr
    pieces = [out]
    for k in range(m + 1):
        coeff = partial_derivative(e, Jet(0, k))
        if coeff != ZERO:
            pieces.append(mul(dh, coeff))
        if k < m:
            dh = total_derivative_x(dh)
    return add(*pieces)


def frechet(e: Expr) -> list[Expr]:
    """Coefficients (e_{u_0}, ..., e_{u_m}) of the linearization sum e_{u_i} D_x^i."""
    keys = jet_keys(e)
    if any(a0 for a0, _ in keys):
        raise ValueError("expression contains t-derivatives")
    if not keys:
        return []
    m = max(a1 for _, a1 in keys)
    return [partial_derivative(e, Jet(0, k)) for k in range(m + 1)]


def apply_frechet(coeffs: Sequence[Expr], g: Expr) -> Expr:
    """sum_i coeffs[i] * D_x^i g."""
    pieces = []
    dg = g
    for i, c in enumerate(coeffs):
        if c != ZERO:
            pieces.append(mul(c, dg))
        if i + 1 < len(coeffs):
            dg = total_derivative_x(dg)
    return add(*pieces)


def eliminate_t_derivatives(e: Expr, h_expr: Expr) -> Expr:
    """Rewrite all u_{a0,a1} with a0 >= 1 using u_{1,k} = D_x^k H.

    Jets at the current maximal t-order A are replaced by D_t^{A-1} D_x^k H,
    which only reintroduces t-orders below A, so the loop terminates.  The
    result agrees with e on solutions of u_t = H.
    """
    while True:
        keys = jet_keys(e)
        tkeys = [k for k in keys if k[0] >= 1]
        if not tkeys:
            return e
        a_max = max(a0 for a0, _ in tkeys)
        level = sorted(k for k in tkeys if k[0] == a_max)
        bindings = {}
        for a0, a1 in level:
            rhs = h_expr
            for _ in range(a1):
                rhs = total_derivative_x(rhs)
            for _ in range(a_max - 1):
                rhs = total_derivative_t(rhs)
            bindings[Jet(a0, a1)] = rhs
        e = substitute(e, bindings)


# ---------------------------------------------------------------------------
# differentiation restricted to the joint constraint manifold

class ConstraintFrame:
    """Total derivatives restricted to the manifold of u_t = H joined with
    the differential constraint u_rho = eta_check.

    dx is d/dx + sum_{b=1}^{rho-1} u_b d/d(u_{b-1}) + eta_check d/d(u_{rho-1});
    dt is d/dt + sum_{b=1}^{rho} (dx^{b-1} H^) d/d(u_{b-1}), where H^ equals H
    for rho > r and otherwise H with u_{rho+j} replaced by dx^j eta_check.
    Both map functions of (t, x, u_0..u_{rho-1}) to functions of the same
    variables.
    """

    def __init__(self, r: int, h_expr: Expr, rho: int, eta_check: Expr):
        if rho < 1:
            raise ValueError("constraint order must be positive")
        self._check_on_manifold(eta_check, rho, "constraint right-hand side")
        self.r = r
        self.rho = rho
        self.eta_check = eta_check
        self.hhat = self._build_hhat(h_expr)
        # dx^{b-1} hhat for b = 1..rho, shared by dt applications
        coeffs = [self.hhat]
        for _ in range(rho - 1):
            coeffs.append(self.dx(coeffs[-1]))
        self._dt_coeffs = coeffs

    @staticmethod
    def _check_on_manifold(e: Expr, rho: int, what: str) -> None:
        for a0, a1 in jet_keys(e):
            if a0 >= 1:
                raise ValueError(f"{what} contains a t-derivative")
            if a1 >= rho:
                raise ValueError(f"{what} contains u_{a1} (order >= {rho})")

    def _build_hhat(self, h_expr: Expr) -> Expr:
        if self.rho > self.r:
            return h_expr
        bindings = {}
        d = self.eta_check
        for j in range(self.r - self.rho + 1):
            bindings[Jet(0, self.rho + j)] = d
            if j < self.r - self.rho:
                d = self.dx(d)
        return substitute(h_expr, bindings)

    def dx(self, e: Expr) -> Expr:
        self._check_on_manifold(e, self.rho, "expression")
        pieces = [partial_derivative(e, X)]
        for b in range(1, self.rho):
            c = partial_derivative(e, Jet(0, b - 1))
            if c != ZERO:
                pieces.append(mul(Jet(0, b), c))
        c = partial_derivative(e, Jet(0, self.rho - 1))
        if c != ZERO:
            pieces.append(mul(self.eta_check, c))
        return add(*pieces)

    def dx_power(self, e: Expr, n: int) -> Expr:
        for _ in range(n):
            e = self.dx(e)
        return e

    def dt(self, e: Expr) -> Expr:
        self._check_on_manifold(e, self.rho, "expression")
        pieces = [partial_derivative(e, T)]
        for b in range(1, self.rho + 1):
            c = partial_derivative(e, Jet(0, b - 1))
            if c != ZERO:
                pieces.append(mul(self._dt_coeffs[b - 1], c))
        return add(*pieces)
