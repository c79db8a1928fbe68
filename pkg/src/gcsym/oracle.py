"""Seeded numeric backend: evaluation, zero testing, ODE integration.

Everything here is deterministic under a fixed seed.  Sample values are
drawn per (seed, point index, retry, variable), so the verdict for a given
expression never depends on evaluation order, and expressions sharing
variables see the same sampled values at the same point index.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence

from .expr import (
    Expr, Fun, Jet, Param, Pow, Prod, Rat, Sum, Var,
    T, X, ZERO, free_atoms, partial_derivative, sort_key, to_text,
)

DEFAULT_SEED = 0xC0FFEE

#: magnitudes below this count as a vanishing denominator
DENOM_EPS = 1e-12


class EvalDomainError(ArithmeticError):
    """Sample point outside the real domain of the expression."""


class IntegrationError(RuntimeError):
    """Trajectory blow-up or domain error while integrating."""


def evaluate(e: Expr, point: Mapping[Expr, float]) -> float:
    """Evaluate at a point binding every free Var/Jet/Param to a float."""
    return _eval(e, point, None)


def evaluate_scaled(e: Expr, point: Mapping[Expr, float]) -> tuple[float, float]:
    """Evaluate and also report the largest intermediate magnitude."""
    scale = [0.0]
    v = _eval(e, point, scale)
    return v, scale[0]


def _eval(e: Expr, point: Mapping[Expr, float], scale: list[float] | None) -> float:
    if isinstance(e, Rat):
        v = e.value.numerator / e.value.denominator
    elif isinstance(e, (Var, Jet, Param)):
        try:
            v = point[e]
        except KeyError:
            raise KeyError(f"no value bound for {to_text(e)}") from None
    elif isinstance(e, Sum):
        v = math.fsum(_eval(t, point, scale) for t in e.terms)
    elif isinstance(e, Prod):
        v = 1.0
        for f in e.factors:
            v *= _eval(f, point, scale)
    elif isinstance(e, Pow):
        vb = _eval(e.base, point, scale)
        exp = e.exponent
        if exp < 0 and abs(vb) < DENOM_EPS:
            raise EvalDomainError("division by a vanishing denominator")
        if exp.denominator == 1:
            v = vb ** int(exp)
        else:
            if vb <= 0:
                raise EvalDomainError("fractional power of a non-positive base")
            v = vb ** (exp.numerator / exp.denominator)
    elif isinstance(e, Fun):
        va = _eval(e.arg, point, scale)
        if e.name == "exp":
            try:
                v = math.exp(va)
            except OverflowError:
                raise EvalDomainError("exp overflow") from None
        else:
            if va <= 0:
                raise EvalDomainError("ln of a non-positive value")
            v = math.log(va)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    if scale is not None and abs(v) > scale[0]:
        scale[0] = abs(v)
    return v


# ---------------------------------------------------------------------------
# probabilistic zero test

@dataclass
class SamplePlan:
    """Reproducible sampling plan for the probabilistic zero test."""
    seed: int = DEFAULT_SEED
    n_points: int = 50
    low: float = 0.5
    high: float = 2.5
    threshold: float = 1e-9
    scale_relative: bool = True
    max_retries: int = 10
    box: dict[Expr, tuple[float, float]] = field(default_factory=dict)

    def interval(self, atom: Expr) -> tuple[float, float]:
        return self.box.get(atom, (self.low, self.high))


class ZeroStatus(str, Enum):
    PROVEN_ZERO = "proven-zero"
    PROBABLY_ZERO = "probably-zero"
    NONZERO = "nonzero"
    INCONCLUSIVE = "inconclusive"


@dataclass
class ZeroVerdict:
    status: ZeroStatus
    witness: dict[Expr, float] | None = None
    value: float | None = None
    points: int = 0

    @property
    def is_zeroish(self) -> bool:
        return self.status in (ZeroStatus.PROVEN_ZERO, ZeroStatus.PROBABLY_ZERO)

    def witness_text(self, depvar: str = "u") -> str | None:
        if self.witness is None:
            return None
        items = sorted(self.witness.items(), key=lambda kv: sort_key(kv[0]))
        return ", ".join(f"{to_text(a, depvar)}={v:.6g}" for a, v in items)


def _atom_tag(atom: Expr) -> str:
    if isinstance(atom, Var):
        return atom.name
    if isinstance(atom, Jet):
        return f"jet:{atom.a0}:{atom.a1}"
    return f"param:{atom.name}"


def sample_point(atoms: Sequence[Expr], plan: SamplePlan, index: int,
                 attempt: int = 0) -> dict[Expr, float]:
    """Draw one sample point; deterministic per (seed, index, attempt, atom)."""
    point = {}
    for atom in atoms:
        lo, hi = plan.interval(atom)
        rng = random.Random(f"{plan.seed}:{index}:{attempt}:{_atom_tag(atom)}")
        point[atom] = rng.uniform(lo, hi)
    return point


def probabilistic_zero_test(e: Expr, plan: SamplePlan | None = None) -> ZeroVerdict:
    """Sample the expression at random points and compare against threshold.

    Returns PROBABLY_ZERO when all points stay below the (scale-relative)
    threshold, NONZERO with the first violating point, or INCONCLUSIVE when
    a point exhausts its domain-error retries.
    """
    plan = plan or SamplePlan()
    atoms = sorted(free_atoms(e), key=sort_key)
    for i in range(plan.n_points):
        result = None
        for attempt in range(plan.max_retries):
            point = sample_point(atoms, plan, i, attempt)
            try:
                result = evaluate_scaled(e, point)
            except EvalDomainError:
                continue
            break
        if result is None:
            return ZeroVerdict(ZeroStatus.INCONCLUSIVE, points=i)
        value, scale = result
        tol = plan.threshold * max(1.0, scale) if plan.scale_relative else plan.threshold
        if abs(value) > tol:
            return ZeroVerdict(ZeroStatus.NONZERO, witness=point, value=value, points=i + 1)
    return ZeroVerdict(ZeroStatus.PROBABLY_ZERO, points=plan.n_points)


def is_zero(e: Expr, plan: SamplePlan | None = None) -> ZeroVerdict:
    """Decide whether a (constructor-normalized) expression vanishes.

    Structural zero is a proof; anything else goes to the sampling test.
    """
    if e == ZERO:
        return ZeroVerdict(ZeroStatus.PROVEN_ZERO)
    return probabilistic_zero_test(e, plan)


# ---------------------------------------------------------------------------
# fixed-step integration of reduced systems

@dataclass
class IntegrationPlan:
    """Classical fixed-step RK4 configuration."""
    initial: tuple[float, ...]
    t0: float = 0.0
    t1: float = 0.05
    step: float = 1e-3
    blowup: float = 1e8

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if not math.isfinite(self.t0) or not math.isfinite(self.t1):
            raise ValueError("integration span must be finite")


Trajectory = list[tuple[float, tuple[float, ...]]]


def rk4_step(f: Callable[[float, Sequence[float]], list[float]],
             t: float, y: Sequence[float], h: float) -> list[float]:
    k1 = f(t, y)
    k2 = f(t + h / 2, [yi + h / 2 * ki for yi, ki in zip(y, k1)])
    k3 = f(t + h / 2, [yi + h / 2 * ki for yi, ki in zip(y, k2)])
    k4 = f(t + h, [yi + h * ki for yi, ki in zip(y, k3)])
    return [yi + h / 6 * (a + 2 * b + 2 * c + d)
            for yi, a, b, c, d in zip(y, k1, k2, k3, k4)]


def integrate_reduced(rhs: Sequence[Expr], params: Sequence[str],
                      plan: IntegrationPlan) -> Trajectory:
    """Integrate phi^a_t = G^a(t, phi) with fixed-step RK4.

    `rhs` are the right-hand sides over t and the named parameters; the
    state vector follows the order of `params`.  Aborts on blow-up.
    """
    if len(rhs) != len(params) or len(plan.initial) != len(params):
        raise ValueError("system size, parameter names and initial condition disagree")
    atoms = [Param(name) for name in params]

    def f(t: float, y: Sequence[float]) -> list[float]:
        point: dict[Expr, float] = {T: t}
        for atom, yi in zip(atoms, y):
            point[atom] = yi
        try:
            return [evaluate(g, point) for g in rhs]
        except EvalDomainError as err:
            raise IntegrationError(f"domain error at t={t:.6g}: {err}") from None

    t, y = plan.t0, list(plan.initial)
    out: Trajectory = [(t, tuple(y))]
    n_full = int((plan.t1 - plan.t0) / plan.step + 1e-12)
    for i in range(n_full):
        y = rk4_step(f, t, y, plan.step)
        t = plan.t0 + (i + 1) * plan.step
        if max(abs(yi) for yi in y) > plan.blowup:
            raise IntegrationError(f"trajectory blow-up at t={t:.6g}")
        out.append((t, tuple(y)))
    rest = plan.t1 - t
    if rest > 1e-12:
        y = rk4_step(f, t, y, rest)
        out.append((plan.t1, tuple(y)))
    return out


def pde_residual(h_expr: Expr, r: int, f_expr: Expr, params: Sequence[str],
                 traj: Trajectory, probe_xs: Sequence[float],
                 min_valid: int = 5) -> float:
    """Max |u_t - H| for u(t,x) = F(t, x, phi(t)) along a trajectory.

    u_t comes from 4th-order central differences over the trajectory while
    the spatial derivatives of F are exact symbolic derivatives evaluated
    at the probe points.  Domain errors skip the probe; fewer than
    `min_valid` valid probes raise.
    """
    if len(traj) < 5:
        raise ValueError("trajectory too short for the 5-point stencil")
    h = traj[1][0] - traj[0][0]
    n_uniform = len(traj)
    for i in range(1, len(traj)):
        if abs((traj[i][0] - traj[i - 1][0]) - h) > 1e-12:
            n_uniform = i
            break
    if n_uniform < 5:
        raise ValueError("trajectory spacing is not uniform")

    atoms = [Param(name) for name in params]
    fx = [f_expr]
    for _ in range(r):
        fx.append(partial_derivative(fx[-1], X))

    def u_at(i: int, xv: float) -> float:
        t, phi = traj[i]
        point: dict[Expr, float] = {T: t, X: xv}
        for atom, value in zip(atoms, phi):
            point[atom] = value
        return evaluate(f_expr, point)

    worst = 0.0
    valid = 0
    for i in range(2, n_uniform - 2):
        t, phi = traj[i]
        for xv in probe_xs:
            point: dict[Expr, float] = {T: t, X: xv}
            for atom, value in zip(atoms, phi):
                point[atom] = value
            try:
                h_point = dict(point)
                for k in range(r + 1):
                    h_point[Jet(0, k)] = evaluate(fx[k], point)
                h_val = evaluate(h_expr, h_point)
                u_t = (-u_at(i + 2, xv) + 8 * u_at(i + 1, xv)
                       - 8 * u_at(i - 1, xv) + u_at(i - 2, xv)) / (12 * h)
            except EvalDomainError:
                continue
            valid += 1
            worst = max(worst, abs(u_t - h_val))
    if valid < min_valid:
        raise EvalDomainError(f"only {valid} valid probes (need {min_valid})")
    return worst
