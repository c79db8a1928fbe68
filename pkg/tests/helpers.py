"""Shared test utilities: seeded random expressions and finite differences."""

from __future__ import annotations

import random

from gcsym.expr import (
    Expr, Jet, Param, T, X, add, fun_, mul, pow_, rat,
)
from gcsym.oracle import evaluate


def random_expr(rng: random.Random, atoms: list[Expr], depth: int = 3,
                allow_fun: bool = True) -> Expr:
    """Small random expression over the given atoms, safe on [0.5, 2.5]."""
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.25:
            return rat(rng.randint(-4, 4), rng.randint(1, 3))
        return rng.choice(atoms)
    pick = rng.random()
    if pick < 0.35:
        n = rng.randint(2, 3)
        return add(*(random_expr(rng, atoms, depth - 1, allow_fun) for _ in range(n)))
    if pick < 0.7:
        n = rng.randint(2, 3)
        return mul(*(random_expr(rng, atoms, depth - 1, allow_fun) for _ in range(n)))
    if pick < 0.9:
        base = rng.choice(atoms)
        exponent = rng.choice([-2, -1, 2, 3])
        return pow_(base, exponent)
    if allow_fun and pick < 0.95:
        return fun_("exp", rng.choice(atoms))
    if allow_fun:
        return fun_("ln", rng.choice(atoms))
    return rng.choice(atoms)


def random_point(rng: random.Random, atoms, low: float = 0.5, high: float = 2.5):
    return {a: rng.uniform(low, high) for a in atoms}


def central_difference(e: Expr, wrt: Expr, point: dict, step: float = 1e-6) -> float:
    hi = dict(point)
    lo = dict(point)
    hi[wrt] = point[wrt] + step
    lo[wrt] = point[wrt] - step
    return (evaluate(e, hi) - evaluate(e, lo)) / (2 * step)


JET_ATOMS = [Jet(0, 0), Jet(0, 1), Jet(0, 2), Jet(1, 0), Jet(1, 1), T, X]
PLAIN_ATOMS = [Jet(0, 0), Jet(0, 1), Jet(0, 2), T, X, Param("a")]
