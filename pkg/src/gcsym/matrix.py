"""Small symbolic matrices with exact determinant and inverse.

Determinants use cofactor expansion up to 4x4 and fraction-free (Bareiss)
elimination beyond that.  Inverses use the adjugate up to 4x4 and Gaussian
elimination with formal quotients beyond; quotients are left unnormalized,
downstream zero tests and evaluation handle them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .expr import Expr, ZERO, ONE, MINUS_ONE, add, mul, pow_

__all__ = ["SymbolicMatrix", "SingularMatrixError"]


class SingularMatrixError(ValueError):
    """No structurally nonzero pivot was available."""


@dataclass(frozen=True)
class SymbolicMatrix:
    rows: tuple[tuple[Expr, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Expr]]) -> "SymbolicMatrix":
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and non-empty")
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "SymbolicMatrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n))
                         for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Expr:
        return self.rows[ij[0]][ij[1]]

    def matmul(self, other: "SymbolicMatrix") -> "SymbolicMatrix":
        n = self.n
        if other.n != n:
            raise ValueError("size mismatch")
        return SymbolicMatrix(tuple(
            tuple(add(*(mul(self.rows[i][k], other.rows[k][j]) for k in range(n)))
                  for j in range(n))
            for i in range(n)))

    def det(self) -> Expr:
        if self.n <= 4:
            return _cofactor_det(self.rows)
        return _bareiss_det([list(r) for r in self.rows])

    def inverse(self) -> "SymbolicMatrix":
        n = self.n
        if n <= 4:
            d = self.det()
            if d == ZERO:
                raise SingularMatrixError("determinant vanishes structurally")
            inv_d = pow_(d, -1)
            out = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    minor = _minor(self.rows, j, i)
                    sign = ONE if (i + j) % 2 == 0 else MINUS_ONE
                    out[i][j] = mul(sign, _cofactor_det(minor), inv_d)
            return SymbolicMatrix(tuple(tuple(r) for r in out))
        return _gauss_jordan_inverse([list(r) for r in self.rows])


def _minor(rows, drop_row: int, drop_col: int):
    return tuple(tuple(v for j, v in enumerate(r) if j != drop_col)
                 for i, r in enumerate(rows) if i != drop_row)


def _cofactor_det(rows) -> Expr:
    n = len(rows)
    if n == 0:
        return ONE
    if n == 1:
        return rows[0][0]
    if n == 2:
        return add(mul(rows[0][0], rows[1][1]),
                   mul(MINUS_ONE, rows[0][1], rows[1][0]))
    pieces = []
    for j, head in enumerate(rows[0]):
        if head == ZERO:
            continue
        sign = ONE if j % 2 == 0 else MINUS_ONE
        pieces.append(mul(sign, head, _cofactor_det(_minor(rows, 0, j))))
    return add(*pieces)


def _find_pivot(m, col: int, start: int) -> int:
    for i in range(start, len(m)):
        if m[i][col] != ZERO:
            return i
    return -1


def _bareiss_det(m) -> Expr:
    n = len(m)
    sign = 1
    prev = ONE
    for k in range(n - 1):
        p = _find_pivot(m, k, k)
        if p < 0:
            return ZERO
        if p != k:
            m[k], m[p] = m[p], m[k]
            sign = -sign
        inv_prev = pow_(prev, -1)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = mul(add(mul(m[i][j], m[k][k]),
                                  mul(MINUS_ONE, m[i][k], m[k][j])), inv_prev)
            m[i][k] = ZERO
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else mul(MINUS_ONE, d)


def _gauss_jordan_inverse(m) -> SymbolicMatrix:
    n = len(m)
    aug = [m[i] + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for k in range(n):
        p = _find_pivot(aug, k, k)
        if p < 0:
            raise SingularMatrixError(f"no usable pivot in column {k}")
        if p != k:
            aug[k], aug[p] = aug[p], aug[k]
        inv_pivot = pow_(aug[k][k], -1)
        aug[k] = [mul(v, inv_pivot) for v in aug[k]]
        for i in range(n):
            if i == k or aug[i][k] == ZERO:
                continue
            factor = aug[i][k]
            aug[i] = [add(vi, mul(MINUS_ONE, factor, vk))
                      for vi, vk in zip(aug[i], aug[k])]
    return SymbolicMatrix(tuple(tuple(row[n:]) for row in aug))
