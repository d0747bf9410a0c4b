"""Small exact/float linear-algebra helpers.

Exact paths run over ``Fraction`` (Gaussian elimination); float paths use
numpy SVD.  Both are kept because rank verdicts at rational points should be
exact facts while sampled points need a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class AffineMap:
    """x -> A x + b with exact rational entries."""

    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]

    @property
    def dim(self) -> int:
        return len(self.offset)

    @classmethod
    def create(cls, matrix, offset) -> "AffineMap":
        mat = tuple(tuple(Fraction(v) for v in row) for row in matrix)
        off = tuple(Fraction(v) for v in offset)
        if len(mat) != len(off) or any(len(row) != len(off) for row in mat):
            raise InputError("affine map shapes are inconsistent")
        return cls(mat, off)

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        mat = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
        return cls.create(mat, [Fraction(0)] * dim)

    def apply(self, point: Sequence) -> tuple[Fraction, ...]:
        xs = [Fraction(v) for v in point]
        if len(xs) != self.dim:
            raise InputError("point dimension mismatch")
        return tuple(
            sum((self.matrix[i][j] * xs[j] for j in range(self.dim)), self.offset[i])
            for i in range(self.dim)
        )

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self ∘ other: first apply ``other``, then ``self``."""
        if self.dim != other.dim:
            raise InputError("affine map dimension mismatch")
        n = self.dim
        mat = [
            [
                sum(self.matrix[i][k] * other.matrix[k][j] for k in range(n))
                for j in range(n)
            ]
            for i in range(n)
        ]
        off = [
            sum(self.matrix[i][k] * other.offset[k] for k in range(n)) + self.offset[i]
            for i in range(n)
        ]
        return AffineMap.create(mat, off)

    def is_invertible(self) -> bool:
        return exact_rank([list(row) for row in self.matrix]) == self.dim

    def inverse(self) -> "AffineMap":
        n = self.dim
        aug = [
            [Fraction(v) for v in self.matrix[i]] + [Fraction(int(i == j)) for j in range(n)]
            for i in range(n)
        ]
        # Gauss-Jordan
        row = 0
        for col in range(n):
            pivot = next((r for r in range(row, n) if aug[r][col] != 0), None)
            if pivot is None:
                raise InputError("affine map is singular")
            aug[row], aug[pivot] = aug[pivot], aug[row]
            inv = Fraction(1) / aug[row][col]
            aug[row] = [v * inv for v in aug[row]]
            for r in range(n):
                if r != row and aug[r][col] != 0:
                    factor = aug[r][col]
                    aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
            row += 1
        inv_mat = [line[n:] for line in aug]
        inv_off = AffineMap.create(inv_mat, [0] * n).apply([-v for v in self.offset])
        return AffineMap.create(inv_mat, inv_off)


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a matrix with rational entries, by fraction-free elimination."""
    mat = [[Fraction(v) for v in row] for row in rows]
    if not mat:
        return 0
    n_cols = len(mat[0])
    rank = 0
    row = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[row], mat[pivot] = mat[pivot], mat[row]
        for r in range(row + 1, len(mat)):
            if mat[r][col] != 0:
                factor = mat[r][col] / mat[row][col]
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[row])]
        rank += 1
        row += 1
        if row == len(mat):
            break
    return rank


def float_rank_report(matrix: np.ndarray, ratio: float = 1e-8) -> dict:
    """Numerical rank via SVD: count singular values above ratio * largest."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return {"rank": 0, "smin": 0.0, "smax": 0.0, "ratio": ratio}
    svals = np.linalg.svd(matrix, compute_uv=False)
    smax = float(svals[0])
    if smax == 0.0:
        return {"rank": 0, "smin": 0.0, "smax": 0.0, "ratio": ratio}
    rank = int(np.sum(svals > ratio * smax))
    k = min(matrix.shape)
    smin = float(svals[k - 1])
    return {"rank": rank, "smin": smin, "smax": smax, "ratio": ratio}


def sqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if not a perfect square."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def sqrt_bounds(q: Fraction) -> tuple[Fraction, Fraction]:
    """Rational lo, hi with lo^2 <= q <= hi^2 (tight when q is a perfect square)."""
    if q < 0:
        raise InputError("sqrt_bounds requires a non-negative rational")
    exact = sqrt_fraction(q)
    if exact is not None:
        return exact, exact
    n, d = q.numerator, q.denominator
    root = math.isqrt(n * d)
    return Fraction(root, d), Fraction(root + 1, d)
