"""Limit determinants, limit Cramer systems and limit hyperplanes.

The limit determinant is the flat Boxplus of all signed permutation
products, so it is computed by enumerating permutations.  Sizes are capped
at n <= 6 (720 products).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Mapping, Sequence

from .errors import DegenerateHyperplane, DimensionMismatch, GuardExceeded, SingularInLimit
from .scalar import LOWER, UPPER, as_scalar, as_vector, nary_boxplus, norm_infty, smile_chain

log = logging.getLogger(__name__)

MAX_DET_SIZE = 6

Matrix = tuple  # tuple of row tuples


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(as_vector(row) for row in rows)


@lru_cache(maxsize=None)
def signed_permutations(n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    out = []
    for perm in permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        out.append((perm, -1 if inversions % 2 else 1))
    return tuple(out)


def _check_square(M: Sequence[Sequence]) -> int:
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise DimensionMismatch("matrix must be square and non-empty")
    if n > MAX_DET_SIZE:
        raise GuardExceeded(f"limit determinant of size {n} exceeds the guard n <= {MAX_DET_SIZE}")
    return n


def det_terms(M: Sequence[Sequence]) -> list[Fraction]:
    """Signed permutation products, in the order of ``signed_permutations``."""
    n = _check_square(M)
    M = as_matrix(M)
    terms = []
    for perm, sign in signed_permutations(n):
        product = Fraction(sign)
        for i in range(n):
            product *= M[i][perm[i]]
        terms.append(product)
    return terms


def det_infty(M: Sequence[Sequence]) -> Fraction:
    return nary_boxplus(det_terms(M))


def replace_column(M: Sequence[Sequence], j: int, column: Sequence) -> Matrix:
    return tuple(tuple(column[i] if k == j else v for k, v in enumerate(row)) for i, row in enumerate(M))


def replace_row(M: Sequence[Sequence], i: int, row: Sequence) -> Matrix:
    return tuple(tuple(row) if k == i else tuple(r) for k, r in enumerate(M))


def columns_of(M: Sequence[Sequence]) -> tuple:
    return tuple(zip(*M))


@dataclass(frozen=True)
class CramerSolution:
    """Limit Cramer solution with its per-(permutation, column) weights.

    ``alpha[(perm, j)]`` is the signed product of permutation ``perm`` in the
    matrix whose column j was replaced by the right-hand side, divided by the
    limit determinant.
    """

    solution: tuple
    alpha: Mapping
    det: Fraction

    def column_weights(self, j: int) -> list[Fraction]:
        return [w for (perm, k), w in self.alpha.items() if k == j]

    def max_weight(self) -> Fraction:
        return max((abs(w) for w in self.alpha.values()), default=Fraction(0))


def cramer_infty(M: Sequence[Sequence], b: Sequence) -> CramerSolution:
    n = _check_square(M)
    if len(b) != n:
        raise DimensionMismatch("right-hand side length differs from matrix size")
    M = as_matrix(M)
    b = as_vector(b)
    det = det_infty(M)
    if det == 0:
        raise SingularInLimit("limit determinant vanishes")
    perms = signed_permutations(n)
    alpha = {}
    solution = []
    for j in range(n):
        terms = det_terms(replace_column(M, j, b))
        for (perm, _), term in zip(perms, terms):
            alpha[(perm, j)] = term / det
        solution.append(nary_boxplus(terms) / det)
    sol = CramerSolution(tuple(solution), alpha, det)
    if sol.max_weight() > 1:
        log.debug("limit Cramer weight above 1: %s", sol.max_weight())
    return sol


def boxplus_reconstruct(sol: CramerSolution, columns: Sequence[Sequence], b: Sequence) -> bool:
    """Does the flat Boxplus of alpha[(perm, j)] * columns[j] give back b?"""
    b = as_vector(b)
    n = len(b)
    if len(columns) != n or any(len(col) != n for col in columns):
        raise DimensionMismatch("columns do not match the right-hand side")
    for i in range(n):
        terms = [w * as_scalar(columns[j][i]) for (perm, j), w in sol.alpha.items()]
        if nary_boxplus(terms) != b[i]:
            return False
    return True


@dataclass(frozen=True)
class LimitHyperplane:
    """The set lower(coeffs*x) <= rhs <= upper(coeffs*x)."""

    coeffs: tuple
    rhs: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", as_vector(self.coeffs))
        object.__setattr__(self, "rhs", as_scalar(self.rhs))

    def canonical(self) -> "LimitHyperplane":
        scale = norm_infty(self.coeffs)
        if scale == 0:
            raise DegenerateHyperplane("all coefficients vanish")
        return LimitHyperplane(tuple(a / scale for a in self.coeffs), self.rhs / scale)

    def contains(self, x: Sequence) -> bool:
        return hyperplane_contains(self, x)


def hyperplane_infty(points: Sequence[Sequence]) -> LimitHyperplane:
    """Limit hyperplane through n points of R^n (points become matrix columns)."""
    n = len(points)
    if n == 0 or any(len(p) != n for p in points):
        raise DimensionMismatch("need exactly n points in R^n")
    V = tuple(tuple(as_scalar(p[i]) for p in points) for i in range(n))
    ones = (Fraction(1),) * n
    coeffs = tuple(det_infty(replace_row(V, i, ones)) for i in range(n))
    if all(c == 0 for c in coeffs):
        raise DegenerateHyperplane("all limit coefficients vanish")
    return LimitHyperplane(coeffs, det_infty(V))


def hyperplane_contains(H: LimitHyperplane, x: Sequence) -> bool:
    if len(x) != len(H.coeffs):
        raise DimensionMismatch("point and hyperplane differ in dimension")
    products = [a * as_scalar(v) for a, v in zip(H.coeffs, x)]
    return smile_chain(products, LOWER) <= H.rhs <= smile_chain(products, UPPER)
