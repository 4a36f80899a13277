"""Exact rational linear programming by two-phase simplex with Bland's rule."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple | None = None
    value: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _pivot(rows, cost, basis, r, k):
    pivot_row = rows[r]
    inv = 1 / pivot_row[k]
    pivot_row = [v * inv for v in pivot_row]
    rows[r] = pivot_row
    for i, row in enumerate(rows):
        f = row[k]
        if i != r and f:
            rows[i] = [a - f * b if b else a for a, b in zip(row, pivot_row)]
    f = cost[k]
    if f:
        cost[:] = [a - f * b if b else a for a, b in zip(cost, pivot_row)]
    basis[r] = k


def _run(rows, cost, basis, allowed) -> str:
    while True:
        k = next((j for j in allowed if cost[j] < 0), None)
        if k is None:
            return OPTIMAL
        leave = None
        for i, row in enumerate(rows):
            if row[k] > 0:
                ratio = row[-1] / row[k]
                if leave is None or ratio < leave[0] or (ratio == leave[0] and basis[i] < basis[leave[1]]):
                    leave = (ratio, i)
        if leave is None:
            return UNBOUNDED
        _pivot(rows, cost, basis, leave[1], k)


def solve_standard(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimise c.x subject to A x = b and x >= 0, exactly."""
    n = len(c)
    c = [Fraction(v) for v in c]
    rows = []
    for row, rhs in zip(A, b):
        if len(row) != n:
            raise ValueError("constraint row length differs from objective length")
        row = [Fraction(v) for v in row]
        rhs = Fraction(rhs)
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append(row + [rhs])
    m = len(rows)
    if m == 0:
        if any(v < 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, tuple(Fraction(0) for _ in range(n)), Fraction(0))

    # artificial columns n..n+m-1, rhs last
    for i, row in enumerate(rows):
        rhs = row.pop()
        row.extend(Fraction(int(i == j)) for j in range(m))
        row.append(rhs)
    basis = list(range(n, n + m))
    cost = [Fraction(0)] * (n + m + 1)
    for row in rows:
        for j in range(n):
            cost[j] -= row[j]
        cost[-1] -= row[-1]
    _run(rows, cost, basis, range(n + m))
    if cost[-1] != 0:
        return LPResult(INFEASIBLE)

    # drive remaining artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(rows):
        if basis[i] >= n:
            k = next((j for j in range(n) if rows[i][j] != 0), None)
            if k is None:
                del rows[i], basis[i]
                continue
            _pivot(rows, cost, basis, i, k)
        i += 1

    cost = c + [Fraction(0)] * m + [Fraction(0)]
    for i, j in enumerate(basis):
        f = cost[j]
        if f:
            cost = [a - f * v for a, v in zip(cost, rows[i])]
    status = _run(rows, cost, basis, range(n))
    if status != OPTIMAL:
        return LPResult(status)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = rows[i][-1]
    return LPResult(OPTIMAL, tuple(x), sum(cj * xj for cj, xj in zip(c, x)))


def linprog(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), free=()) -> LPResult:
    """Minimise c.x under A_ub x <= b_ub, A_eq x = b_eq.

    Variables are nonnegative unless their index is listed in ``free``.
    """
    n = len(c)
    free = sorted(set(free))
    split = {j: n + k for k, j in enumerate(free)}
    width = n + len(free) + len(A_ub)

    def expand(row, slack=None):
        out = [Fraction(v) for v in row] + [Fraction(0)] * (width - n)
        for j, neg in split.items():
            out[neg] = -out[j]
        if slack is not None:
            out[n + len(free) + slack] = Fraction(1)
        return out

    rows = [expand(row, k) for k, row in enumerate(A_ub)] + [expand(row) for row in A_eq]
    rhs = list(b_ub) + list(b_eq)
    cost = expand(c)
    res = solve_standard(cost, rows, rhs)
    if not res.ok:
        return res
    x = list(res.x[:n])
    for j, neg in split.items():
        x[j] -= res.x[neg]
    return LPResult(OPTIMAL, tuple(x), res.value)


def feasible_point(A: Sequence[Sequence], b: Sequence) -> tuple | None:
    """A nonnegative solution of A x = b, or None."""
    if not A:
        return ()
    res = solve_standard([0] * len(A[0]), A, b)
    return res.x if res.ok else None
