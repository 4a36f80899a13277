"""Finite-order reference computations.

At order p every scalar is carried by its power value x**(2p+1), so sums,
determinants and Cramer solutions stay exact rationals.  A real root is
taken only when a value is printed or compared against a limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .errors import DimensionMismatch, SingularAtOrder
from .lp import feasible_point
from .scalar import as_scalar, as_vector

MAX_ORDER = 100  # keeps 2p+1 <= 201
DEFAULT_ORDERS = (1, 2, 4, 8, 16, 32, 64)
DEFAULT_TOLERANCE = 1e-6
DEFAULT_PRECISION_BITS = 256


def exponent(p: int) -> int:
    if not isinstance(p, int) or isinstance(p, bool) or p < 0:
        raise ValueError(f"order must be a nonnegative integer, got {p!r}")
    if p > MAX_ORDER:
        raise ValueError(f"order {p} exceeds the guard 2p+1 <= {2 * MAX_ORDER + 1}")
    return 2 * p + 1


def phi(x, p: int) -> Fraction:
    return as_scalar(x) ** exponent(p)


@dataclass(frozen=True, order=True)
class PRepScalar:
    """A real number at order p, stored as its exact power value."""

    p: int
    power_value: Fraction

    def __post_init__(self):
        exponent(self.p)
        object.__setattr__(self, "power_value", as_scalar(self.power_value))

    @classmethod
    def of(cls, x, p: int) -> "PRepScalar":
        return cls(p, phi(x, p))

    def __add__(self, other: "PRepScalar") -> "PRepScalar":
        if other.p != self.p:
            raise ValueError("cannot add scalars of different order")
        return PRepScalar(self.p, self.power_value + other.power_value)

    def __neg__(self) -> "PRepScalar":
        return PRepScalar(self.p, -self.power_value)

    def approx(self, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
        return approx_value(self, precision_bits)


@dataclass(frozen=True)
class PSchedule:
    orders: tuple = DEFAULT_ORDERS
    tolerance: float = DEFAULT_TOLERANCE
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        orders = tuple(self.orders)
        if not orders:
            raise ValueError("schedule needs at least one order")
        for p in orders:
            exponent(p)
        if any(a >= b for a, b in zip(orders, orders[1:])):
            raise ValueError("schedule orders must be strictly increasing")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.precision_bits < 32:
            raise ValueError("precision must be at least 32 bits")
        object.__setattr__(self, "orders", orders)


def phi_p_sum(values: Sequence, p: int) -> PRepScalar:
    q = exponent(p)
    return PRepScalar(p, sum((as_scalar(v) ** q for v in values), Fraction(0)))


def approx_value(s: PRepScalar, precision_bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
    """Sign-preserving real root of the power value, to the given precision."""
    if precision_bits < 32:
        raise ValueError("precision must be at least 32 bits")
    v = s.power_value
    q = exponent(s.p)
    with mpmath.workprec(precision_bits + 16):
        if v == 0:
            return mpmath.mpf(0)
        magnitude = mpmath.mpf(abs(v.numerator)) / mpmath.mpf(v.denominator)
        root = mpmath.root(magnitude, q)
        return root if v > 0 else -root


def _check_square(M: Sequence[Sequence]) -> int:
    n = len(M)
    if n == 0 or any(len(row) != n for row in M):
        raise DimensionMismatch("matrix must be square and non-empty")
    return n


def exact_det(M: Sequence[Sequence]) -> Fraction:
    """Determinant by Fraction Gaussian elimination."""
    n = _check_square(M)
    a = [[as_scalar(v) for v in row] for row in M]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def _powered(M, p):
    q = exponent(p)
    return [[as_scalar(v) ** q for v in row] for row in M]


def phi_p_det(M: Sequence[Sequence], p: int) -> PRepScalar:
    """Order-p determinant: the ordinary determinant of the entrywise power matrix."""
    return PRepScalar(p, exact_det(_powered(M, p)))


def phi_p_cramer(M: Sequence[Sequence], b: Sequence, p: int) -> tuple[PRepScalar, ...]:
    n = _check_square(M)
    if len(b) != n:
        raise DimensionMismatch("right-hand side length differs from matrix size")
    powered = _powered(M, p)
    pb = [phi(v, p) for v in b]
    det = exact_det(powered)
    if det == 0:
        raise SingularAtOrder(f"order-{p} determinant vanishes")
    out = []
    for j in range(n):
        replaced = [row[:j] + [pb[i]] + row[j + 1:] for i, row in enumerate(powered)]
        out.append(PRepScalar(p, exact_det(replaced) / det))
    return tuple(out)


def phi_p_hull_member(x: Sequence, points: Sequence[Sequence], p: int) -> bool:
    """Is phi_p(x) a convex combination of the phi_p images of ``points``?

    Solved exactly by rational pivoting; meant for desk-scale inputs of
    about a dozen points in dimension up to 6.
    """
    if not points:
        raise ValueError("need at least one point")
    x = as_vector(x)
    n = len(x)
    if any(len(a) != n for a in points):
        raise DimensionMismatch("points and query differ in dimension")
    images = [[phi(v, p) for v in a] for a in points]
    rows = [[img[i] for img in images] for i in range(n)]
    rows.append([Fraction(1)] * len(points))
    rhs = [phi(v, p) for v in x] + [Fraction(1)]
    return feasible_point(rows, rhs) is not None


@dataclass
class ConvergenceReport:
    values: dict = field(default_factory=dict)  # order -> approximation (scalar or tuple)
    failures: dict = field(default_factory=dict)  # order -> message
    deltas: list = field(default_factory=list)
    estimate: object = None
    max_delta: object = None
    converged: bool = False


def _approximate(value, bits):
    if isinstance(value, PRepScalar):
        return approx_value(value, bits)
    if isinstance(value, (Fraction, int)):
        with mpmath.workprec(bits):
            return mpmath.mpf(Fraction(value).numerator) / Fraction(value).denominator
    return tuple(_approximate(v, bits) for v in value)


def _distance(a, b):
    if isinstance(a, tuple):
        return max((abs(x - y) for x, y in zip(a, b)), default=mpmath.mpf(0))
    return abs(a - b)


def limit_sweep(series: Callable[[int], object], schedule: PSchedule = PSchedule()) -> ConvergenceReport:
    """Evaluate an order-indexed quantity over the schedule and judge convergence.

    ``series(p)`` may return a PRepScalar, an exact rational, or a sequence
    of those.  Orders at which it raises are recorded as failures.
    """
    report = ConvergenceReport()
    previous = None
    for p in schedule.orders:
        try:
            value = _approximate(series(p), schedule.precision_bits)
        except (SingularAtOrder, ZeroDivisionError) as exc:
            report.failures[p] = str(exc) or type(exc).__name__
            continue
        report.values[p] = value
        if previous is not None:
            report.deltas.append(_distance(value, previous))
        previous = value
    report.estimate = previous
    if report.deltas:
        report.max_delta = max(report.deltas)
        report.converged = report.deltas[-1] <= schedule.tolerance
    return report


def format_approx(value, digits: int = 17) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(format_approx(v, digits) for v in value) + ")"
    return mpmath.nstr(value, digits)

