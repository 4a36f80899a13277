"""Separating limit polytopes by regularised halfspaces.

Candidates come from order-p geometry: at each scheduled order the two
transformed hulls are separated by a max-margin affine functional, which is
pulled back coordinatewise and normalised.  The pulled-back coefficients are
extrapolated to the limit, rounded to small denominators, and the resulting
halfspace is checked exactly against both polytopes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import mpmath

from .errors import CertificateFailure, DegenerateHyperplane, DimensionMismatch, NoConvergence, NotDisjoint
from .linalg import hyperplane_infty
from .lp import feasible_point, linprog
from .oracle import PRepScalar, PSchedule, approx_value, exponent, phi
from .polytope import MAX_DIM, MAX_POINTS, BPolytope, as_points, build_polytope, member, sample_members
from .scalar import LOWER, UPPER, as_scalar, as_vector, norm_infty, smile_chain

DENOMINATOR_CAP = 10**4
EXTRAPOLATION_WINDOW = 3


@dataclass(frozen=True)
class Halfspace:
    """Lower side: lower(a*x) <= c.  Upper side: upper(a*x) >= c.

    Coefficients are stored canonically with max |a_i| = 1.
    """

    a: tuple
    c: Fraction
    side: str = LOWER

    def __post_init__(self):
        a = as_vector(self.a)
        c = as_scalar(self.c)
        top = norm_infty(a)
        if top == 0:
            raise ValueError("halfspace coefficients must not all vanish")
        if self.side not in (LOWER, UPPER):
            raise ValueError(f"side must be {LOWER!r} or {UPPER!r}")
        object.__setattr__(self, "a", tuple(v / top for v in a))
        object.__setattr__(self, "c", c / top)

    def value(self, x: Sequence) -> Fraction:
        if len(x) != len(self.a):
            raise DimensionMismatch("point and halfspace differ in dimension")
        return smile_chain([ai * as_scalar(xi) for ai, xi in zip(self.a, x)], self.side)

    def contains(self, x: Sequence) -> bool:
        v = self.value(x)
        return v <= self.c if self.side == LOWER else v >= self.c

    def slack(self, x: Sequence) -> Fraction:
        v = self.value(x)
        return self.c - v if self.side == LOWER else v - self.c

    def as_lower(self) -> "Halfspace":
        """The same set written as a lower halfspace."""
        if self.side == LOWER:
            return self
        return Halfspace(tuple(-v for v in self.a), -self.c, LOWER)


def halfspace_member(h: Halfspace, x: Sequence) -> bool:
    return h.contains(x)


def _hulls_meet(A, E, p) -> bool:
    n = len(A[0])
    rows = [[phi(a[i], p) for a in A] + [-phi(e[i], p) for e in E] for i in range(n)]
    rows.append([Fraction(1)] * len(A) + [Fraction(0)] * len(E))
    rows.append([Fraction(0)] * len(A) + [Fraction(1)] * len(E))
    return feasible_point(rows, [Fraction(0)] * n + [Fraction(1), Fraction(1)]) is not None


def disjointness_check(A: Sequence[Sequence], E: Sequence[Sequence], schedule: PSchedule = PSchedule()) -> int | None:
    """Smallest scheduled order at which the transformed hulls are disjoint."""
    A, E = as_points(A), as_points(E)
    if len(A[0]) != len(E[0]):
        raise DimensionMismatch("point sets differ in dimension")
    for p in schedule.orders:
        if not _hulls_meet(A, E, p):
            return p
    return None


def _separator_at_order(A, E, p):
    """Max-margin separator of the order-p images, then the sparsest one at that margin.

    Returns (w, threshold) normalised so that max |w_i| = 1.
    """
    n = len(A[0])
    # variables: w_0..w_{n-1}, threshold, margin
    rows, rhs = [], []
    for a in A:
        rows.append([phi(v, p) for v in a] + [Fraction(-1), Fraction(1)])
        rhs.append(Fraction(0))
    for e in E:
        rows.append([-phi(v, p) for v in e] + [Fraction(1), Fraction(1)])
        rhs.append(Fraction(0))
    for i in range(n):
        for sign in (1, -1):
            row = [Fraction(0)] * (n + 2)
            row[i] = Fraction(sign)
            rows.append(row)
            rhs.append(Fraction(1))
    first = linprog([0] * n + [0, -1], rows, rhs, free=range(n + 1))
    if not first.ok or first.x[-1] <= 0:
        return None
    margin = first.x[-1]

    # second pass: same margin, smallest l1 norm; extra variables u_i >= |w_i|
    width = 2 * n + 2
    rows2, rhs2 = [], []
    for row, r in zip(rows, rhs):
        rows2.append(row + [Fraction(0)] * n)
        rhs2.append(r)
    for i in range(n):
        for sign in (1, -1):
            row = [Fraction(0)] * width
            row[i] = Fraction(sign)
            row[n + 2 + i] = Fraction(-1)
            rows2.append(row)
            rhs2.append(Fraction(0))
    low_margin = [Fraction(0)] * width
    low_margin[n + 1] = Fraction(-1)
    rows2.append(low_margin)
    rhs2.append(-margin)
    second = linprog([0] * (n + 2) + [1] * n, rows2, rhs2, free=range(n + 1))
    x = second.x if second.ok else first.x
    w, threshold = x[:n], x[n]
    top = norm_infty(w)
    return tuple(v / top for v in w), threshold / top


def _neville_at_zero(hs, values):
    table = list(values)
    for k in range(1, len(hs)):
        for i in range(len(hs) - k):
            table[i] = (hs[i] * table[i + 1] - hs[i + k] * table[i]) / (hs[i] - hs[i + k])
    return table[0]


def _to_fraction(value) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(value)._mpf_
    if not man:
        return Fraction(0)
    magnitude = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -magnitude if sign else magnitude


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator in the closed interval [lo, hi]."""
    if lo > hi:
        lo, hi = hi, lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    whole = lo.__floor__()
    if whole == lo or whole + 1 <= hi:
        return Fraction(whole if whole == lo else whole + 1)
    return whole + 1 / simplest_between(1 / (hi - whole), 1 / (lo - whole))


def _round(value, radius, cap=DENOMINATOR_CAP) -> Fraction:
    centre = _to_fraction(value)
    r = _to_fraction(radius)
    candidate = simplest_between(centre - r, centre + r)
    if candidate.denominator <= cap:
        return candidate
    return centre.limit_denominator(cap)


@dataclass(frozen=True)
class CheckRecord:
    point: tuple
    value: Fraction
    side: str
    passed: bool


@dataclass
class SeparationResult:
    halfspace: Halfspace
    p_used: int
    p_disjoint: int
    converged: bool
    checks: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)  # (p, coefficient approximations, threshold approximation)

    @property
    def verified(self) -> bool:
        return all(c.passed for c in self.checks)


def _checkpoints(P: BPolytope, samples: int, rng: random.Random) -> list[tuple]:
    pts = list(P.points())
    seen = set(pts)
    for z in sample_members(P, samples, rng):
        if z not in seen:
            seen.add(z)
            pts.append(z)
    return pts


def _simplest_near(guess: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    """Nearest rational to ``guess`` in [lo, hi] with the smallest denominator."""
    for den in range(1, DENOMINATOR_CAP + 1):
        candidate = Fraction(round(guess * den), den)
        if lo <= candidate <= hi:
            return candidate
    return min(max(guess, lo), hi)


def _certify(direction, threshold_guess, lower_pts, upper_pts):
    """Pick an exact threshold for the direction, or report the obstructing point."""
    probe = Halfspace(direction, 0, LOWER)
    lower_vals = [(probe.value(x), x) for x in lower_pts]
    upper_vals = [(smile_chain([a * v for a, v in zip(probe.a, y)], UPPER), y) for y in upper_pts]
    lo, lo_pt = max(lower_vals, key=lambda t: t[0])
    hi, hi_pt = min(upper_vals, key=lambda t: t[0])
    if lo > hi:
        return None, (lo_pt if threshold_guess > hi else hi_pt)
    c = _simplest_near(threshold_guess, lo, hi)
    h = Halfspace(probe.a, c, LOWER)
    checks = [CheckRecord(x, v, LOWER, v <= c) for v, x in lower_vals]
    checks += [CheckRecord(y, v, UPPER, v >= c) for v, y in upper_vals]
    return h, checks


def separate_polytopes(
    A: Sequence[Sequence],
    E: Sequence[Sequence],
    schedule: PSchedule = PSchedule(),
    samples: int = 64,
    seed: int = 0,
    parallel: bool = False,
    max_dim: int | None = MAX_DIM,
    max_points: int | None = MAX_POINTS,
) -> SeparationResult:
    """A lower halfspace containing the limit polytope of A whose upper side contains that of E."""
    A, E = as_points(A), as_points(E)
    if len(A[0]) != len(E[0]):
        raise DimensionMismatch("point sets differ in dimension")
    p0 = disjointness_check(A, E, schedule)
    if p0 is None:
        raise NotDisjoint("transformed hulls intersect at every scheduled order")

    rng = random.Random(seed)
    PA = build_polytope(A, parallel, max_dim, max_points)
    PE = build_polytope(E, parallel, max_dim, max_points)
    lower_pts = _checkpoints(PA, samples, rng)
    upper_pts = _checkpoints(PE, samples, rng)

    bits = schedule.precision_bits
    hs, trajectory = [], []
    raw, extrapolated = _EstimateStream(schedule.tolerance), _EstimateStream(schedule.tolerance)
    tried = set()
    failure = None
    for p in (p for p in schedule.orders if p >= p0):
        found = _separator_at_order(A, E, p)
        if found is None:
            continue
        w, threshold = found
        with mpmath.workprec(bits):
            values = [approx_value(PRepScalar(p, v), bits) for v in w]
            values.append(approx_value(PRepScalar(p, threshold), bits))
            trajectory.append((p, tuple(values[:-1]), values[-1]))
            hs.append(mpmath.mpf(1) / exponent(p))
            recent = [t[1] + (t[2],) for t in trajectory[-EXTRAPOLATION_WINDOW:]]
            limits = [_neville_at_zero(hs[-len(recent):], column) for column in zip(*recent)]
            candidates = [raw.update(values), extrapolated.update(limits)]
        for candidate in candidates:
            if candidate is None or candidate[0] in tried:
                continue
            tried.add(candidate[0])
            h, checks = _certify(candidate[0], candidate[1], lower_pts, upper_pts)
            if h is not None:
                return SeparationResult(h, p, p0, True, checks, trajectory)
            failure = (candidate[0], checks)
    # schedule exhausted: the latest roundings may still certify
    for stream in (raw, extrapolated):
        candidate = stream.latest
        if candidate is None or candidate[0] in tried:
            continue
        tried.add(candidate[0])
        h, checks = _certify(candidate[0], candidate[1], lower_pts, upper_pts)
        if h is not None:
            return SeparationResult(h, trajectory[-1][0], p0, False, checks, trajectory)
        failure = (candidate[0], checks)
    if failure is None:
        raise NoConvergence("separator coefficients did not stabilise over the schedule")
    raise CertificateFailure(
        f"candidate direction {failure[0]} fails exact verification", point=failure[1]
    )


class _EstimateStream:
    """Successive estimates of (coefficients, threshold), rounded to simple rationals.

    The rounding radius at each order is the change since the previous
    order, floored at the tolerance.  A candidate is emitted when the rounded
    direction repeats.
    """

    def __init__(self, tolerance):
        self.tolerance = tolerance
        self.previous = None
        self.direction = None
        self.latest = None

    def update(self, values):
        if self.previous is None:
            radii = [abs(v) for v in values]
        else:
            radii = [max(abs(v - u), self.tolerance) for v, u in zip(values, self.previous)]
        self.previous = values
        rounded = [_round(v, r) for v, r in zip(values, radii)]
        top = norm_infty(rounded[:-1])
        if top == 0:
            self.direction = self.latest = None
            return None
        direction = tuple(v / top for v in rounded[:-1])
        repeated = direction == self.direction
        self.direction = direction
        self.latest = (direction, rounded[-1] / top)
        return self.latest if repeated else None


def separate_compact_nets(
    cloud_a: Sequence[Sequence],
    cloud_e: Sequence[Sequence],
    schedule: PSchedule = PSchedule(),
    samples: int = 64,
    seed: int = 0,
    parallel: bool = False,
) -> SeparationResult:
    """Separate two finite nets of compact sets.

    The certificate covers the limit polytopes of the nets only.  Whether the
    nets are fine enough to represent the underlying compact sets is the
    caller's responsibility.  The desk-scale point-count guard is lifted.
    """
    return separate_polytopes(cloud_a, cloud_e, schedule, samples, seed, parallel, MAX_DIM, None)


@dataclass
class SandwichReport:
    member_samples: int = 0
    member_violations: int = 0
    interior_samples: int = 0
    interior_nonmembers: int = 0
    violating_points: list = field(default_factory=list)
    nonmember_points: list = field(default_factory=list)


def _bounding_halfspaces(points) -> list[Halfspace]:
    out = []
    n = len(points[0])
    for i in range(n):
        axis = tuple(Fraction(int(k == i)) for k in range(n))
        neg = tuple(-v for v in axis)
        out.append(Halfspace(axis, max(z[i] for z in points), LOWER))
        out.append(Halfspace(neg, -min(z[i] for z in points), LOWER))
    return out


def outer_hrep(
    A: Sequence[Sequence],
    samples: int = 64,
    seed: int = 0,
    slack: Fraction = Fraction(1, 1000),
    parallel: bool = False,
) -> tuple[list[Halfspace], SandwichReport]:
    """Lower halfspaces containing the limit polytope, plus a sampling report.

    Candidates are limit hyperplanes through every n points chosen among the
    generators and intermediate points, each kept in whichever orientation
    contains all those points, together with the coordinate bounding box.
    """
    P = build_polytope(A, parallel)
    pts = list(P.points())
    n = P.dim
    found = {}
    for subset in combinations(pts, n):
        try:
            H = hyperplane_infty(subset).canonical()
        except DegenerateHyperplane:
            continue
        for a, c in ((H.coeffs, H.rhs), (tuple(-v for v in H.coeffs), -H.rhs)):
            h = Halfspace(a, c, LOWER)
            if h not in found and all(h.contains(z) for z in pts):
                found[h] = None
    for h in _bounding_halfspaces(pts):
        found.setdefault(h, None)
    halfspaces = sorted(found, key=lambda h: (h.a, h.c))
    return halfspaces, sandwich_report(P, halfspaces, samples, seed, slack)


def sandwich_report(P: BPolytope, halfspaces, samples=64, seed=0, slack=Fraction(1, 1000)) -> SandwichReport:
    """Members must satisfy every halfspace; points deep inside all of them should be members."""
    rng = random.Random(seed)
    report = SandwichReport()
    for z in list(P.points()) + sample_members(P, samples, rng):
        report.member_samples += 1
        if not all(h.contains(z) for h in halfspaces):
            report.member_violations += 1
            report.violating_points.append(z)
    pts = P.points()
    lo = [min(z[i] for z in pts) - 1 for i in range(P.dim)]
    hi = [max(z[i] for z in pts) + 1 for i in range(P.dim)]
    for _ in range(samples):
        x = tuple(l + (h - l) * Fraction(rng.randint(0, 64), 64) for l, h in zip(lo, hi))
        if all(h.slack(x) >= slack for h in halfspaces):
            report.interior_samples += 1
            if not member(P, x):
                report.interior_nonmembers += 1
                report.nonmember_points.append(x)
    return report
