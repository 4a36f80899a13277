"""Limit polytopes: intermediate points, orthant pieces and membership.

A limit polytope is described by its intermediate points.  Each closed
orthant keeps the intermediate points that lie in it, and after flipping
signs into the nonnegative orthant the piece is an ordinary max-times hull,
so membership reduces to residuation.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, GuardExceeded, InvalidCoefficients, SingularInLimit
from .linalg import cramer_infty
from .scalar import as_scalar, as_vector, boxplus_vectors, nary_boxplus, scale

log = logging.getLogger(__name__)

MAX_DIM = 4
MAX_POINTS = 6


def as_points(points: Iterable[Sequence]) -> tuple:
    pts = tuple(as_vector(p) for p in points)
    if not pts:
        raise ValueError("need at least one point")
    dim = len(pts[0])
    if dim == 0 or any(len(p) != dim for p in pts):
        raise DimensionMismatch("points must share a positive dimension")
    return pts


@dataclass(frozen=True)
class IntermediatePoint:
    """A limit intermediate point indexed by coordinates I and generators J.

    ``t`` lists the limit weights of the generators in J, ``zeta`` is the
    point itself and vanishes on I.
    """

    I: tuple
    J: tuple
    t: tuple
    zeta: tuple
    alpha: Mapping = field(default_factory=dict, compare=False, repr=False)

    @property
    def is_generator(self) -> bool:
        return len(self.J) == 1

    @property
    def sort_key(self):
        return (len(self.J), self.J, self.I)


def intermediate_matrix(A: Sequence[Sequence], I: Sequence[int], J: Sequence[int]) -> tuple:
    """Rows are the coordinates in I, then a row of ones; columns are generators in J."""
    A = as_points(A)
    I, J = tuple(sorted(I)), tuple(sorted(J))
    if len(set(I)) != len(I) or len(set(J)) != len(J):
        raise ValueError("index sets must not repeat")
    if len(I) != len(J) - 1:
        raise ValueError("need |I| = |J| - 1")
    if any(not 0 <= i < len(A[0]) for i in I) or any(not 0 <= j < len(A) for j in J):
        raise IndexError("index outside the point set")
    rows = [tuple(A[j][i] for j in J) for i in I]
    rows.append((Fraction(1),) * len(J))
    return tuple(rows)


def intermediate_point(A: Sequence[Sequence], I: Sequence[int], J: Sequence[int]) -> IntermediatePoint | None:
    """The limit intermediate point for (I, J), or None when it does not exist."""
    A = as_points(A)
    I, J = tuple(sorted(I)), tuple(sorted(J))
    if len(J) == 1 and not I:
        j = J[0]
        return IntermediatePoint(I, J, (Fraction(1),), A[j], {((0,), j): Fraction(1)})
    Lam = intermediate_matrix(A, I, J)
    target = (Fraction(0),) * (len(J) - 1) + (Fraction(1),)
    try:
        sol = cramer_infty(Lam, target)
    except SingularInLimit:
        return None
    if any(t < 0 for t in sol.solution):
        return None
    alpha = {(perm, J[k]): w for (perm, k), w in sol.alpha.items()}
    zeta = tuple(
        nary_boxplus([w * A[j][c] for (perm, j), w in alpha.items()]) for c in range(len(A[0]))
    )
    if any(zeta[i] != 0 for i in I):
        raise ArithmeticError(f"intermediate point {zeta} does not vanish on {I}")
    if sol.max_weight() > 1:
        log.info("intermediate weight above 1 at I=%s J=%s: %s", I, J, sol.max_weight())
    return IntermediatePoint(I, J, sol.solution, zeta, alpha)


def _index_pairs(m: int, n: int):
    for j in range(m):
        yield (), (j,)
    for size in range(2, min(m, n + 1) + 1):
        for J in combinations(range(m), size):
            for I in combinations(range(n), size - 1):
                yield I, J


def _evaluate(args):
    A, I, J = args
    return intermediate_point(A, I, J)


def check_guard(A: Sequence[Sequence], max_dim: int | None = MAX_DIM, max_points: int | None = MAX_POINTS):
    if max_dim is not None and len(A[0]) > max_dim:
        raise GuardExceeded(f"dimension {len(A[0])} exceeds the guard n <= {max_dim}")
    if max_points is not None and len(A) > max_points:
        raise GuardExceeded(f"{len(A)} points exceed the guard m <= {max_points}")


def enumerate_intermediates(
    A: Sequence[Sequence],
    parallel: bool = False,
    max_dim: int | None = MAX_DIM,
    max_points: int | None = MAX_POINTS,
) -> list[IntermediatePoint]:
    """All distinct limit intermediate points, generators first.

    Every pair (I, J) with |I| = |J| - 1 is tried.  Points are ordered by
    (|J|, J, I) and duplicates keep their first index pair.
    """
    A = as_points(A)
    check_guard(A, max_dim, max_points)
    tasks = [(A, I, J) for I, J in _index_pairs(len(A), len(A[0]))]
    if parallel and len(tasks) > 1:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_evaluate, tasks, chunksize=16))
    else:
        results = [_evaluate(task) for task in tasks]
    seen = set()
    out = []
    for point in results:
        if point is not None and point.zeta not in seen:
            seen.add(point.zeta)
            out.append(point)
    return out


@dataclass(frozen=True, order=True)
class Orthant:
    """A closed orthant given by a sign vector with entries +1 / -1."""

    signs: tuple

    def contains(self, x: Sequence) -> bool:
        return all(s * v >= 0 for s, v in zip(self.signs, x))

    def flip(self, x: Sequence) -> tuple:
        return tuple(s * v for s, v in zip(self.signs, x))

    @property
    def label(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


def all_orthants(n: int) -> list[Orthant]:
    return [Orthant(signs) for signs in product((1, -1), repeat=n)]


@dataclass(frozen=True)
class BPolytope:
    generators: tuple
    intermediates: tuple
    orthant_map: Mapping  # Orthant -> tuple of indices into intermediates

    @property
    def dim(self) -> int:
        return len(self.generators[0])

    def points(self) -> tuple:
        return tuple(p.zeta for p in self.intermediates)

    def piece(self, orthant: Orthant) -> tuple:
        return tuple(self.intermediates[k].zeta for k in self.orthant_map[orthant])

    def __contains__(self, x) -> bool:
        return member(self, x)


def _orthant_pieces(points: Sequence[tuple], n: int) -> dict:
    pieces = []
    for K in all_orthants(n):
        members = frozenset(k for k, z in enumerate(points) if K.contains(z))
        if members:
            pieces.append((K, members))
    kept = {}
    for pos, (K, members) in enumerate(pieces):
        dominated = any(
            members < other or (members == other and earlier < pos)
            for earlier, (_, other) in enumerate(pieces)
            if earlier != pos
        )
        if not dominated:
            kept[K] = tuple(sorted(members))
    return kept


def build_polytope(
    A: Sequence[Sequence],
    parallel: bool = False,
    max_dim: int | None = MAX_DIM,
    max_points: int | None = MAX_POINTS,
) -> BPolytope:
    """Intermediate points of A and their assignment to closed orthants.

    An orthant whose points form a subset of another orthant's points adds
    nothing to the union and is left out, as are empty orthants.
    """
    A = as_points(A)
    intermediates = tuple(enumerate_intermediates(A, parallel, max_dim, max_points))
    pieces = _orthant_pieces([p.zeta for p in intermediates], len(A[0]))
    return BPolytope(A, intermediates, pieces)


def residuation(x: Sequence, generators: Sequence[Sequence]) -> tuple:
    """Greatest weights t in [0,1] with max_j t_j g_j <= x, for nonnegative data."""
    x = as_vector(x)
    if any(v < 0 for v in x):
        raise ValueError("max-times residuation needs a nonnegative point")
    weights = []
    for g in generators:
        if len(g) != len(x):
            raise DimensionMismatch("generator and point differ in dimension")
        if any(v < 0 for v in g):
            raise ValueError("max-times residuation needs nonnegative generators")
        t = Fraction(1)
        for gi, xi in zip(g, x):
            if gi > 0:
                t = min(t, xi / gi)
        weights.append(t)
    return tuple(weights)


def maxtimes_member(x: Sequence, generators: Sequence[Sequence]) -> bool:
    """Is x = max_j t_j g_j for some weights in [0,1] with largest weight 1?"""
    return _maxtimes_witness(x, generators) is not None


def _maxtimes_witness(x, generators):
    x = as_vector(x)
    if not generators:
        return None
    t = residuation(x, generators)
    if max(t) != 1:
        return None
    for i, xi in enumerate(x):
        if max(tj * g[i] for tj, g in zip(t, generators)) != xi:
            return None
    return t


def locate(P: BPolytope, x: Sequence):
    """An (orthant, weights) pair certifying membership of x, or None."""
    x = as_vector(x)
    if len(x) != P.dim:
        raise DimensionMismatch("point and polytope differ in dimension")
    for K, idx in P.orthant_map.items():
        if K.contains(x):
            gens = [K.flip(P.intermediates[k].zeta) for k in idx]
            t = _maxtimes_witness(K.flip(x), gens)
            if t is not None:
                return K, t
    return None


def member(P: BPolytope, x: Sequence) -> bool:
    return locate(P, x) is not None


def sample_members(P: BPolytope, count: int, rng: random.Random, max_den: int = 16) -> list[tuple]:
    """Random points of the polytope built as max-times combinations inside a piece."""
    orthants = sorted(P.orthant_map)
    out = []
    for _ in range(count):
        K = orthants[rng.randrange(len(orthants))]
        gens = [K.flip(P.intermediates[k].zeta) for k in P.orthant_map[K]]
        weights = [Fraction(rng.randint(0, max_den), max_den) for _ in gens]
        weights[rng.randrange(len(gens))] = Fraction(1)
        flipped = tuple(max(t * g[i] for t, g in zip(weights, gens)) for i in range(P.dim))
        out.append(K.flip(flipped))
    return out


def two_point_hull(x: Sequence, y: Sequence) -> list[tuple]:
    """Breakpoints of the limit segment from x to y, ordered from x to y.

    A breakpoint sits at every coordinate where x and y have strictly
    opposite signs; between consecutive breakpoints the path stays in one
    orthant.
    """
    x, y = as_vector(x), as_vector(y)
    if len(x) != len(y):
        raise DimensionMismatch("points differ in dimension")
    crossings = sorted(
        ((abs(x[i] / y[i]), i) for i in range(len(x)) if x[i] * y[i] < 0),
    )
    path = [x]
    for _, i in crossings:
        top = max(abs(x[i]), abs(y[i]))
        point = boxplus_vectors([scale(abs(y[i]) / top, x), scale(abs(x[i]) / top, y)])
        if point != path[-1]:
            path.append(point)
    if y != path[-1]:
        path.append(y)
    return path


@dataclass(frozen=True)
class NestedCoefficients:
    """Weights t[j][k]: generator j enters once per weight in its block."""

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(as_vector(b) for b in self.blocks))

    def validate(self, m: int | None = None) -> None:
        if m is not None and len(self.blocks) != m:
            raise InvalidCoefficients(f"expected {m} blocks, got {len(self.blocks)}")
        weights = [t for block in self.blocks for t in block]
        if not weights:
            raise InvalidCoefficients("no weights given")
        for j, block in enumerate(self.blocks):
            if nary_boxplus(block) < 0:
                raise InvalidCoefficients(f"block {j} has negative Boxplus")
        if max(weights) != 1:
            raise InvalidCoefficients("the largest weight must be exactly 1")


def eval_boxplus_combination(A: Sequence[Sequence], coeffs: NestedCoefficients) -> tuple:
    """Componentwise flat Boxplus of t[j][k] * A[j] over all (j, k)."""
    A = as_points(A)
    if not isinstance(coeffs, NestedCoefficients):
        coeffs = NestedCoefficients(coeffs)
    coeffs.validate(len(A))
    return boxplus_vectors([scale(t, A[j]) for j, block in enumerate(coeffs.blocks) for t in block])
