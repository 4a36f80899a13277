import random
from fractions import Fraction as F

import pytest

from bconvex.errors import DegenerateHyperplane, DimensionMismatch, GuardExceeded, SingularInLimit
from bconvex.linalg import (
    LimitHyperplane,
    boxplus_reconstruct,
    columns_of,
    cramer_infty,
    det_infty,
    det_terms,
    hyperplane_contains,
    hyperplane_infty,
    signed_permutations,
)
from bconvex.errors import SingularAtOrder
from bconvex.oracle import approx_value, phi_p_det
from bconvex.scalar import nary_boxplus
from cases import CRAMER_MATRIX, FUNDEX, FUNDEX_ZETAS, assert_vanishing, cramer_error, rational, to_mpf

IDENTITY = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


class TestDeterminant:
    def test_identity(self):
        assert det_infty(IDENTITY) == 1

    def test_intermediate_matrix(self):
        M = ((1, 3, -1), (3, 2, -1), (1, 1, 1))
        assert sorted(det_terms(M)) == sorted(map(F, [2, -9, 2, 1, -3, -3]))
        assert det_infty(M) == -9

    def test_generator_matrix(self):
        assert det_infty(((1, 3, -1), (3, 2, -1), (3, 3, -1))) == -9

    def test_signs(self):
        assert sum(s for _, s in signed_permutations(4)) == 0
        assert len(signed_permutations(5)) == 120

    def test_guards(self):
        with pytest.raises(GuardExceeded):
            det_infty([[1] * 7 for _ in range(7)])
        with pytest.raises(DimensionMismatch):
            det_infty([[1, 2]])


class TestCramer:
    def test_identity(self):
        sol = cramer_infty(IDENTITY, (4, -1, F(1, 2)))
        assert sol.solution == (4, -1, F(1, 2))
        assert boxplus_reconstruct(sol, columns_of(IDENTITY), (4, -1, F(1, 2)))

    def test_worked_system(self):
        sol = cramer_infty(CRAMER_MATRIX, (0, 0, 1))
        assert sol.det == -9
        assert sol.solution == (1, F(2, 3), F(2, 3))
        assert boxplus_reconstruct(sol, columns_of(CRAMER_MATRIX), (0, 0, 1))
        assert {j: sorted(w for w in sol.column_weights(j) if w) for j in range(3)} == {
            0: [F(1, 9), 1],
            1: [F(2, 9), F(2, 3)],
            2: [F(-2, 9), F(2, 3)],
        }

    def test_fundex_system(self):
        sol = cramer_infty(((1, 3, -1), (3, 2, -1), (1, 1, 1)), (0, 0, 1))
        assert sol.solution == (F(1, 3), F(1, 3), 1)

    def test_weight_certificates(self):
        sol = cramer_infty(CRAMER_MATRIX, (0, 0, 1))
        for j in range(3):
            assert nary_boxplus(sol.column_weights(j)) == sol.solution[j]
        assert nary_boxplus(list(sol.alpha.values())) == 1

    def test_singular(self):
        with pytest.raises(SingularInLimit):
            cramer_infty(((1, 1), (1, 1)), (1, 1))

    def test_random_systems_reconstruct(self):
        rng = random.Random(17)
        done = 0
        while done < 60:
            M = [[rational(rng) for _ in range(3)] for _ in range(3)]
            b = [rational(rng) for _ in range(3)]
            try:
                sol = cramer_infty(M, b)
            except SingularInLimit:
                continue
            done += 1
            assert boxplus_reconstruct(sol, columns_of(M), b)

    def test_oracle_agreement(self):
        """Errors of order-p Cramer solutions against the limit solution keep shrinking."""
        rng = random.Random(23)
        orders = (16, 32, 64, 100)
        checked = 0
        for _ in range(80):
            n = rng.randint(2, 3)
            M = [[F(rng.randint(-9, 9)) for _ in range(n)] for _ in range(n)]
            b = [F(rng.randint(-9, 9)) for _ in range(n)]
            try:
                sol = cramer_infty(M, b)
            except SingularInLimit:
                continue
            try:
                errors = [cramer_error(M, b, sol.solution, p) for p in orders]
            except SingularAtOrder:
                continue
            checked += 1
            assert_vanishing(errors, orders)
        assert checked >= 40


class TestDeterminantOracle:
    def test_rate_of_approach(self):
        """Errors of |M|_p against the limit determinant keep shrinking."""
        rng = random.Random(31)
        orders = (16, 32, 64, 100)
        for _ in range(60):
            n = rng.randint(2, 4)
            M = [[F(rng.randint(-9, 9)) for _ in range(n)] for _ in range(n)]
            target = det_infty(M)
            errors = [abs(approx_value(phi_p_det(M, p)) - to_mpf(target)) for p in orders]
            assert_vanishing(errors, orders)


class TestHyperplane:
    def test_generator_plane(self):
        H = hyperplane_infty(FUNDEX)
        assert (H.coeffs, H.rhs) == ((9, 9, -9), -9)
        C = H.canonical()
        assert (C.coeffs, C.rhs) == ((1, 1, -1), -1)
        for z in FUNDEX_ZETAS:
            assert hyperplane_contains(C, z) and hyperplane_contains(H, z)
        assert not hyperplane_contains(C, (0, 0, 0))

    def test_faces_through_origin(self):
        H1 = hyperplane_infty([(0, 0, 0), (1, 3, 3), (3, 2, 3)])
        assert (H1.coeffs, H1.rhs) == ((9, 9, -9), 0)
        H2 = hyperplane_infty([(0, 0, 0), (3, 2, 3), (-1, -1, -1)])
        assert (H2.coeffs, H2.rhs) == ((3, 0, -3), 0)
        H3 = hyperplane_infty([(0, 0, 0), (1, 3, 3), (-1, -1, -1)])
        assert (H3.coeffs, H3.rhs) == ((0, -3, 3), 0)

    def test_degenerate(self):
        with pytest.raises(DegenerateHyperplane):
            hyperplane_infty([(1, 1), (1, 1)])
        with pytest.raises(DegenerateHyperplane):
            LimitHyperplane((0, 0), 1).canonical()

    def test_columns_lie_on_their_plane(self):
        rng = random.Random(29)
        done = 0
        while done < 200:
            n = rng.randint(2, 4)
            pts = [tuple(rational(rng, max_den=3) for _ in range(n)) for _ in range(n)]
            V = tuple(tuple(p[i] for p in pts) for i in range(n))
            if det_infty(V) == 0:
                continue
            done += 1
            H = hyperplane_infty(pts)
            assert all(hyperplane_contains(H, p) for p in pts)
            assert all(hyperplane_contains(H.canonical(), p) for p in pts)
