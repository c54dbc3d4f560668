import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from transference_lab.core import RationalMatrix
from transference_lab.delta import delta
from transference_lab.secdual import (AxisBox, Parallelepiped, PreconditionError, TupleSpec,
                                      box_section_volume, check_central_inclusion,
                                      check_surface_bijection, check_wedge_lemma,
                                      cofactor_matrix, determinant, dual_parallelepiped,
                                      dual_tuple, identity, in_wedge, integer_points_in_parallelepiped,
                                      inverse, matmul, nonzero_integer_points,
                                      parallelepiped_section_monte_carlo,
                                      parallelepiped_section_volume, primal_parallelepiped,
                                      random_matrix, random_parallelepiped, transpose,
                                      uniform_sum_density_at_zero, wedge_gauge, wedge_radius)
from transference_lab.transfer import QualityBudget

small = st.fractions(min_value=-5, max_value=5, max_denominator=8)


def _to_np(a):
    return np.array([[float(v) for v in row] for row in a])


# -- linear algebra -------------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_linear_algebra_against_numpy(d):
    rng = random.Random(d)
    for _ in range(10):
        a = random_matrix(rng, d)
        assert float(determinant(a)) == pytest.approx(np.linalg.det(_to_np(a)), rel=1e-9, abs=1e-12)
        assert matmul(a, inverse(a)) == identity(d)
        cof = cofactor_matrix(a)
        det = determinant(a)
        assert matmul(a, transpose(cof)) == [[det if i == j else 0 for j in range(d)] for i in range(d)]


def test_singular_basis_rejected():
    with pytest.raises(ValueError):
        Parallelepiped(AxisBox((1, 1)), ((1, 2), (2, 4)))
    with pytest.raises(ValueError):
        AxisBox((1, 0))


# -- densities and sections -------------------------------------------------------

def _sinc_density(weights):
    """Density at 0 of sum w_i U_i (U_i uniform on [-1, 1]) by Fourier inversion."""
    mpmath.mp.dps = 25
    w = [mpmath.mpf(float(v)) for v in weights]

    def f(t):
        if t == 0:
            return mpmath.mpf(1)
        return mpmath.fprod(mpmath.sin(a * t) / (a * t) for a in w)
    return float(mpmath.quadosc(f, [0, mpmath.inf], omega=max(w)) / mpmath.pi)


@pytest.mark.parametrize("weights", [(1, 1), (1, 2), (Fraction(1, 2), 3, 1), (1, 1, 1, 1),
                                     (2, Fraction(3, 2), Fraction(1, 3))])
def test_density_against_fourier_oracle(weights):
    assert float(uniform_sum_density_at_zero(weights)) == pytest.approx(_sinc_density(weights), rel=1e-8)


def test_density_ignores_sign_and_order():
    assert uniform_sum_density_at_zero([1, -2, 3]) == uniform_sum_density_at_zero([3, 2, 1])


def _chord_length_squared(M: Parallelepiped, e):
    """2-d oracle: length^2 of the chord of M orthogonal to e."""
    u = [-Fraction(e[1]), Fraction(e[0])]
    inv = inverse(M.basis)
    v = [sum(inv[i][j] * u[j] for j in range(2)) for i in range(2)]
    t = min(c / abs(vi) for c, vi in zip(M.shape.half_sides, v) if vi)
    return (2 * t) ** 2 * (u[0] ** 2 + u[1] ** 2)


@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4),
       st.lists(st.integers(1, 6), min_size=2, max_size=2),
       st.tuples(st.integers(-5, 5), st.integers(-5, 5)).filter(any))
def test_section_matches_chord_in_2d(entries, sides, e):
    basis = ((entries[0], entries[1]), (entries[2], entries[3]))
    if entries[0] * entries[3] - entries[1] * entries[2] == 0:
        return
    M = Parallelepiped(AxisBox(tuple(Fraction(s, 2) for s in sides)), basis)
    assert parallelepiped_section_volume(M, e).squared() == _chord_length_squared(M, e)


def test_cube_diagonal_section_is_hexagon():
    vol = box_section_volume(AxisBox.cube(3), (1, 1, 1))
    assert vol.coef == 3 and vol.radicand == 3
    # Delta_d is the normalised diagonal section
    for d in range(2, 9):
        v = box_section_volume(AxisBox.cube(d), [1] * d)
        assert v.squared() == (delta(d) * 2 ** (d - 1)) ** 2 * d


def test_box_section_monte_carlo_agrees():
    box = AxisBox((Fraction(1, 2), 1, Fraction(3, 2)))
    e = (1, -2, 3)
    exact = float(box_section_volume(box, e))
    est, se = box_section_volume(box, e, mode="montecarlo", samples=400_000, seed=3)
    assert abs(est - exact) <= 4 * se


def test_parallelepiped_section_monte_carlo_agrees():
    rng = random.Random(11)
    M = random_parallelepiped(rng, 3)
    e = (2, 1, -1)
    exact = float(parallelepiped_section_volume(M, e))
    est, se = parallelepiped_section_monte_carlo(M, e, samples=400_000, seed=5)
    assert abs(est - exact) <= 4 * se


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.lists(st.integers(-4, 4), min_size=3, max_size=3).filter(any))
def test_thickness_inequality(seed, e):
    """vol(M) <= h vol_e(M), h the width of M along e; both sides rational here."""
    M = random_parallelepiped(random.Random(seed), 3)
    weights = M._projected_weights([Fraction(v) for v in e])
    sec = parallelepiped_section_volume(M, e)
    # h = 2 sum |w_i| / |e| and vol_e = coef |e|, so h vol_e = 2 sum|w_i| coef
    assert M.volume <= 2 * sum(abs(w) for w in weights) * sec.coef


# -- section-dual set ---------------------------------------------------------------

@given(st.lists(small, min_size=3, max_size=3).filter(any), st.fractions(min_value=Fraction(1, 10),
                                                                         max_value=10))
def test_gauge_is_homogeneous_and_symmetric(p, r):
    M = random_parallelepiped(random.Random(7), 3)
    g = wedge_gauge(M, p)
    assert wedge_gauge(M, [r * v for v in p]) == r * g
    assert wedge_gauge(M, [-v for v in p]) == g


def test_gauge_against_radius():
    M = random_parallelepiped(random.Random(2), 3)
    for e in [(1, 0, 0), (1, 2, 3), (-2, 1, 1)]:
        rad = wedge_radius(M, e)
        norm = math.sqrt(sum(v * v for v in e))
        assert float(wedge_gauge(M, e)) * float(rad) == pytest.approx(norm, rel=1e-12)


def test_gauge_against_monte_carlo_oracle():
    M = random_parallelepiped(random.Random(5), 3)
    e = (1, -1, 2)
    est, se = parallelepiped_section_monte_carlo(M, e, samples=400_000, seed=9)
    norm = math.sqrt(6)
    g_mc = norm / (est / 4)
    assert float(wedge_gauge(M, e)) == pytest.approx(g_mc, rel=5 * se / est)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_delta_cube_vertex_on_boundary(d):
    cube = Parallelepiped.from_box(AxisBox.cube(d))
    dd = delta(d)
    assert wedge_gauge(cube, [dd] * d) == 1
    assert in_wedge(cube, [dd] * d)
    assert not in_wedge(cube, [dd * Fraction(1001, 1000)] * d)


def test_linear_image_identity():
    rng = random.Random(3)
    M = random_parallelepiped(rng, 3)
    a = random_matrix(rng, 3)
    cof_inv = inverse(cofactor_matrix(a))
    image = M.transformed(a)
    for p in [(1, 0, 0), (1, 2, -1), (Fraction(1, 3), 5, 2)]:
        q = [sum(cof_inv[i][j] * p[j] for j in range(3)) for i in range(3)]
        assert wedge_gauge(image, p) == wedge_gauge(M, q)


def test_integer_point_enumeration_against_brute_force():
    M = Parallelepiped(AxisBox((Fraction(3, 2), Fraction(5, 4))), ((1, 1), (0, 2)))
    inv = inverse(M.basis)
    brute = set()
    for x in range(-10, 11):
        for y in range(-10, 11):
            if M.contains((x, y)):
                brute.add((x, y))
    found = {tuple(p) for p in integer_points_in_parallelepiped(inv, M.shape.half_sides)}
    assert found == brute
    assert {tuple(p) for p in nonzero_integer_points(M)} == brute - {(0, 0)}


@pytest.mark.parametrize("d", [2, 3])
def test_wedge_lemma_cube(d):
    rep = check_wedge_lemma(AxisBox.cube(d), trials=60)
    assert rep.all_pass, rep.failures
    assert rep.wedge_integer_points > 0 and rep.body_has_integer_point


@pytest.mark.parametrize("d", [2, 3])
def test_wedge_lemma_random_bodies(d):
    rng = random.Random(100 + d)
    for _ in range(10):
        rep = check_wedge_lemma(random_parallelepiped(rng, d), trials=30, seed=d)
        assert rep.all_pass, rep.failures
        assert set(rep.as_json()) >= {"i_integer_transfer", "ii_convexity", "iii_linear_image",
                                      "iv_cube_inclusion"}


# -- tuples and the proof parallelepipeds -------------------------------------------------

def test_dual_tuple_involution():
    t = TupleSpec((Fraction(2), Fraction(1, 3)), (Fraction(5, 2),))
    twice = dual_tuple(dual_tuple(t))
    p = t.product
    assert twice.lam == tuple(v * p ** (3 - 2) for v in t.lam)
    assert twice.mu == tuple(v * p for v in t.mu)


def test_proof_parallelepipeds_are_dual_bases():
    theta = RationalMatrix.from_rows([["7/10", "11/17"]])
    t = TupleSpec((1, 1), (1,))
    T = primal_parallelepiped(theta, t).basis
    Tp = dual_parallelepiped(theta, t).basis
    assert matmul(T, transpose(Tp)) == identity(3)


@pytest.mark.parametrize("rows", [[["1/3"]], [["7/10", "11/17"]], [["2/5"], ["3/7"]]])
def test_central_inclusion(rows):
    theta = RationalMatrix.from_rows(rows)
    rng = random.Random(len(rows))
    for _ in range(5):
        lam = tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(theta.m))
        mu = tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(theta.n))
        assert check_central_inclusion(theta, TupleSpec(lam, mu))


def test_surface_bijection_m1_n1():
    theta = RationalMatrix.from_rows([["3/7"]])
    budget = QualityBudget.from_powers(1, 1, 7, Fraction(1, 7))
    t = TupleSpec((budget.Vpow_cmp,), (budget.Ypow_cmp,), power=1)
    rep = check_surface_bijection(theta, t, budget)
    assert rep.passed, rep.postcondition


def test_surface_bijection_m1_n2():
    theta = RationalMatrix.from_rows([["1/3"], ["2/5"]])
    budget = QualityBudget.from_powers(1, 2, 12, Fraction(1, 90))
    r = Fraction(3, 2)
    t = TupleSpec((budget.Vpow_cmp,), (budget.Ypow_cmp / r, r), power=2)
    rep = check_surface_bijection(theta, t, budget)
    assert rep.passed, rep.postcondition


def test_surface_bijection_precondition():
    theta = RationalMatrix.from_rows([["3/7"]])
    budget = QualityBudget.from_powers(1, 1, 7, Fraction(1, 7))
    with pytest.raises(PreconditionError):
        check_surface_bijection(theta, TupleSpec((1,), (1,)), budget)
