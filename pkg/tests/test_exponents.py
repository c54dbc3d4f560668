import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from transference_lab.core import RationalMatrix, golden_approximant, sqrt_approximant
from transference_lab.exponents import (ExponentReport, beta_lower_from_mbeta, dyson_map,
                                        estimate_exponents, jarnik_identity_check,
                                        littlewood_corollary_check, tr_beta_lower,
                                        trivial_bounds_check, uniform_maps)
from transference_lab.search import ApproxRecord, SearchBudget, best_approximations

INF = math.inf
F = Fraction


def rational_grid(lo, hi, count=100):
    lo, hi = F(lo), F(hi)
    return [lo + (hi - lo) * F(i, count - 1) for i in range(count)]


# -- maps -----------------------------------------------------------------------------

def test_dyson_examples():
    assert dyson_map(F(2, 3), 2, 3) == F(3, 2)
    assert dyson_map(F(7, 3), 1, 1) == F(7, 3)
    assert dyson_map(1, 1, 2) == 3
    assert dyson_map(INF, 3, 2) == 1
    assert dyson_map(INF, 1, 4) == INF
    with pytest.raises(ValueError, match="Minkowski"):
        dyson_map(F(1, 2), 2, 3)


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("n", range(1, 7))
def test_dyson_fixed_point(m, n):
    out = dyson_map(F(m, n), m, n)
    assert isinstance(out, Fraction) and out == F(n, m)
    assert uniform_maps(F(m, n), m, n) == F(n, m)


def test_tr_beta_lower_examples():
    for m in range(1, 8):
        assert tr_beta_lower(m, m, with_flag=True) == (0, False)
        assert tr_beta_lower(m + m * m, m) == F(1, m)
    assert tr_beta_lower(F(9, 2), 1) == F(7, 2)
    assert tr_beta_lower(1, 3, with_flag=True) == (0, True)
    assert tr_beta_lower(INF, 3) == F(1, 2)


def test_beta_lower_from_mbeta_examples():
    for n in range(1, 8):
        assert beta_lower_from_mbeta(n + F(1, n), n) == F(1, n)
    assert beta_lower_from_mbeta(F(5, 2), 1) == F(3, 2)
    assert beta_lower_from_mbeta(INF, 2) == 1
    big = beta_lower_from_mbeta(F(10 ** 12), 2)
    assert abs(big - 1) < F(1, 10 ** 11)
    assert beta_lower_from_mbeta(F(1, 4), 2, with_flag=True) == (0, True)


@pytest.mark.parametrize("m,n", [(1, 1), (1, 3), (2, 1), (2, 3), (3, 2), (4, 4)])
def test_monotone_on_rational_grid(m, n):
    grid = rational_grid(F(m, n), F(m, n) + 20)
    d = [dyson_map(g, m, n) for g in grid]
    assert all(a <= b for a, b in zip(d, d[1:]))
    t = [tr_beta_lower(g, m) for g in rational_grid(0, 40)]
    assert all(a <= b for a, b in zip(t, t[1:]))
    b = [beta_lower_from_mbeta(g, n) for g in rational_grid(F(1, n), 40)]
    assert all(a <= b for a, b in zip(b, b[1:]))


@pytest.mark.parametrize("m,n", [(1, 2), (2, 1), (2, 3), (3, 2), (1, 5), (4, 3)])
def test_double_transfer_contracts(m, n):
    fixed = F(m, n)
    assert dyson_map(dyson_map(fixed, m, n), n, m) == fixed
    for g in rational_grid(fixed, fixed + 30)[1:]:
        assert dyson_map(dyson_map(g, m, n), n, m) < g


@pytest.mark.parametrize("n", range(1, 7))
def test_composition_identity(n):
    for g in rational_grid(F(1, n), F(1, n) + 25):
        assert beta_lower_from_mbeta(g, n) == tr_beta_lower(dyson_map(g, 1, n), n)


@given(st.integers(1, 6), st.fractions(min_value=F(1, 6), max_value=100, max_denominator=50))
def test_composition_identity_random(n, g):
    if g < F(1, n):
        return
    assert beta_lower_from_mbeta(g, n) == tr_beta_lower(dyson_map(g, 1, n), n)


@pytest.mark.parametrize("m,n", [(2, 1), (2, 3), (3, 3), (4, 2)])
def test_german_continuity_at_one(m, n):
    at = uniform_maps(1, m, n, "german")
    assert at == F(n - 1, m - 1)
    eps = F(1, 10 ** 9)
    assert abs(uniform_maps(1 - eps, m, n, "german") - at) < F(1, 10 ** 7)
    assert abs(uniform_maps(1 + eps, m, n, "german") - at) < F(1, 10 ** 7)


def test_german_edge_cases():
    assert uniform_maps(F(1, 2), 2, 1, "german", with_flag=True) == (0, True)
    assert uniform_maps(1, 1, 3, "german") == INF
    assert uniform_maps(F(1, 2), 1, 3, "german") == 4
    for bad in [(F(1, 2), 1, 1), (0, 2, 2), (3, 2, 2)]:
        with pytest.raises(ValueError):
            uniform_maps(bad[0], bad[1], bad[2], "german")
    with pytest.raises(ValueError):
        uniform_maps(1, 2, 2, "other")


def test_jarnik():
    assert jarnik_identity_check(2, F(1, 2)) == 0
    assert jarnik_identity_check(1, 0) == 0
    for a in rational_grid(1, 2, 20):
        assert jarnik_identity_check(a, uniform_maps(a, 2, 1, "german")) == 0
    with pytest.raises(ValueError):
        jarnik_identity_check(0, 1)


# -- estimation -------------------------------------------------------------------------

def golden_oracle(qmax, tail):
    """Max ratio over the Fibonacci records with the same log window, in mpmath."""
    mpmath.mp.dps = 60
    phi = (1 + mpmath.sqrt(5)) / 2
    a, b, qs = 1, 2, []
    while a <= qmax:
        qs.append(a)
        a, b = b, a + b
    qs = [q for q in qs if q > 1]
    ratios = {q: -mpmath.log(abs(q * phi - mpmath.nint(q * phi))) / mpmath.log(q) for q in qs}
    hi, lo = math.log(qs[-1]), math.log(qs[0])
    cut = hi - tail * (hi - lo)
    return float(max(r for q, r in ratios.items() if math.log(q) >= cut - 1e-12))


@pytest.fixture(scope="module")
def golden_records():
    value, err = golden_approximant(40)
    theta = RationalMatrix.from_rows([[value]], error=err)
    return best_approximations(theta, SearchBudget(10 ** 4))


@pytest.mark.parametrize("tail", [0.25, 0.5, 1.0])
def test_golden_estimate_matches_oracle(golden_records, tail):
    rep = estimate_exponents(golden_records, 1, 1, tail_fraction=tail)
    assert rep.beta_est == rep.mbeta_est
    assert rep.beta_est == pytest.approx(golden_oracle(10 ** 4, tail), rel=1e-12)
    assert all(ok for _, ok in trivial_bounds_check(rep, 1, 1))
    assert rep.window[1] == 6765


def test_golden_estimate_tends_to_one():
    value, err = golden_approximant(40)
    theta = RationalMatrix.from_rows([[value]], error=err)
    recs = best_approximations(theta, SearchBudget(10 ** 5))
    last = recs[-1]
    ratio = -math.log(float(last.u_pow)) / math.log(float(last.t_pow))
    assert 1 < ratio < 1.08


def test_rational_theta_gives_infinity():
    theta = RationalMatrix.from_rows([["3/7"]])
    recs = best_approximations(theta, SearchBudget(50))
    rep = estimate_exponents(recs, 1, 1)
    assert rep.beta_est == INF and rep.mbeta_est == INF
    assert rep.as_json()["beta_est"] == "inf"


def test_needs_three_records():
    recs = best_approximations(RationalMatrix.from_rows([["3/7"]]), SearchBudget(50))[:2]
    with pytest.raises(ValueError):
        estimate_exponents(recs, 1, 1)
    full = best_approximations(RationalMatrix.from_rows([["3/7"]]), SearchBudget(50))
    with pytest.raises(ValueError):
        estimate_exponents(full, 1, 1, tail_fraction=0)


def _rec(t, u, x_sup, r_sup):
    return ApproxRecord((t,), (0,), F(t), u, x_sup, r_sup)


def test_fabricated_report_is_flagged():
    mult = [_rec(10 ** k, F(1, 10 ** k), 10 ** k, F(1, 10 ** k)) for k in range(1, 6)]
    sup = [_rec(10 ** k, F(1, 10 ** k), 10 ** k, F(1, 10 ** (2 * k))) for k in range(1, 6)]
    rep = estimate_exponents(mult, 1, 1, sup_records=sup)
    assert rep.beta_est == pytest.approx(2) and rep.mbeta_est == pytest.approx(1)
    checks = dict(trivial_bounds_check(rep, 1, 1))
    assert not checks["beta_le_mbeta"]
    direct = ExponentReport(2.0, 1.0, (1, 2), 3, "given")
    assert not dict(trivial_bounds_check(direct, 1, 1))["beta_le_mbeta"]


def test_two_by_one_report():
    a, err = sqrt_approximant(2, 40)
    b, _ = sqrt_approximant(3, 40)
    theta = RationalMatrix.from_rows([[a, b]], error=err)
    mult = best_approximations(theta, SearchBudget(300))
    sup = best_approximations(theta, SearchBudget(300), norm="sup")
    rep = estimate_exponents(mult, 2, 1, sup_records=sup)
    checks = dict(trivial_bounds_check(rep, 2, 1))
    assert checks["mbeta_le_m_beta"] and checks["beta_ge_minkowski"]
    assert rep.mbeta_est <= 2 * rep.beta_est + 0.05


def test_littlewood_check_small():
    a, err = sqrt_approximant(2, 40)
    b, _ = sqrt_approximant(3, 40)
    rep = littlewood_corollary_check(a, b, 3000, error=err)
    assert rep.passed
    assert rep.mu == min(r.value for r in rep.records)
    assert rep.prod_pow4 == F(4, 3) ** 9 * rep.mu
    q = rep.q_found
    da = abs(q * a - round(q * a))
    db = abs(q * b - round(q * b))
    assert (q * da * db) ** 4 <= rep.prod_pow4 and max(da, db) ** 4 <= rep.sup_pow4
