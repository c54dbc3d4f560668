import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from transference_lab.core import RationalMatrix, golden_approximant, sqrt_approximant
from transference_lab.search import (ApproxRecord, InconclusiveError, PrecisionGuardError,
                                     SearchBudget, badness_infimum, best_approximations,
                                     find_witness, find_witness_sup, integer_root_floor,
                                     littlewood_first, littlewood_scan, shell_vectors,
                                     uniform_feasible)
from transference_lab.transfer import QualityBudget


def convergent_denominators(x: Fraction, bound: int) -> set:
    """Denominators q_k <= bound of the continued fraction convergents of x."""
    qs, q0, q1 = set(), 1, 0
    while True:
        a = math.floor(x)
        q0, q1 = q1, a * q1 + q0
        if q1 > bound:
            break
        qs.add(q1)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return qs


def brute_records_1x1(theta: Fraction, bound: int):
    best, out = None, []
    for q in range(1, bound + 1):
        d = abs(q * theta - round(q * theta))
        if best is None or d < best:
            best = d
            out.append(q)
    return out


# -- enumeration ------------------------------------------------------------------------

@pytest.mark.parametrize("k,s", [(1, 3), (2, 1), (2, 4), (3, 2), (4, 2)])
def test_shell_vectors_exact_shell(k, s):
    got = list(shell_vectors(k, s))
    brute = [v for v in itertools.product(range(-s, s + 1), repeat=k)
             if max(map(abs, v)) == s and next(c for c in v if c) > 0]
    assert got == sorted(brute)
    assert len(got) == ((2 * s + 1) ** k - (2 * s - 1) ** k) // 2


def test_shell_vectors_small_example():
    assert list(shell_vectors(2, 1)) == [(0, 1), (1, -1), (1, 0), (1, 1)]


@given(st.integers(1, 3), st.integers(1, 6), st.integers(1, 40))
def test_shell_vectors_product_limit(k, s, limit):
    got = list(shell_vectors(k, s, limit))
    full = [v for v in shell_vectors(k, s) if math.prod(max(1, abs(c)) for c in v) <= limit]
    assert got == full


@given(st.fractions(min_value=0, max_value=10 ** 6, max_denominator=1000), st.integers(1, 6))
def test_integer_root_floor(value, k):
    a = integer_root_floor(value, k)
    assert a ** k <= max(value, 0) or a == 0
    assert (a + 1) ** k > value


# -- best approximations --------------------------------------------------------------------

def test_rational_records_stop_at_exact_solution():
    theta = RationalMatrix.from_rows([["1/3"]])
    recs = best_approximations(theta, SearchBudget(50))
    assert [r.x for r in recs] == [(1,), (3,)]
    assert recs[0].u_pow == Fraction(1, 3) and recs[-1].u_pow == 0


def test_golden_records_are_fibonacci():
    value, err = golden_approximant(40)
    theta = RationalMatrix.from_rows([[value]], error=err)
    recs = best_approximations(theta, SearchBudget(10 ** 4))
    xs = [r.x[0] for r in recs]
    assert xs == sorted(convergent_denominators(value, 10 ** 4))
    assert xs[-1] == 6765


@pytest.mark.parametrize("r", [2, 3, 7, 11])
def test_sqrt_records_match_continued_fraction(r):
    value, err = sqrt_approximant(r, 40)
    theta = RationalMatrix.from_rows([[value]], error=err)
    recs = best_approximations(theta, SearchBudget(5000))
    xs = [r.x[0] for r in recs]
    assert xs == sorted(convergent_denominators(value, 5000))
    assert xs == brute_records_1x1(value, 5000)


def test_records_are_a_pareto_front():
    rng = random.Random(4)
    for _ in range(10):
        rows = [[Fraction(rng.randint(1, 97), 97 + rng.randint(0, 40)) for _ in range(2)]]
        theta = RationalMatrix.from_rows(rows)
        recs = best_approximations(theta, SearchBudget(15))
        assert all(a.t_pow < b.t_pow and a.u_pow > b.u_pow for a, b in zip(recs, recs[1:]))


def _brute_front(theta: RationalMatrix, bound: int, norm: str):
    best_by_t = {}
    for x in itertools.product(range(-bound, bound + 1), repeat=theta.m):
        if not any(x) or next(c for c in x if c) < 0:
            continue
        res = []
        for row in theta.entries:
            v = sum(a * b for a, b in zip(row, x))
            res.append(abs(v - round(v)))
        if norm == "mult":
            t, u = math.prod(max(1, abs(c)) for c in x), math.prod(res)
        else:
            t, u = max(map(abs, x)), max(res)
        if t not in best_by_t or u < best_by_t[t]:
            best_by_t[t] = u
    front, best = [], None
    for t in sorted(best_by_t):
        if best is None or best_by_t[t] < best:
            best = best_by_t[t]
            front.append((t, best))
            if best == 0:
                break
    return front


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.integers(0, 10 ** 6), st.sampled_from(["mult", "sup"]))
def test_records_against_brute_force(m, n, seed, norm):
    rng = random.Random(seed)
    rows = [[Fraction(rng.randint(0, 60), rng.randint(61, 90)) for _ in range(m)] for _ in range(n)]
    theta = RationalMatrix.from_rows(rows)
    bound = 12
    recs = best_approximations(theta, SearchBudget(bound), norm=norm)
    got = [(r.t_pow if norm == "mult" else r.x_sup, r.u_pow if norm == "mult" else r.r_sup)
           for r in recs]
    assert got == _brute_front(theta, bound, norm)


def test_workers_do_not_change_results():
    theta = RationalMatrix.from_rows([["7/10", "11/17"], ["3/13", "5/19"]])
    a = best_approximations(theta, SearchBudget(20), workers=1)
    b = best_approximations(theta, SearchBudget(20), workers=3)
    assert a == b


def test_record_json_round_trip():
    theta = RationalMatrix.from_rows([["7/10", "11/17"]])
    for rec in best_approximations(theta, SearchBudget(10)):
        assert ApproxRecord.from_json(rec.as_json()) == rec


def test_precision_guard():
    value, _ = sqrt_approximant(2, 8)
    theta = RationalMatrix.from_rows([[value]], error=Fraction(1, 10 ** 8))
    with pytest.raises(PrecisionGuardError) as info:
        best_approximations(theta, SearchBudget(10 ** 5))
    assert info.value.shell >= 1
    # an exact zero residual with an approximant is refused
    theta = RationalMatrix.from_rows([["1/2"]], error=Fraction(1, 10 ** 30))
    with pytest.raises(PrecisionGuardError):
        best_approximations(theta, SearchBudget(5))


def test_time_limit():
    theta = RationalMatrix.from_rows([["7/1000003", "11/1000033", "13/1000037"]])
    with pytest.raises(InconclusiveError):
        best_approximations(theta, SearchBudget(500, time_limit=0.05))


def test_sup_budget_must_be_positive():
    with pytest.raises(ValueError):
        SearchBudget(0)


# -- badness -------------------------------------------------------------------------------

def test_sqrt2_badness():
    value, err = sqrt_approximant(2, 40)
    theta = RationalMatrix.from_rows([[value]], error=err)
    inf, pair = badness_infimum(theta, SearchBudget(10 ** 4))
    assert pair.x == (2,) and pair.y == (3,)
    assert float(inf) == pytest.approx(2 * (3 - 2 * math.sqrt(2)), rel=1e-12)
    brute = min(q * abs(q * math.sqrt(2) - round(q * math.sqrt(2))) for q in range(1, 10 ** 4 + 1))
    assert float(inf) == pytest.approx(brute, rel=1e-9)


# -- witnesses --------------------------------------------------------------------------------

def test_find_witness_worked_example():
    theta = RationalMatrix.from_rows([["7/10", "11/17"]])
    budget = QualityBudget.from_powers(2, 1, 100, Fraction(1, 10))
    w = find_witness(theta, budget)
    assert w is not None and any(w.y)
    assert abs(w.y[0]) <= 37
    k = 2
    assert max(1, abs(w.y[0])) ** k <= budget.Ypow_cmp
    assert math.prod(abs(r) for r in w.residual) ** k <= budget.Vpow_cmp
    assert max(abs(r) for r in w.residual) ** k <= budget.suppow_cmp


def test_find_witness_requires_bounded_budget():
    theta = RationalMatrix.from_rows([["7/10", "11/17"]])
    budget = QualityBudget.from_powers(2, 1, 100, 0)
    with pytest.raises(ValueError):
        find_witness(theta, budget)


def test_find_witness_sup_none_when_region_empty():
    theta = RationalMatrix.from_rows([["1/2"]])
    assert find_witness_sup(theta, Fraction(1, 2), Fraction(1, 100)) is None


# -- uniform feasibility ------------------------------------------------------------------------

def test_uniform_feasible():
    theta = RationalMatrix.from_rows([["3/7"]])
    assert uniform_feasible(theta, 3, 1, SearchBudget(100))          # x = 2: |6/7 - 1| = 1/7 <= 1/3
    assert not uniform_feasible(theta, 2, 3, SearchBudget(100))      # x <= 2 gives at best 1/7 > 1/8
    with pytest.raises(InconclusiveError):
        uniform_feasible(RationalMatrix.from_rows([["1/1000003"]]), 100, 5, SearchBudget(10))
    assert uniform_feasible(theta, 3, math.pi, SearchBudget(100)) in (True, False)


# -- Littlewood -------------------------------------------------------------------------------------

def test_littlewood_scan_against_float_brute_force():
    a, err = sqrt_approximant(2, 40)
    b, _ = sqrt_approximant(3, 40)
    recs = littlewood_scan(a, b, 5000, error=err)
    dist = lambda v: abs(v - round(v))
    best, qs = None, []
    for q in range(1, 5001):
        v = q * dist(q * math.sqrt(2)) * dist(q * math.sqrt(3))
        if best is None or v < best:
            best = v
            qs.append(q)
    assert [r.q for r in recs] == qs
    assert all(a.value > b.value for a, b in zip(recs, recs[1:]))


def test_littlewood_first():
    a, b = Fraction(1, 3), Fraction(2, 5)
    # q = 15 is an exact solution of both
    assert littlewood_first(a, b, 20, Fraction(0), Fraction(0)) == 15
    assert littlewood_first(a, b, 10, Fraction(0), Fraction(0)) is None
