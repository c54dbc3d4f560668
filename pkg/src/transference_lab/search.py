"""Exact enumeration over integer points.

The matrix is handled as ``N / D`` with an integer matrix ``N`` and common
denominator ``D``, so a residual coordinate is an integer numerator over
``D`` and every comparison below is integer (or Fraction) arithmetic.

Candidates are enumerated by increasing sup-norm shells and lexicographically
within a shell.  Since (x, y) and (-x, -y) carry the same quality, only the
half with a positive first non-zero coordinate is visited.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .core import IntegerPair, RationalMatrix, as_fraction, round_half_toward_zero

DEFAULT_GUARD = Fraction(1, 10 ** 6)


class SearchError(RuntimeError):
    pass


class PrecisionGuardError(SearchError):
    def __init__(self, shell: int, message: str = ""):
        self.shell = shell
        super().__init__(message or f"precision guard violated in shell {shell}")


class InconclusiveError(SearchError):
    """The question cannot be settled inside the search budget."""


@dataclass(frozen=True)
class SearchBudget:
    sup_bound: int
    time_limit: Optional[float] = None
    precision_guard: Fraction = DEFAULT_GUARD

    def __post_init__(self):
        if int(self.sup_bound) < 1:
            raise ValueError("sup_bound must be at least 1")
        object.__setattr__(self, "sup_bound", int(self.sup_bound))
        object.__setattr__(self, "precision_guard", as_fraction(self.precision_guard))


@dataclass(frozen=True)
class ApproxRecord:
    x: tuple[int, ...]
    y: tuple[int, ...]
    t_pow: Fraction           # prod max(1, |x_j|)
    u_pow: Fraction           # prod |Theta x - y|_i
    x_sup: int
    r_sup: Fraction

    def as_json(self) -> dict:
        return {
            "x": list(self.x),
            "y": list(self.y),
            "t_pow": _frac_str(self.t_pow),
            "u_pow": _frac_str(self.u_pow),
            "x_sup": self.x_sup,
            "r_sup": _frac_str(self.r_sup),
            "t_pow_float": float(self.t_pow),
            "u_pow_float": float(self.u_pow),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ApproxRecord":
        return cls(tuple(obj["x"]), tuple(obj["y"]), Fraction(obj["t_pow"]),
                   Fraction(obj["u_pow"]), int(obj["x_sup"]), Fraction(obj["r_sup"]))


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


# -- enumeration primitives --------------------------------------------------

def shell_vectors(k: int, s: int, limit: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    """Integer vectors of length k with sup-norm exactly s and first non-zero
    coordinate positive, in lexicographic order.

    With ``limit`` only vectors with prod max(1, |v_i|) <= limit are produced;
    partial products prune whole subtrees.
    """
    if s < 1:
        return
    if limit is not None and limit < s:
        return

    def rec(i, prefix, leading, hit, prod):
        if i == k:
            if hit:
                yield tuple(prefix)
            return
        last = i == k - 1
        amax = s if limit is None else min(s, limit // prod)
        if not hit and limit is not None and prod * s > limit:
            return
        lo = 0 if leading else -amax
        if last and not hit:
            # only a coordinate of size s can complete the shell
            values = (s,) if leading or amax < s else (-s, s)
            if amax < s:
                return
        else:
            values = range(lo, amax + 1)
        for v in values:
            a = -v if v < 0 else v
            h = hit or a == s
            if last and not h:
                continue
            if not h and limit is not None and prod * max(1, a) * s > limit and not last:
                # no room left for a coordinate of size s
                continue
            prefix.append(v)
            yield from rec(i + 1, prefix, leading and v == 0, h, prod * max(1, a))
            prefix.pop()

    yield from rec(0, [], True, False, 1)


def integer_root_floor(value: Fraction, k: int) -> int:
    """Largest integer a >= 0 with a^k <= value."""
    value = as_fraction(value)
    if value < 1:
        return 0
    a = int(math.floor(math.exp(math.log(value.numerator) - math.log(value.denominator)) ** (1 / k)
                       if k > 1 else value))
    a = max(a, 1)
    while a ** k > value:
        a -= 1
    while (a + 1) ** k <= value:
        a += 1
    return a


def _round_residuals(num_rows, den, v):
    """Nearest integers and residual numerators for (num_rows @ v) / den."""
    out_int, out_res = [], []
    for row in num_rows:
        s = 0
        for a, b in zip(row, v):
            if a and b:
                s += a * b
        r = round_half_toward_zero(s, den)
        out_int.append(r)
        out_res.append(s - den * r)
    return out_int, out_res


def _prod_abs(values) -> int:
    p = 1
    for v in values:
        p *= -v if v < 0 else v
    return p


def _prod_clamped(values) -> int:
    p = 1
    for v in values:
        a = -v if v < 0 else v
        if a > 1:
            p *= a
    return p


# -- best approximations -------------------------------------------------------

def _scan_shells(num, den, m, n, lo, hi, mode):
    """Per-shell candidate summaries for shells lo..hi.

    Returns a list of (s, candidates, min_nonzero_residual, has_zero), where
    candidates are (t, u, x, y) with integer t and integer numerators u
    (u_pow = u / den^n in multiplicative mode, r_sup = u / den in sup mode),
    restricted to the shell's own Pareto front.
    """
    out = []
    for s in range(lo, hi + 1):
        best_by_t = {}
        min_res = None
        has_zero = False
        for x in shell_vectors(m, s):
            y, res = _round_residuals(num, den, x)
            for r in res:
                a = -r if r < 0 else r
                if a == 0:
                    has_zero = True
                elif min_res is None or a < min_res:
                    min_res = a
            if mode == "mult":
                t, u = _prod_clamped(x), _prod_abs(res)
            else:
                t, u = s, max(-r if r < 0 else r for r in res)
            cur = best_by_t.get(t)
            if cur is None or u < cur[1]:
                best_by_t[t] = (t, u, x, tuple(y))
        front, best_u = [], None
        for t in sorted(best_by_t):
            cand = best_by_t[t]
            if best_u is None or cand[1] < best_u:
                front.append(cand)
                best_u = cand[1]
        out.append((s, front, min_res, has_zero))
    return out


def _check_guard(theta: RationalMatrix, guard: Fraction, s: int, min_res, has_zero):
    if not theta.error:
        return
    if has_zero or min_res is None:
        raise PrecisionGuardError(s, f"exact zero residual for an approximated matrix in shell {s}")
    smallest = Fraction(min_res, theta.denominator)
    if s * theta.error * theta.d >= guard * smallest:
        raise PrecisionGuardError(
            s, f"precision guard violated in shell {s}: "
               f"{float(s * theta.error * theta.d):.3g} >= {float(guard):.3g} * {float(smallest):.3g}")


def best_approximations(theta: RationalMatrix, budget: SearchBudget, norm: str = "mult",
                        workers: int = 1) -> list[ApproxRecord]:
    """Record-breaking approximations of Theta x ~ y over shells 1..sup_bound.

    ``norm="mult"`` ranks by (prod max(1,|x_j|), prod |residual|), ``"sup"``
    by (|x|_inf, |residual|_inf).  The result has strictly increasing t_pow
    and strictly decreasing u_pow (r_sup in sup mode); y is always the
    per-coordinate nearest integer vector.  The result does not depend on
    ``workers``.
    """
    if norm not in ("mult", "sup"):
        raise ValueError(f"unknown norm {norm!r}")
    m, n, den = theta.m, theta.n, theta.denominator
    num = theta.integer_numerators
    bound = budget.sup_bound
    started = time.monotonic()

    # shells beyond a zero-residual record cannot contribute
    stop_at = bound
    shells: list = []
    if workers > 1 and m > 1:
        step = max(1, math.ceil(bound / (4 * workers)))
        ranges = [(lo, min(bound, lo + step - 1)) for lo in range(1, bound + 1, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_shells, num, den, m, n, lo, hi, norm) for lo, hi in ranges]
            for f in futures:
                shells.extend(f.result())
    else:
        for s in range(1, bound + 1):
            if s > stop_at:
                break
            chunk = _scan_shells(num, den, m, n, s, s, norm)
            shells.extend(chunk)
            for _, front, _, _ in chunk:
                for t, u, _, _ in front:
                    if u == 0:
                        stop_at = min(stop_at, t if norm == "mult" else s)
            if budget.time_limit is not None and time.monotonic() - started > budget.time_limit:
                raise InconclusiveError(f"time limit reached in shell {s}")

    best_by_t: dict = {}
    for s, front, min_res, has_zero in shells:
        if s > stop_at:
            break
        _check_guard(theta, budget.precision_guard, s, min_res, has_zero)
        for cand in front:
            t, u = cand[0], cand[1]
            cur = best_by_t.get(t)
            if cur is None or u < cur[1]:
                best_by_t[t] = cand
            if u == 0:
                stop_at = min(stop_at, t if norm == "mult" else s)

    records = []
    best_u = None
    for t in sorted(best_by_t):
        _, u, x, y = best_by_t[t]
        if best_u is None or u < best_u:
            best_u = u
            records.append(_record(theta, x, y))
    return records


def _record(theta: RationalMatrix, x, y) -> ApproxRecord:
    pair = IntegerPair.build(theta, x, y)
    t = Fraction(_prod_clamped(x))
    u = Fraction(1)
    for r in pair.residual:
        u *= abs(r)
    return ApproxRecord(pair.x, pair.y, t, u, max(abs(v) for v in x),
                        max(abs(r) for r in pair.residual))


def badness_infimum(theta: RationalMatrix, budget: SearchBudget):
    """Minimum of prod max(1,|x_j|) * prod |Theta x - y|_i over the shells
    1..sup_bound, with the first minimising pair.

    Returns ``(value, IntegerPair)``.  The value is region-restricted; it is
    not a claim about the infimum over all of Z^m.
    """
    m, n, den = theta.m, theta.n, theta.denominator
    num = theta.integer_numerators
    best = None
    best_pair = None
    dpow = den ** n
    for s in range(1, budget.sup_bound + 1):
        min_res, has_zero = None, False
        for x in shell_vectors(m, s):
            y, res = _round_residuals(num, den, x)
            val = _prod_clamped(x) * _prod_abs(res)
            for r in res:
                a = abs(r)
                if a == 0:
                    has_zero = True
                elif min_res is None or a < min_res:
                    min_res = a
            if best is None or val < best:
                best, best_pair = val, (x, y)
        _check_guard(theta, budget.precision_guard, s, min_res, has_zero)
    return Fraction(best, dpow), IntegerPair.build(theta, *best_pair)


# -- transference witnesses -----------------------------------------------------

def _witness_scan(theta: RationalMatrix, ymax: int, product_limit: Optional[int], accept):
    """First y (shell-lexicographic) with x = round(tr Theta y) accepted by
    ``accept(residual_numerators)``."""
    den = theta.denominator
    num_t = [list(col) for col in zip(*theta.integer_numerators)]
    n = theta.n
    for s in range(1, ymax + 1):
        for y in shell_vectors(n, s, product_limit):
            x, res = _round_residuals(num_t, den, y)
            if accept(res):
                return IntegerPair(tuple(x), tuple(y),
                                   tuple(Fraction(r, den) for r in res))
    return None


def find_witness(theta: RationalMatrix, budget) -> Optional[IntegerPair]:
    """Search for y != 0, x with

        (prod max(1,|y_i|))^(d-1)        <= Ypow_cmp
        (prod |tr Theta y - x|_j)^(d-1)  <= Vpow_cmp
        (max  |tr Theta y - x|_j)^(d-1)  <= suppow_cmp

    (the conclusions of the multiplicative transference theorem raised to
    integer powers).  ``budget`` is a ``transfer.QualityBudget``.  The
    returned pair stores the transposed residual tr Theta y - x.  ``None``
    means the (finite) region holds no witness.
    """
    k = theta.d - 1
    den = theta.denominator
    m = theta.m
    if budget.Ypow_cmp is None:
        raise ValueError("unbounded Y budget (exact solution); handle it in transfer")
    ymax = integer_root_floor(budget.Ypow_cmp, k)
    if ymax < 1:
        return None
    v_num, v_den = budget.Vpow_cmp.numerator, budget.Vpow_cmp.denominator
    s_num, s_den = budget.suppow_cmp.numerator, budget.suppow_cmp.denominator
    v_scale = den ** (m * k)
    s_scale = den ** k

    def accept(res):
        sup = max(abs(r) for r in res)
        if sup ** k * s_den > s_num * s_scale:
            return False
        return _prod_abs(res) ** k * v_den <= v_num * v_scale

    return _witness_scan(theta, ymax, ymax, accept)


def find_witness_sup(theta: RationalMatrix, ypow_cmp: Fraction, vpow_cmp: Fraction
                     ) -> Optional[IntegerPair]:
    """Sup-norm counterpart: |y|^(d-1) <= ypow_cmp, |tr Theta y - x|^(d-1) <= vpow_cmp."""
    k = theta.d - 1
    den = theta.denominator
    ymax = integer_root_floor(ypow_cmp, k)
    v_num, v_den = vpow_cmp.numerator, vpow_cmp.denominator
    scale = den ** k

    def accept(res):
        return max(abs(r) for r in res) ** k * v_den <= v_num * scale

    return _witness_scan(theta, ymax, None, accept)


# -- uniform feasibility -----------------------------------------------------

def _u_le_t_power(u: Fraction, t: Fraction, gamma, n: int) -> bool:
    """Exact u <= t^(-gamma n) for rational gamma; guarded logs otherwise."""
    if u == 0:
        return True
    if isinstance(gamma, (int, Fraction)):
        g = Fraction(gamma)
        if g.denominator <= 10 ** 4:
            return u ** g.denominator * t ** (g.numerator * n) <= 1
    import mpmath

    prec = 128
    while prec <= 4096:
        with mpmath.workprec(prec):
            lhs = mpmath.log(mpmath.mpf(u.numerator)) - mpmath.log(mpmath.mpf(u.denominator))
            rhs = -mpmath.mpf(gamma) * n * (mpmath.log(mpmath.mpf(t.numerator))
                                            - mpmath.log(mpmath.mpf(t.denominator)))
            gap = rhs - lhs
            if abs(gap) > mpmath.mpf(2) ** (-64) * max(1, abs(rhs)):
                return gap > 0
        prec *= 2
    raise InconclusiveError("comparison too close to decide at 4096 bits")


def uniform_feasible(theta: RationalMatrix, t, gamma, budget: SearchBudget) -> bool:
    """Is there x != 0, y with Pi'(x) <= t and Pi(Theta x - y) <= t^-gamma?

    Raises ``InconclusiveError`` when no pair was found but the region
    {prod max(1,|x_j|) <= t^m} reaches beyond ``budget.sup_bound``.
    """
    t = as_fraction(t)
    if t <= 1:
        raise ValueError("t must exceed 1")
    m, n, den = theta.m, theta.n, theta.denominator
    num = theta.integer_numerators
    limit = math.floor(t ** m)
    reach = min(limit, budget.sup_bound)
    dpow = den ** n
    for s in range(1, reach + 1):
        for x in shell_vectors(m, s, limit):
            _, res = _round_residuals(num, den, x)
            if _u_le_t_power(Fraction(_prod_abs(res), dpow), t, gamma, n):
                return True
    if limit > budget.sup_bound:
        raise InconclusiveError(
            f"region reaches |x| = {limit} beyond sup_bound {budget.sup_bound}")
    return False


# -- Littlewood scans ----------------------------------------------------------

@dataclass(frozen=True)
class LittlewoodRecord:
    q: int
    value: Fraction        # q ||q alpha|| ||q beta||
    dist_alpha: Fraction
    dist_beta: Fraction

    def as_json(self) -> dict:
        return {"q": self.q, "value": _frac_str(self.value), "value_float": float(self.value),
                "dist_alpha": _frac_str(self.dist_alpha), "dist_beta": _frac_str(self.dist_beta)}


def _guard_littlewood(qmax, error, guard, min_dist, q_at):
    if not error:
        return
    if min_dist == 0:
        raise PrecisionGuardError(q_at, f"exact zero distance at q = {q_at} for approximants")
    if qmax * error * 3 >= guard * min_dist:
        raise PrecisionGuardError(q_at, f"precision guard violated at q = {qmax}")


def littlewood_scan(alpha, beta, qmax: int, error=None, guard=DEFAULT_GUARD
                    ) -> list[LittlewoodRecord]:
    """Record-breaking (strictly decreasing) values of q ||q a|| ||q b||, q = 1..qmax.

    ``error`` bounds |alpha - a| and |beta - b| for approximants of
    irrationals and arms the precision guard.
    """
    if qmax < 1:
        raise ValueError("qmax must be at least 1")
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    a, A = alpha.numerator % alpha.denominator, alpha.denominator
    b, B = beta.numerator % beta.denominator, beta.denominator
    err = as_fraction(error) if error is not None else None
    best = None
    records = []
    min_da, min_db = A, B
    ra = rb = 0
    for q in range(1, qmax + 1):
        ra += a
        if ra >= A:
            ra -= A
        rb += b
        if rb >= B:
            rb -= B
        da = ra if 2 * ra <= A else A - ra
        db = rb if 2 * rb <= B else B - rb
        if da < min_da:
            min_da = da
        if db < min_db:
            min_db = db
        v = q * da * db
        if best is None or v < best:
            best = v
            records.append(LittlewoodRecord(q, Fraction(v, A * B), Fraction(da, A), Fraction(db, B)))
    _guard_littlewood(qmax, err, as_fraction(guard),
                      min(Fraction(min_da, A), Fraction(min_db, B)), qmax)
    return records


def littlewood_first(alpha, beta, qmax: int, prod_pow4: Fraction, sup_pow4: Fraction
                     ) -> Optional[int]:
    """Smallest q <= qmax with (q ||q a|| ||q b||)^4 <= prod_pow4 and
    max(||q a||, ||q b||)^4 <= sup_pow4 (exact)."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    a, A = alpha.numerator % alpha.denominator, alpha.denominator
    b, B = beta.numerator % beta.denominator, beta.denominator
    p_num, p_den = prod_pow4.numerator, prod_pow4.denominator
    s_num, s_den = sup_pow4.numerator, sup_pow4.denominator
    ab4 = (A * B) ** 4
    for q in range(1, qmax + 1):
        ra, rb = q * a % A, q * b % B
        da = min(ra, A - ra)
        db = min(rb, B - rb)
        if (q * da * db) ** 4 * p_den > p_num * ab4:
            continue
        if max(Fraction(da, A), Fraction(db, B)) ** 4 <= Fraction(s_num, s_den):
            return q
    return None
