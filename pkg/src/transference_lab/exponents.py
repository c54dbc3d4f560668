"""Exponent transference calculus and empirical exponent estimates.

The maps are Moebius transformations of the exponent.  They accept ints,
Fractions (evaluated exactly), floats and ``math.inf``.  Lower bounds that
fall below zero are vacuous and are clamped to 0; ``with_flag=True`` returns
``(value, vacuous)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import as_fraction
from .search import ApproxRecord, littlewood_first, littlewood_scan

INF = math.inf


def _num(v):
    """Keep exact inputs exact; floats and inf pass through."""
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        return as_fraction(v)
    return Fraction(v)


def _is_inf(v) -> bool:
    return isinstance(v, float) and math.isinf(v)


def _clamped(value, with_flag: bool):
    vacuous = value < 0
    if vacuous:
        value = Fraction(0) if isinstance(value, Fraction) else 0.0
    return (value, vacuous) if with_flag else value


def dyson_map(gamma, m: int, n: int):
    """gamma -> (n gamma + n - 1)/((m - 1) gamma + m) on gamma >= m/n."""
    g = _num(gamma)
    if g < Fraction(m, n):
        raise ValueError(f"gamma = {gamma} is outside the Minkowski domain gamma >= {m}/{n}")
    if _is_inf(g):
        return Fraction(n, m - 1) if m >= 2 else INF
    return (n * g + n - 1) / ((m - 1) * g + m)


def tr_beta_lower(gamma_mult, m: int, with_flag: bool = False):
    """Lower bound for the ordinary exponent of the transposed system (n = 1)."""
    g = _num(gamma_mult)
    if _is_inf(g):
        value = Fraction(1, m - 1) if m >= 2 else INF
    else:
        value = (g - m) / ((m - 1) * g + m)
    return _clamped(value, with_flag)


def beta_lower_from_mbeta(gamma_mult, n: int, with_flag: bool = False):
    """Lower bound for the ordinary exponent from the multiplicative one (m = 1)."""
    g = _num(gamma_mult)
    if _is_inf(g):
        value = Fraction(1, n - 1) if n >= 2 else INF
    else:
        value = (n * g - 1) / (n * (n - 1) * g + n * n - n + 1)
    return _clamped(value, with_flag)


def uniform_maps(gamma, m: int, n: int, which: str = "dyson", with_flag: bool = False):
    """Transfer of uniform exponents.

    ``dyson``: the multiplicative uniform analogue of ``dyson_map``.
    ``german``: the known bound for ordinary uniform exponents,
    (n-1)/(m-a) for a <= 1 and (n - 1/a)/(m-1) for a >= 1.
    """
    if which == "dyson":
        value = dyson_map(gamma, m, n)
        return (value, False) if with_flag else value
    if which != "german":
        raise ValueError(f"unknown map {which!r}")
    if m == 1 and n == 1:
        raise ValueError("the german bound needs (m, n) != (1, 1)")
    a = _num(gamma)
    if a <= 0:
        raise ValueError("alpha must be positive")
    if a > m:
        raise ValueError(f"alpha = {gamma} exceeds m = {m}")
    if m == 1 and a >= 1:
        value = INF
    elif a <= 1:
        value = (n - 1) / (m - a) if not _is_inf(a) else INF
    else:
        value = (n - 1 / a) / (m - 1)
    vacuous = value == 0
    return (value, vacuous) if with_flag else value


def jarnik_identity_check(alpha_val, alpha_tr_val):
    """Residual 1/alpha + alpha_tr - 1 of the Jarnik relation (n = 1, m = 2)."""
    a, b = _num(alpha_val), _num(alpha_tr_val)
    if a <= 0:
        raise ValueError("alpha must be positive")
    return 1 / a + b - 1


# -- estimation ---------------------------------------------------------------------

@dataclass
class ExponentReport:
    beta_est: float
    mbeta_est: float
    window: tuple
    records_used: int
    method: str
    alpha_est: Optional[float] = None
    malpha_est: Optional[float] = None

    def as_json(self) -> dict:
        def enc(v):
            return "inf" if v is not None and math.isinf(v) else v
        return {"beta_est": enc(self.beta_est), "mbeta_est": enc(self.mbeta_est),
                "window": [enc(self.window[0]), enc(self.window[1])],
                "records_used": self.records_used, "method": self.method,
                "alpha_est": enc(self.alpha_est), "malpha_est": enc(self.malpha_est)}


def _log(f: Fraction) -> float:
    return math.log(f.numerator) - math.log(f.denominator)


def _tail(points, tail_fraction):
    """points: (t, u) with t > 1; those in the upper ``tail_fraction`` of log t."""
    logs = [_log(t) for t, _ in points]
    lo, hi = min(logs), max(logs)
    cut = hi - tail_fraction * (hi - lo)
    return [(t, u) for (t, u), lt in zip(points, logs) if lt >= cut - 1e-12]


def _max_ratio(points, km: int, kn: int) -> float:
    """max of (-log u / kn) / (log t / km); +inf once u = 0."""
    best = -INF
    for t, u in points:
        if u == 0:
            return INF
        best = max(best, (-_log(u) / kn) / (_log(t) / km))
    return best


def estimate_exponents(records: Sequence[ApproxRecord], m: int, n: int,
                       tail_fraction: float = 0.5,
                       sup_records: Optional[Sequence[ApproxRecord]] = None) -> ExponentReport:
    """Tail-window estimates of the multiplicative and ordinary exponents.

    The multiplicative estimate uses (t_pow, u_pow) = (prod max(1,|x|),
    prod |residual|); the ordinary one uses (|x|_inf, |residual|_inf) of
    ``sup_records`` (default: the same records).
    """
    if len(records) < 3:
        raise ValueError(f"need at least 3 records, got {len(records)}")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    mult = [(r.t_pow, r.u_pow) for r in records if r.t_pow > 1]
    if not mult:
        raise ValueError("no record with prod max(1,|x|) > 1")
    tail = _tail(mult, tail_fraction)
    mbeta = _max_ratio(tail, m, n)

    src = records if sup_records is None else sup_records
    sup = [(Fraction(r.x_sup), r.r_sup) for r in src if r.x_sup > 1]
    beta = _max_ratio(_tail(sup, tail_fraction), 1, 1) if sup else -INF
    ts = [t for t, _ in tail]
    return ExponentReport(beta, mbeta, (float(min(ts)), float(max(ts))), len(tail),
                          f"tail-max(log-window {tail_fraction:g})")


def trivial_bounds_check(report: ExponentReport, m: int, n: int, slack: float = 0.05) -> list:
    """[(name, passed)] for beta <= mbeta, mbeta <= m beta (n = 1), beta >= m/n - slack."""
    b, mb = report.beta_est, report.mbeta_est
    out = [("beta_le_mbeta", b <= mb + 1e-12)]
    if n == 1:
        out.append(("mbeta_le_m_beta", mb <= m * b + slack))
    out.append(("beta_ge_minkowski", b >= m / n - slack))
    return out


# -- Littlewood desk test ---------------------------------------------------------------

@dataclass
class LittlewoodReport:
    qmax: int
    mu: Fraction
    mu_q: int
    prod_pow4: Fraction       # ((4/3)^(9/4) mu^(1/4))^4
    sup_pow4: Fraction        # ((4/3)^(5/4) mu^(1/4))^4
    q_found: Optional[int]
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.q_found is not None

    def as_json(self) -> dict:
        return {"qmax": self.qmax, "mu": f"{self.mu.numerator}/{self.mu.denominator}",
                "mu_float": float(self.mu), "mu_q": self.mu_q,
                "prod_bound_float": float(self.prod_pow4) ** 0.25,
                "sup_bound_float": float(self.sup_pow4) ** 0.25,
                "q_found": self.q_found, "passed": self.passed,
                "records": [r.as_json() for r in self.records]}


def littlewood_corollary_check(alpha, beta, qmax: int, error=None) -> LittlewoodReport:
    """Take mu as the best q ||qa|| ||qb|| for q <= qmax and look for q meeting
    both transferred bounds, compared exactly in fourth powers."""
    records = littlewood_scan(alpha, beta, qmax, error=error)
    best = records[-1]
    mu = best.value
    c = Fraction(4, 3)
    prod4, sup4 = c ** 9 * mu, c ** 5 * mu
    q = littlewood_first(alpha, beta, qmax, prod4, sup4)
    return LittlewoodReport(qmax, mu, best.q, prod4, sup4, q, records)
