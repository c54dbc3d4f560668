"""Transference budgets, constructive certificates and the psi -> phi transfer.

All witness predicates are decided on integer powers of the quality
functionals.  With d = m + n and k = d - 1 the three multiplicative
conclusions become

    (prod max(1,|y'_i|))^k   <= Delta^-n  Xpow^n     Upow^(1-m)
    (prod |tr T y' - x'|)^k  <= Delta^-m  Xpow^(1-n) Upow^m
    (max  |tr T y' - x'|)^k  <= Delta^-1  Xpow       Upow

where Xpow = X^m and Upow = U^n, so everything stays rational.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (IntegerPair, RationalMatrix, as_fraction, lcm, pi_display, pi_power,
                   pi_prime_power, residual, sup_norm, transpose_residual)
from .delta import delta
from .search import find_witness, find_witness_sup


class HypothesisError(ValueError):
    """The input pair does not satisfy the transference hypothesis."""


def _fs(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _opt_fs(f: Optional[Fraction]):
    return None if f is None else _fs(f)


def _opt_frac(s):
    return None if s is None else Fraction(s)


# -- budgets ---------------------------------------------------------------------

@dataclass(frozen=True)
class QualityBudget:
    m: int
    n: int
    Xpow: Fraction
    Upow: Fraction
    Ypow_cmp: Optional[Fraction]      # None: unbounded (exact solution, m >= 2)
    Vpow_cmp: Fraction
    suppow_cmp: Fraction
    exact: bool = False

    @property
    def d(self) -> int:
        return self.m + self.n

    @classmethod
    def from_powers(cls, m: int, n: int, Xpow, Upow) -> "QualityBudget":
        Xpow, Upow = as_fraction(Xpow), as_fraction(Upow)
        if Xpow < 1:
            raise HypothesisError(f"X^m = {Xpow} is below 1")
        if Upow >= 1:
            raise HypothesisError(f"hypothesis violated: U^n = {Upow} is not below 1")
        if Upow < 0:
            raise HypothesisError("U^n must be non-negative")
        dl = delta(m + n)
        if Upow == 0:
            ypow = dl ** -n * Xpow ** n if m == 1 else None
            return cls(m, n, Xpow, Upow, ypow, Fraction(0), Fraction(0), exact=True)
        return cls(
            m, n, Xpow, Upow,
            Ypow_cmp=dl ** -n * Xpow ** n * Upow ** (1 - m),
            Vpow_cmp=dl ** -m * Xpow ** (1 - n) * Upow ** m,
            suppow_cmp=dl ** -1 * Xpow * Upow,
        )

    # display values (the literal Y, V and sup bounds)
    @property
    def Y_float(self) -> float:
        if self.Ypow_cmp is None:
            return math.inf
        return pi_display(self.Ypow_cmp, self.n * (self.d - 1))

    @property
    def V_float(self) -> float:
        return pi_display(self.Vpow_cmp, self.m * (self.d - 1))

    @property
    def sup_float(self) -> float:
        return pi_display(self.suppow_cmp, self.d - 1)

    def as_json(self) -> dict:
        return {
            "m": self.m, "n": self.n, "Xpow": _fs(self.Xpow), "Upow": _fs(self.Upow),
            "Ypow_cmp": _opt_fs(self.Ypow_cmp), "Vpow_cmp": _fs(self.Vpow_cmp),
            "suppow_cmp": _fs(self.suppow_cmp), "exact": self.exact,
            "Y_float": self.Y_float, "V_float": self.V_float, "sup_float": self.sup_float,
        }


def make_budget(theta: RationalMatrix, x, y, Xpow=None, Upow=None) -> QualityBudget:
    """Tight budget from the pair (x, y), or an explicit looser one."""
    x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
    if not any(x):
        raise HypothesisError("x must be non-zero")
    res = residual(theta, x, y)
    tight_x, tight_u = pi_prime_power(x), pi_power(res)
    Xpow = tight_x if Xpow is None else as_fraction(Xpow)
    Upow = tight_u if Upow is None else as_fraction(Upow)
    if tight_x > Xpow:
        raise HypothesisError(f"prod max(1,|x|) = {tight_x} exceeds X^m = {Xpow}")
    if tight_u > Upow:
        raise HypothesisError(f"prod |residual| = {tight_u} exceeds U^n = {Upow}")
    return QualityBudget.from_powers(theta.m, theta.n, Xpow, Upow)


@dataclass(frozen=True)
class MahlerBudget:
    m: int
    n: int
    X: Fraction
    U: Fraction
    Ypow_cmp: Fraction       # (d-1)^(d-1) X^m U^(1-m), against |y'|^(d-1)
    Vpow_cmp: Fraction       # (d-1)^(d-1) X^(1-n) U^n, against |r'|^(d-1)

    @property
    def d(self) -> int:
        return self.m + self.n

    @classmethod
    def from_bounds(cls, m: int, n: int, X, U) -> "MahlerBudget":
        X, U = as_fraction(X), as_fraction(U)
        if not (0 < U < 1 <= X):
            raise HypothesisError(f"hypothesis violated: need 0 < U < 1 <= X, got U = {U}, X = {X}")
        k = m + n - 1
        c = Fraction(k) ** k
        return cls(m, n, X, U, c * X ** m * U ** (1 - m), c * X ** (1 - n) * U ** n)

    def multiplicative_Ypow(self) -> Fraction:
        """The sharpened Y^(d-1) at the same (X, U): Delta^-1 X^m U^(1-m)."""
        return delta(self.d) ** -1 * self.X ** self.m * self.U ** (1 - self.m)

    def as_json(self) -> dict:
        k = self.d - 1
        return {
            "m": self.m, "n": self.n, "X": _fs(self.X), "U": _fs(self.U),
            "Ypow_cmp": _fs(self.Ypow_cmp), "Vpow_cmp": _fs(self.Vpow_cmp),
            "Y_float": pi_display(self.Ypow_cmp, k), "V_float": pi_display(self.Vpow_cmp, k),
        }


def make_mahler_budget(theta: RationalMatrix, x, y, X=None, U=None) -> MahlerBudget:
    x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
    if not any(x):
        raise HypothesisError("x must be non-zero")
    res = residual(theta, x, y)
    tx, tu = sup_norm(x), sup_norm(res)
    X = tx if X is None else as_fraction(X)
    U = tu if U is None else as_fraction(U)
    if tx > X or tu > U:
        raise HypothesisError("pair exceeds the stated (X, U)")
    return MahlerBudget.from_bounds(theta.m, theta.n, X, U)


# -- certificates ----------------------------------------------------------------

def _theta_json(theta: RationalMatrix) -> dict:
    out = {"m": theta.m, "n": theta.n,
           "theta": [[_fs(v) for v in row] for row in theta.entries]}
    if theta.error:
        out["error"] = _fs(theta.error)
    if theta.label:
        out["label"] = theta.label
    return out


def _theta_from_json(obj: dict) -> RationalMatrix:
    return RationalMatrix.from_rows([[Fraction(v) for v in row] for row in obj["theta"]],
                                    error=_opt_frac(obj.get("error")), label=obj.get("label"))


@dataclass
class Certificate:
    kind: str                         # "multiplicative" or "mahler"
    theta: RationalMatrix
    x: tuple
    y: tuple
    budget: object
    witness: Optional[IntegerPair]
    checks: dict = field(default_factory=dict)
    explicit: Optional[dict] = None   # user-supplied (X, U) if not tight
    comparison: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.witness is not None and bool(self.checks) and all(self.checks.values())

    @property
    def falsified(self) -> bool:
        return self.witness is None

    def as_json(self) -> dict:
        out = {
            "kind": self.kind,
            "theta": _theta_json(self.theta),
            "pair": {"x": list(self.x), "y": list(self.y)},
            "budget": self.budget.as_json(),
            "witness": None if self.witness is None else {
                "x": list(self.witness.x), "y": list(self.witness.y),
                "residual": [_fs(r) for r in self.witness.residual],
            },
            "checks": dict(self.checks),
            "passed": self.passed,
        }
        if self.explicit:
            out["explicit"] = self.explicit
        if self.comparison:
            out["comparison"] = self.comparison
        return out


def _check_multiplicative(theta, x, y, budget: QualityBudget, w: IntegerPair) -> dict:
    k = theta.d - 1
    res = residual(theta, x, y)
    r2 = transpose_residual(theta, w.y, w.x)
    ypow = pi_prime_power(w.y) ** k
    return {
        "hypothesis_X": any(x) and pi_prime_power(x) <= budget.Xpow,
        "hypothesis_U": pi_power(res) <= budget.Upow < 1 <= budget.Xpow,
        "witness_nonzero": any(w.y),
        "conclusion_Y": budget.Ypow_cmp is None or ypow <= budget.Ypow_cmp,
        "conclusion_V": pi_power(r2) ** k <= budget.Vpow_cmp,
        "conclusion_sup": sup_norm(r2) ** k <= budget.suppow_cmp,
    }


def _check_mahler(theta, x, y, budget: MahlerBudget, w: IntegerPair) -> dict:
    k = theta.d - 1
    res = residual(theta, x, y)
    r2 = transpose_residual(theta, w.y, w.x)
    return {
        "hypothesis_X": any(x) and sup_norm(x) <= budget.X,
        "hypothesis_U": 0 < sup_norm(res) <= budget.U < 1 <= budget.X,
        "witness_nonzero": any(w.y),
        "conclusion_Y": sup_norm(w.y) ** k <= budget.Ypow_cmp,
        "conclusion_V": sup_norm(r2) ** k <= budget.Vpow_cmp,
        "residual_consistent": tuple(r2) == tuple(w.residual),
    }


def _exact_witness(theta: RationalMatrix, x, y) -> IntegerPair:
    """Transposed pair with zero residual, available when U = 0."""
    res = residual(theta, x, y)
    if theta.m == 1:
        # theta_i x = y_i exactly for some row i; y' = x e_i mirrors it
        i = next(i for i, r in enumerate(res) if r == 0)
        yw = [0] * theta.n
        yw[i] = x[0]
    else:
        # clear the denominators of one row
        yw = [0] * theta.n
        yw[0] = lcm(v.denominator for v in theta.entries[0])
    xw = [int(sum((theta.entries[i][j] * yw[i] for i in range(theta.n)), Fraction(0)))
          for j in range(theta.m)]
    return IntegerPair(tuple(xw), tuple(yw), tuple(transpose_residual(theta, yw, xw)))


def verify_multitrans(theta: RationalMatrix, x, y, budget: Optional[QualityBudget] = None,
                      Xpow=None, Upow=None) -> Certificate:
    """Constructive check of the multiplicative transference theorem on (x, y).

    A ``Certificate`` whose ``witness`` is ``None`` is a falsification event.
    """
    x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
    if budget is None:
        budget = make_budget(theta, x, y, Xpow, Upow)
    explicit = None
    if Xpow is not None or Upow is not None:
        explicit = {"Xpow": _fs(budget.Xpow), "Upow": _fs(budget.Upow)}
    if budget.exact:
        w = _exact_witness(theta, x, y)
    else:
        w = find_witness(theta, budget)
    cert = Certificate("multiplicative", theta, x, y, budget, w, explicit=explicit)
    if w is not None:
        cert.checks = _check_multiplicative(theta, x, y, budget, w)
    return cert


def verify_mahler(theta: RationalMatrix, x, y, X=None, U=None) -> Certificate:
    """Constructive check of Mahler's sup-norm transference on (x, y)."""
    x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
    budget = make_mahler_budget(theta, x, y, X, U)
    w = find_witness_sup(theta, budget.Ypow_cmp, budget.Vpow_cmp)
    explicit = None if X is None and U is None else {"X": _fs(budget.X), "U": _fs(budget.U)}
    cert = Certificate("mahler", theta, x, y, budget, w, explicit=explicit,
                       comparison=mahler_comparison(budget))
    if w is not None:
        cert.checks = _check_mahler(theta, x, y, budget, w)
    return cert


def mahler_comparison(budget: MahlerBudget) -> dict:
    """Sharpened versus Mahler Y at the same (X, U), compared as (d-1)-th powers."""
    mult = budget.multiplicative_Ypow()
    k = budget.d - 1
    return {
        "multiplicative_Ypow": _fs(mult),
        "mahler_Ypow": _fs(budget.Ypow_cmp),
        "multiplicative_tighter": mult < budget.Ypow_cmp,
        "factor_multiplicative_float": float(delta(budget.d)) ** (-1 / k),
        "factor_mahler": k,
    }


def _verify_job(args):
    kind, theta, x, y = args
    if kind == "mahler":
        return verify_mahler(theta, x, y)
    return verify_multitrans(theta, x, y)


def verify_many(instances: Sequence, kind: str = "multiplicative", workers: int = 1) -> list:
    """Certificates for a batch of (theta, x, y); order follows the input."""
    jobs = [(kind, t, x, y) for t, x, y in instances]
    if workers <= 1:
        return [_verify_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_verify_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def revalidate(obj: dict) -> tuple[bool, dict]:
    """Recompute a stored certificate from its inputs; returns (agrees, fresh checks)."""
    theta = _theta_from_json(obj["theta"])
    x, y = tuple(obj["pair"]["x"]), tuple(obj["pair"]["y"])
    explicit = obj.get("explicit") or {}
    if obj["kind"] == "mahler":
        budget = make_mahler_budget(theta, x, y, _opt_frac(explicit.get("X")),
                                    _opt_frac(explicit.get("U")))
    else:
        budget = make_budget(theta, x, y, _opt_frac(explicit.get("Xpow")),
                             _opt_frac(explicit.get("Upow")))
    same_budget = budget.as_json() == obj["budget"]
    wj = obj.get("witness")
    if wj is None:
        return False, {"budget_matches": same_budget, "witness": False}
    w = IntegerPair(tuple(wj["x"]), tuple(wj["y"]), tuple(Fraction(r) for r in wj["residual"]))
    if tuple(transpose_residual(theta, w.y, w.x)) != w.residual:
        return False, {"budget_matches": same_budget, "residual_matches": False}
    if obj["kind"] == "mahler":
        checks = _check_mahler(theta, x, y, budget, w)
    else:
        checks = _check_multiplicative(theta, x, y, budget, w)
    agrees = same_budget and checks == obj["checks"] and all(checks.values()) == obj["passed"]
    return agrees and all(checks.values()), dict(checks, budget_matches=same_budget)


# -- arbitrary functions -----------------------------------------------------------

class TransferError(ValueError):
    """f is not invertible on the requested range."""


_TAU_MAX = 1.0e6
_REL_TOL = 1.0e-12


@dataclass(frozen=True)
class FunctionSpec:
    """A decreasing approximation function psi, handled through log psi(e^tau).

    kinds: ``power`` (psi = t^-gamma), ``log-littlewood-1``
    (psi = (t log t)^-1/2, for m = 1, n = 2), ``log-littlewood-2``
    (psi = 1/(t^2 log(1+t)), for m = 2, n = 1) and ``tabulated``
    (log-log linear interpolation of sampled values).
    """

    kind: str
    gamma: Optional[float] = None
    table: Optional[tuple] = None     # ((t, psi), ...) with t increasing

    def __post_init__(self):
        if self.kind not in ("power", "log-littlewood-1", "log-littlewood-2", "tabulated"):
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind == "power" and self.gamma is None:
            raise ValueError("power spec needs gamma")
        if self.kind == "tabulated":
            if not self.table or len(self.table) < 2:
                raise ValueError("tabulated spec needs at least two points")
            t = np.array([float(a) for a, _ in self.table])
            p = np.array([float(b) for _, b in self.table])
            if np.any(t <= 0) or np.any(p <= 0) or np.any(np.diff(t) <= 0):
                raise ValueError("table needs positive values and increasing t")
            object.__setattr__(self, "_logs", (np.log(t), np.log(p)))

    @classmethod
    def power(cls, gamma) -> "FunctionSpec":
        return cls("power", gamma=float(gamma))

    @classmethod
    def tabulated(cls, pairs) -> "FunctionSpec":
        return cls("tabulated", table=tuple((float(a), float(b)) for a, b in pairs))

    def required_shape(self) -> Optional[tuple]:
        return {"log-littlewood-1": (1, 2), "log-littlewood-2": (2, 1)}.get(self.kind)

    def domain(self) -> tuple[float, float]:
        """Range of tau = log t where log psi is defined."""
        if self.kind == "log-littlewood-1":
            return 0.0, _TAU_MAX
        if self.kind == "tabulated":
            lt, _ = self._logs
            return float(lt[0]), float(lt[-1])
        return -_TAU_MAX, _TAU_MAX

    def log_psi(self, tau: float) -> float:
        if self.kind == "power":
            return -self.gamma * tau
        if self.kind == "log-littlewood-1":
            return -0.5 * (tau + math.log(tau))
        if self.kind == "log-littlewood-2":
            # log log(1 + t), with log(1 + t) ~ t once t underflows
            if tau < -30:
                ll = tau
            elif tau > 30:
                ll = math.log(tau + math.log1p(math.exp(-tau)))
            else:
                ll = math.log(math.log1p(math.exp(tau)))
            return -(2.0 * tau + ll)
        lt, lp = self._logs
        return float(np.interp(tau, lt, lp))

    def psi(self, t: float) -> float:
        return math.exp(self.log_psi(math.log(t)))


def _bisect(fn, target: float, lo: float, hi_limit: float) -> float:
    """Solve fn(tau) = target for increasing fn, growing the bracket geometrically."""
    if fn(lo) > target:
        raise TransferError("target lies below the range of f on its domain")
    step = 1.0
    hi = lo + step
    while fn(hi) < target:
        lo = hi
        step *= 2.0
        hi = min(hi + step, hi_limit)
        if hi >= hi_limit and fn(hi) < target:
            raise TransferError("domain exhausted before f reached the target")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or hi - lo <= _REL_TOL * 1e-2:
            break
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class TransferReport:
    kind: str
    m: int
    n: int
    delta: Fraction
    monotone_grid: int
    psi_below_one_from: Optional[float]
    decay_tail_ok: bool
    decay_values: list

    def as_json(self) -> dict:
        return {"kind": self.kind, "m": self.m, "n": self.n, "delta": _fs(self.delta),
                "monotone_grid_points": self.monotone_grid,
                "psi_below_one_from": self.psi_below_one_from,
                "decay_tail_ok": self.decay_tail_ok,
                "decay_tail_float": self.decay_values}


class _Transfer:
    """Callable s -> outer(f^-(s)), all in log space."""

    def __init__(self, spec: FunctionSpec, m: int, n: int, outer: Callable[[float], float]):
        self.spec, self.m, self.n = spec, m, n
        self.k = m + n - 1
        self.log_delta = math.log(float(delta(m + n)))
        self._outer = outer
        lo, hi = spec.domain()
        self._lo = lo if spec.kind != "log-littlewood-1" else 1e-12
        self._hi = hi
        self.report = self._check()

    def log_f(self, tau: float) -> float:
        return (-self.log_delta + self.m * tau + (1 - self.m) * self.spec.log_psi(tau)) / self.k

    def log_g(self, tau: float) -> float:
        return (-self.log_delta + (1 - self.n) * tau + self.n * self.spec.log_psi(tau)) / self.k

    def _check(self) -> TransferReport:
        lo = self._lo if self._lo > -50 else -50.0
        hi = self._hi if self._hi < 200 else 200.0
        grid = np.linspace(lo, hi, 2001)
        values = np.array([self.log_f(t) for t in grid])
        if not np.all(np.diff(values) > 0):
            raise TransferError("f is not strictly increasing on the checked grid")
        lp = np.array([self.spec.log_psi(t) for t in grid])
        below = np.nonzero(lp >= 0)[0]
        if below.size == 0:
            threshold = float(math.exp(grid[0]))
        elif below[-1] == grid.size - 1:
            threshold = None
        else:
            threshold = float(math.exp(grid[below[-1] + 1]))
        tail = grid[int(0.75 * grid.size):]
        decay = np.array([(1 - self.n) / self.n * t + self.spec.log_psi(t) for t in tail])
        decay_ok = bool(np.all(np.diff(decay) <= 1e-12) and decay[-1] < decay[0])
        return TransferReport(self.spec.kind, self.m, self.n, delta(self.m + self.n),
                              int(grid.size), threshold, decay_ok,
                              [float(math.exp(v)) for v in decay[::100]])

    def inverse_f(self, s: float) -> float:
        """f^-(s), solved to relative tolerance 1e-12 in t."""
        return math.exp(self.log_inverse_f(math.log(s)))

    def log_inverse_f(self, log_s: float) -> float:
        return _bisect(self.log_f, log_s, self._lo, self._hi)

    def log_value(self, log_s: float) -> float:
        return self._outer(self.log_inverse_f(log_s))

    def __call__(self, s):
        if np.ndim(s):
            return np.array([self(v) for v in np.asarray(s, dtype=float)])
        if s <= 0:
            raise ValueError("s must be positive")
        return math.exp(self.log_value(math.log(s)))


def _check_shape(spec: FunctionSpec, m: int, n: int):
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    shape = spec.required_shape()
    if shape is not None and shape != (m, n):
        raise ValueError(f"{spec.kind} is stated for (m, n) = {shape}")


def phi_from_psi(spec: FunctionSpec, m: int, n: int) -> _Transfer:
    """phi = g o f^-; the returned callable carries a ``report``."""
    _check_shape(spec, m, n)
    tr = _Transfer(spec, m, n, lambda tau: 0.0)
    tr._outer = tr.log_g
    return tr


def chi_from_psi(spec: FunctionSpec, m: int) -> _Transfer:
    """chi = h o f^- for n = 1, with h(t) = (Delta^-1 t^m psi(t))^(1/m).

    h is the sup-norm bound Delta V^m Y^n evaluated at X = t, U = psi(t),
    which bounds |tr T y' - x'| for the transposed pair.
    """
    _check_shape(spec, m, 1)
    tr = _Transfer(spec, m, 1, lambda tau: 0.0)
    tr._outer = lambda tau: (-tr.log_delta + m * tau + spec.log_psi(tau)) / m
    return tr
