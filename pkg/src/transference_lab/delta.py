"""The constant Delta_d: the normalised volume of the diagonal central section
of the cube [-1, 1]^d, and checks of its known bounds.

Delta_d is twice the density at 0 of a sum of d independent uniforms on
[-1, 1] (the sqrt(d) and 2^(d-1) normalisations cancel), which gives an exact
rational via the truncated-power formula for that density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .montecarlo import slab_section_volume

DEFAULT_DMAX = 64


@lru_cache(maxsize=None)
def delta(d: int) -> Fraction:
    if d < 2:
        raise ValueError(f"Delta_d needs d >= 2, got {d}")
    total = 0
    for k in range(d // 2 + 1):
        total += (-1) ** k * math.comb(d, k) * (d - 2 * k) ** (d - 1)
    return Fraction(total, 2 ** (d - 1) * math.factorial(d - 1))


def delta_monte_carlo(d: int, samples: int = 1_000_000, seed: int = 0):
    """Definitional estimate of Delta_d from a sampled section volume.

    Returns ``(estimate, standard_error)``.
    """
    vol, se, _ = slab_section_volume([1] * d, [1] * d, samples=samples, seed=seed)
    norm = 2 ** (d - 1) * math.sqrt(d)
    return vol / norm, se / norm


def bounds_ok(d: int) -> bool:
    """1/sqrt(d) <= Delta_d <= sqrt(2/d), compared in squared form."""
    sq = d * delta(d) ** 2
    return 1 <= sq <= 2


@dataclass
class DeltaRow:
    d: int
    value: Fraction
    bounds_ok: bool
    monotone_ok: bool
    mc_estimate: float | None = None
    mc_stderr: float | None = None

    @property
    def mc_ok(self) -> bool | None:
        if self.mc_estimate is None:
            return None
        return abs(self.mc_estimate - float(self.value)) <= 3 * self.mc_stderr

    def as_json(self) -> dict:
        out = {
            "d": self.d,
            "delta": f"{self.value.numerator}/{self.value.denominator}",
            "delta_float": float(self.value),
            "bounds_ok": self.bounds_ok,
            "monotone_ok": self.monotone_ok,
        }
        if self.mc_estimate is not None:
            out["mc_estimate_float"] = self.mc_estimate
            out["mc_stderr_float"] = self.mc_stderr
            out["mc_ok"] = self.mc_ok
        return out


@dataclass
class DeltaTable:
    rows: list[DeltaRow] = field(default_factory=list)

    @property
    def values(self) -> dict[int, Fraction]:
        return {r.d: r.value for r in self.rows}

    @property
    def all_ok(self) -> bool:
        return all(r.bounds_ok and r.monotone_ok and r.mc_ok is not False
                   for r in self.rows)


def delta_bounds_report(d_max: int = DEFAULT_DMAX, mc_samples: int = 0,
                        seed: int = 0, mc_dmax: int = 8) -> DeltaTable:
    """Table of Delta_2..Delta_dmax with the bound and monotonicity checks.

    With ``mc_samples > 0`` dimensions up to ``mc_dmax`` are also compared
    against the Monte-Carlo estimate (one seeded stream per d).
    """
    if d_max < 2:
        raise ValueError("d_max must be at least 2")
    table = DeltaTable()
    for d in range(2, d_max + 1):
        value = delta(d)
        mono = True if d == 2 else value <= delta(d - 1)
        row = DeltaRow(d, value, bounds_ok(d), mono)
        if mc_samples and d <= mc_dmax:
            row.mc_estimate, row.mc_stderr = delta_monte_carlo(d, mc_samples, seed + d)
        table.rows.append(row)
    return table
