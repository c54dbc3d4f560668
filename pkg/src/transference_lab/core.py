"""Exact arithmetic vocabulary: rational matrices, the geometric-mean
functionals (always in power form), residuals and rounding.

Every quantity that takes part in a decision is a ``fractions.Fraction``.
The k-th roots of the quality functionals are only produced as floats for
display.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional, Sequence

Rational = Fraction


class DimensionError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and exact strings ("p/q", "1.25") to Fraction.

    Floats are refused: silently absorbing a binary float would defeat the
    exactness of every downstream comparison.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


@dataclass(frozen=True)
class RationalMatrix:
    """The n x m system matrix with exact entries.

    ``error`` is an upper bound on |theta_ij - entry| when the entries are
    approximants of irrational numbers (``None`` for exact input); the search
    module turns it into a precision guard.
    """

    entries: tuple[tuple[Fraction, ...], ...]
    error: Optional[Fraction] = None
    label: Optional[str] = None
    _common: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.entries)
        if not rows or not rows[0]:
            raise DimensionError("matrix must have at least one row and one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged matrix rows")
        if len(rows) + len(rows[0]) < 2:
            raise DimensionError("d = m + n must be at least 2")
        object.__setattr__(self, "entries", rows)
        if self.error is not None:
            err = as_fraction(self.error)
            if err < 0:
                raise ValueError("approximation error must be non-negative")
            object.__setattr__(self, "error", err)
        den = lcm(v.denominator for row in rows for v in row)
        nums = tuple(tuple(int(v * den) for v in row) for row in rows)
        object.__setattr__(self, "_common", (den, nums))

    @classmethod
    def from_rows(cls, rows, error=None, label=None) -> "RationalMatrix":
        return cls(tuple(tuple(r) for r in rows), error=error, label=label)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    @property
    def d(self) -> int:
        return self.m + self.n

    @property
    def denominator(self) -> int:
        """Common denominator D with D * Theta integral."""
        return self._common[0]

    @property
    def integer_numerators(self) -> tuple[tuple[int, ...], ...]:
        """The integer matrix D * Theta."""
        return self._common[1]

    @property
    def is_exact(self) -> bool:
        return not self.error

    def transpose(self) -> "RationalMatrix":
        cols = tuple(zip(*self.entries))
        return RationalMatrix(cols, error=self.error, label=self.label)

    def __str__(self):
        body = "; ".join(", ".join(str(v) for v in row) for row in self.entries)
        return f"[{body}]"


@dataclass(frozen=True)
class IntegerPair:
    """A candidate (x, y) for the system Theta x = y with its exact residual."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    residual: tuple[Fraction, ...]

    @classmethod
    def build(cls, theta: RationalMatrix, x, y) -> "IntegerPair":
        x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
        return cls(x, y, tuple(residual(theta, x, y)))


def pi_power(z: Sequence) -> Fraction:
    """k-th power of the geometric mean of |z_i|: the product of |z_i|."""
    out = Fraction(1)
    for v in z:
        out *= abs(as_fraction(v))
    return out


def pi_prime_power(z: Sequence) -> Fraction:
    """k-th power of the clamped geometric mean: prod max(1, |z_i|)."""
    out = Fraction(1)
    for v in z:
        a = abs(as_fraction(v))
        if a > 1:
            out *= a
    return out


def sup_norm(z: Sequence) -> Fraction:
    return max((abs(as_fraction(v)) for v in z), default=Fraction(0))


def pi_display(power: Fraction, k: int) -> float:
    """The functional itself (k-th root of its power form), display only."""
    if power == 0:
        return 0.0
    return math.exp((math.log(power.numerator) - math.log(power.denominator)) / k)


def residual(theta: RationalMatrix, x: Sequence[int], y: Sequence[int]) -> list[Fraction]:
    """Exact Theta x - y."""
    if len(x) != theta.m or len(y) != theta.n:
        raise DimensionError(
            f"expected |x| = {theta.m}, |y| = {theta.n}, got {len(x)}, {len(y)}"
        )
    return [sum((a * xj for a, xj in zip(row, x)), Fraction(0)) - yi
            for row, yi in zip(theta.entries, y)]


def transpose_residual(theta: RationalMatrix, y: Sequence[int], x: Sequence[int]) -> list[Fraction]:
    """Exact tr(Theta) y - x (length m)."""
    if len(y) != theta.n or len(x) != theta.m:
        raise DimensionError(
            f"expected |y| = {theta.n}, |x| = {theta.m}, got {len(y)}, {len(x)}"
        )
    out = []
    for j in range(theta.m):
        s = sum((theta.entries[i][j] * y[i] for i in range(theta.n)), Fraction(0))
        out.append(s - x[j])
    return out


def round_half_toward_zero(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0); exact halves go toward zero."""
    q, r = divmod(num, den)  # floor division, 0 <= r < den
    twice = 2 * r
    if twice < den:
        return q
    if twice > den:
        return q + 1
    # tie: q + 1/2 -- toward zero
    return q if q >= 0 else q + 1


def nearest_integer_vector(v: Sequence) -> list[int]:
    out = []
    for value in v:
        f = as_fraction(value)
        out.append(round_half_toward_zero(f.numerator, f.denominator))
    return out


def dist_to_nearest_integer(value) -> Fraction:
    f = as_fraction(value)
    return abs(f - round_half_toward_zero(f.numerator, f.denominator))


def sqrt_approximant(radicand: int, digits: int) -> tuple[Fraction, Fraction]:
    """Rational truncation of sqrt(radicand) to ``digits`` decimals and its error bound."""
    scale = 10 ** digits
    root = math.isqrt(radicand * scale * scale)
    return Fraction(root, scale), Fraction(1, scale)


def golden_approximant(digits: int) -> tuple[Fraction, Fraction]:
    """(1 + sqrt 5)/2 truncated to ``digits`` decimals, with its error bound."""
    root, err = sqrt_approximant(5, digits + 1)
    value = (1 + root) / 2
    scale = 10 ** digits
    value = Fraction(math.floor(value * scale), scale)
    # truncation plus half the error of the root
    return value, Fraction(11, 10 * scale)


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a
