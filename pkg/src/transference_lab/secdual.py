"""Central sections of boxes and parallelepipeds, section-dual sets, and the
dual tuple correspondence between the two families of parallelepipeds that
cover the primal and transposed approximation regions.

Section volumes are evaluated through the density at 0 of a weighted sum of
independent uniforms (a one-dimensional box spline).  For rational data the
section volume of ``A @ Box(c)`` orthogonal to ``e`` is

    |det A| * 2^d * prod(c) * |e|_2 * density_{sum (A^T e)_i c_i U_i}(0),

a rational multiple of |e|_2.  Because the density is homogeneous of degree
-1 in the direction, membership of a point p in the section-dual set reduces
to the rational gauge

    gauge(p) = 1 / (2 |det A| prod(c) density_{A^T p}(0)) <= 1,

so every wedge decision below is made in exact arithmetic.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import RationalMatrix, as_fraction
from .delta import delta
from .montecarlo import slab_section_volume


# -- exact linear algebra over Q ---------------------------------------------

def _matrix(rows) -> list[list[Fraction]]:
    return [[as_fraction(v) for v in row] for row in rows]


def determinant(a) -> Fraction:
    a = _matrix(a)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                for k in range(col, n):
                    a[r][k] -= f * a[col][k]
    return det


def inverse(a) -> list[list[Fraction]]:
    a = _matrix(a)
    n = len(a)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def cofactor_matrix(a) -> list[list[Fraction]]:
    """Matrix of signed cofactors C_ij = (-1)^(i+j) det(minor_ij), computed
    directly from minors."""
    a = _matrix(a)
    n = len(a)
    if n == 1:
        return [[Fraction(1)]]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            row.append((-1) ** (i + j) * determinant(minor))
        out.append(row)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


def matvec(a, v) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def identity(d: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]


# -- box spline --------------------------------------------------------------

def uniform_sum_density_at_zero(weights: Sequence) -> Fraction:
    """Density at 0 of sum_i w_i U_i, U_i iid uniform on [-1, 1].

    Truncated-power (box spline) formula over the 2^k sign patterns; zero
    weights are dropped.
    """
    b = [abs(as_fraction(w)) for w in weights]
    b = [w for w in b if w]
    if not b:
        raise ValueError("all weights vanish: the sum is degenerate at 0")
    den = math.lcm(*(w.denominator for w in b))
    # homogeneous of degree -1
    return den * _integer_density_at_zero([int(w * den) for w in b])


def _integer_density_at_zero(ints: list[int]) -> Fraction:
    ints = [abs(v) for v in ints if v]
    k = len(ints)
    if k == 0:
        raise ValueError("all weights vanish: the sum is degenerate at 0")
    if k == 1:
        return Fraction(1, 2 * ints[0])
    total = 0
    for signs in itertools.product((1, -1), repeat=k):
        s = sum(sg * w for sg, w in zip(signs, ints))
        if s > 0:
            total += math.prod(signs) * s ** (k - 1)
    return Fraction(total, 2 ** k * math.prod(ints) * math.factorial(k - 1))


# -- values of the form q * sqrt(r) --------------------------------------------

@dataclass(frozen=True)
class SurdValue:
    """The exact real number coef * sqrt(radicand)."""

    coef: Fraction
    radicand: Fraction = Fraction(1)

    def __float__(self):
        return float(self.coef) * math.sqrt(float(self.radicand))

    def squared(self) -> Fraction:
        return self.coef * self.coef * self.radicand

    def scale(self, factor) -> "SurdValue":
        return SurdValue(self.coef * as_fraction(factor), self.radicand)

    def __str__(self):
        if self.radicand == 1:
            return str(self.coef)
        return f"{self.coef}*sqrt({self.radicand})"


# -- bodies ------------------------------------------------------------------

@dataclass(frozen=True)
class AxisBox:
    half_sides: tuple[Fraction, ...]

    def __post_init__(self):
        sides = tuple(as_fraction(v) for v in self.half_sides)
        if not sides or any(v <= 0 for v in sides):
            raise ValueError("box half-sides must be strictly positive")
        object.__setattr__(self, "half_sides", sides)

    @classmethod
    def cube(cls, d: int, r=1) -> "AxisBox":
        return cls((as_fraction(r),) * d)

    @property
    def d(self) -> int:
        return len(self.half_sides)

    @property
    def volume(self) -> Fraction:
        return 2 ** self.d * math.prod(self.half_sides)


@dataclass(frozen=True)
class Parallelepiped:
    """M = basis @ shape, i.e. {z : |(basis^-1 z)_i| <= c_i}."""

    shape: AxisBox
    basis: tuple[tuple[Fraction, ...], ...]
    _cache: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        basis = tuple(tuple(as_fraction(v) for v in row) for row in self.basis)
        d = self.shape.d
        if len(basis) != d or any(len(r) != d for r in basis):
            raise ValueError("basis must be a d x d matrix matching the box")
        det = determinant(basis)
        if det == 0:
            raise ValueError("singular basis")
        object.__setattr__(self, "basis", basis)
        basis_t = transpose(basis)
        sides = self.shape.half_sides
        # integer form of the weights (A^T p)_i c_i for integer p:
        # weight_i = (sum_k num[i][k] p_k) / den
        den = math.lcm(*((v * c).denominator for row, c in zip(basis_t, sides) for v in row))
        num = [[int(v * c * den) for v in row] for row, c in zip(basis_t, sides)]
        object.__setattr__(self, "_cache", {
            "det": det,
            "basis_t": basis_t,
            "inv": inverse(basis),
            # 2 |det A| prod(c): gauge(p) = 1 / (this * density(A^T p))
            "gauge_scale": 2 * abs(det) * math.prod(sides),
            "weight_num": num,
            "weight_den": den,
        })

    @classmethod
    def from_box(cls, box: AxisBox) -> "Parallelepiped":
        return cls(box, tuple(map(tuple, identity(box.d))))

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def det(self) -> Fraction:
        return self._cache["det"]

    @property
    def volume(self) -> Fraction:
        return abs(self.det) * self.shape.volume

    def transformed(self, a) -> "Parallelepiped":
        """The image a @ M."""
        return Parallelepiped(self.shape, tuple(map(tuple, matmul(_matrix(a), self.basis))))

    def contains(self, z) -> bool:
        u = matvec(self._cache["inv"], [as_fraction(v) for v in z])
        return all(abs(ui) <= c for ui, c in zip(u, self.shape.half_sides))

    def vertices(self):
        for signs in itertools.product((1, -1), repeat=self.d):
            corner = [s * c for s, c in zip(signs, self.shape.half_sides)]
            yield matvec(self.basis, corner)

    def _projected_weights(self, direction) -> list[Fraction]:
        w = matvec(self._cache["basis_t"], direction)
        return [wi * c for wi, c in zip(w, self.shape.half_sides)]


def _direction(e, d: int) -> list[Fraction]:
    e = [as_fraction(v) for v in e]
    if len(e) != d:
        raise ValueError(f"direction must have {d} coordinates")
    if not any(e):
        raise ValueError("zero direction")
    return e


def box_section_volume(box: AxisBox, e, mode: str = "exact", samples: int = 1_000_000,
                       seed: int = 0):
    """Volume of the central section of ``box`` orthogonal to ``e``.

    ``e`` need not be normalised.  Exact mode returns a ``SurdValue``;
    ``"montecarlo"`` returns ``(estimate, standard_error)``.
    """
    e = _direction(e, box.d)
    if mode == "montecarlo":
        est, se, _ = slab_section_volume(box.half_sides, e, samples=samples, seed=seed)
        return est, se
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    dens = uniform_sum_density_at_zero([ei * c for ei, c in zip(e, box.half_sides)])
    return SurdValue(box.volume * dens, sum(ei * ei for ei in e))


def parallelepiped_section_volume(M: Parallelepiped, e) -> SurdValue:
    """vol_e(A @ Box) via (|det A| / |A^T e|) * vol_u(Box), u = A^T e / |A^T e|,
    with the norms cancelling into a single |e|_2 factor."""
    e = _direction(e, M.d)
    dens = uniform_sum_density_at_zero(M._projected_weights(e))
    return SurdValue(abs(M.det) * M.shape.volume * dens, sum(ei * ei for ei in e))


def parallelepiped_section_monte_carlo(M: Parallelepiped, e, samples=1_000_000, seed=0):
    est, se, _ = slab_section_volume(M.shape.half_sides, _direction(e, M.d),
                                     basis=[[float(v) for v in row] for row in M.basis],
                                     samples=samples, seed=seed)
    return est, se


def _as_body(M) -> Parallelepiped:
    return Parallelepiped.from_box(M) if isinstance(M, AxisBox) else M


def wedge_radius(M, e) -> SurdValue:
    """Length of the section-dual set along the direction of ``e``:
    2^(1-d) vol_e(M)."""
    M = _as_body(M)
    return parallelepiped_section_volume(M, e).scale(Fraction(1, 2 ** (M.d - 1)))


def wedge_gauge(M, p) -> Fraction:
    """|p|_2 / wedge_radius(M, p/|p|_2), exact; p lies in M^ iff this is <= 1."""
    M = _as_body(M)
    p = [as_fraction(v) for v in p]
    if not any(p):
        return Fraction(0)
    # gauge is homogeneous of degree 1: clear denominators of p
    lp = math.lcm(*(v.denominator for v in p))
    ip = [int(v * lp) for v in p]
    cache = M._cache
    ints = [sum(a * b for a, b in zip(row, ip)) for row in cache["weight_num"]]
    dens = cache["weight_den"] * _integer_density_at_zero(ints)
    return 1 / (cache["gauge_scale"] * dens * lp)


def in_wedge(M, p) -> bool:
    return wedge_gauge(M, p) <= 1


# -- integer points ----------------------------------------------------------

def integer_points_in_parallelepiped(G, bounds):
    """All z in Z^d with |(G z)_i| <= bounds_i (G invertible, rational).

    The first d-1 coordinates run over the bounding box; the last one over
    the exact interval cut out by the constraints.
    """
    G = _matrix(G)
    bounds = [as_fraction(b) for b in bounds]
    d = len(G)
    ginv = inverse(G)
    box = [math.floor(sum(abs(ginv[k][i]) * bounds[i] for i in range(d))) for k in range(d)]
    last = d - 1
    for head in itertools.product(*(range(-b, b + 1) for b in box[:last])):
        lo, hi = -box[last], box[last]
        ok = True
        for i in range(d):
            partial = sum((G[i][k] * head[k] for k in range(last)), Fraction(0))
            a = G[i][last]
            if a == 0:
                if abs(partial) > bounds[i]:
                    ok = False
                    break
                continue
            # |partial + a t| <= b  <=>  t in [(-b - partial)/a, (b - partial)/a] (sorted)
            t1, t2 = (-bounds[i] - partial) / a, (bounds[i] - partial) / a
            if t1 > t2:
                t1, t2 = t2, t1
            lo, hi = max(lo, math.ceil(t1)), min(hi, math.floor(t2))
            if lo > hi:
                ok = False
                break
        if ok:
            for t in range(lo, hi + 1):
                yield (*head, t)


def wedge_candidate_points(M: Parallelepiped):
    """Integer points of a parallelepiped that provably contains M^.

    The density of a sum is at most the density of any one summand, so
    p in M^ forces |(A^T p)_i| <= |det A| prod(c) / c_i for every i.
    """
    c = M.shape.half_sides
    scale = abs(M.det) * math.prod(c)
    return integer_points_in_parallelepiped(M._cache["basis_t"], [scale / ci for ci in c])


def nonzero_integer_points(M: Parallelepiped):
    for z in integer_points_in_parallelepiped(M._cache["inv"], M.shape.half_sides):
        if any(z):
            yield z


# -- Lemma checks on sampled data --------------------------------------------

@dataclass
class WedgeLemmaReport:
    d: int
    integer_transfer: bool = True      # (i)
    convexity: bool = True             # (ii)
    linear_image: bool = True          # (iii)
    cube_inclusion: bool = True        # (iv)
    wedge_integer_points: int = 0
    body_has_integer_point: Optional[bool] = None
    chords_checked: int = 0
    images_checked: int = 0
    cube_points_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return self.integer_transfer and self.convexity and self.linear_image and self.cube_inclusion

    def as_json(self) -> dict:
        return {
            "d": self.d,
            "i_integer_transfer": self.integer_transfer,
            "ii_convexity": self.convexity,
            "iii_linear_image": self.linear_image,
            "iv_cube_inclusion": self.cube_inclusion,
            "wedge_integer_points": self.wedge_integer_points,
            "body_has_integer_point": self.body_has_integer_point,
            "chords_checked": self.chords_checked,
            "images_checked": self.images_checked,
            "cube_points_checked": self.cube_points_checked,
            "failures": self.failures,
        }


def _random_rational(rng: random.Random, lo, hi, den=64) -> Fraction:
    lo, hi = as_fraction(lo), as_fraction(hi)
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


def _random_direction(rng: random.Random, d: int, spread: int = 12) -> list[Fraction]:
    while True:
        v = [Fraction(rng.randint(-spread, spread)) for _ in range(d)]
        if any(v):
            return v


def random_wedge_point(M: Parallelepiped, rng: random.Random) -> list[Fraction]:
    """A rational point of M^ with uniformly drawn radial fraction."""
    p = _random_direction(rng, M.d)
    s = _random_rational(rng, 0, 1, den=1000)
    g = wedge_gauge(M, p)
    return [v * s / g for v in p]


def random_matrix(rng: random.Random, d: int, spread: int = 2, den: int = 4):
    while True:
        a = [[Fraction(rng.randint(-spread * den, spread * den), den) for _ in range(d)]
             for _ in range(d)]
        if determinant(a) != 0:
            return a


def random_parallelepiped(rng: random.Random, d: int) -> Parallelepiped:
    """Integer basis with entries in [-2, 2], half-sides rescaled so that the
    volume is within a factor 4 of 2^d either way."""
    while True:
        basis = [[Fraction(rng.randint(-2, 2)) for _ in range(d)] for _ in range(d)]
        det = determinant(basis)
        if det != 0:
            break
    sides = [_random_rational(rng, Fraction(1, 4), 2, den=16) for _ in range(d)]
    target = _random_rational(rng, Fraction(1, 4), 4, den=16)
    kappa = (float(target) / (abs(float(det)) * math.prod(float(c) for c in sides))) ** (1 / d)
    k = Fraction(kappa).limit_denominator(64)
    return Parallelepiped(AxisBox(tuple(c * k for c in sides)), tuple(map(tuple, basis)))


def check_wedge_lemma(M, trials: int = 200, seed: int = 0, brute_force: bool = True
                      ) -> WedgeLemmaReport:
    """Exercise the four section-dual properties on M (and the cube of the
    same dimension for the last one).

    (i) full enumeration of integer points of a superset of M^ and of M;
    (ii) exact convexity along sampled chords of M^;
    (iii) (A M)^ = A'(M^) for random A via exact gauge identity, A' the
          cofactor matrix;
    (iv) vertices and sampled points of Delta_d * cube lie in cube^.
    """
    M = _as_body(M)
    d = M.d
    rng = random.Random(f"{seed}:{d}")
    rep = WedgeLemmaReport(d)

    if brute_force:
        if d > 6:
            raise ValueError("brute-force enumeration is limited to d <= 6")
        hits = [p for p in wedge_candidate_points(M) if any(p) and in_wedge(M, p)]
        rep.wedge_integer_points = len(hits)
        if hits:
            rep.body_has_integer_point = next(nonzero_integer_points(M), None) is not None
            if not rep.body_has_integer_point:
                rep.integer_transfer = False
                rep.failures.append({"property": "i", "wedge_point": [str(v) for v in hits[0]]})

    for _ in range(trials):
        p, q = random_wedge_point(M, rng), random_wedge_point(M, rng)
        t = _random_rational(rng, 0, 1, den=97)
        mid = [t * a + (1 - t) * b for a, b in zip(p, q)]
        rep.chords_checked += 1
        if not in_wedge(M, mid):
            rep.convexity = False
            rep.failures.append({"property": "ii", "point": [str(v) for v in mid]})

    for _ in range(max(1, trials // 10)):
        a = random_matrix(rng, d)
        image = M.transformed(a)
        cof = cofactor_matrix(a)
        cof_inv = inverse(cof)
        for _ in range(10):
            if rng.random() < 0.5:
                p = random_wedge_point(image, rng)
                # push some samples across the boundary
                p = [v * _random_rational(rng, Fraction(1, 2), Fraction(3, 2)) for v in p]
            else:
                p = [_random_rational(rng, -3, 3) for _ in range(d)]
                if not any(p):
                    continue
            lhs = wedge_gauge(image, p)
            rhs = wedge_gauge(M, matvec(cof_inv, p))
            rep.images_checked += 1
            if lhs != rhs or (lhs <= 1) != (rhs <= 1):
                rep.linear_image = False
                rep.failures.append({"property": "iii", "point": [str(v) for v in p]})

    cube = Parallelepiped.from_box(AxisBox.cube(d))
    dd = delta(d)
    pts = [[s * dd for s in signs] for signs in itertools.product((1, -1), repeat=d)]
    pts += [[_random_rational(rng, -dd, dd, den=1000) for _ in range(d)] for _ in range(trials)]
    for p in pts:
        if not any(p):
            continue
        rep.cube_points_checked += 1
        if not in_wedge(cube, p):
            rep.cube_inclusion = False
            rep.failures.append({"property": "iv", "point": [str(v) for v in p]})
    return rep


# -- the (lambda, mu) parallelepipeds and their dual tuples ------------------

@dataclass(frozen=True)
class TupleSpec:
    """Positive tuple (lambda_1..lambda_m, mu_1..mu_n).

    With ``power > 1`` the stored entries are the ``power``-th powers of the
    actual coordinates; all relations used here are multiplicative, so the
    computations are identical in that representation.
    """

    lam: tuple[Fraction, ...]
    mu: tuple[Fraction, ...]
    power: int = 1

    def __post_init__(self):
        lam = tuple(as_fraction(v) for v in self.lam)
        mu = tuple(as_fraction(v) for v in self.mu)
        if not lam or not mu or any(v <= 0 for v in lam + mu):
            raise ValueError("tuple entries must be strictly positive")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @property
    def product(self) -> Fraction:
        return math.prod(self.lam) * math.prod(self.mu)

    def raised(self, k: int) -> "TupleSpec":
        return TupleSpec(tuple(v ** k for v in self.lam), tuple(v ** k for v in self.mu),
                         self.power * k)

    def scaled(self, factor) -> "TupleSpec":
        f = as_fraction(factor)
        return TupleSpec(tuple(f * v for v in self.lam), tuple(f * v for v in self.mu), self.power)


def dual_tuple(t: TupleSpec) -> TupleSpec:
    """lambda'_j = P / lambda_j, mu'_i = P / mu_i with P = prod(lambda) prod(mu)."""
    p = t.product
    return TupleSpec(tuple(p / v for v in t.lam), tuple(p / v for v in t.mu), t.power)


def _t_matrices(theta: RationalMatrix):
    """T = [[E_m, 0], [-Theta, E_n]] and T' = [[E_m, tr Theta], [0, E_n]]."""
    m, n, d = theta.m, theta.n, theta.d
    t = identity(d)
    tp = identity(d)
    for i in range(n):
        for j in range(m):
            t[m + i][j] = -theta.entries[i][j]
            tp[j][m + i] = theta.entries[i][j]
    return t, tp


def primal_parallelepiped(theta: RationalMatrix, t: TupleSpec) -> Parallelepiped:
    """M_{lambda,mu} = {z : |z_j| <= lambda_j, |<l_{m+i}, z>| <= mu_i} = T Box."""
    _check_tuple(theta, t)
    tm, _ = _t_matrices(theta)
    return Parallelepiped(AxisBox(t.lam + t.mu), tuple(map(tuple, tm)))


def dual_parallelepiped(theta: RationalMatrix, t: TupleSpec) -> Parallelepiped:
    """hat M_{lambda,mu} = {z : |<l_j, z>| <= lambda_j, |z_{m+i}| <= mu_i} = T' Box."""
    _check_tuple(theta, t)
    _, tp = _t_matrices(theta)
    return Parallelepiped(AxisBox(t.lam + t.mu), tuple(map(tuple, tp)))


def _check_tuple(theta, t):
    if t.power != 1:
        raise ValueError("parallelepipeds need the plain (unpowered) tuple")
    if len(t.lam) != theta.m or len(t.mu) != theta.n:
        raise ValueError("tuple shape does not match the matrix")


@dataclass
class SurfaceBijectionReport:
    precondition: dict
    postcondition: dict
    image: TupleSpec

    @property
    def passed(self) -> bool:
        return all(self.postcondition.values())


class PreconditionError(ValueError):
    pass


def check_surface_bijection(theta: RationalMatrix, t: TupleSpec, budget) -> SurfaceBijectionReport:
    """Exact check that (Delta_d lambda', Delta_d mu') lands on the primal
    surface whenever (lambda, mu) lies on the transposed one.

    All comparisons run on (d-1)-th powers, where every budget quantity is
    rational: prod(lambda) = V^m, prod(mu) = Y^n, max(lambda) <= Delta V^m Y^n
    and min(mu) >= 1 on input; prod = X^m, prod = U^n, min >= 1 and
    max <= Delta V^m Y^n on output.  ``t`` may be given plain or already
    raised to the power d-1.
    """
    m, n, d = theta.m, theta.n, theta.d
    if len(t.lam) != m or len(t.mu) != n:
        raise PreconditionError("tuple shape does not match the matrix")
    k = d - 1
    if t.power == 1:
        t = t.raised(k)
    elif t.power != k:
        raise PreconditionError(f"tuple must be plain or raised to the power {k}")
    pre = {
        "prod_lambda_eq_Vm": math.prod(t.lam) == budget.Vpow_cmp,
        "prod_mu_eq_Yn": math.prod(t.mu) == budget.Ypow_cmp,
        "max_lambda_le_sup": max(t.lam) <= budget.suppow_cmp,
        "min_mu_ge_1": min(t.mu) >= 1,
    }
    if not all(pre.values()):
        raise PreconditionError(f"tuple is not on the transposed surface: {pre}")
    image = dual_tuple(t).scaled(delta(d) ** k)
    post = {
        "prod_lambda_eq_Xm": math.prod(image.lam) == budget.Xpow ** k,
        "prod_mu_eq_Un": math.prod(image.mu) == budget.Upow ** k,
        "min_lambda_ge_1": min(image.lam) >= 1,
        "max_mu_le_sup": max(image.mu) <= budget.suppow_cmp,
    }
    return SurfaceBijectionReport(pre, post, image)


def check_central_inclusion(theta: RationalMatrix, t: TupleSpec) -> bool:
    """M_{Delta lambda', Delta mu'} is contained in (hat M_{lambda, mu})^.

    The section-dual set of a parallelepiped is convex and symmetric, so it
    suffices (and is exact) to test the 2^d vertices.
    """
    dd = delta(theta.d)
    inner = primal_parallelepiped(theta, dual_tuple(t).scaled(dd))
    outer = dual_parallelepiped(theta, t)
    return all(in_wedge(outer, v) for v in inner.vertices())
