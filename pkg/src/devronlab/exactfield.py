"""Exact scalars and projective geometry.

Rationals are :class:`fractions.Fraction`. Gaussian rationals are a small
immutable pair type. Projective points and hyperplanes are stored as
primitive integer vectors whose first nonzero coordinate is positive, so
equality of projective objects is plain tuple equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from . import linalg
from .errors import DegenerateIncidence, Indeterminate, InvalidPoint, NotCollinear

Rational = Fraction


class ExtendedInfinity:
    """The point at infinity of the extended rational line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"


INFINITY = ExtendedInfinity()
ExtendedRational = Union[Fraction, ExtendedInfinity]


class GaussianRational:
    """Element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        return NotImplemented

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        """Squared absolute value re² + im²."""
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        p = self * o.conj()
        return GaussianRational(p.re / n, p.im / n)

    def __rtruediv__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = GaussianRational.coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self) -> str:
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self) -> str:
        return format_scalar(self)


I = GaussianRational(0, 1)


def conj(x):
    """Complex conjugate; the identity on rationals."""
    return x.conj() if isinstance(x, GaussianRational) else x


def format_scalar(x) -> str:
    """Exact text form: "p/q" for rationals, "p/q+r/si" for Gaussian rationals."""
    if isinstance(x, ExtendedInfinity):
        return "inf"
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return format_scalar(x.re)
        sign = "+" if x.im >= 0 else "-"
        return f"{format_scalar(x.re)}{sign}{format_scalar(abs(x.im))}i"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(text: str):
    text = text.strip()
    if text == "inf":
        return INFINITY
    if text.endswith("i"):
        body = text[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut <= 0:
            return GaussianRational(0, Fraction(body or "1"))
        return GaussianRational(Fraction(body[:cut]), Fraction(body[cut:]))
    return Fraction(text)


# --- projective points and hyperplanes -------------------------------------


def _primitive(raw: Iterable) -> tuple[int, ...]:
    values = [Fraction(x) for x in raw]
    if all(v == 0 for v in values):
        raise InvalidPoint("all homogeneous coordinates are zero")
    den = reduce(lcm, (v.denominator for v in values), 1)
    ints = [int(v * den) for v in values]
    g = reduce(gcd, ints, 0)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


@dataclass(frozen=True)
class ProjHyperplane:
    coords: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self):
        return iter(self.coords)


def normalize(raw: Iterable) -> ProjPoint:
    """Canonical representative of the projective point with coordinates ``raw``."""
    return ProjPoint(_primitive(raw))


def normalize_hyperplane(raw: Iterable) -> ProjHyperplane:
    return ProjHyperplane(_primitive(raw))


def affine_point(*xs) -> ProjPoint:
    """The point (x_1 : ... : x_d : 1)."""
    return normalize(list(xs) + [1])


def point_at_infinity(*direction) -> ProjPoint:
    return normalize(list(direction) + [0])


def _cross(u: Sequence, v: Sequence) -> list:
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def join(p: ProjPoint, q: ProjPoint) -> ProjHyperplane:
    """The line through two distinct points of the projective plane."""
    if p.dim != 2 or q.dim != 2:
        raise ValueError("join via cross product needs points of the projective plane")
    if p == q:
        raise DegenerateIncidence("join of a point with itself")
    return normalize_hyperplane(_cross(p.coords, q.coords))


def meet(l: ProjHyperplane, m: ProjHyperplane) -> ProjPoint:
    """The intersection point of two distinct lines of the projective plane."""
    if l.dim != 2 or m.dim != 2:
        raise ValueError("meet via cross product needs lines of the projective plane")
    if l == m:
        raise DegenerateIncidence("meet of a line with itself")
    return normalize(_cross(l.coords, m.coords))


def incidence(kind: str, a, b):
    if kind == "join":
        return join(a, b)
    if kind == "meet":
        return meet(a, b)
    raise ValueError(f"unknown incidence kind {kind!r}")


def lies_on(p: ProjPoint, h: ProjHyperplane) -> bool:
    return sum(x * y for x, y in zip(p.coords, h.coords)) == 0


def span_rank(points: Sequence[ProjPoint]) -> int:
    return linalg.rank([list(p.coords) for p in points])


def collinear(points: Sequence[ProjPoint]) -> bool:
    return span_rank(points) <= 2


def coplanar(points: Sequence[ProjPoint]) -> bool:
    return span_rank(points) <= 3


def combine(p: Sequence, q: Sequence, alpha, beta) -> ProjPoint:
    return normalize([alpha * x + beta * y for x, y in zip(p, q)])


def meet_lines(p1: ProjPoint, p2: ProjPoint, q1: ProjPoint, q2: ProjPoint) -> ProjPoint:
    """Intersection of line(p1,p2) and line(q1,q2) in projective d-space.

    The lines must be distinct and coplanar; otherwise DegenerateIncidence.
    """
    if p1 == p2 or q1 == q2:
        raise DegenerateIncidence("line through a repeated point")
    cols = [p1.coords, p2.coords, q1.coords, q2.coords]
    rows = [[c[r] for c in cols] for r in range(len(p1.coords))]
    kernel = linalg.nullspace(rows, 4)
    if len(kernel) != 1:
        raise DegenerateIncidence(
            "lines coincide" if len(kernel) > 1 else "lines do not meet"
        )
    alpha, beta = kernel[0][0], kernel[0][1]
    return combine(p1.coords, p2.coords, alpha, beta)


def apply(matrix: Sequence[Sequence], p: ProjPoint) -> ProjPoint:
    return normalize(linalg.matvec(matrix, p.coords))


# --- points on a line: parameters, cross ratios, six-brackets -------------


def _basis(points: Sequence[ProjPoint]) -> tuple[ProjPoint, ProjPoint]:
    first = points[0]
    for p in points[1:]:
        if p != first:
            return first, p
    raise Indeterminate("all points coincide; the line is not determined")


def line_parameters(points: Sequence[ProjPoint], basis=None) -> list[tuple[Fraction, Fraction]]:
    """Homogeneous coordinates (alpha, beta) of each point, x = alpha*p + beta*q,
    where p, q are the first two distinct points (or ``basis``)."""
    p, q = basis if basis is not None else _basis(points)
    # pick two coordinates where p and q are independent
    size = len(p.coords)
    pair = None
    for r in range(size):
        for s in range(r + 1, size):
            if p[r] * q[s] - p[s] * q[r] != 0:
                pair = (r, s)
                break
        if pair:
            break
    r, s = pair
    d = Fraction(p[r] * q[s] - p[s] * q[r])
    out = []
    for x in points:
        alpha = (x[r] * q[s] - x[s] * q[r]) / d
        beta = (p[r] * x[s] - p[s] * x[r]) / d
        if any(alpha * p[t] + beta * q[t] != x[t] for t in range(size)):
            raise NotCollinear("points are not collinear")
        out.append((alpha, beta))
    return out


def _bracket(x, y) -> Fraction:
    return x[0] * y[1] - x[1] * y[0]


def cross_ratio(a: ProjPoint, b: ProjPoint, c: ProjPoint, d: ProjPoint) -> ExtendedRational:
    """(a-b)(c-d)/((a-c)(b-d)) for four collinear points.

    Returns INFINITY when only the denominator vanishes.
    """
    pa, pb, pc, pd = line_parameters([a, b, c, d])
    num = _bracket(pa, pb) * _bracket(pc, pd)
    den = _bracket(pa, pc) * _bracket(pb, pd)
    if den == 0:
        if num == 0:
            raise Indeterminate("cross ratio 0/0")
        return INFINITY
    return num / den


def six_bracket(a, b, c, d, e, f) -> ExtendedRational:
    """(a-b)(c-d)(e-f)/((b-c)(d-e)(f-a)) for six collinear points."""
    pa, pb, pc, pd, pe, pf = line_parameters([a, b, c, d, e, f])
    num = _bracket(pa, pb) * _bracket(pc, pd) * _bracket(pe, pf)
    den = _bracket(pb, pc) * _bracket(pd, pe) * _bracket(pf, pa)
    if den == 0:
        if num == 0:
            raise Indeterminate("six-bracket 0/0")
        return INFINITY
    return num / den


def solve_six_bracket_last(a, b, c, d, e, target) -> ProjPoint:
    """The unique f on the line with [a,b,c,d,e,f] = target."""
    points = [a, b, c, d, e]
    basis = _basis(points)
    pa, pb, pc, pd, pe = line_parameters(points, basis)
    k1 = _bracket(pa, pb) * _bracket(pc, pd)
    k2 = _bracket(pb, pc) * _bracket(pd, pe)
    t = Fraction(target)
    alpha = k1 * pe[0] + t * k2 * pa[0]
    beta = k1 * pe[1] + t * k2 * pa[1]
    if alpha == 0 and beta == 0:
        raise Indeterminate("six-bracket equation has no unique solution")
    f = combine(basis[0].coords, basis[1].coords, alpha, beta)
    value = six_bracket(a, b, c, d, e, f)
    if value != t:
        raise Indeterminate("six-bracket equation has no solution")
    return f
