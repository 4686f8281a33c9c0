"""Exact experiment drivers for three systems that appear to have the Devron
property: bipartite circle intersection, the 3D Khesin-Soloviev pentagram
map, and bipartite Schubert flips of lines in 3-space.

Every driver reports the observed number of steps until the terminal
condition holds; none of them asserts that the count matches a prediction.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg
from . import rng as rngmod
from .errors import DegenerateConfiguration, DevronError, Indeterminate, ParabolicPencil, Singular
from .exactfield import INFINITY, ProjPoint, normalize, span_rank

# --- circles on the Riemann sphere ------------------------------------------

Point = object  # (Fraction, Fraction) or INFINITY


def point(x, y) -> tuple[Fraction, Fraction]:
    return Fraction(x), Fraction(y)


@dataclass(frozen=True)
class Circle:
    """a(x^2 + y^2) + Dx + Ey + F = 0; a = 0 is a line (through infinity)."""

    coeffs: tuple[int, int, int, int]

    @classmethod
    def from_coefficients(cls, values: Sequence) -> "Circle":
        p = normalize(values)
        return cls(p.coords)

    @property
    def is_line(self) -> bool:
        return self.coeffs[0] == 0

    def contains(self, p: Point) -> bool:
        a, d, e, f = self.coeffs
        if p is INFINITY:
            return a == 0
        x, y = p
        return a * (x * x + y * y) + d * x + e * y + f == 0


def _circle_row(p: Point) -> list:
    if p is INFINITY:
        return [1, 0, 0, 0]
    x, y = p
    return [x * x + y * y, x, y, 1]


def circle_through(p: Point, q: Point, r: Point) -> Circle:
    kernel = linalg.nullspace([_circle_row(p), _circle_row(q), _circle_row(r)], 4)
    if len(kernel) != 1:
        raise Indeterminate("three points do not determine a unique circle")
    return Circle.from_coefficients(kernel[0])


def _line_meet(c1: Circle, c2: Circle) -> Point:
    _, d1, e1, f1 = c1.coeffs
    _, d2, e2, f2 = c2.coeffs
    det = d1 * e2 - d2 * e1
    if det == 0:
        return INFINITY
    return Fraction(e1 * f2 - e2 * f1, det), Fraction(d2 * f1 - d1 * f2, det)


def second_intersection(c1: Circle, c2: Circle, known: Point) -> Point:
    """The other common point of two circles through ``known`` (``known``
    itself when they are tangent there)."""
    if c1 == c2:
        raise Indeterminate("the two circles coincide")
    if known is INFINITY:
        return _line_meet(c1, c2)
    if c1.is_line and c2.is_line:
        return INFINITY
    a1, a2 = c1.coeffs[0], c2.coeffs[0]
    radical = [a2 * u - a1 * v for u, v in zip(c1.coeffs, c2.coeffs)]
    _, d, e, _ = radical
    vx, vy = Fraction(-e), Fraction(d)
    a, cd, ce, _ = c1.coeffs if a1 else c2.coeffs
    x, y = known
    t = -(2 * a * (x * vx + y * vy) + cd * vx + ce * vy) / (a * (vx * vx + vy * vy))
    return x + t * vx, y + t * vy


def circle_second_intersection(a: Point, b: Point, c: Point, d: Point, e: Point) -> Point:
    """C' for five consecutive vertices: circles (A,B,C) and (C,D,E) meet at C and C'."""
    return second_intersection(circle_through(a, b, c), circle_through(c, d, e), c)


def circle_flips(poly: Sequence[Point], parity: int) -> list[Point]:
    """C' at each 1-based vertex label of the given parity, all from the same polygon."""
    m = len(poly)
    out = []
    for i in range(1, m + 1):
        if i % 2 == parity:
            j = i - 1
            out.append(circle_second_intersection(*(poly[(j + s) % m] for s in (-2, -1, 0, 1, 2))))
    return out


def circle_step(poly: Sequence[Point], parity: int) -> tuple:
    """Replace every vertex of the given parity by its circle intersection point."""
    flips = iter(circle_flips(poly, parity))
    return tuple(next(flips) if i % 2 == parity else p for i, p in enumerate(poly, start=1))


def flips_concur(poly: Sequence[Point], parity: int) -> bool:
    flips = circle_flips(poly, parity)
    return all(f == flips[0] for f in flips)


def _point_on_circle_through(rng: random.Random, circle: Circle, anchor: Point) -> Point:
    """Second intersection of a random line through ``anchor`` with the circle."""
    while True:
        dx, dy = rngmod.rational(rng), rngmod.rational(rng)
        if (dx, dy) == (0, 0):
            continue
        x, y = anchor
        line = Circle.from_coefficients([0, dy, -dx, dx * y - dy * x])
        if line == circle:
            continue
        return second_intersection(circle, line, anchor)


def circle_start_polygon(n: int, rng: random.Random) -> tuple:
    """A 2n-gon whose odd-vertex circle flips all land on one common point X."""
    x = (rngmod.rational(rng), rngmod.rational(rng))
    odd = [(rngmod.rational(rng), rngmod.rational(rng)) for _ in range(n)]
    poly: list = []
    for k in range(n):
        nxt = odd[(k + 1) % n]
        poly.append(odd[k])
        poly.append(_point_on_circle_through(rng, circle_through(odd[k], nxt, x), x))
    return tuple(poly)


# --- the 3D Khesin-Soloviev map ---------------------------------------------


def plane_through(p: ProjPoint, q: ProjPoint, r: ProjPoint) -> tuple:
    kernel = linalg.nullspace([list(p.coords), list(q.coords), list(r.coords)], 4)
    if len(kernel) != 1:
        raise Singular("three points do not span a plane", [])
    return tuple(kernel[0])


def line_plane_meet(p: ProjPoint, q: ProjPoint, plane: Sequence) -> ProjPoint:
    hp = sum(h * x for h, x in zip(plane, p.coords))
    hq = sum(h * x for h, x in zip(plane, q.coords))
    if hp == 0 and hq == 0:
        raise Singular("line lies in the plane", [])
    if p == q:
        raise Singular("line through a repeated point", [])
    return normalize([hq * x - hp * y for x, y in zip(p.coords, q.coords)])


def ks3d_step(poly: Sequence[ProjPoint]) -> tuple:
    """Vertex i becomes line(A_{i-1}, A_{i+1}) meet plane(A_{i-2}, A_i, A_{i+2})."""
    m = len(poly)
    out = []
    for i in range(m):
        try:
            plane = plane_through(poly[(i - 2) % m], poly[i], poly[(i + 2) % m])
            out.append(line_plane_meet(poly[(i - 1) % m], poly[(i + 1) % m], plane))
        except Singular as exc:
            raise Singular(str(exc), [i + 1]) from exc
    return tuple(out)


def _random_space_point(rng: random.Random) -> ProjPoint:
    return normalize([rngmod.rational(rng) for _ in range(3)] + [1])


def ks3d_start_polygon(n: int, rng: random.Random) -> tuple[tuple, ProjPoint, ProjPoint]:
    """Closed 2n-gon whose face (A_{i-1}, A_i, A_{i+1}) contains P for odd i and Q for even i."""
    p, q = _random_space_point(rng), _random_space_point(rng)
    anchor = {1: p, 0: q}
    pts = [_random_space_point(rng), _random_space_point(rng)]
    for label in range(3, 2 * n):
        # face at label - 1 is (A_{label-2}, A_{label-1}, A_label)
        base = (pts[-2], pts[-1], anchor[(label - 1) % 2])
        coeffs = [rngmod.rational(rng, nonzero=True) for _ in range(3)]
        pts.append(normalize([sum(c * v.coords[t] for c, v in zip(coeffs, base)) for t in range(4)]))
    m = 2 * n
    planes = [
        plane_through(pts[-2], pts[-1], anchor[(m - 1) % 2]),
        plane_through(pts[-1], pts[0], anchor[m % 2]),
        plane_through(pts[0], pts[1], anchor[1]),
    ]
    kernel = linalg.nullspace([list(h) for h in planes], 4)
    if len(kernel) != 1:
        raise Singular("closing planes do not meet in a point", [])
    pts.append(normalize(kernel[0]))
    return tuple(pts), p, q


def faces_alternate(poly: Sequence[ProjPoint], p: ProjPoint, q: ProjPoint) -> bool:
    m = len(poly)
    for i in range(1, m + 1):
        face = [poly[(i - 2) % m], poly[(i - 1) % m], poly[i % m]]
        if span_rank(face + [p if i % 2 else q]) > 3:
            return False
    return True


def parities_coplanar(poly: Sequence[ProjPoint]) -> bool:
    return span_rank(list(poly[0::2])) <= 3 and span_rank(list(poly[1::2])) <= 3


# --- Schubert flips -----------------------------------------------------------

_PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


def omega(l: Sequence, m: Sequence):
    """Symmetric bilinear form of the Klein quadric; lines meet iff omega = 0."""
    return l[0] * m[3] + l[1] * m[4] + l[2] * m[5] + l[3] * m[0] + l[4] * m[1] + l[5] * m[2]


@dataclass(frozen=True)
class SpaceLine:
    coords: tuple[int, ...]

    def __post_init__(self):
        if omega(self.coords, self.coords) != 0:
            raise ValueError("coordinates are not on the Klein quadric")

    @classmethod
    def from_plucker(cls, values: Sequence) -> "SpaceLine":
        return cls(normalize(values).coords)

    @classmethod
    def through(cls, p: ProjPoint, q: ProjPoint) -> "SpaceLine":
        if p == q:
            raise DegenerateConfiguration("a line needs two distinct points")
        return cls.from_plucker([p[i] * q[j] - p[j] * q[i] for i, j in _PAIRS])

    def meets(self, other: "SpaceLine") -> bool:
        return omega(self.coords, other.coords) == 0


def schubert_flip(line: SpaceLine, n1: SpaceLine, n2: SpaceLine, n3: SpaceLine, n4: SpaceLine) -> SpaceLine:
    """The other transversal of four lines that all meet ``line``."""
    rows = [[c for c in (m.coords[3], m.coords[4], m.coords[5], m.coords[0], m.coords[1], m.coords[2])]
            for m in (n1, n2, n3, n4)]
    kernel = linalg.nullspace(rows, 6)
    if len(kernel) != 2:
        raise DegenerateConfiguration("incidence hyperplanes are dependent")
    l = line.coords
    q = next(v for v in kernel if linalg.rank([list(l), list(v)]) == 2)
    wqq, wlq = omega(q, q), omega(l, q)
    p = [wqq * a - 2 * wlq * b for a, b in zip(l, q)]
    if all(x == 0 for x in p):
        raise DegenerateConfiguration("every line of the pencil is a transversal")
    result = SpaceLine.from_plucker(p)
    if result == line:
        raise ParabolicPencil("the pencil is tangent to the Klein quadric at the line")
    return result


def schubert_step(lines: Sequence[SpaceLine], parity: int) -> tuple:
    """Flip every line with 1-based label of the given parity using L_{i+-1}, L_{i+-3}."""
    m = len(lines)
    out = list(lines)
    for i in range(1, m + 1):
        if i % 2 == parity:
            j = i - 1
            nb = [lines[(j + s) % m] for s in (-3, -1, 1, 3)]
            out[j] = schubert_flip(lines[j], *nb)
    return tuple(out)


def adjacency_holds(lines: Sequence[SpaceLine]) -> bool:
    m = len(lines)
    return all(lines[i].meets(lines[(i + s) % m]) for i in range(m) for s in (1, 3))


def half_equal(lines: Sequence) -> int | None:
    """Parity (0 = even labels) whose lines all coincide, if any."""
    for parity in (0, 1):
        half = [l for i, l in enumerate(lines, start=1) if i % 2 == parity]
        if all(x == half[0] for x in half):
            return parity
    return None


def schubert_start(n: int, rng: random.Random) -> tuple:
    """Even lines equal to a common line K; odd lines random lines meeting K."""
    a, b = _random_space_point(rng), _random_space_point(rng)
    common = SpaceLine.through(a, b)
    lines = []
    for i in range(1, 2 * n + 1):
        if i % 2 == 0:
            lines.append(common)
            continue
        s, t = rngmod.rational(rng, nonzero=True), rngmod.rational(rng, nonzero=True)
        on_k = normalize([s * x + t * y for x, y in zip(a.coords, b.coords)])
        lines.append(SpaceLine.through(on_k, _random_space_point(rng)))
    return tuple(lines)


# --- experiment reports -------------------------------------------------------


@dataclass
class ConjectureTrial:
    trial_index: int
    observed: int | None = None
    discarded: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "observed": self.observed,
            "discarded": self.discarded,
            "reason": self.reason,
        }


@dataclass
class ConjectureReport:
    system: str
    parameters: dict
    seed: int
    conjectured: int
    trials: list[ConjectureTrial] = field(default_factory=list)

    def observed(self) -> list[int]:
        return [t.observed for t in self.trials if not t.discarded and t.observed is not None]

    def kept(self) -> int:
        return sum(not t.discarded for t in self.trials)

    def summary(self) -> dict:
        w = self.observed()
        return {
            "min": min(w) if w else None,
            "max": max(w) if w else None,
            "all_equal": bool(w) and len(set(w)) == 1,
            "kept": self.kept(),
            "discarded": len(self.trials) - self.kept(),
        }

    @property
    def verdict(self) -> str:
        w = self.observed()
        if not w or len(w) < self.kept():
            return "observed: terminal condition not always reached"
        if all(x == self.conjectured for x in w):
            return "observed: matches conjectured count"
        return "observed: differs from conjectured count"

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "parameters": self.parameters,
            "seed": self.seed,
            "conjectured": self.conjectured,
            "trials": [t.to_dict() for t in self.trials],
            "summary": self.summary(),
            "verdict": self.verdict,
        }


_DEGENERATE = (DevronError, ZeroDivisionError, ArithmeticError)


def _run(system: str, n: int, trials: int, seed: int, conjectured: int,
         one_trial: Callable[[random.Random], int | None], max_steps: int) -> ConjectureReport:
    report = ConjectureReport(system, {"n": n, "max_steps": max_steps}, seed, conjectured)
    for index, s in enumerate(rngmod.trial_seeds(seed, trials)):
        trial = ConjectureTrial(index)
        try:
            trial.observed = one_trial(rngmod.make_rng(s))
            if trial.observed is None:
                trial.reason = f"terminal condition not reached within {max_steps} steps"
        except _DEGENERATE as exc:
            trial.discarded = True
            trial.reason = f"{type(exc).__name__}: {exc}"
        report.trials.append(trial)
    return report


def conj_circle_experiment(n: int, trials: int, seed: int, max_steps: int | None = None) -> ConjectureReport:
    if n < 3:
        raise ValueError("n >= 3 required")
    max_steps = 2 * n + 4 if max_steps is None else max_steps

    def one(rng):
        poly = circle_start_polygon(n, rng)
        if not flips_concur(poly, 1):
            raise DegenerateConfiguration("start polygon does not have concurrent odd flips")
        parity = 0  # the other half moves first
        for k in range(max_steps + 1):
            if flips_concur(poly, parity):
                return k
            poly = circle_step(poly, parity)
            parity = 1 - parity
        return None

    return _run("circle", n, trials, seed, 2 * n - 6, one, max_steps)


def conj_ks3d_experiment(n: int, trials: int, seed: int, max_steps: int | None = None) -> ConjectureReport:
    if n < 4:
        raise ValueError("n >= 4 required")
    max_steps = 2 * n if max_steps is None else max_steps

    def one(rng):
        poly, p, q = ks3d_start_polygon(n, rng)
        if not faces_alternate(poly, p, q):
            raise DegenerateConfiguration("generator broke the face condition")
        for k in range(max_steps + 1):
            if parities_coplanar(poly):
                return k
            poly = ks3d_step(poly)
        return None

    return _run("ks3d", n, trials, seed, n - 3, one, max_steps)


def conj_schubert_experiment(n: int, trials: int, seed: int, max_steps: int | None = None) -> ConjectureReport:
    if n < 6:
        raise ValueError("n >= 6 required")
    max_steps = 2 * n + 2 if max_steps is None else max_steps

    def one(rng):
        lines = schubert_start(n, rng)
        if not adjacency_holds(lines):
            raise DegenerateConfiguration("start configuration breaks adjacency")
        parity = 0
        for k in range(1, max_steps + 1):
            lines = schubert_step(lines, parity)
            parity = 1 - parity
            if half_equal(lines) is not None:
                return k
        return None

    return _run("schubert", n, trials, seed, 2 * n - 7, one, max_steps)
