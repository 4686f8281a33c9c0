"""Pentagram maps on twisted polygons: T (plane), T_d (corrugated polygons in
projective d-space) and the lower map T_1 on pairs of polygons in the line.

Vertices are stored 0-based: A_0 .. A_{n-1} with A_{i+n} = phi(A_i).
One forward step sends A to the polygon B with

    B_m = meet(line(A_{m-1}, A_{m-1+d}), line(A_m, A_{m+d}))

(the "left" labelling); the backward step is
A_m = meet(line(B_{m-d}, B_{m-d+1}), line(B_m, B_{m+1})).

Geometric y-coordinates live on the grid P_{i,k}: for d even
P_{2i,0} = A_i, for d odd P_{2i+1,0} = A_i, and layers k != 0 are built by
the meet/join recurrences. y_{i,k} is minus the cross ratio of
P_{i-d,k}, P_{i-1,k+1}, P_{i+1,k+1}, P_{i+d,k}.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import linalg
from . import rng as rngmod
from .errors import DegenerateIncidence, Indeterminate, NotCorrugated, Singular
from .exactfield import (
    INFINITY,
    ProjPoint,
    apply,
    cross_ratio,
    meet_lines,
    normalize,
    solve_six_bracket_last,
    span_rank,
)
from .lattice import Lattice2D, PeriodicMatrix, canonicalize, companion
from .ysystem import YState, step_G

FWD, BWD = "fwd", "bwd"

Matrix = tuple  # tuple of row tuples of Fractions


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


@lru_cache(maxsize=4096)
def matrix_power(m: Matrix, q: int) -> Matrix:
    if q == 0:
        return as_matrix(linalg.identity(len(m)))
    if q < 0:
        return matrix_power(as_matrix(linalg.inverse(m)), -q)
    half = matrix_power(m, q // 2)
    out = as_matrix(linalg.matmul(half, half))
    if q % 2:
        out = as_matrix(linalg.matmul(out, m))
    return out


def _periodic_get(window: Sequence[ProjPoint], start: int, stride: int, monodromy: Matrix, i: int) -> ProjPoint:
    period = stride * len(window)
    q, r = divmod(i - start, period)
    if r % stride:
        raise IndexError(f"index {i} has the wrong parity for this layer")
    p = window[r // stride]
    return p if q == 0 else apply(matrix_power(monodromy, q), p)


@dataclass(frozen=True)
class TwistedPolygon:
    vertices: tuple[ProjPoint, ...]
    monodromy: Matrix

    def __post_init__(self):
        d = self.vertices[0].dim
        if any(v.dim != d for v in self.vertices):
            raise ValueError("vertices must share one ambient dimension")
        if len(self.monodromy) != d + 1:
            raise ValueError("monodromy size must be d + 1")

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        return self.vertices[0].dim

    def vertex(self, i: int) -> ProjPoint:
        return _periodic_get(self.vertices, 0, 1, self.monodromy, i)

    def transformed(self, h: Sequence[Sequence]) -> "TwistedPolygon":
        """Image under the projective map h, with conjugated monodromy."""
        h = as_matrix(h)
        hinv = linalg.inverse(h)
        mono = as_matrix(linalg.matmul(linalg.matmul(h, self.monodromy), hinv))
        return TwistedPolygon(tuple(apply(h, v) for v in self.vertices), mono)


def in_general_position(a: TwistedPolygon, d: int | None = None) -> bool:
    """No three of A_i, A_{i+1}, A_{i+d}, A_{i+d+1} collinear, for every i."""
    d = a.dim if d is None else d
    for i in range(a.n):
        quad = [a.vertex(i), a.vertex(i + 1), a.vertex(i + d), a.vertex(i + d + 1)]
        for skip in range(4):
            if span_rank([p for t, p in enumerate(quad) if t != skip]) < 3:
                return False
    return True


def is_corrugated(a: TwistedPolygon) -> bool:
    d = a.dim
    return all(
        span_rank([a.vertex(i), a.vertex(i + 1), a.vertex(i + d), a.vertex(i + d + 1)]) <= 3
        for i in range(a.n)
    )


def _meet(p1, p2, q1, q2, where) -> ProjPoint:
    try:
        return meet_lines(p1, p2, q1, q2)
    except DegenerateIncidence as exc:
        raise Singular(f"degenerate meet: {exc}", [where]) from exc


def pentagram_step(a: TwistedPolygon, direction: str = FWD, strict: bool = True) -> TwistedPolygon:
    """One step of T_d (fwd) or its inverse (bwd), d = dimension of the polygon.

    With ``strict`` an image that violates the general-position guard raises
    Singular; otherwise degenerate images (e.g. a collapsed square) are returned.
    """
    d = a.dim
    if d > 2 and not is_corrugated(a):
        raise NotCorrugated("T_d needs a corrugated polygon")
    v = a.vertex
    if direction == FWD:
        new = [_meet(v(m - 1), v(m - 1 + d), v(m), v(m + d), m) for m in range(a.n)]
    else:
        new = [_meet(v(m - d), v(m - d + 1), v(m), v(m + 1), m) for m in range(a.n)]
    out = TwistedPolygon(tuple(new), a.monodromy)
    if strict and not in_general_position(out):
        raise Singular("image polygon is not in general position", [direction])
    return out


# --- the lower map ----------------------------------------------------------


@dataclass(frozen=True)
class LinePair:
    """Two twisted n-gons in the projective line sharing a monodromy."""

    a: tuple[ProjPoint, ...]
    b: tuple[ProjPoint, ...]
    monodromy: Matrix

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("both polygons need n vertices")
        if any(p.dim != 1 for p in self.a + self.b):
            raise ValueError("points must lie in the projective line")

    @property
    def n(self) -> int:
        return len(self.a)

    def a_at(self, i: int) -> ProjPoint:
        return _periodic_get(self.a, 0, 1, self.monodromy, i)

    def b_at(self, i: int) -> ProjPoint:
        return _periodic_get(self.b, 0, 1, self.monodromy, i)


def _bracket_solve(prev, cur, old, nxt, where) -> ProjPoint:
    try:
        return solve_six_bracket_last(prev, cur, old, nxt, cur, -1)
    except (Indeterminate, ZeroDivisionError) as exc:
        raise Singular(f"six-bracket unsolvable: {exc}", [where]) from exc


def lower_step(p: LinePair, direction: str = FWD) -> LinePair:
    """T_1(A, B) = (B, C) with [B_{i-1}, B_i, A_i, B_{i+1}, B_i, C_i] = -1; bwd inverts.

    Equivalently C_i is the image of A_i under the involution of the line
    fixing B_i and swapping B_{i-1}, B_{i+1}.
    """
    b = p.b_at if direction == FWD else p.a_at
    old = p.a_at if direction == FWD else p.b_at
    new = tuple(_bracket_solve(b(i - 1), b(i), old(i), b(i + 1), i) for i in range(p.n))
    if direction == FWD:
        return LinePair(p.b, new, p.monodromy)
    return LinePair(new, p.a, p.monodromy)


# --- grids and y-coordinates ------------------------------------------------


class _Grid:
    """Lazily built grid P_{i,k}; each layer stores one period of 2n indices."""

    def __init__(self, n: int, monodromy: Matrix):
        self.n = n
        self.monodromy = monodromy
        self.layers: dict[int, list[ProjPoint]] = {}

    def start(self, k: int) -> int:
        raise NotImplementedError

    def indices(self, k: int) -> range:
        s = self.start(k)
        return range(s, s + 2 * self.n, 2)

    def point(self, i: int, k: int) -> ProjPoint:
        if k not in self.layers:
            self._build(k)
        return _periodic_get(self.layers[k], self.start(k), 2, self.monodromy, i)

    def _build(self, k: int) -> None:
        if k > 0:
            self.point(0 if self.start(k - 1) == 0 else 1, k - 1)
        else:
            self.point(0 if self.start(k + 1) == 0 else 1, k + 1)
        self.layers[k] = [self._compute(i, k) for i in self.indices(k)]

    def y(self, i: int, k: int):
        raise NotImplementedError

    def y_indices(self, k: int) -> range:
        raise NotImplementedError


class PolygonGrid(_Grid):
    def __init__(self, a: TwistedPolygon):
        super().__init__(a.n, a.monodromy)
        self.d = a.dim
        self.layers[0] = list(a.vertices)

    def start(self, k: int) -> int:
        return k % 2 if self.d % 2 == 0 else 1

    def _compute(self, i: int, k: int) -> ProjPoint:
        d, p = self.d, self.point
        if k > 0:
            args = (p(i - d - 1, k - 1), p(i + d - 1, k - 1), p(i - d + 1, k - 1), p(i + d + 1, k - 1))
        else:
            args = (p(i - d - 1, k + 1), p(i - d + 1, k + 1), p(i + d - 1, k + 1), p(i + d + 1, k + 1))
        return _meet(*args, (i, k))

    def y(self, i: int, k: int):
        d, p = self.d, self.point
        try:
            value = cross_ratio(p(i - d, k), p(i - 1, k + 1), p(i + 1, k + 1), p(i + d, k))
        except Indeterminate as exc:
            raise Singular(f"degenerate cross ratio at {(i, k)}", [(i, k)]) from exc
        return _finite(value, i, k)

    def y_indices(self, k: int) -> range:
        if self.d % 2 == 0:
            s = (k % 2)
            return range(s, s + 2 * self.n, 2)
        return range(0, 2 * self.n, 2)


class LowerGrid(_Grid):
    """P_{2i+1,-1} = A_i and P_{2i+1,0} = B_i; layers advance by the six-bracket rule."""

    d = 1

    def __init__(self, p: LinePair):
        super().__init__(p.n, p.monodromy)
        self.layers[-1] = list(p.a)
        self.layers[0] = list(p.b)

    def start(self, k: int) -> int:
        return 1

    def _build(self, k: int) -> None:
        if k > 0 and k - 2 not in self.layers:
            self._build(k - 1)
        if k < -1 and k + 2 not in self.layers:
            self._build(k + 1)
        self.layers[k] = [self._compute(i, k) for i in self.indices(k)]

    def _compute(self, i: int, k: int) -> ProjPoint:
        p = self.point
        if k > 0:
            return _bracket_solve(p(i - 2, k - 1), p(i, k - 1), p(i, k - 2), p(i + 2, k - 1), (i, k))
        return _bracket_solve(p(i - 2, k + 1), p(i, k + 1), p(i, k + 2), p(i + 2, k + 1), (i, k))

    def y(self, i: int, k: int):
        p = self.point
        try:
            value = cross_ratio(p(i - 1, k), p(i - 1, k + 1), p(i + 1, k + 1), p(i + 1, k))
        except Indeterminate as exc:
            raise Singular(f"degenerate cross ratio at {(i, k)}", [(i, k)]) from exc
        return _finite(value, i, k)

    def y_indices(self, k: int) -> range:
        return range(0, 2 * self.n, 2)


def _finite(value, i, k):
    if value is INFINITY:
        raise Singular(f"infinite cross ratio at {(i, k)}", [(i, k)])
    return -value


def grid_for(obj) -> _Grid:
    return LowerGrid(obj) if isinstance(obj, LinePair) else PolygonGrid(obj)


@dataclass(frozen=True)
class YCoordinates:
    """y_{i,k} on one period of indices for each layer k, and the u_i built from
    layers -1 and 0 (u_i = 1/y_{i,-1} or y_{i,0})."""

    d: int
    n: int
    values: dict

    def y(self, i: int, k: int):
        return self.values[i % (2 * self.n), k]

    def u(self) -> list:
        out = []
        for (i, k), v in sorted(self.values.items()):
            if k == -1:
                out.append(1 / v)
            elif k == 0:
                out.append(v)
        return out


def y_coords(obj, depth: int = 0, lowest: int = -1) -> YCoordinates:
    """Geometric y-grid for layers lowest..depth of a polygon or line pair."""
    grid = grid_for(obj)
    values = {}
    for k in range(lowest, depth + 1):
        for i in grid.y_indices(k):
            values[i, k] = grid.y(i, k)
    return YCoordinates(grid.d, grid.n, values)


def u_product(obj):
    out = Fraction(1)
    for v in y_coords(obj, 0).u():
        out *= v
    return out


def recurrence_holds(yc: YCoordinates, k: int) -> bool:
    """y_{i,k-1} y_{i,k+1} = (1+y_{i-d-1,k})(1+y_{i+d+1,k}) / ((1+1/y_{i-d+1,k})(1+1/y_{i+d-1,k}))."""
    d = yc.d
    for (i, kk) in yc.values:
        if kk != k + 1:
            continue
        lhs = yc.y(i, k - 1) * yc.y(i, k + 1)
        rhs = (1 + yc.y(i - d - 1, k)) * (1 + yc.y(i + d + 1, k)) / (
            (1 + 1 / yc.y(i - d + 1, k)) * (1 + 1 / yc.y(i + d - 1, k))
        )
        if lhs != rhs:
            return False
    return True


def correspondence_lattice(d: int, n: int) -> Lattice2D:
    return canonicalize((d, 1), (n, 0))


def ystate_from_coordinates(yc: YCoordinates) -> YState:
    """The Y-system state (sigma = 1) with Y_{i,j,k} = y_{(d-1)i+(d+1)j,k}."""
    d, n = yc.d, yc.n
    lat = correspondence_lattice(d, n)

    def value(i, j):
        m = (d - 1) * i + (d + 1) * j
        return yc.y(m, 0) if (i + j) % 2 == 0 else 1 / yc.y(m, -1)

    return YState(lat, PeriodicMatrix.from_function(companion(lat), value), 1)


def correspondence_check(obj, depth: int) -> bool:
    """Geometric y-grid obeys the Y-system recurrence and matches the orbit of
    the Y-system map on the lattice <(d,1),(n,0)> for ``depth`` steps."""
    yc = y_coords(obj, depth)
    d = yc.d
    if not all(recurrence_holds(yc, k) for k in range(0, depth)):
        return False
    state = ystate_from_coordinates(yc)
    for t in range(1, depth + 1):
        state = step_G(state)
        for (i, j), v in state.u.items():
            m = (d - 1) * i + (d + 1) * j
            expected = yc.y(m, t) if (i + j + t) % 2 == 0 else 1 / yc.y(m, t - 1)
            if v != expected:
                return False
    return True


# --- singular classes -------------------------------------------------------


def _lines_concurrent(lines: list[tuple[ProjPoint, ProjPoint]]) -> bool:
    try:
        centre = meet_lines(*lines[0], *lines[1])
    except DegenerateIncidence:
        return False
    return all(span_rank([p, q, centre]) <= 2 for p, q in lines)


def is_axis_aligned(a: TwistedPolygon) -> bool:
    """For each residue r mod d the sides A_mA_{m+1}, m = r (mod d), are concurrent."""
    d = a.dim
    for r in range(d):
        sides = [(a.vertex(m), a.vertex(m + 1)) for m in range(r, a.n + 2 * d, d)]
        if any(p == q for p, q in sides) or not _lines_concurrent(sides):
            return False
    return True


def is_dual_axis_aligned(a: TwistedPolygon) -> bool:
    """Vertices A_m, m = r (mod d), lie on a line L_r, and the L_r are concurrent."""
    d = a.dim
    lines = []
    for r in range(d):
        pts = [a.vertex(m) for m in range(r, a.n + 2 * d, d)]
        if span_rank(pts) != 2:
            return False
        second = next(p for p in pts if p != pts[0])
        lines.append((pts[0], second))
    return _lines_concurrent(lines)


def y_layer_is_minus_one(obj, k: int) -> bool:
    try:
        yc = y_coords(obj, k, k)
    except Singular:
        return False
    return all(v == -1 for v in yc.values.values())


def _random_affine(rng: random.Random, d: int) -> list[Fraction]:
    return [rngmod.rational(rng) for _ in range(d)]


def random_projectivity(rng: random.Random, size: int, bound: int = 3) -> Matrix:
    while True:
        h = [[rng.randint(-bound, bound) for _ in range(size)] for _ in range(size)]
        if linalg.det(h) != 0:
            return as_matrix(h)


def _axis_permutation_matrix(d: int, n: int, scale: list, shift: list) -> Matrix:
    m = [[Fraction(0)] * (d + 1) for _ in range(d + 1)]
    for r in range(d):
        m[(r + n) % d][r] = scale[r]
    for r in range(d):
        m[r][d] = shift[r]
    m[d][d] = Fraction(1)
    return as_matrix(m)


def sample_singular_class(n: int, d: int, which: str, rng: random.Random) -> TwistedPolygon:
    """Exact axis-aligned ("axis") or dual axis-aligned ("dual_axis") twisted n-gon.

    Construction in an affine chart whose hyperplane at infinity holds the
    concurrency points Q_r = e_r (axis) or whose origin is the common point of
    the lines L_r = axis r (dual); the monodromy permutes axes by r -> r + n
    (mod d). A random projectivity then moves everything to general position.
    """
    if d < 2:
        raise ValueError("use the line-pair samplers for the lower map")
    if n < max(4, d):
        raise ValueError("need n >= max(4, d)")
    while True:
        scale = [rngmod.rational(rng, nonzero=True) for _ in range(d)]
        if which == "axis":
            shift = _random_affine(rng, d)
            phi = _axis_permutation_matrix(d, n, scale, shift)
            start = _random_affine(rng, d)
            image = linalg.matvec(phi, start + [1])
            target = [image[r] - start[r] for r in range(d)]
            steps = [rngmod.rational(rng, nonzero=True) for _ in range(n)]
            for r in range(d):
                members = list(range(r, n, d))
                steps[members[-1]] = target[r] - sum(steps[m] for m in members[:-1])
            if any(t == 0 for t in steps):
                continue
            pts, cur = [], list(start)
            for m in range(n):
                pts.append(normalize(cur + [1]))
                cur[m % d] += steps[m]
        elif which == "dual_axis":
            phi = _axis_permutation_matrix(d, n, scale, [0] * d)
            pts = []
            for m in range(n):
                coords = [Fraction(0)] * d
                coords[m % d] = rngmod.rational(rng, nonzero=True)
                pts.append(normalize(coords + [1]))
        else:
            raise ValueError(f"unknown class {which!r}")
        poly = TwistedPolygon(tuple(pts), phi).transformed(random_projectivity(rng, d + 1))
        if in_general_position(poly):
            return poly


def random_twisted_polygon(n: int, d: int, rng: random.Random) -> TwistedPolygon:
    """Random twisted n-gon; for d > 2 it is corrugated by construction."""
    while True:
        try:
            if d == 2:
                pts = tuple(normalize(_random_affine(rng, 2) + [1]) for _ in range(n))
                poly = TwistedPolygon(pts, random_projectivity(rng, 3))
            else:
                poly = _random_corrugated(n, d, rng)
        except (ZeroDivisionError, DegenerateIncidence):
            continue
        if in_general_position(poly) and is_corrugated(poly):
            return poly


def _random_corrugated(n: int, d: int, rng: random.Random) -> TwistedPolygon:
    """Vector lifts with V_{m+d+1} = a_m V_m + b_m V_{m+1} + c_m V_{m+d}, where the
    coefficients are n-periodic; then S_n = phi S_0 for the frames
    S_m = [V_m .. V_{m+d}], so phi = S_n S_0^{-1} is the exact monodromy."""
    seq = [[rngmod.rational(rng) for _ in range(d)] + [Fraction(1)] for _ in range(d + 1)]
    coeffs = [[rngmod.rational(rng, nonzero=True) for _ in range(3)] for _ in range(n)]
    for m in range(n):
        a, b, c = coeffs[m]
        seq.append([a * x + b * y + c * z for x, y, z in zip(seq[m], seq[m + 1], seq[m + d])])
    s0 = [[seq[c][r] for c in range(d + 1)] for r in range(d + 1)]
    sn = [[seq[n + c][r] for c in range(d + 1)] for r in range(d + 1)]
    phi = as_matrix(linalg.matmul(sn, linalg.inverse(s0)))
    return TwistedPolygon(tuple(normalize(v) for v in seq[:n]), phi)


def random_line_pair(n: int, rng: random.Random, constant_a: bool = False, constant_b: bool = False) -> LinePair:
    """Random pair in the projective line; optionally with one polygon constant
    (which forces the monodromy to fix that point)."""
    while True:
        s = random_projectivity(rng, 2)
        upper = as_matrix([[rngmod.rational(rng, nonzero=True), rngmod.rational(rng)],
                           [0, rngmod.rational(rng, nonzero=True)]])
        if constant_a or constant_b:
            phi = as_matrix(linalg.matmul(linalg.matmul(s, upper), linalg.inverse(s)))
            fixed = normalize([s[0][0], s[1][0]])
        else:
            phi = random_projectivity(rng, 2)
            fixed = None
        pts = [normalize([rngmod.rational(rng), 1]) for _ in range(2 * n)]
        a = tuple(pts[:n]) if not constant_a else (fixed,) * n
        b = tuple(pts[n:]) if not constant_b else (fixed,) * n
        pair = LinePair(a, b, phi)
        if _line_pair_generic(pair, constant_a, constant_b):
            return pair


def _line_pair_generic(p: LinePair, constant_a: bool, constant_b: bool) -> bool:
    for i in range(p.n):
        if not constant_b and p.b_at(i) == p.b_at(i + 1):
            return False
        if not constant_a and p.a_at(i) == p.a_at(i + 1):
            return False
        if any(p.a_at(i) == p.b_at(i + s) for s in (-1, 0, 1)):
            return False
    return True


def is_constant(points: Sequence[ProjPoint]) -> bool:
    return all(p == points[0] for p in points)


class PentagramSystem:
    """T_d on twisted n-gons with the axis-aligned / dual axis-aligned classes."""

    backward_bound = 3
    forward_bound = 3

    def __init__(self, n: int, d: int = 2):
        self.n, self.d = n, d
        self.name = "pentagram" if d == 2 else "higher-pentagram"

    def parameters(self) -> dict:
        return {"n": self.n, "dim": self.d}

    def expected_width(self) -> int:
        return self.n - 1

    def step(self, state: TwistedPolygon, direction: str) -> TwistedPolygon:
        return pentagram_step(state, direction)

    def in_class(self, state: TwistedPolygon, which: str) -> bool:
        if which == "U":
            return is_axis_aligned(state)
        return is_dual_axis_aligned(state)

    def sample(self, which: str, rng: random.Random) -> TwistedPolygon:
        return sample_singular_class(self.n, self.d, "axis" if which == "U" else "dual_axis", rng)


class LowerPentagramSystem:
    """T_1 on line pairs; U = constant first polygon, V = constant second polygon."""

    backward_bound = 3
    forward_bound = 3

    def __init__(self, n: int):
        self.n = n
        self.name = "lower-pentagram"

    def parameters(self) -> dict:
        return {"n": self.n, "dim": 1}

    def expected_width(self) -> int:
        return self.n

    def step(self, state: LinePair, direction: str) -> LinePair:
        return lower_step(state, direction)

    def in_class(self, state: LinePair, which: str) -> bool:
        return is_constant(state.a if which == "U" else state.b)

    def sample(self, which: str, rng: random.Random) -> LinePair:
        if which == "U":
            return random_line_pair(self.n, rng, constant_a=True)
        return random_line_pair(self.n, rng, constant_b=True)
