"""Polygon recutting and its bipartite dynamics on 2n-gons.

Vertices are points of the plane written as Gaussian rationals and are
labelled 1..n cyclically. Recutting at vertex i replaces A_i by its mirror
image in the perpendicular bisector of A_{i-1}A_{i+1}; in complex form, with
w = A_i - A_{i-1} and z = A_{i+1} - A_i, the new vertex is
A_{i-1} + conj(z) (w + z) / conj(w + z).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import rng as rngmod
from .errors import NotJittery, Singular
from .exactfield import GaussianRational, conj

FWD, BWD = "fwd", "bwd"

Polygon = tuple  # tuple of GaussianRational vertices, vertex i at index i - 1


def polygon(points: Iterable) -> Polygon:
    """Build a polygon from complex-like values or (x, y) pairs."""
    out = []
    for p in points:
        if isinstance(p, (tuple, list)):
            p = GaussianRational(*p)
        out.append(GaussianRational.coerce(p))
    return tuple(out)


def vertex(p: Polygon, i: int) -> GaussianRational:
    return p[(i - 1) % len(p)]


def squared_distance(a, b):
    return (a - b).norm()


def recut(p: Polygon, i: int) -> Polygon:
    a, b, c = vertex(p, i - 1), vertex(p, i), vertex(p, i + 1)
    if a == c:
        raise Singular(f"neighbours of vertex {i} coincide", [i])
    w, z = b - a, c - b
    new = a + conj(z) * (w + z) / conj(w + z)
    out = list(p)
    out[(i - 1) % len(p)] = new
    return tuple(out)


def recut_sequence(p: Polygon, order: Sequence[int]) -> Polygon:
    for i in order:
        p = recut(p, i)
    return p


def reflection_oracle(a, b, c):
    """Mirror image of b in the perpendicular bisector of segment ac."""
    m = (a + c) / 2
    u = c - a
    v = b - m
    dot = v.re * u.re + v.im * u.im
    return m + v - u * (2 * dot / u.norm())


@dataclass(frozen=True)
class RecutState:
    polygon: Polygon
    sigma: int

    def __post_init__(self):
        if len(self.polygon) % 2:
            raise ValueError("bipartite recutting needs an even number of vertices")


def batch(size: int, parity: int) -> list[int]:
    """Vertex labels recut by one bipartite step: even labels for 0, odd for 1."""
    return [i for i in range(1, size + 1) if i % 2 == parity]


def bipartite_step(s: RecutState, direction: str = FWD) -> RecutState:
    """F(A, sigma) = (A', 1 - sigma); sigma = 0 recuts the even vertices."""
    parity = s.sigma if direction == FWD else 1 - s.sigma
    p = s.polygon
    bad = [i for i in batch(len(p), parity) if vertex(p, i - 1) == vertex(p, i + 1)]
    if bad:
        raise Singular("recut batch hits coinciding neighbours", bad)
    return RecutState(recut_sequence(p, batch(len(p), parity)), 1 - s.sigma)


def in_w(p: Polygon, parity: int) -> bool:
    """W_0 (parity 0): the even vertices coincide; W_1: the odd ones do."""
    pts = [vertex(p, i) for i in batch(len(p), parity)]
    return all(q == pts[0] for q in pts)


def is_in_class(s: RecutState, which: str) -> bool:
    if which == "U":
        return in_w(s.polygon, s.sigma)
    if which == "V":
        return in_w(s.polygon, 1 - s.sigma)
    raise ValueError(f"unknown class {which!r}")


# --- the phi construction ---------------------------------------------------


def squared_sides(a: Polygon) -> list:
    """|A_1A_2|^2 .. |A_{m-1}A_m|^2 (the closing side is not included)."""
    return [squared_distance(a[t], a[t + 1]) for t in range(len(a) - 1)]


def is_jittery(a: Polygon) -> bool:
    sides = squared_sides(a)
    return all(s != 0 for s in sides) and len(set(sides)) == len(sides)


def g_map(a: Polygon) -> Polygon:
    """G = s_n o ... o s_2 on an (n+1)-gon."""
    return recut_sequence(a, range(2, len(a)))


@dataclass(frozen=True)
class JitteryGrid:
    """C_{i,j} (i + j even, 1 <= i <= n + 1), 2n-periodic in j; C_{i,i+2k} is
    vertex i of G^k(A)."""

    source: Polygon
    iterates: tuple  # G^0(A) .. G^{n-1}(A)

    @property
    def n(self) -> int:
        return len(self.source) - 1

    def C(self, i: int, j: int):
        if (i + j) % 2:
            raise ValueError("C is indexed by i + j even")
        k = ((j - i) // 2) % self.n
        return self.iterates[k][i - 1]


def jittery_grid(a: Polygon) -> JitteryGrid:
    if not is_jittery(a):
        raise NotJittery("side lengths must be nonzero and distinct")
    iterates = [tuple(a)]
    for _ in range(len(a) - 2):
        iterates.append(g_map(iterates[-1]))
    return JitteryGrid(tuple(a), tuple(iterates))


def g_order_check(a: Polygon) -> bool:
    """G^n returns the (n+1)-gon to itself."""
    cur = a
    for _ in range(len(a) - 1):
        cur = g_map(cur)
    return cur == tuple(a)


def phi(a: Polygon) -> tuple[Polygon, JitteryGrid]:
    """The 2n-gon B with B_j = C_{1,j} (j odd) and C_{2,j} (j even); B lies in W_1."""
    grid = jittery_grid(a)
    n = grid.n
    b = tuple(grid.C(1, j) if j % 2 else grid.C(2, j) for j in range(1, 2 * n + 1))
    return b, grid


def vertices_match_grid(grid: JitteryGrid) -> bool:
    """F^k(phi(A), 1) has vertex j equal to C_{k+1,j} or C_{k+2,j}, whichever
    index sum is even, for k = 0 .. n - 1."""
    n = grid.n
    b, _ = phi(grid.source)
    state = RecutState(b, 1)
    for k in range(n):
        expected = tuple(
            grid.C(k + 1, j) if (k + 1 + j) % 2 == 0 else grid.C(k + 2, j) for j in range(1, 2 * n + 1)
        )
        if state.polygon != expected:
            return False
        if k < n - 1:
            state = bipartite_step(state)
    return True


def is_isosceles_trapezoid(p, q, r, s) -> bool:
    """pq parallel to rs, with |pr| = |qs| and |ps| = |qr|."""
    u, v = q - p, s - r
    if (u * conj(v)).im != 0:
        return False
    return squared_distance(p, r) == squared_distance(q, s) and squared_distance(p, s) == squared_distance(q, r)


def trapezoid_check(grid: JitteryGrid) -> bool:
    n = grid.n
    for i in range(2, n + 1):
        for j in range(1, 2 * n + 1):
            if (i + j) % 2 == 1:
                quad = (grid.C(i - 1, j), grid.C(i + 1, j), grid.C(i, j - 1), grid.C(i, j + 1))
                if not is_isosceles_trapezoid(*quad):
                    return False
    return True


def random_point(rng: random.Random, bound: int = 9) -> GaussianRational:
    return GaussianRational(rngmod.rational(rng, bound), rngmod.rational(rng, bound))


def random_polygon(size: int, rng: random.Random) -> Polygon:
    return tuple(random_point(rng) for _ in range(size))


def random_jittery(size: int, rng: random.Random) -> Polygon:
    while True:
        a = random_polygon(size, rng)
        if is_jittery(a):
            return a


def sample_W(n: int, parity: int, rng: random.Random) -> Polygon:
    """Direct random member of W_parity (2n vertices, the parity class shared)."""
    common = random_point(rng)
    return tuple(common if i % 2 == parity else random_point(rng) for i in range(1, 2 * n + 1))


class RecuttingSystem:
    backward_bound = 3
    forward_bound = 3

    def __init__(self, n: int):
        self.n = n
        self.name = "recutting"

    def parameters(self) -> dict:
        return {"n": self.n}

    def expected_width(self) -> int:
        return self.n - 1

    def step(self, state: RecutState, direction: str) -> RecutState:
        return bipartite_step(state, direction)

    def in_class(self, state: RecutState, which: str) -> bool:
        return is_in_class(state, which)

    def sample(self, which: str, rng: random.Random) -> RecutState:
        b, _ = phi(random_jittery(self.n + 1, rng))
        if which == "U":
            return RecutState(b, 1)
        return RecutState(b, 0)
