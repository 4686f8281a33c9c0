"""Bipartite discrete Toda dynamics on 2 × 2n matrices.

mu pushes two columns past each other:

    [[x1, y1], [x2, y2]] -> [[y1 r, x1 r], [y2 / r, x2 / r]],  r = (x2 + y2) / (x1 + y1)

and nu is the companion move used to build width-(n-1) samples. Columns
are labelled 1..2n; s_j applies mu to columns j and j + 1 (mod 2n).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import rng as rngmod
from .errors import Singular
from .exactfield import conj
from .recutting import Polygon, RecutState, vertex
from .recutting import bipartite_step as recut_step

FWD, BWD = "fwd", "bwd"

Block = tuple  # ((x1, y1), (x2, y2))

# height of the random seed entries for the nu-grid sampler
SEED_BOUND = 30


def _exact(block: Sequence[Sequence]) -> tuple:
    return tuple(tuple(Fraction(v) if isinstance(v, int) else v for v in row) for row in block)


def mu(block: Sequence[Sequence]) -> Block:
    (x1, y1), (x2, y2) = _exact(block)
    top, bottom = x1 + y1, x2 + y2
    if top == 0 or bottom == 0:
        raise Singular("mu denominator vanishes", [])
    r = bottom / top
    return ((y1 * r, x1 * r), (y2 / r, x2 / r))


def nu(block: Sequence[Sequence]) -> Block:
    (x1, y1), (x2, y2) = _exact(block)
    p, q = x1 - y2, x2 - y1
    if p == 0 or q == 0:
        raise Singular("nu denominator vanishes", [])
    return ((-y1 * p / q, -x1 * q / p), (-y2 * q / p, -x2 * p / q))


def consistency_check(block: Sequence[Sequence]) -> bool:
    """mu sends [x y] to [y' x'] exactly when nu sends [x y'] to [-y -x']."""
    (x1, y1), (x2, y2) = block
    (ny1, nx1), (ny2, nx2) = mu(block)
    (a, b), (c, d) = nu(((x1, ny1), (x2, ny2)))
    return (a, b, c, d) == (-y1, -nx1, -y2, -nx2)


Matrix = tuple  # (row1, row2), each a tuple of scalars


def columns(m: Matrix) -> list[tuple]:
    return list(zip(*m))


def from_columns(cols: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(c[r] for c in cols) for r in range(2))


def apply_pair(m: Matrix, j: int, move, wrap: bool = True) -> Matrix:
    """Apply ``move`` to columns j and j + 1 (1-based; cyclic when ``wrap``)."""
    cols = columns(m)
    size = len(cols)
    a, b = (j - 1) % size, j % size
    if not wrap and j >= size:
        raise IndexError("no column to the right")
    (x1, y1), (x2, y2) = move(((cols[a][0], cols[b][0]), (cols[a][1], cols[b][1])))
    cols[a], cols[b] = (x1, x2), (y1, y2)
    return from_columns(cols)


def s(m: Matrix, j: int) -> Matrix:
    return apply_pair(m, j, mu)


def t(m: Matrix, j: int, wrap: bool = True) -> Matrix:
    return apply_pair(m, j, nu, wrap)


@dataclass(frozen=True)
class TodaState:
    m: Matrix
    sigma: int

    def __post_init__(self):
        if len(self.m) != 2 or len(self.m[0]) != len(self.m[1]) or len(self.m[0]) % 2:
            raise ValueError("need a 2 × 2n matrix")

    @property
    def n(self) -> int:
        return len(self.m[0]) // 2


def bipartite_step(st: TodaState, direction: str = FWD) -> TodaState:
    """sigma = 0 applies the even s_j, sigma = 1 the odd ones; mu is an involution,
    so the backward step reapplies the batch of the previous parity."""
    parity = st.sigma if direction == FWD else 1 - st.sigma
    size = 2 * st.n
    cols = columns(st.m)
    bad = []
    for j in range(1, size + 1):
        if j % 2 != parity:
            continue
        a, b = cols[j - 1], cols[j % size]
        if a[0] + b[0] == 0 or a[1] + b[1] == 0:
            bad.append(j)
    if bad:
        raise Singular("mu batch hits a vanishing column sum", bad)
    m = st.m
    for j in range(1, size + 1):
        if j % 2 == parity:
            m = s(m, j)
    return TodaState(m, 1 - st.sigma)


def in_w(m: Matrix, parity: int) -> bool:
    """W_1: column 2k is minus column 2k-1; W_0: column 2k+1 is minus column 2k."""
    cols = columns(m)
    size = len(cols)
    return all(
        cols[(c + 1) % size] == tuple(-v for v in cols[c])
        for c in range(1 - parity, size, 2)
    )


def is_in_class(st: TodaState, which: str) -> bool:
    if which == "U":
        return in_w(st.m, 1 - st.sigma)
    if which == "V":
        return in_w(st.m, st.sigma)
    raise ValueError(f"unknown class {which!r}")


# --- width samples from the nu grid -----------------------------------------


def g_half(y: Matrix, parity: int) -> Matrix:
    """Composition of the non-wrapping t_j, 1 <= j <= n - 1, with j of the given parity."""
    size = len(y[0])
    for j in range(1, size):
        if j % 2 == parity:
            y = t(y, j, wrap=False)
    return y


def nu_orbit(y: Matrix, length: int) -> list[Matrix]:
    """y, G_0(y), G_1(G_0(y)), ... (``length`` matrices)."""
    out = [y]
    for k in range(1, length):
        out.append(g_half(out[-1], (k - 1) % 2))
    return out


def g_order_check(y: Matrix) -> bool:
    """G_1 o G_0 has order n on the seed matrix."""
    n = len(y[0])
    orbit = nu_orbit(y, 2 * n + 1)
    return orbit[2 * n] == y


def sample_from_seed(y: Matrix) -> tuple[TodaState, list[Matrix]]:
    """The U-state (x, 1) with columns x_k = (-1)^k * column 1 of the k-th orbit matrix."""
    n = len(y[0])
    orbit = nu_orbit(y, 2 * n + 1)
    cols = []
    for k in range(1, 2 * n + 1):
        c = columns(orbit[k])[0]
        cols.append(tuple(v if k % 2 == 0 else -v for v in c))
    return TodaState(from_columns(cols), 1), orbit


def grid_column(orbit: list[Matrix], j: int, k: int) -> tuple:
    """w_{j,k} = (-1)^k times column j of the k-th orbit matrix (k taken mod 2n)."""
    n = len(orbit[0][0])
    c = columns(orbit[k % (2 * n)])[j - 1]
    return tuple(v if k % 2 == 0 else -v for v in c)


def random_seed_matrix(n: int, rng: random.Random) -> Matrix:
    return tuple(tuple(rngmod.rational(rng, SEED_BOUND, nonzero=True) for _ in range(n)) for _ in range(2))


def sample_U(n: int, rng: random.Random) -> TodaState:
    while True:
        try:
            state, _ = sample_from_seed(random_seed_matrix(n, rng))
            return state
        except Singular:
            continue


# --- recutting embedding -----------------------------------------------------


def embed_recutting(p: Polygon, flipped: bool = False) -> Matrix:
    """Column j holds the edge e_j = P_{j+1} - P_j over its conjugate
    (rows exchanged when ``flipped``)."""
    edges = [vertex(p, j + 1) - vertex(p, j) for j in range(1, len(p) + 1)]
    top = tuple(edges)
    bottom = tuple(conj(e) for e in edges)
    return (bottom, top) if flipped else (top, bottom)


def embed_state(s: RecutState, flipped: bool = False) -> TodaState:
    """Recut parity sigma matches Toda parity 1 - sigma (vertex i <-> columns i-1, i)."""
    return TodaState(embed_recutting(s.polygon, flipped), 1 - s.sigma)


def commute_check(s: RecutState, steps: int = 1) -> bool:
    """Toda steps on the embedding agree with embedding the recut iterates;
    each step exchanges the two rows."""
    toda = embed_state(s)
    for k in range(1, steps + 1):
        s = recut_step(s)
        toda = bipartite_step(toda)
        if toda != embed_state(s, flipped=bool(k % 2)):
            return False
    return True


class TodaSystem:
    backward_bound = 3
    forward_bound = 3

    def __init__(self, n: int):
        self.n = n
        self.name = "toda"

    def parameters(self) -> dict:
        return {"n": self.n}

    def expected_width(self) -> int:
        return self.n - 1

    def step(self, state: TodaState, direction: str) -> TodaState:
        return bipartite_step(state, direction)

    def in_class(self, state: TodaState, which: str) -> bool:
        return is_in_class(state, which)

    def sample(self, which: str, rng: random.Random) -> TodaState:
        state = sample_U(self.n, rng)
        if which == "U":
            return state
        return TodaState(state.m, 1 - state.sigma)
