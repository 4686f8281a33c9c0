"""The periodic Y-system map, F-polynomials and the lift-determinant formula.

States are pairs (u, sigma) with u periodic under the companion lattice.
One forward step inverts the cells with i + j != sigma (mod 2) and replaces
each cell with i + j = sigma by

    u * (1 + u[i,j-1]) (1 + u[i,j+1]) / ((1 + 1/u[i-1,j]) (1 + 1/u[i+1,j])).

The A half (cells of parity sigma) and the B half (the other parity) are
the singular data: B = -1 anywhere blocks the forward map, A = -1 blocks
the backward map.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg
from . import rng as rngmod
from .errors import LiftUndefined, Singular, ZeroInversion
from .lattice import Lattice2D, PeriodicMatrix, companion

FWD, BWD = "fwd", "bwd"

# height of sampled rationals; small heights make accidental -1 entries common
SAMPLE_BOUND = 40


@dataclass(frozen=True)
class YState:
    lattice: Lattice2D
    u: PeriodicMatrix
    sigma: int

    def __post_init__(self):
        if self.u.lattice != companion(self.lattice):
            raise ValueError("state matrix must be periodic under the companion lattice")


def _check_blocking(u: PeriodicMatrix, parity: int) -> None:
    zeros = [(i, j) for (i, j), v in u.items() if (i + j) % 2 == parity and v == 0]
    if zeros:
        raise ZeroInversion("zero entry on the inverted parity", zeros)
    minus = [(i, j) for (i, j), v in u.items() if (i + j) % 2 == parity and v == -1]
    if minus:
        raise Singular("entry -1 on the inverted parity", minus)


def step_G(s: YState, direction: str = FWD) -> YState:
    u = s.u
    if direction == FWD:
        inverted = 1 - s.sigma
        _check_blocking(u, inverted)

        def new(i, j, v):
            return v * (1 + u[i, j - 1]) * (1 + u[i, j + 1]) / (
                (1 + 1 / u[i - 1, j]) * (1 + 1 / u[i + 1, j])
            )
    else:
        inverted = s.sigma
        _check_blocking(u, inverted)

        def new(i, j, v):
            return v * (1 + u[i - 1, j]) * (1 + u[i + 1, j]) / (
                (1 + 1 / u[i, j - 1]) * (1 + 1 / u[i, j + 1])
            )

    values = []
    for (i, j), v in u.items():
        values.append(1 / v if (i + j) % 2 == inverted else new(i, j, v))
    return YState(s.lattice, PeriodicMatrix(u.lattice, tuple(values)), 1 - s.sigma)


def rho(s: YState):
    """Product of the distinct entries; conserved by the map."""
    out = Fraction(1)
    for v in s.u.values:
        out *= v
    return out


def half(s: YState, parity: int) -> list:
    return [v for (i, j), v in s.u.items() if (i + j) % 2 == parity]


def is_in_class(s: YState, which: str) -> bool:
    parity = s.sigma if which == "U" else 1 - s.sigma
    if which not in ("U", "V"):
        raise ValueError(f"unknown class {which!r}")
    return all(v == -1 for v in half(s, parity))


def normalized(s: YState) -> YState:
    """Equivalent state with sigma = 1 (translate by one row when sigma = 0)."""
    if s.sigma == 1:
        return s
    u = s.u
    return YState(s.lattice, PeriodicMatrix.from_function(u.lattice, lambda i, j: u[i + 1, j]), 1)


# --- lifts ------------------------------------------------------------------


def negated_double_ratio(block: Sequence[Sequence]):
    (a, b), (c, d) = block
    return -(b * c) / (a * d)


def ndr_matrix(c: Sequence[Sequence]) -> list[list]:
    """Consecutive negated double ratios of a (k+1)×(k+1) matrix, as a k×k matrix."""
    k = len(c) - 1
    return [
        [negated_double_ratio(((c[i][j], c[i][j + 1]), (c[i + 1][j], c[i + 1][j + 1]))) for j in range(k)]
        for i in range(k)
    ]


def lift(b: Sequence[Sequence]) -> list[list]:
    """The (k+1)×(k+1) matrix with ones on the diagonal and subdiagonal whose
    consecutive negated double ratios reproduce the k×k matrix ``b``."""
    k = len(b)
    star: list[list] = [[None] * (k + 1) for _ in range(k + 1)]
    for i in range(k + 1):
        star[i][i] = Fraction(1)
        if i > 0:
            star[i][i - 1] = Fraction(1)

    def divide(num, den):
        if den == 0:
            raise LiftUndefined("zero divisor while filling the lift")
        return num / den

    for offset in range(1, k + 1):
        for i in range(k + 1 - offset):
            j = i + offset
            star[i][j] = divide(-b[i][j - 1] * star[i][j - 1] * star[i + 1][j], star[i + 1][j - 1])
    for offset in range(2, k + 1):
        for j in range(k + 1 - offset):
            i = j + offset
            star[i][j] = divide(-b[i - 1][j] * star[i - 1][j] * star[i][j + 1], star[i - 1][j + 1])
    return star


def scaled_lift_det(c: Sequence[Sequence]):
    """det(C) rebuilt as (product of the diagonal) times det of the lift of its ratios."""
    diag = Fraction(1)
    for i in range(len(c)):
        diag *= c[i][i]
    return diag * linalg.det(lift(ndr_matrix(c)))


# --- F-polynomials ----------------------------------------------------------


@dataclass
class FTable:
    """F_{i,j,k} on cells with i + j + k odd, for k in -1 .. K (or until truncation)."""

    state: YState
    layers: dict = field(default_factory=dict)
    truncated_at: int | None = None

    def F(self, i: int, j: int, k: int):
        if (i + j + k) % 2 == 0:
            raise ValueError("F is indexed by i + j + k odd")
        if k <= 0:
            return Fraction(1)
        return self.layers[k][self.state.u.lattice.coset_index(i, j)]

    def M(self, i: int, j: int, k: int):
        u = self.state.u
        out = Fraction(1)
        for l in range(-k, k + 1):
            out *= u[i + l, j]
        return out

    def Y(self, i: int, j: int, k: int):
        """Y_{i,j,k} expressed in the initial data (i + j + k even)."""
        if (i + j + k) % 2:
            raise ValueError("Y is indexed by i + j + k even")
        return self.M(i, j, k) * self.F(i, j - 1, k) * self.F(i, j + 1, k) / (
            self.F(i - 1, j, k) * self.F(i + 1, j, k)
        )

    @property
    def depth(self) -> int:
        return max(self.layers, default=0)


def f_table(s: YState, depth: int) -> FTable:
    """Run the F recurrence on the sigma = 1 normalized state up to layer ``depth``."""
    s = normalized(s)
    table = FTable(s)
    lat = s.u.lattice
    reps = lat.fundamental_domain()
    for k in range(0, depth):
        values = [None] * lat.det
        for i, j in reps:
            if (i + j + k + 1) % 2 == 0:
                continue
            below = table.F(i, j, k - 1)
            if below == 0:
                table.truncated_at = k + 1
                return table
            values[lat.coset_index(i, j)] = (
                table.F(i - 1, j, k) * table.F(i + 1, j, k)
                + table.M(i, j, k) * table.F(i, j - 1, k) * table.F(i, j + 1, k)
            ) / below
        table.layers[k + 1] = values
    return table


def f_via_lift(s: YState, i: int, j: int, k: int):
    """F_{i,j,k} as the determinant of the lift of a consecutive B block
    (valid when the A half of the normalized state is identically -1)."""
    s = normalized(s)
    u = s.u
    block = [[u[i - k + 1 + c + r, j + c - r] for c in range(k)] for r in range(k)]
    return linalg.det(lift(block))


# --- sampling ---------------------------------------------------------------


def _b_parity(sigma: int) -> int:
    return 1 - sigma


def sample_U_bar(lattice: Lattice2D, rng: random.Random, sigma: int = 1) -> YState:
    """A half identically -1, random B half with product (-1)^n so rho = 1."""
    lat = companion(lattice)
    b_cells = [p for p in lat.fundamental_domain() if sum(p) % 2 == _b_parity(sigma)]
    target = Fraction((-1) ** lattice.det)
    while True:
        values = {p: rngmod.rational_avoiding(rng, {0, -1}, SAMPLE_BOUND) for p in b_cells[:-1]}
        prod = Fraction(1)
        for v in values.values():
            prod *= v
        last = target / prod
        if last not in (0, -1):
            values[b_cells[-1]] = last
            break
    u = PeriodicMatrix.from_function(lat, lambda i, j: values.get((i, j), Fraction(-1)))
    return YState(lattice, u, sigma)


def sample_U_offsurface(lattice: Lattice2D, rng: random.Random, sigma: int = 1) -> YState:
    """A-half -1 but rho != 1: a control sample off the invariant hypersurface."""
    lat = companion(lattice)
    while True:
        u = PeriodicMatrix.from_function(
            lat,
            lambda i, j: Fraction(-1) if (i + j) % 2 == sigma else rngmod.rational_avoiding(rng, {0, -1}, SAMPLE_BOUND),
        )
        state = YState(lattice, u, sigma)
        if rho(state) != 1:
            return state


def random_state(lattice: Lattice2D, rng: random.Random, sigma: int = 1) -> YState:
    lat = companion(lattice)
    u = PeriodicMatrix.from_function(lat, lambda i, j: rngmod.rational_avoiding(rng, {0, -1}, SAMPLE_BOUND))
    return YState(lattice, u, sigma)


class YSystem:
    """Adapter for the width harness; ``on_surface`` selects the rho = 1 samples."""

    backward_bound = 3
    forward_bound = 3

    def __init__(self, lattice: Lattice2D, on_surface: bool = True):
        self.lattice = lattice
        self.on_surface = on_surface
        self.name = "ysystem" if on_surface else "ysystem-offsurface"

    def parameters(self) -> dict:
        (a, _), (k, n) = self.lattice.generators
        return {"lattice": f"{a},0;{k},{n}", "det": self.lattice.det, "rho_one": self.on_surface}

    def expected_width(self) -> int:
        return self.lattice.det - 1

    def step(self, state: YState, direction: str) -> YState:
        return step_G(state, direction)

    def in_class(self, state: YState, which: str) -> bool:
        return is_in_class(state, which)

    def sample(self, which: str, rng: random.Random) -> YState:
        sampler = sample_U_bar if self.on_surface else sample_U_offsurface
        s = sampler(self.lattice, rng)
        if which == "U":
            return s
        return YState(s.lattice, s.u, 1 - s.sigma)
