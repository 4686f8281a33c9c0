"""The periodic octahedron recurrence map and its rank-one singular classes.

A state is a pair (x, sigma) where x is periodic under the companion lattice.
The forward map rewrites every entry with i + j = sigma (mod 2) by
``(x[i-1,j] x[i+1,j] - x[i,j-1] x[i,j+1]) / x[i,j]`` and flips sigma; the
backward map does the same on the other parity.

The two parity halves, rotated by 45 degrees, are the views
``view(x, p)[r, c] = x[r + c + p, c - r]``; A is the half about to change
and B the other one. Both views are periodic under the base lattice.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable

from . import linalg
from . import rng as rngmod
from .errors import InvalidFactors, Singular
from .exactfield import I
from .lattice import Lattice2D, PeriodicMatrix, companion, minimal_axis_period

FWD, BWD = "fwd", "bwd"


@dataclass(frozen=True)
class OctState:
    lattice: Lattice2D
    x: PeriodicMatrix
    sigma: int

    def __post_init__(self):
        if self.x.lattice != companion(self.lattice):
            raise ValueError("state matrix must be periodic under the companion lattice")


def _update(x: PeriodicMatrix, parity: int) -> PeriodicMatrix:
    bad = [(i, j) for (i, j), v in x.items() if (i + j) % 2 == parity and v == 0]
    if bad:
        raise Singular("zero divisor in octahedron step", bad)
    values = []
    for (i, j), v in x.items():
        if (i + j) % 2 == parity:
            v = (x[i - 1, j] * x[i + 1, j] - x[i, j - 1] * x[i, j + 1]) / v
        values.append(v)
    return PeriodicMatrix(x.lattice, tuple(values))


def step(s: OctState, direction: str = FWD) -> OctState:
    parity = s.sigma if direction == FWD else 1 - s.sigma
    return OctState(s.lattice, _update(s.x, parity), 1 - s.sigma)


def view(s: OctState, parity: int) -> PeriodicMatrix:
    return PeriodicMatrix.from_function(s.lattice, lambda r, c: s.x[r + c + parity, c - r])


def view_a(s: OctState) -> PeriodicMatrix:
    return view(s, s.sigma)


def view_b(s: OctState) -> PeriodicMatrix:
    return view(s, 1 - s.sigma)


def is_rank_one(m: PeriodicMatrix) -> bool:
    """Nonzero entries and vanishing consecutive 2×2 minors."""
    if any(v == 0 for v in m.values):
        return False
    return all(
        m[i, j] * m[i + 1, j + 1] - m[i, j + 1] * m[i + 1, j] == 0
        for i, j in m.lattice.fundamental_domain()
    )


def is_in_class(s: OctState, which: str) -> bool:
    if which == "U":
        return is_rank_one(view_a(s))
    if which == "V":
        return is_rank_one(view_b(s))
    raise ValueError(f"unknown class {which!r}")


# --- rank-one factors -------------------------------------------------------


def allowed_twists(lattice: Lattice2D) -> list:
    """Roots of unity c (over Q or Q(i)) admissible as the twist of a rank-one view."""
    order = lattice.a // gcd(lattice.a, lattice.k)
    out: list = [1]
    if order % 2 == 0:
        out.append(-1)
    if order % 4 == 0:
        out.extend([I, -I])
    return out


@dataclass(frozen=True)
class RankOneFactors:
    """mu and nu with view entries mu_p * nu_q.

    ``mu_base`` holds mu_0 .. mu_{g-1} where g = gcd(a, k); the rest follows
    from mu_{p+k} = c mu_p and mu_{p+a} = mu_p. ``nu_base`` holds
    nu_0 .. nu_{n-1} and nu_{q+n} = nu_q / c.
    """

    lattice: Lattice2D
    mu_base: tuple
    nu_base: tuple
    twist: object = 1

    def __post_init__(self):
        if self.twist not in allowed_twists(self.lattice):
            raise InvalidFactors(f"twist {self.twist} not admissible for {self.lattice}")
        if len(self.mu_base) != gcd(self.lattice.a, self.lattice.k):
            raise InvalidFactors("mu_base must have gcd(a, k) entries")
        if len(self.nu_base) != self.lattice.n:
            raise InvalidFactors("nu_base must have n entries")
        if any(v == 0 for v in self.mu_base + self.nu_base):
            raise InvalidFactors("rank-one factors must be nonzero")

    def mu(self, p: int):
        a, k = self.lattice.a, self.lattice.k
        g = gcd(a, k)
        order = a // g
        r = p % g
        m = 0
        if order > 1:
            m = ((p - r) // g) * pow(k // g, -1, order) % order
        return self.twist ** (m % 4) * self.mu_base[r]

    def nu(self, q: int):
        n = self.lattice.n
        shift, r = divmod(q, n)
        return self.nu_base[r] * self.twist ** (-shift % 4)

    def entry(self, p: int, q: int):
        return self.mu(p) * self.nu(q)


def rescale_multiplier(factors: RankOneFactors, i: int, j: int, k: int):
    """m_{i,j,k}: the iterate g_{i,j,k} equals this times a Dodgson minor."""
    if (i + j + k) % 2:
        raise ValueError("i + j + k must be even")
    if k == 0:
        return factors.mu((i - j) // 2) * factors.nu((i + j) // 2)
    if k == 1:
        return Fraction(1)
    out = Fraction(1)
    for l in range(1, k):
        out = out / (factors.mu((i - j - k) // 2 + l) * factors.nu((i + j - k) // 2 + l))
    return out


def dodgson_oracle(layer: PeriodicMatrix, i: int, j: int, k: int):
    """k×k consecutive determinant of the layer-one values around (i, j)."""
    if k < 1:
        raise ValueError("k >= 1 required")
    rows = [[layer[i - k + 1 + r + c, j + c - r] for c in range(k)] for r in range(k)]
    return linalg.det(rows)


def recurrence_layers(f0: Callable, f1: Callable, depth: int, radius: int, lam=-1) -> list[dict]:
    """Layers 0..depth of f_{k-1} f_{k+1} = f_{i-1,j} f_{i+1,j} + lam f_{i,j-1} f_{i,j+1}
    on the box |i|, |j| <= radius (shrinking by one per layer)."""
    def box(k, rad):
        return {(i, j) for i in range(-rad, rad + 1) for j in range(-rad, rad + 1) if (i + j + k) % 2 == 0}

    layers = [
        {p: f0(*p) for p in box(0, radius)},
        {p: f1(*p) for p in box(1, radius)},
    ]
    for k in range(1, depth):
        cur, prev = layers[k], layers[k - 1]
        nxt = {}
        for i, j in box(k + 1, radius - k):
            nxt[i, j] = (cur[i - 1, j] * cur[i + 1, j] + lam * cur[i, j - 1] * cur[i, j + 1]) / prev[i, j]
        layers.append(nxt)
    return layers


# --- sampling ---------------------------------------------------------------


def random_factors(lattice: Lattice2D, rng: random.Random, twist=1) -> RankOneFactors:
    g = gcd(lattice.a, lattice.k)
    return RankOneFactors(
        lattice,
        tuple(rngmod.rational(rng, nonzero=True) for _ in range(g)),
        tuple(rngmod.rational(rng, nonzero=True) for _ in range(lattice.n)),
        twist,
    )


def state_from_views(lattice: Lattice2D, sigma: int, a_entry: Callable, b_entry: Callable) -> OctState:
    """Assemble x from the A view entry function and the B view entry function."""
    def value(i, j):
        if (i + j) % 2 == sigma:
            return a_entry((i - j - sigma) // 2, (i + j - sigma) // 2)
        par = 1 - sigma
        return b_entry((i - j - par) // 2, (i + j - par) // 2)

    return OctState(lattice, PeriodicMatrix.from_function(companion(lattice), value), sigma)


def sample_U(lattice: Lattice2D, rng: random.Random, sigma: int = 0, twist=1) -> tuple[OctState, RankOneFactors]:
    """A state whose A view is rank one (given factors) and whose B view is random."""
    factors = random_factors(lattice, rng, twist)
    b_view = PeriodicMatrix.from_function(lattice, lambda r, c: rngmod.rational(rng, nonzero=True))
    state = state_from_views(lattice, sigma, factors.entry, lambda r, c: b_view[r, c])
    return state, factors


def sample_V(lattice: Lattice2D, rng: random.Random, sigma: int = 0, twist=1) -> OctState:
    s, _ = sample_U(lattice, rng, 1 - sigma, twist)
    return OctState(s.lattice, s.x, sigma)


def layer_identity_check(state: OctState, factors: RankOneFactors, steps: int) -> bool:
    """Each forward iterate equals m_{i,j,k} times the k×k Dodgson minor of the
    original B layer, for k = 2 .. steps + 1."""
    shift = state.sigma  # translate so that the A half sits on even cells

    def base(i, j):
        return state.x[i + shift, j]

    lat = state.x.lattice
    current = state
    for t in range(1, steps + 1):
        current = step(current, FWD)
        k = t + 1
        for i, j in lat.fundamental_domain():
            if (i + j + k) % 2:
                continue
            got = current.x[i + shift, j]
            rows = [[base(i - k + 1 + r + c, j + c - r) for c in range(k)] for r in range(k)]
            if got != rescale_multiplier(factors, i, j, k) * linalg.det(rows):
                return False
    return True


class OctahedronSystem:
    """Adapter exposing the octahedron map to the width harness."""

    backward_bound = 3
    forward_bound = 3

    def __init__(self, lattice: Lattice2D, twist=1):
        self.lattice = lattice
        self.twist = twist
        self.name = "octahedron"
        self.period, self.orientation = minimal_axis_period(lattice)

    def parameters(self) -> dict:
        (a, _), (k, n) = self.lattice.generators
        return {"lattice": f"{a},0;{k},{n}", "M": self.period, "twist": str(self.twist)}

    def expected_width(self) -> int:
        return self.period - 1

    def step(self, state: OctState, direction: str) -> OctState:
        return step(state, direction)

    def in_class(self, state: OctState, which: str) -> bool:
        return is_in_class(state, which)

    def sample(self, which: str, rng: random.Random) -> OctState:
        if which == "U":
            return sample_U(self.lattice, rng, twist=self.twist)[0]
        return sample_V(self.lattice, rng, twist=self.twist)
