"""Finite-index sublattices of Z², periodic matrices and witness matrices."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable

from . import linalg
from .errors import DegenerateLattice


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class Lattice2D:
    """Lattice spanned by (a, 0) and (k, n) with a, n > 0 and 0 <= k < a.

    ``n`` is the least positive second coordinate of a lattice vector and
    ``a`` the least positive horizontal period, so the triple is unique.
    """

    a: int
    k: int
    n: int

    def __post_init__(self):
        if self.a <= 0 or self.n <= 0 or not 0 <= self.k < self.a:
            raise DegenerateLattice(f"not a canonical triple: {(self.a, self.k, self.n)}")

    @property
    def det(self) -> int:
        return self.a * self.n

    @property
    def generators(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, 0), (self.k, self.n)

    def contains(self, i: int, j: int) -> bool:
        if j % self.n:
            return False
        return (i - (j // self.n) * self.k) % self.a == 0

    def coset_rep(self, i: int, j: int) -> tuple[int, int]:
        """Representative in the rectangle 1 <= i <= a, 1 <= j <= n."""
        jr = (j - 1) % self.n + 1
        q = (j - jr) // self.n
        ir = (i - q * self.k - 1) % self.a + 1
        return ir, jr

    def coset_index(self, i: int, j: int) -> int:
        ir, jr = self.coset_rep(i, j)
        return (ir - 1) * self.n + (jr - 1)

    def fundamental_domain(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.a + 1) for j in range(1, self.n + 1)]

    def vertical_period(self) -> int:
        return self.n * (self.a // gcd(self.a, self.k))

    def transpose(self) -> "Lattice2D":
        return canonicalize((0, self.a), (self.n, self.k))

    def __str__(self) -> str:
        return f"<({self.a},0),({self.k},{self.n})>"


def canonicalize(v1: tuple[int, int], v2: tuple[int, int]) -> Lattice2D:
    """Canonical (a, k, n) form of the lattice spanned by two integer vectors."""
    (p, q), (r, s) = v1, v2
    cross = p * s - q * r
    if cross == 0:
        raise DegenerateLattice(f"generators {v1}, {v2} are dependent")
    g, x, y = _ext_gcd(q, s)
    a = abs(cross) // g
    k = (x * p + y * r) % a
    return Lattice2D(a, k, g)


def parse_lattice(text: str) -> Lattice2D:
    """Parse the text form "a,b;c,d" of two generators (a,b), (c,d)."""
    try:
        first, second = text.split(";")
        v1 = tuple(int(t) for t in first.split(","))
        v2 = tuple(int(t) for t in second.split(","))
    except ValueError as exc:
        raise ValueError(f"malformed lattice {text!r}; expected 'a,b;c,d'") from exc
    if len(v1) != 2 or len(v2) != 2:
        raise ValueError(f"malformed lattice {text!r}; expected 'a,b;c,d'")
    return canonicalize(v1, v2)


def companion(lattice: Lattice2D) -> Lattice2D:
    """Image of the lattice under (i, j) -> (i + j, -i + j)."""
    (a, _), (k, n) = lattice.generators
    return canonicalize((a, -a), (k + n, -k + n))


def minimal_axis_period(lattice: Lattice2D) -> tuple[int, str]:
    """Least M with (M, 0) or (0, M) in the lattice; ties count as horizontal."""
    horizontal, vertical = lattice.a, lattice.vertical_period()
    if horizontal <= vertical:
        return horizontal, "horizontal"
    return vertical, "vertical"


def enumerate_lattices(max_det: int) -> list[Lattice2D]:
    """Every canonical lattice of index at most ``max_det``."""
    out = []
    for det in range(1, max_det + 1):
        for a in range(1, det + 1):
            if det % a == 0:
                out.extend(Lattice2D(a, k, det // a) for k in range(a))
    return out


@dataclass(frozen=True)
class PeriodicMatrix:
    """Infinite matrix constant on cosets; ``values`` follow the fundamental domain order."""

    lattice: Lattice2D
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.lattice.det:
            raise ValueError("one value per coset required")

    def __getitem__(self, ij: tuple[int, int]):
        return self.values[self.lattice.coset_index(*ij)]

    @classmethod
    def from_function(cls, lattice: Lattice2D, f: Callable[[int, int], object]) -> "PeriodicMatrix":
        return cls(lattice, tuple(f(i, j) for i, j in lattice.fundamental_domain()))

    def items(self) -> Iterable[tuple[tuple[int, int], object]]:
        return zip(self.lattice.fundamental_domain(), self.values)

    def block(self, i0: int, j0: int, rows: int, cols: int | None = None) -> list[list]:
        cols = rows if cols is None else cols
        return [[self[i0 + r, j0 + c] for c in range(cols)] for r in range(rows)]

    def map(self, f: Callable) -> "PeriodicMatrix":
        return PeriodicMatrix(self.lattice, tuple(f(v) for v in self.values))


def random_periodic(lattice: Lattice2D, draw: Callable[[], object]) -> PeriodicMatrix:
    return PeriodicMatrix(lattice, tuple(draw() for _ in range(lattice.det)))


def consecutive_minors(x: PeriodicMatrix, size: int) -> list:
    """All distinct consecutive size×size minors (one per coset of the corner)."""
    return [linalg.det(x.block(i, j, size)) for i, j in x.lattice.fundamental_domain()]


def vanishing_minor_check(x: PeriodicMatrix) -> bool:
    m, _ = minimal_axis_period(x.lattice)
    return all(v == 0 for v in consecutive_minors(x, m + 1))


# --- witness matrices -------------------------------------------------------


def multiplier(k: int, m: int) -> int:
    """Some r in [1, m] with r*k = gcd(k, m) (mod m) and gcd(r, m) = 1."""
    if m < 1:
        raise ValueError("modulus must be positive")
    d, r0, _ = _ext_gcd(k, m)
    step = m // d
    # m = m1 * m2 where m2 collects the prime powers of m dividing into m/d
    m1 = m
    for p in _prime_factors(step):
        while m1 % p == 0:
            m1 //= p
    a = 0
    if m1 > 1:
        a = ((1 - r0) * pow(step, -1, m1)) % m1
    r = (r0 + a * step) % m
    return r if r else m


def _prime_factors(x: int) -> list[int]:
    out, p = [], 2
    while p * p <= x:
        if x % p == 0:
            out.append(p)
            while x % p == 0:
                x //= p
        p += 1
    if x > 1:
        out.append(x)
    return out


@dataclass(frozen=True)
class Witness:
    """A lattice-periodic 0/1 matrix whose consecutive M×M block is unimodular."""

    lattice: Lattice2D
    size: int
    orientation: str
    block: tuple[tuple[int, ...], ...]
    melody: tuple[tuple[int, int], ...]
    harmony: tuple[tuple[int, int], ...]
    row_multiplier: int

    @property
    def matrix(self) -> PeriodicMatrix:
        """Periodic extension of the block; cosets absent from the block read 0."""
        lat = self.lattice
        values = [0] * lat.det
        for i in range(1, self.size + 1):
            for j in range(1, self.size + 1):
                if self.block[i - 1][j - 1]:
                    values[lat.coset_index(i, j)] = 1
        return PeriodicMatrix(lat, tuple(values))

    def determinant(self) -> int:
        return linalg.det([list(r) for r in self.block])


def melody_and_harmony(m: int, d: int, n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Melody and harmony cells for the lattice <(m,0),(d,n)> with d | m and n >= d."""
    if m % d or n < d:
        raise ValueError("requires d | m and n >= d")

    def v(i):
        return (i - 1) % d + 1

    def w(j):
        return (j - 1) % n + 1

    rows = sorted(range(1, m + 1), key=lambda i: (v(i), i))
    cols = sorted(range(1, m + 1), key=lambda j: (w(j), j))
    melody = list(zip(rows, cols))
    harmony = []
    t = 0
    while t < m:
        end = t
        while end < m and w(cols[end]) == w(cols[t]):
            end += 1
        verses = sorted({v(rows[s]) for s in range(t, end)})
        if len(verses) > 2:
            raise AssertionError("a measure spans more than two verses")
        if len(verses) == 2:
            first = verses[0]
            for s in range(t, end):
                i, j = melody[s]
                harmony.append((i + 1, j) if v(i) == first else (i - 1, j))
        t = end
    return melody, harmony


def build_witness(lattice: Lattice2D) -> Witness:
    m, orientation = minimal_axis_period(lattice)
    work = lattice if orientation == "horizontal" else lattice.transpose()
    assert work.a == m
    d = gcd(work.k, m)
    melody, harmony = melody_and_harmony(m, d, work.n)
    base = [[0] * m for _ in range(m)]
    for i, j in melody + harmony:
        base[i - 1][j - 1] = 1
    r = multiplier(work.k, m)
    block = [base[(r * i - 1) % m] for i in range(1, m + 1)]
    inv_row = {(r * i - 1) % m + 1: i for i in range(1, m + 1)}
    melody = [(inv_row[i], j) for i, j in melody]
    harmony = [(inv_row[i], j) for i, j in harmony]
    if orientation == "vertical":
        block = [list(col) for col in zip(*block)]
        melody = [(j, i) for i, j in melody]
        harmony = [(j, i) for i, j in harmony]
    return Witness(
        lattice=lattice,
        size=m,
        orientation=orientation,
        block=tuple(tuple(r) for r in block),
        melody=tuple(sorted(melody)),
        harmony=tuple(sorted(harmony)),
        row_multiplier=r,
    )


def block_is_periodic(block, lattice: Lattice2D, i0: int = 1, j0: int = 1) -> bool:
    """True when block cells lying in a common coset carry equal values."""
    seen: dict[int, object] = {}
    for r, row in enumerate(block):
        for c, value in enumerate(row):
            key = lattice.coset_index(i0 + r, j0 + c)
            if seen.setdefault(key, value) != value:
                return False
    return True
