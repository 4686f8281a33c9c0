"""Plain-text formats for polygons and matrices; every scalar is written "p/q"
(Gaussian rationals as "p/q+r/si").

Twisted polygon::

    vertex 1/1 2/1 1/1
    vertex ...
    monodromy
    1/1 0/1 0/1
    ...

Planar polygon: one "x y" pair per line. Toda matrix: two lines of 2n scalars.
Blank lines and lines starting with '#' are ignored.
"""
from __future__ import annotations

from typing import Iterable

from .exactfield import GaussianRational, format_scalar, normalize, parse_scalar
from .pentagram import TwistedPolygon, as_matrix


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _row(values: Iterable) -> str:
    return " ".join(format_scalar(v) for v in values)


def dump_twisted_polygon(poly: TwistedPolygon) -> str:
    out = [f"vertex {_row(v.coords)}" for v in poly.vertices]
    out.append("monodromy")
    out.extend(_row(r) for r in poly.monodromy)
    return "\n".join(out) + "\n"


def load_twisted_polygon(text: str) -> TwistedPolygon:
    vertices, rows, in_matrix = [], [], False
    for ln in _lines(text):
        if ln == "monodromy":
            in_matrix = True
        elif in_matrix:
            rows.append([parse_scalar(t) for t in ln.split()])
        elif ln.startswith("vertex "):
            vertices.append(normalize(parse_scalar(t) for t in ln.split()[1:]))
        else:
            raise ValueError(f"unexpected line {ln!r}")
    if not vertices or not rows:
        raise ValueError("need vertex lines and a monodromy block")
    return TwistedPolygon(tuple(vertices), as_matrix(rows))


def dump_planar_polygon(poly: Iterable[GaussianRational]) -> str:
    return "".join(f"{format_scalar(p.re)} {format_scalar(p.im)}\n" for p in poly)


def load_planar_polygon(text: str) -> tuple:
    out = []
    for ln in _lines(text):
        x, y = ln.split()
        out.append(GaussianRational(parse_scalar(x), parse_scalar(y)))
    return tuple(out)


def dump_toda_matrix(m) -> str:
    return "".join(_row(r) + "\n" for r in m)


def load_toda_matrix(text: str) -> tuple:
    rows = [tuple(parse_scalar(t) for t in ln.split()) for ln in _lines(text)]
    if len(rows) != 2 or len(rows[0]) != len(rows[1]):
        raise ValueError("need two rows of equal length")
    return tuple(rows)
