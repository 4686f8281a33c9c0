"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline,
or ``python3 tests/test_acceptance.py`` to print them without pytest.
"""
from __future__ import annotations

import io
import json
import sys
import time
from collections import Counter
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

import pytest

from devronlab import conjectures, devron, octahedron, pentagram, recutting, toda, ysystem
from devronlab.cli import main as cli_main
from devronlab.errors import Singular
from devronlab.exactfield import INFINITY, affine_point, normalize
from devronlab.lattice import (
    Lattice2D,
    block_is_periodic,
    build_witness,
    canonicalize,
    enumerate_lattices,
    minimal_axis_period,
    random_periodic,
    vanishing_minor_check,
)
from devronlab.linalg import det
from devronlab.rng import make_rng, rational, trial_seeds

SEED = 7

# ones of the M=20, k=5, n=9 witness matrix (row, column), from the printed table
WITNESS_20_5_9 = [
    (1, 1), (1, 11), (2, 11), (3, 4), (4, 6), (5, 8), (6, 10), (6, 20), (7, 20), (8, 13),
    (9, 15), (10, 17), (11, 19), (12, 3), (13, 5), (14, 7), (15, 9), (16, 2), (17, 2),
    (17, 12), (18, 14), (19, 16), (20, 18),
]

OCTAHEDRON_LATTICES = [
    canonicalize((3, 0), (1, 1)),
    canonicalize((4, 0), (1, 1)),
    canonicalize((2, 1), (5, 0)),
    canonicalize((2, 1), (6, 0)),
]

YSYSTEM_LATTICES = {
    3: [Lattice2D(3, 1, 1), Lattice2D(3, 2, 1)],
    4: [Lattice2D(4, 1, 1), Lattice2D(2, 1, 2)],
    5: [canonicalize((2, 1), (5, 0)), Lattice2D(5, 1, 1)],
    6: [canonicalize((2, 1), (6, 0)), Lattice2D(3, 1, 2)],
}


def announce(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
    if detail:
        line += f" ({detail})"
    print(line, file=sys.__stdout__, flush=True)


def judge(number: int, title: str, check) -> None:
    """Run ``check`` (returning a detail string), print the verdict line, then assert."""
    start = time.perf_counter()
    try:
        detail = check()
        ok = True
    except AssertionError as exc:
        detail, ok = f"failed: {exc}", False
    detail = f"{detail}; {time.perf_counter() - start:.1f}s" if detail else f"{time.perf_counter() - start:.1f}s"
    announce(number, title, ok, detail)
    assert ok, detail


# --- 1 ----------------------------------------------------------------------


def check_fixture() -> str:
    start = time.perf_counter()
    x = tuple(Fraction(v) for v in (1, 1, 1, 2, 1, 3))
    once = devron.example_forward(x)
    assert once == (2, -5, 3, 1, 1, 7), once
    assert devron.example_forward(once) == (1, 18, 7, 18, -5, 18)
    t = Fraction(3, 4)
    assert devron.example_backward((t, 5, t, -2, t, 9)) == (0, t, 0, t, 0, t)
    report = devron.verify_pair(devron.ExampleSystem(), trials=10, seed=SEED)
    assert report.verdict == "pass" and set(report.widths()) == {2}, report.widths()
    m, _ = devron.measure_width(devron.ExampleSystem(), x)
    assert m == 2
    elapsed = time.perf_counter() - start
    assert elapsed < 1, f"took {elapsed:.2f}s"
    return "width 2"


def test_criterion_01_example_fixture():
    judge(1, "six-coordinate fixture and width 2", check_fixture)


# --- 2 ----------------------------------------------------------------------


def check_witnesses() -> str:
    start = time.perf_counter()
    lattices = enumerate_lattices(24)
    for lat in lattices:
        w = build_witness(lat)
        assert abs(w.determinant()) == 1, lat
        assert block_is_periodic(w.block, lat), lat
    w = build_witness(Lattice2D(20, 5, 9))
    ones = sorted((i + 1, j + 1) for i, row in enumerate(w.block) for j, v in enumerate(row) if v)
    assert ones == WITNESS_20_5_9
    assert time.perf_counter() - start < 30
    return f"{len(lattices)} lattices"


def test_criterion_02_witness_matrices():
    judge(2, "witness matrices for every lattice of index <= 24", check_witnesses)


# --- 3 ----------------------------------------------------------------------


def check_vanishing_minors() -> str:
    rng = make_rng(SEED)
    lattices = OCTAHEDRON_LATTICES + [Lattice2D(2, 1, 3), Lattice2D(6, 2, 3)]
    for lat in lattices:
        for _ in range(100):
            x = random_periodic(lat, lambda: rational(rng))
            assert vanishing_minor_check(x), lat
    return f"{len(lattices)} lattices x 100 matrices"


def test_criterion_03_vanishing_minors():
    judge(3, "consecutive (M+1)-minors of periodic matrices vanish", check_vanishing_minors)


# --- 4 ----------------------------------------------------------------------


def check_octahedron() -> str:
    start = time.perf_counter()
    widths = {}
    for lat in OCTAHEDRON_LATTICES:
        sys_ = octahedron.OctahedronSystem(lat)
        report = devron.verify_pair(sys_, trials=20, seed=SEED)
        assert report.verdict == "pass", (str(lat), [t.reason for t in report.trials if not t.ok])
        assert set(report.widths()) == {sys_.period - 1}, report.widths()
        assert all(t.round_trip for t in report.trials)
        checked = 0
        for s in trial_seeds(SEED, 20):
            rng = make_rng(s)
            while True:
                state, factors = octahedron.sample_U(lat, rng)
                try:
                    assert octahedron.layer_identity_check(state, factors, sys_.period - 1), str(lat)
                    checked += 1
                    break
                except Singular:
                    continue
        assert checked == 20
        widths[str(lat)] = sys_.period - 1
    assert time.perf_counter() - start < 120
    return ", ".join(f"{k} width {v}" for k, v in widths.items())


def test_criterion_04_octahedron():
    judge(4, "octahedron width M-1 with Dodgson layer identity", check_octahedron)


# --- 5 ----------------------------------------------------------------------


def check_ysystem() -> str:
    observed = {}
    for n, lattices in YSYSTEM_LATTICES.items():
        for lat in lattices:
            sys_ = ysystem.YSystem(lat)
            report = devron.verify_pair(sys_, trials=20, seed=SEED, exact=False)
            assert report.verdict == "pass", (str(lat), [t.reason for t in report.trials if not t.ok])
            assert max(report.widths()) <= n - 1
            observed[str(lat)] = sorted(set(report.widths()))
            for s in trial_seeds(SEED, 20):
                state = ysystem.sample_U_bar(lat, make_rng(s))
                assert ysystem.rho(state) == 1
                traj = devron.iterate(sys_, state, n - 1)
                assert all(ysystem.rho(st) == 1 for st in traj.states)
                table = ysystem.f_table(state, n)
                cells = table.state.u.lattice.fundamental_domain()
                for k in range(1, n + 1):
                    for i, j in cells:
                        if (i + j + k) % 2:
                            assert table.F(i, j, k) == ysystem.f_via_lift(state, i, j, k)
                assert all(table.F(i, j, n) == 0 for i, j in cells if (i + j + n) % 2)
    return "observed widths " + "; ".join(f"{k}: {v}" for k, v in observed.items())


def test_criterion_05_ysystem():
    judge(5, "Y-system reaches V within n-1 steps on the rho = 1 hypersurface", check_ysystem)


# --- 6 ----------------------------------------------------------------------


def check_pentagram() -> str:
    start = time.perf_counter()
    rng = make_rng(SEED)
    families = {
        "d=2": lambda i: pentagram.random_twisted_polygon(5 + i % 4, 2, rng),
        "d=3": lambda i: pentagram.random_twisted_polygon(6 + i % 2, 3, rng),
        "d=4": lambda i: pentagram.random_twisted_polygon(7 + i % 2, 4, rng),
        "lower": lambda i: pentagram.random_line_pair(4 + i % 4, rng),
    }
    for name, draw in families.items():
        done = 0
        while done < 30:
            try:
                ok = pentagram.correspondence_check(draw(done), 2)
            except Singular:
                continue
            assert ok, name
            done += 1
    widths = {}
    for n in range(4, 9):
        report = devron.verify_pair(pentagram.PentagramSystem(n), trials=10, seed=SEED, exact=False)
        assert report.verdict == "pass", n
        widths[n] = sorted(set(report.widths()))
    square = pentagram.TwistedPolygon(
        tuple(affine_point(x, y) for x, y in ((0, 0), (1, 0), (1, 1), (0, 1))),
        pentagram.as_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]),
    )
    image = pentagram.pentagram_step(square, strict=False)
    assert set(image.vertices) == {normalize((1, 1, 2))}
    assert time.perf_counter() - start < 120
    return "widths " + ", ".join(f"n={n}: {w}" for n, w in widths.items())


def test_criterion_06_pentagram():
    judge(6, "pentagram correspondence, axis-aligned widths, square collapse", check_pentagram)


# --- 7 ----------------------------------------------------------------------


def _sides(p):
    return Counter(recutting.squared_distance(recutting.vertex(p, i), recutting.vertex(p, i + 1)) for i in range(1, len(p) + 1))


def check_recutting() -> str:
    rng = make_rng(SEED)
    relations = Counter()
    while min(relations.values(), default=0) < 100:
        p = recutting.random_polygon(8, rng)
        i = rng.randint(1, 8)
        try:
            once = recutting.recut(p, i)
            assert _sides(once) == _sides(p)
            assert recutting.recut(once, i) == p
            relations["involution"] += 1
            braid = recutting.recut_sequence(p, [i, i + 1, i]), recutting.recut_sequence(p, [i + 1, i, i + 1])
            assert braid[0] == braid[1]
            relations["braid"] += 1
            far = recutting.recut_sequence(p, [i, i + 3]), recutting.recut_sequence(p, [i + 3, i])
            assert far[0] == far[1]
            relations["commute"] += 1
        except Singular:
            continue
    for n in range(3, 9):
        sys_ = recutting.RecuttingSystem(n)
        report = devron.verify_pair(sys_, trials=20, seed=SEED)
        assert report.verdict == "pass" and set(report.widths()) == {n - 1}, n
        for s in trial_seeds(SEED, 5):
            state = sys_.sample("U", make_rng(s))
            sides = _sides(state.polygon)
            for st in devron.iterate(sys_, state, n - 1).states:
                assert _sides(st.polygon) == sides
    return "widths n-1 for n=3..8"


def test_criterion_07_recutting():
    judge(7, "recutting relations, width n-1, conserved side lengths", check_recutting)


# --- 8 ----------------------------------------------------------------------


def check_toda() -> str:
    rng = make_rng(SEED)

    def block():
        return tuple(tuple(rational(rng, nonzero=True) for _ in range(2)) for _ in range(2))

    done = 0
    while done < 200:
        (x1, y1), (x2, y2) = b = block()
        try:
            (p, q), (r, w) = toda.mu(b)
        except Singular:
            continue
        assert p + q == x2 + y2 and r + w == x1 + y1
        assert p * r == y1 * y2 and q * w == x1 * x2
        done += 1
    done = 0
    while done < 100:
        try:
            assert toda.consistency_check(block())
        except Singular:
            continue
        done += 1
    for n in range(2, 9):
        report = devron.verify_pair(toda.TodaSystem(n), trials=20, seed=SEED)
        assert report.verdict == "pass" and set(report.widths()) == {n - 1}, n
        orders = 0
        while orders < 5:
            try:
                assert toda.g_order_check(toda.random_seed_matrix(n, rng)), n
            except Singular:
                continue
            orders += 1
    for size in (6, 8):
        done = 0
        while done < 20:
            state = recutting.RecutState(recutting.random_polygon(size, rng), rng.randint(0, 1))
            try:
                assert toda.commute_check(state, 3)
            except Singular:
                continue
            done += 1
    return "widths n-1 for n=2..8"


def test_criterion_08_toda():
    judge(8, "Toda identities, width n-1, recutting embedding, order of G", check_toda)


# --- 9 ----------------------------------------------------------------------


def _three_circles_meet() -> None:
    rng = make_rng(SEED)
    for _ in range(5):
        a, b, c, d, e, f = hexagon = conjectures.circle_start_polygon(3, rng)
        x = conjectures.circle_flips(hexagon, 0)[0]
        assert conjectures.flips_concur(hexagon, 0)
        if x is INFINITY:
            continue
        for triple in ((b, c, d), (d, e, f), (f, a, b)):
            rows = [[u * u + v * v, u, v, 1] for u, v in (*triple, x)]
            assert det(rows) == 0


def check_conjectures() -> str:
    runs = [
        (conjectures.conj_circle_experiment, range(3, 7)),
        (conjectures.conj_ks3d_experiment, range(4, 8)),
        (conjectures.conj_schubert_experiment, range(6, 9)),
    ]
    seen = []
    for runner, ns in runs:
        for n in ns:
            report = runner(n, 8, SEED)
            assert report.kept() >= 5, (report.system, n, report.summary())
            assert report.observed(), (report.system, n)
            assert runner(n, 8, SEED).to_dict() == report.to_dict()
            json.dumps(report.to_dict())
            seen.append(f"{report.system} n={n}: {sorted(set(report.observed()))} vs {report.conjectured}")
    _three_circles_meet()
    return "; ".join(seen)


def test_criterion_09_conjecture_harness():
    judge(9, "conjecture experiments produce exact reproducible observations", check_conjectures)


# --- 10 ---------------------------------------------------------------------


def _cli_text(argv) -> tuple[int, str]:
    out = io.StringIO()
    with redirect_stdout(out), redirect_stderr(io.StringIO()):
        status = cli_main(argv)
    return status, out.getvalue()


def check_determinism() -> str:
    configs = [
        ["oct", "--lattice", "3,0;1,1", "--trials", "20", "--seed", "7"],
        ["ysys", "--lattice", "2,1;5,0", "--trials", "5", "--seed", "3"],
        ["pentagram", "--n", "6", "--trials", "3", "--seed", "1"],
        ["pentagram", "--lower", "--n", "4", "--trials", "3", "--seed", "1"],
        ["recut", "--n", "6", "--trials", "20", "--seed", "7"],
        ["toda", "--n", "4", "--trials", "5", "--seed", "9", "--format", "csv"],
        ["conj", "schubert", "--n", "6", "--trials", "5", "--seed", "7"],
        ["conj", "circle", "--n", "4", "--trials", "3", "--seed", "2", "--format", "csv"],
        ["selftest"],
    ]
    for argv in configs:
        s1, a = _cli_text(argv)
        s2, b = _cli_text(argv)
        assert s1 == s2 == 0, argv
        if "--format" in argv:
            assert a == b, argv
        else:
            da, db = json.loads(a), json.loads(b)
            da.pop("timestamp", None)
            db.pop("timestamp", None)
            assert da == db, argv
        _, c = _cli_text(argv + ["--no-timestamp"])
        _, d = _cli_text(argv + ["--no-timestamp"])
        assert c == d, argv
    return f"{len(configs)} configurations"


def test_criterion_10_cli_determinism():
    judge(10, "identical CLI reports for identical seeds", check_determinism)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
