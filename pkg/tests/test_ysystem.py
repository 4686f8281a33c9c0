from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from devronlab import linalg
from devronlab.devron import BWD, iterate, verify_pair
from devronlab.errors import LiftUndefined, Singular, ZeroInversion
from devronlab.lattice import Lattice2D, PeriodicMatrix, canonicalize, companion, enumerate_lattices
from devronlab.ysystem import (
    YState,
    YSystem,
    f_table,
    f_via_lift,
    is_in_class,
    lift,
    ndr_matrix,
    random_state,
    rho,
    sample_U_bar,
    sample_U_offsurface,
    scaled_lift_det,
    step_G,
)

nonzero = st.builds(
    Fraction, st.integers(-40, 40).filter(lambda p: p != 0), st.integers(1, 20)
).filter(lambda x: x != -1)


def constant_state(lattice, t, sigma=1):
    return YState(lattice, PeriodicMatrix(companion(lattice), (Fraction(t),) * (2 * lattice.det)), sigma)


@given(nonzero)
def test_constant_state_step(t):
    lat = Lattice2D(3, 1, 1)
    s = step_G(constant_state(lat, t, sigma=0))
    for (i, j), v in s.u.items():
        assert v == (t**3 if (i + j) % 2 == 0 else 1 / t)


def test_minus_one_on_inverted_parity_is_singular():
    lat = Lattice2D(3, 1, 1)
    u = PeriodicMatrix.from_function(companion(lat), lambda i, j: Fraction(-1) if (i + j) % 2 else Fraction(2))
    with pytest.raises(Singular) as info:
        step_G(YState(lat, u, 0))
    assert info.value.positions
    with pytest.raises(ZeroInversion):
        step_G(constant_state(lat, 0, sigma=0))


def test_round_trip(rng):
    for lat in enumerate_lattices(5):
        for _ in range(5):
            s = random_state(lat, rng)
            try:
                assert step_G(step_G(s), BWD) == s
            except Singular:
                pass


def test_rho_of_constant_state():
    lat = canonicalize((2, 1), (5, 0))
    assert rho(constant_state(lat, Fraction(3, 2))) == Fraction(3, 2) ** 10


def test_rho_conserved(rng):
    lat = canonicalize((2, 1), (5, 0))
    for _ in range(100):
        s = random_state(lat, rng)
        try:
            assert rho(step_G(s)) == rho(s)
        except Singular:
            pass


def test_U_bar_samples_sit_on_the_hypersurface(rng):
    for lat in (Lattice2D(3, 1, 1), Lattice2D(4, 3, 1), Lattice2D(2, 1, 3)):
        s = sample_U_bar(lat, rng)
        assert is_in_class(s, "U")
        assert rho(s) == 1


def test_lift_examples():
    a, b, c, d = (Fraction(v) for v in (2, 3, 5, 7))
    assert lift([[a, b], [c, d]]) == [[1, -a, -a * b * d], [1, 1, -d], [-c, 1, 1]]
    assert lift([]) == [[1]]
    u = Fraction(4, 9)
    assert linalg.det(lift([[u]])) == 1 + u


@given(st.lists(st.lists(nonzero, min_size=3, max_size=3), min_size=3, max_size=3))
def test_lift_reproduces_ratios(b):
    try:
        star = lift(b)
    except LiftUndefined:
        return
    assert ndr_matrix(star) == b


@given(st.lists(st.lists(nonzero, min_size=4, max_size=4), min_size=4, max_size=4))
def test_determinant_via_lift(c):
    try:
        assert scaled_lift_det(c) == linalg.det(c)
    except (LiftUndefined, ZeroDivisionError):
        pass


def test_f_table_base_layers(rng):
    s = sample_U_bar(Lattice2D(3, 1, 1), rng)
    table = f_table(s, 1)
    u = table.state.u
    for i, j in u.lattice.fundamental_domain():
        if (i + j) % 2 == 0:
            assert table.F(i, j, 1) == 1 + u[i, j]
        else:
            assert table.F(i, j, 0) == 1


@pytest.mark.parametrize("lattice", [Lattice2D(3, 1, 1), Lattice2D(5, 2, 1), Lattice2D(2, 1, 2)], ids=str)
def test_f_table_matches_lift(lattice, rng):
    for _ in range(10):
        s = sample_U_bar(lattice, rng)
        table = f_table(s, 5)
        for k in range(1, table.depth + 1):
            for i, j in table.state.u.lattice.fundamental_domain():
                if (i + j + k) % 2:
                    assert table.F(i, j, k) == f_via_lift(s, i, j, k)


@pytest.mark.parametrize("lattice", [Lattice2D(3, 1, 1), Lattice2D(4, 1, 1), Lattice2D(5, 2, 1), Lattice2D(3, 2, 2)], ids=str)
def test_top_layer_vanishes(lattice, rng):
    n = lattice.det
    s = sample_U_bar(lattice, rng)
    table = f_table(s, n)
    assert table.depth == n
    for i, j in table.state.u.lattice.fundamental_domain():
        if (i + j + n) % 2:
            assert table.F(i, j, n) == 0


def test_width_at_most_n_minus_one():
    lat = canonicalize((2, 1), (5, 0))
    report = verify_pair(YSystem(lat), trials=20, seed=3, exact=False)
    assert report.verdict == "pass"
    assert max(report.widths()) <= 4


def test_terminal_state_has_minus_one_half(rng):
    lat = canonicalize((2, 1), (5, 0))
    sys = YSystem(lat)
    traj = iterate(sys, sys.sample("U", rng), 4)
    assert any(is_in_class(s, "V") for s in traj.states[1:])


def test_backward_from_U_bar_is_singular(rng):
    sys = YSystem(Lattice2D(3, 1, 1))
    traj = iterate(sys, sys.sample("U", rng), 2, BWD)
    assert traj.singular is not None


def test_offsurface_control_never_reaches_V(rng):
    lat = Lattice2D(4, 1, 1)
    s = sample_U_offsurface(lat, rng)
    assert rho(s) != 1
    traj = iterate(YSystem(lat, on_surface=False), s, lat.det + 5)
    assert not any(is_in_class(t, "V") for t in traj.states[1:])
    report = verify_pair(YSystem(lat, on_surface=False), trials=3, seed=1, exact=False, max_steps=9)
    assert report.verdict == "no pair observed"
