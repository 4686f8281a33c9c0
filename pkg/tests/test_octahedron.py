from fractions import Fraction

import pytest

from devronlab import linalg
from devronlab.devron import singular_depth, verify_pair
from devronlab.errors import InvalidFactors, Singular
from devronlab.lattice import Lattice2D, PeriodicMatrix, canonicalize, companion
from devronlab.octahedron import (
    BWD,
    OctahedronSystem,
    OctState,
    RankOneFactors,
    dodgson_oracle,
    is_in_class,
    layer_identity_check,
    random_factors,
    recurrence_layers,
    rescale_multiplier,
    sample_U,
    step,
    view_a,
)
from devronlab.rng import rational

EXAMPLE = Lattice2D(3, 1, 1)
LATTICES = [Lattice2D(3, 1, 1), Lattice2D(4, 1, 1), canonicalize((2, 1), (5, 0)), canonicalize((2, 1), (6, 0))]


def six_state(values, sigma=0):
    """State on the example lattice with the six companion cosets labelled a..f
    in fundamental-domain order."""
    lat = companion(EXAMPLE)
    return OctState(EXAMPLE, PeriodicMatrix(lat, tuple(Fraction(v) for v in values)), sigma)


def test_example_step_formula():
    a, b, c, d, e, f = (Fraction(v) for v in (2, 3, 5, 7, 11, 13))
    got = step(six_state((a, b, c, d, e, f))).x.values
    assert got == ((d * d - f * b) / a, b, (f * f - b * d) / c, d, (b * b - d * f) / e, f)


def test_all_ones_collapses_the_moving_parity():
    s = step(six_state((1,) * 6))
    assert s.sigma == 1
    assert s.x.values == (0, 1, 0, 1, 0, 1)


def test_six_coordinate_fixture_lies_in_U():
    assert is_in_class(six_state((1, 1, 1, 2, 1, 3)), "U")


def test_zero_divisor_reports_positions():
    with pytest.raises(Singular) as info:
        step(six_state((0, 1, 1, 1, 1, 1)))
    assert info.value.positions == ((1, 1),)


def test_round_trip_on_random_states(rng):
    lat = companion(EXAMPLE)
    for _ in range(20):
        s = OctState(EXAMPLE, PeriodicMatrix.from_function(lat, lambda i, j: rational(rng, nonzero=True)), 0)
        try:
            assert step(step(s), BWD) == s
        except Singular:
            pass


def test_dodgson_small_cases(rng):
    lat = Lattice2D(5, 2, 1)
    layer = PeriodicMatrix.from_function(lat, lambda i, j: rational(rng))
    assert dodgson_oracle(layer, 3, 2, 1) == layer[3, 2]
    assert dodgson_oracle(layer, 3, 2, 2) == layer[2, 2] * layer[4, 2] - layer[3, 1] * layer[3, 3]


def test_dodgson_matches_recurrence(rng):
    lat = Lattice2D(7, 3, 2)
    layer = PeriodicMatrix.from_function(lat, lambda i, j: rational(rng, nonzero=True))
    layers = recurrence_layers(lambda i, j: 1, lambda i, j: layer[i, j], depth=4, radius=6)
    for (i, j), value in layers[4].items():
        assert value == dodgson_oracle(layer, i, j, 4)


def test_rescale_multiplier_cases(rng):
    f = random_factors(Lattice2D(3, 1, 1), rng)
    assert rescale_multiplier(f, 2, 0, 0) == f.mu(1) * f.nu(1)
    assert rescale_multiplier(f, 2, 1, 1) == 1
    assert rescale_multiplier(f, 2, 2, 2) == 1 / (f.mu(-1) * f.nu(1))


def test_factors_validation():
    with pytest.raises(InvalidFactors):
        RankOneFactors(Lattice2D(3, 1, 1), (1,), (0,))
    with pytest.raises(InvalidFactors):
        RankOneFactors(Lattice2D(3, 1, 1), (1,), (1,), twist=-1)


def test_constant_factors_give_all_ones_view():
    f = RankOneFactors(EXAMPLE, (Fraction(1),), (Fraction(1),))
    from devronlab.octahedron import state_from_views

    s = state_from_views(EXAMPLE, 0, f.entry, lambda r, c: Fraction(2))
    assert set(view_a(s).values) == {1}
    assert is_in_class(s, "U")


@pytest.mark.parametrize("lattice", LATTICES, ids=str)
def test_layer_identity(lattice, rng):
    for _ in range(5):
        state, factors = sample_U(lattice, rng)
        sys = OctahedronSystem(lattice)
        try:
            assert layer_identity_check(state, factors, sys.expected_width())
        except Singular:
            continue


def test_backward_from_U_is_singular(rng):
    state, _ = sample_U(EXAMPLE, rng)
    once = step(state, BWD)
    # the rank-one half collapses to zeros
    assert all(v == 0 for (i, j), v in once.x.items() if (i + j) % 2 == once.sigma)
    assert singular_depth(OctahedronSystem(EXAMPLE), state, BWD, 3) is not None


@pytest.mark.parametrize("lattice", LATTICES, ids=str)
def test_width_is_axis_period_minus_one(lattice):
    sys = OctahedronSystem(lattice)
    report = verify_pair(sys, trials=5, seed=11)
    assert report.verdict == "pass"
    assert set(report.widths()) == {sys.period - 1}


def test_twisted_rank_one_views():
    lattice = Lattice2D(4, 1, 1)
    from devronlab.octahedron import allowed_twists
    from devronlab.exactfield import I

    assert allowed_twists(lattice) == [1, -1, I, -I]
    report = verify_pair(OctahedronSystem(lattice, twist=-1), trials=3, seed=5)
    assert report.verdict == "pass"
