from fractions import Fraction

import pytest

from devronlab.devron import FWD, measure_width, verify_pair
from devronlab.errors import Singular
from devronlab.exactfield import GaussianRational, conj
from devronlab.recutting import RecutState, RecuttingSystem, phi, polygon, random_jittery, random_polygon, recut
from devronlab.rng import rational
from devronlab.toda import (
    TodaState,
    TodaSystem,
    bipartite_step,
    consistency_check,
    embed_recutting,
    embed_state,
    commute_check,
    g_order_check,
    in_w,
    mu,
    nu,
    random_seed_matrix,
    s,
    t,
)


def random_block(rng):
    return tuple(tuple(rational(rng, nonzero=True) for _ in range(2)) for _ in range(2))


def random_matrix(rng, size):
    return tuple(tuple(rational(rng, nonzero=True) for _ in range(size)) for _ in range(2))


def test_mu_example():
    assert mu(((1, 2), (3, 4))) == ((Fraction(14, 3), Fraction(7, 3)), (Fraction(12, 7), Fraction(9, 7)))


def test_mu_equal_columns():
    x1, x2 = Fraction(3, 5), Fraction(-7, 2)
    assert mu(((x1, x1), (x2, x2))) == ((x2, x2), (x1, x1))


def test_mu_singular():
    with pytest.raises(Singular):
        mu(((1, -1), (2, 3)))


def test_mu_conservation_laws(rng):
    for _ in range(200):
        (x1, y1), (x2, y2) = block = random_block(rng)
        try:
            (p, q), (r, w) = mu(block)
        except Singular:
            continue
        # row sums swap
        assert p + q == x2 + y2 and r + w == x1 + y1
        # each output column carries the product of the other input column
        assert p * r == y1 * y2 and q * w == x1 * x2


def test_mu_is_an_involution(rng):
    for _ in range(50):
        block = random_block(rng)
        try:
            assert mu(mu(block)) == block
        except Singular:
            pass


def test_mu_nu_consistency(rng):
    checked = 0
    for _ in range(100):
        try:
            assert consistency_check(random_block(rng))
            checked += 1
        except Singular:
            pass
    assert checked > 90


def test_consistency_on_triangle_block():
    w, z = GaussianRational(0, 1), GaussianRational(2, -1)
    assert consistency_check(((w, z), (conj(w), conj(z))))


def test_t_relations(rng):
    for _ in range(30):
        m = random_matrix(rng, 6)
        j = rng.randint(1, 6)
        try:
            assert t(t(m, j), j) == m
            assert t(t(t(m, j), j + 1), j) == t(t(t(m, j + 1), j), j + 1)
        except Singular:
            pass


def test_state_in_V_is_singular_forward(rng):
    m = random_matrix(rng, 6)
    cols = list(zip(*m))
    for c in range(0, 6, 2):
        cols[c + 1] = tuple(-v for v in cols[c])
    v_state = TodaState(tuple(zip(*cols)), 1)
    assert in_w(v_state.m, 1)
    with pytest.raises(Singular):
        bipartite_step(v_state, FWD)


@pytest.mark.parametrize("n", range(2, 9))
def test_g_order(n, rng):
    y = random_seed_matrix(n, rng)
    try:
        assert g_order_check(y)
    except Singular:
        pytest.skip("seed hit a singular nu")


@pytest.mark.parametrize("n", range(2, 9))
def test_toda_width(n):
    report = verify_pair(TodaSystem(n), trials=5, seed=6)
    assert report.verdict == "pass"
    assert set(report.widths()) == {n - 1}


def test_embedding_of_triangle_recut():
    p = polygon([(0, 0), (0, 1), (2, 0)])
    top, bottom = embed_recutting(p)
    block = ((top[0], top[1]), (bottom[0], bottom[1]))
    new = recut(p, 2)
    (p1, q1), (p2, q2) = mu(block)
    w_new, z_new = new[1] - new[0], new[2] - new[1]
    assert new[1] == GaussianRational(2, 1)
    # mu exchanges the rows: the conjugate edges land on top
    assert (p1, q1) == (conj(w_new), conj(z_new))
    assert (p2, q2) == (w_new, z_new)


@pytest.mark.parametrize("size", [6, 8])
def test_embedding_commutes(size, rng):
    for _ in range(20):
        state = RecutState(random_polygon(size, rng), rng.randint(0, 1))
        try:
            assert commute_check(state, 3)
        except Singular:
            pass


def test_toda_width_on_embedded_recutting_states(rng):
    n = 5
    b, _ = phi(random_jittery(n + 1, rng))
    recut_width, _ = measure_width(RecuttingSystem(n), RecutState(b, 1))
    toda_state = embed_state(RecutState(b, 1))
    assert TodaSystem(n).in_class(toda_state, "U")
    toda_width, _ = measure_width(TodaSystem(n), toda_state)
    assert toda_width == recut_width == n - 1


def test_nu_singular():
    with pytest.raises(Singular):
        nu(((1, 2), (2, 1)))


def test_s_matches_mu_on_columns(rng):
    m = random_matrix(rng, 4)
    out = s(m, 4)
    (a, b), (c, d) = mu(((m[0][3], m[0][0]), (m[1][3], m[1][0])))
    assert (out[0][3], out[0][0], out[1][3], out[1][0]) == (a, b, c, d)


def test_state_shape_validation():
    with pytest.raises(ValueError):
        TodaState(((1, 2, 3),), 0)
