import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sliceball.bounds import (
    RadiusPair, apollonius_ball, bergman_constants, bergman_covering_objective,
    bergman_injectivity_objective, bloch_constants, bloch_covering_objective,
    bloch_injectivity_objective, bonk_bound, extremal_cover, extremal_f_alpha,
    growth_bound_bergman, growth_bound_bloch, landau_covering, landau_radii, landau_radius,
    lindelof_bounds, maximize, rotation_covering_constants,
)
from sliceball.quaternion import I, DomainError, ImaginaryUnit, Quaternion
from sliceball.sampling import ball_points
from sliceball.series import escalate, evaluate_many, slice_derivative

# 40-digit maximisers (mpmath findroot on the derivative), rounded to float
R_BLOCH_INJ = 0.3552482843868886
R_BLOCH_COV = 0.2308382096295723
BERGMAN_ORACLE = {1: (0.0313732780028320, 0.0157487657601157),
                  2: (0.0750159423255691, 0.0379889358293264)}

SQ3 = math.sqrt(3.0)


def grid_max(func, step=1e-5):
    r = np.arange(step, 1.0, step)
    v = np.array([func(x) for x in r])
    k = int(np.argmax(v))
    return r[k], v[k]


def test_bonk_bound_examples():
    assert bonk_bound(0.0) == 1.0
    assert abs(bonk_bound(1 / SQ3 - 1e-12)) < 1e-11
    with mpmath.workdps(30):
        t = mpmath.mpf("0.3")
        ref = (1 - mpmath.sqrt(3) * t) / (1 - t / mpmath.sqrt(3)) ** 3
    assert bonk_bound(0.3) == pytest.approx(float(ref), abs=1e-15)
    assert bonk_bound(0.3) == pytest.approx(0.84995478, abs=1e-8)
    with pytest.raises(DomainError):
        bonk_bound(1 / SQ3)
    with pytest.raises(DomainError):
        bonk_bound(-0.1)


def test_bonk_bound_decreasing():
    v = [bonk_bound(t) for t in np.linspace(0, 1 / SQ3, 500, endpoint=False)]
    assert np.all(np.diff(v) < 0)


def test_landau_examples():
    assert landau_radius(1.0) == 1.0
    assert landau_radius(0.6) == pytest.approx(1 / 3, abs=1e-15)
    assert landau_covering(0.6, 1 / 3) == pytest.approx(1 / 9, abs=1e-15)
    assert landau_covering(0.6, 1e-12) == pytest.approx(0.0, abs=1e-11)
    pair = landau_radii(0.6)
    assert pair.covering_radius == pytest.approx(pair.injectivity_radius ** 2, abs=1e-15)
    with pytest.raises(DomainError):
        landau_covering(0.6, 0.34)
    with pytest.raises(DomainError):
        landau_radius(0.0)


@given(st.floats(1e-6, 1.0))
def test_landau_fixed_point(alpha):
    r0 = landau_radius(alpha)
    assert landau_covering(alpha, r0) == pytest.approx(r0 * r0, abs=1e-12)
    assert r0 <= alpha


@given(st.floats(1e-3, 0.999), st.floats(1e-6, 1.0))
def test_landau_covering_lower_bound(alpha, frac):
    r0 = landau_radius(alpha)
    r = frac * r0
    assert landau_covering(alpha, r) >= r * r0 - 1e-15


def test_landau_radius_increasing():
    a = np.linspace(0.01, 1.0, 100)
    assert np.all(np.diff([landau_radius(x) for x in a]) > 0)


def test_bloch_constants_against_oracle():
    pair = bloch_constants()
    assert pair.injectivity_radius == pytest.approx(R_BLOCH_INJ, abs=1e-9)
    assert pair.covering_radius == pytest.approx(R_BLOCH_COV, abs=1e-9)
    assert abs(pair.injectivity_radius - 0.3552) < 5e-4
    assert abs(pair.covering_radius - 0.2308) < 5e-4
    assert pair.covering_radius > 0.23


@pytest.mark.parametrize("objective", [bloch_injectivity_objective, bloch_covering_objective])
def test_maximizer_invariant(objective):
    res = maximize(objective)
    _, v_grid = grid_max(objective)
    assert res.value >= v_grid - 1e-9
    for r in (res.argmax_r - res.tolerance, res.argmax_r + res.tolerance):
        assert res.value >= objective(r) - 1e-9


def test_stabilised_objective_small_r():
    # naive x - sqrt(x^2 - r^2) loses every digit here
    r = 1e-9
    assert bloch_injectivity_objective(r) == pytest.approx(r, rel=1e-6)


@pytest.mark.parametrize("p", [1, 2])
def test_bergman_constants_oracle(p):
    pair = bergman_constants(p)
    r_ref, R_ref = BERGMAN_ORACLE[p]
    assert pair.injectivity_radius == pytest.approx(r_ref, abs=1e-9)
    assert pair.covering_radius == pytest.approx(R_ref, abs=1e-9)


def test_bergman_p2_grid_oracle():
    pair = bergman_constants(2)
    _, r2 = grid_max(lambda r: bergman_injectivity_objective(r, 2))
    _, R2 = grid_max(lambda r: bergman_covering_objective(r, 2, symmetric=True))
    assert abs(pair.injectivity_radius - r2) < 1e-4
    assert abs(pair.covering_radius - R2) < 1e-4


def test_bergman_monotone_in_p():
    rs = [bergman_constants(p).injectivity_radius for p in (1, 2, 4, 10)]
    assert all(r > 0 for r in rs)
    assert all(a <= b for a, b in zip(rs, rs[1:]))


def test_bergman_printed_objective_has_no_interior_max():
    # the printed inner root sqrt(M - r^2) makes the objective grow like M^3
    v = [bergman_covering_objective(r, 2, symmetric=False) for r in (0.9, 0.99, 0.999)]
    assert v[0] < v[1] < v[2]
    with pytest.raises(DomainError):
        bergman_constants(2, symmetric=False)


def test_bergman_domain():
    with pytest.raises(DomainError):
        bergman_constants(0.5)


def test_radius_pair_invariant():
    with pytest.raises(ValueError):
        RadiusPair(0.1, 0.2)


def test_growth_bounds():
    assert growth_bound_bloch(0.0) == 0.0
    e = math.e
    assert growth_bound_bloch((e - 1) / (e + 1)) == pytest.approx(0.5, abs=1e-15)
    assert growth_bound_bergman(0.0, 3) == 1.0
    assert growth_bound_bergman(0.5, 2) == pytest.approx(2.0)
    for bad in (1.0, -0.1):
        with pytest.raises(DomainError):
            growth_bound_bloch(bad)
        with pytest.raises(DomainError):
            growth_bound_bergman(bad, 2)


def test_apollonius_examples():
    b = apollonius_ball(1 + I, 0.5, 0.0)
    assert b.center == Quaternion(1, 1) and b.radius == 0
    b = apollonius_ball(0, 1, 0.5)
    assert b.center.isclose(-1 / 3) and b.radius == pytest.approx(2 / 3)
    assert apollonius_ball(I, I, 0.3).radius == 0
    with pytest.raises(DomainError, match="hyperplane"):
        apollonius_ball(0, 1, 1.0)


@pytest.mark.parametrize("t", [0.2, 0.5, 0.9, 1.5, 3.0])
def test_apollonius_membership(t):
    rng = np.random.default_rng(int(t * 10))
    a, b = Quaternion(*rng.uniform(-1, 1, 4)), Quaternion(*rng.uniform(-1, 1, 4))
    ball = apollonius_ball(a, b, t)
    pts = rng.uniform(-4, 4, (1000, 4))
    lhs = np.linalg.norm(pts - np.asarray(a), axis=1) <= t * np.linalg.norm(pts - np.asarray(b), axis=1)
    inside = np.linalg.norm(pts - np.asarray(ball.center), axis=1) <= ball.radius + 1e-9
    # for t > 1 the inequality set is the exterior of the ball
    assert np.array_equal(lhs, inside if t < 1 else ~inside | np.isclose(
        np.linalg.norm(pts - np.asarray(ball.center), axis=1), ball.radius))


def test_lindelof_bounds_examples():
    lb = lindelof_bounds(0, 0.4)
    assert lb.lower21 == 0 and lb.upper21 == pytest.approx(0.4) and lb.bound22 == pytest.approx(0.4)
    lb = lindelof_bounds(Quaternion(0.1, 0.2), 0.0)
    assert lb.radius20 == 0 and lb.bound22 == 0 and lb.center_scale == 1
    assert lb.lower21 == pytest.approx(lb.upper21)
    lb = lindelof_bounds(0.5, 0.5)
    assert lb.upper21 == pytest.approx(0.8) and lb.lower21 == 0
    with pytest.raises(DomainError):
        lindelof_bounds(1.0, 0.5)


def test_extremal_f_alpha():
    f = extremal_f_alpha(0.6, order=64)
    assert f.coeff(0) == Quaternion() and f.coeff(1) == Quaternion(0.6)
    d = slice_derivative(f)
    assert abs(d(-1 / 3)) < 1e-8
    for r in np.linspace(0.01, 1 / 3, 20):
        assert f(-r).isclose(-landau_covering(0.6, r), 1e-12)
    # closed form q(q + a)/(1 + q a) on the real axis
    x = 0.25
    assert f(x).w == pytest.approx(x * (x + 0.6) / (1 + 0.6 * x), abs=1e-15)


def test_extremal_cover_reduces_to_f_alpha():
    g = extremal_cover(0.6, ImaginaryUnit(I), math.pi, 1.0, order=40)
    assert g.allclose(extremal_f_alpha(0.6, order=40), 1e-14)


@given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_extremal_cover_normalisation(alpha, theta, phi):
    I_ = ImaginaryUnit.normalized(Quaternion(0, math.cos(phi), math.sin(phi), 0.3))
    v = Quaternion(math.cos(phi), 0, 0, math.sin(phi))
    g = extremal_cover(alpha, I_, theta, v, order=16)
    assert g.coeff(0).isclose(0, 1e-15)
    assert abs(g.coeff(1)) == pytest.approx(alpha, abs=1e-12)


def test_extremal_cover_self_map():
    g = escalate(extremal_cover(0.7, ImaginaryUnit(Quaternion(0, 0, 1)), 1.0, Quaternion(0, 0, 0, 1)), 0.95)
    vals = evaluate_many(g, ball_points(200, 0.95, seed=4))
    assert np.max(np.linalg.norm(vals, axis=1)) < 1


def test_rotation_constants():
    a, b, c = rotation_covering_constants()
    assert c == pytest.approx(0.0505102572, abs=1e-10)
    assert b == pytest.approx(2 * c, abs=1e-15)
    assert a > b
