"""
Tests for convex bodies, volumes, Minkowski sums and polytope sampling.
"""
from math import factorial, log, pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropylab.core.errors import InfeasibleBodyError, InvalidParameterError, UnsupportedOperationError
from entropylab.core.streams import RandomStream
from entropylab.geometry.bodies import Ball, Box, Ellipsoid, HPolytope, Simplex, log_unit_ball_volume
from entropylab.geometry.operations import (
    minkowski_sum,
    sample_uniform,
    uniform_body_model,
    unit_volume_ball,
    volume,
)
from entropylab.geometry.sampling import bounding_box, chebyshev_center, hit_and_run
from entropylab.positioning.affine import AffineMap

TRIANGLE = HPolytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
widths = st.lists(st.floats(min_value=0.1, max_value=5.0), min_size=3, max_size=3)


# ─── Body Tests ─────────────────────────────────────────────────────────────

def test_unit_ball_volumes():
    assert log_unit_ball_volume(1) == pytest.approx(log(2.0))
    assert log_unit_ball_volume(2) == pytest.approx(log(pi))
    assert log_unit_ball_volume(3) == pytest.approx(log(4.0 * pi / 3.0))


@pytest.mark.parametrize("n", [1, 2, 3, 8, 32])
def test_unit_volume_ball(n):
    assert unit_volume_ball(n).log_volume() == pytest.approx(0.0, abs=1e-12)


def test_box_membership_and_volume():
    box = Box([0.0, -1.0], [2.0, 1.0])
    assert box.log_volume() == pytest.approx(log(4.0))
    assert box.contains(np.array([1.0, 0.0]))
    assert list(box.contains(np.array([[1.0, 0.0], [3.0, 0.0]]))) == [True, False]


def test_box_rejects_empty_interior():
    with pytest.raises(InvalidParameterError):
        Box([0.0, 0.0], [1.0, 0.0])


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_standard_simplex_volume(n):
    assert Simplex.standard(n).log_volume() == pytest.approx(-log(factorial(n)))


def test_simplex_rejects_dependent_vertices():
    with pytest.raises(InvalidParameterError):
        Simplex([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])


def test_ellipsoid_volume_and_membership():
    ell = Ellipsoid(np.diag([2.0, 0.5]), np.zeros(2))
    assert ell.log_volume() == pytest.approx(log(pi))
    assert ell.contains(np.array([1.9, 0.0]))
    assert not ell.contains(np.array([0.0, 0.6]))


def test_ball_transform_scales_volume():
    image = Ball(np.zeros(3), 1.0).transform(AffineMap.scaling(2.0, 3))
    assert image.log_volume() == pytest.approx(log_unit_ball_volume(3) + 3 * log(2.0))


def test_box_transform_by_rotation_gives_polytope():
    theta = 0.3
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    image = Box.cube(2).transform(AffineMap(rot, np.zeros(2)))
    assert isinstance(image, HPolytope)
    assert image.contains(rot @ np.array([0.5, 0.5]))


def test_uniform_covariances():
    assert Box.cube(2).uniform_covariance() == pytest.approx(np.eye(2) / 12.0)
    assert Ball(np.zeros(2), 1.0).uniform_covariance() == pytest.approx(np.eye(2) / 4.0)


# ─── Minkowski Sum Tests ────────────────────────────────────────────────────

def test_minkowski_balls():
    total = minkowski_sum(Ball(np.zeros(2), 1.0), Ball(np.ones(2), 2.0))
    assert isinstance(total, Ball)
    assert total.radius == 3.0
    assert total.center == pytest.approx([1.0, 1.0])


def test_minkowski_boxes():
    total = minkowski_sum(Box.cube(2), Box([0.0, 0.0], [2.0, 3.0]))
    assert total.log_volume() == pytest.approx(log(12.0))


def test_minkowski_homothetic_simplices():
    tri = Simplex.standard(2)
    total = minkowski_sum(tri, Simplex(2.0 * tri.vertices))
    assert total.log_volume() == pytest.approx(log(4.5))


def test_minkowski_homothetic_ellipsoids():
    a = Ellipsoid(np.diag([1.0, 2.0]), np.zeros(2))
    b = Ellipsoid(np.diag([3.0, 6.0]), np.zeros(2))
    assert minkowski_sum(a, b).log_volume() == pytest.approx(log(pi * 4.0 * 8.0))


def test_minkowski_unsupported_pair():
    with pytest.raises(UnsupportedOperationError):
        minkowski_sum(Box.cube(2), Ball(np.zeros(2), 1.0))


@given(widths, widths)
def test_minkowski_boxes_satisfy_brunn_minkowski(a, b):
    box_a = Box(np.zeros(3), np.array(a))
    box_b = Box(np.zeros(3), np.array(b))
    total = minkowski_sum(box_a, box_b)
    lhs = np.exp(total.log_volume() / 3)
    rhs = np.exp(box_a.log_volume() / 3) + np.exp(box_b.log_volume() / 3)
    assert lhs >= rhs - 1e-9


@given(st.floats(min_value=0.1, max_value=5.0), st.floats(min_value=0.1, max_value=5.0))
def test_minkowski_balls_are_brunn_minkowski_equality(r1, r2):
    total = minkowski_sum(Ball(np.zeros(4), r1), Ball(np.zeros(4), r2))
    lhs = np.exp(total.log_volume() / 4)
    rhs = np.exp(Ball(np.zeros(4), r1).log_volume() / 4) + np.exp(Ball(np.zeros(4), r2).log_volume() / 4)
    assert lhs == pytest.approx(rhs, rel=1e-9)


# ─── Polytope Tests ─────────────────────────────────────────────────────────

def test_chebyshev_center_of_square():
    center, radius = chebyshev_center(Box.cube(2).to_hpolytope())
    assert center == pytest.approx([0.5, 0.5])
    assert radius == pytest.approx(0.5)


def test_infeasible_polytope():
    poly = HPolytope([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], [0.0, -1.0, 1.0, 1.0])
    with pytest.raises(InfeasibleBodyError):
        chebyshev_center(poly)


def test_bounding_box():
    lower, upper = bounding_box(TRIANGLE)
    assert lower == pytest.approx([0.0, 0.0], abs=1e-9)
    assert upper == pytest.approx([1.0, 1.0], abs=1e-9)


def test_polytope_volume_by_monte_carlo():
    vol = volume(TRIANGLE, RandomStream(5), m=50_000)
    assert not vol.exact
    assert vol.value == pytest.approx(0.5, abs=0.02)
    assert vol.std_error > 0.0


def test_analytic_volume_is_exact():
    vol = volume(Simplex.standard(3))
    assert vol.exact
    assert vol.value == pytest.approx(1.0 / 6.0)


def test_hit_and_run_stays_inside():
    draws = hit_and_run(TRIANGLE, RandomStream(2).generator(), 4000)
    assert draws.shape == (4000, 2)
    assert np.all(TRIANGLE.contains(draws))
    assert draws.mean(axis=0) == pytest.approx([1.0 / 3.0, 1.0 / 3.0], abs=0.05)


def test_hit_and_run_box_marginal_means():
    box = Box([0.0, 0.0], [2.0, 1.0]).to_hpolytope()
    draws = hit_and_run(box, RandomStream(3).generator(), 20 * 500, chains=20)
    chain_means = draws.reshape(20, 500, 2).mean(axis=1)
    se = chain_means.std(axis=0, ddof=1) / np.sqrt(20)
    assert np.all(np.abs(chain_means.mean(axis=0) - [1.0, 0.5]) <= 4 * se)


def test_sample_uniform_ball():
    ball = Ball(np.array([1.0, 2.0, 3.0]), 0.5)
    draws = sample_uniform(ball, RandomStream(1).generator(), 2000)
    assert np.all(ball.contains(draws))


def test_uniform_model_needs_analytic_volume():
    with pytest.raises(UnsupportedOperationError):
        uniform_body_model(TRIANGLE)


def test_uniform_ball_model():
    model = uniform_body_model(unit_volume_ball(4))
    assert model.analytic_entropy == pytest.approx(0.0, abs=1e-12)
    assert model.kappa == pytest.approx(0.25)
