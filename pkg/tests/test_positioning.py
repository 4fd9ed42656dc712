"""
Tests for affine maps, max-density normalisation, det-1 positioning and
ball mass.
"""
from dataclasses import replace
from math import log

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropylab.core.errors import InvalidParameterError
from entropylab.core.streams import RandomStream
from entropylab.geometry.bodies import Ball
from entropylab.geometry.operations import uniform_body_model, unit_volume_ball
from entropylab.positioning.affine import AffineMap
from entropylab.positioning.position import (
    ball_mass,
    isotropic_det1_map,
    isotropic_det1_position,
    m_position_search,
    normalize_max_density,
)
from entropylab.zoo.families import affine_image, exponential_product, make_gaussian, uniform_cube

scales = st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=1, max_size=5)


# ─── Affine Map Tests ───────────────────────────────────────────────────────

def test_log_det():
    amap = AffineMap(np.diag([2.0, 3.0]), np.zeros(2))
    assert amap.log_det == pytest.approx(log(6.0))
    assert amap.abs_det == pytest.approx(6.0)
    assert amap.is_diagonal()
    assert not amap.is_volume_preserving()


def test_singular_map_rejected():
    with pytest.raises(InvalidParameterError):
        AffineMap(np.array([[1.0, 2.0], [2.0, 4.0]]), np.zeros(2))


def test_shift_shape_checked():
    with pytest.raises(InvalidParameterError):
        AffineMap(np.eye(2), np.zeros(3))


def test_compose_applies_inner_first():
    scale = AffineMap.scaling(2.0, 2)
    shift = AffineMap.translation(np.array([1.0, 0.0]))
    combined = shift.compose(scale)
    assert combined.apply(np.array([1.0, 1.0])) == pytest.approx([3.0, 2.0])


def test_inverse():
    amap = AffineMap(np.array([[2.0, 1.0], [0.0, 1.0]]), np.array([1.0, -1.0]))
    assert amap.inverse().compose(amap).is_identity(tol=1e-12)


def test_to_dict():
    data = AffineMap.identity(2).to_dict()
    assert data["linear"] == [[1.0, 0.0], [0.0, 1.0]]
    assert data["log_det"] == 0.0


@given(scales, scales)
def test_log_det_adds_under_composition(a, b):
    n = min(len(a), len(b))
    left = AffineMap(np.diag(a[:n]), np.zeros(n))
    right = AffineMap(np.diag(b[:n]), np.ones(n))
    assert left.compose(right).log_det == pytest.approx(left.log_det + right.log_det, abs=1e-9)


# ─── Normalisation Tests ────────────────────────────────────────────────────

def test_normalize_gaussian_to_unit_max_density():
    normalized, amap = normalize_max_density(make_gaussian(2, 4.0))
    assert normalized.analytic_max_density == pytest.approx(1.0)
    assert amap.log_det == pytest.approx(log(1.0 / (8.0 * np.pi)))


def test_normalize_is_identity_at_unit_max():
    model = exponential_product(3)
    normalized, amap = normalize_max_density(model)
    assert normalized is model
    assert amap.is_identity()


# ─── Position Tests ─────────────────────────────────────────────────────────

def test_isotropic_map_has_unit_determinant():
    cov = np.array([[4.0, 1.0], [1.0, 2.0]])
    amap = isotropic_det1_map(np.array([1.0, 1.0]), cov)
    assert amap.log_det == pytest.approx(0.0, abs=1e-12)
    image = amap.linear @ cov @ amap.linear.T
    assert image == pytest.approx(image[0, 0] * np.eye(2))
    assert amap.apply(np.array([1.0, 1.0])) == pytest.approx([0.0, 0.0], abs=1e-12)


def test_isotropic_position_keeps_entropy():
    model = affine_image(exponential_product(2), AffineMap(np.diag([3.0, 0.5]), np.zeros(2)))
    placed, amap = isotropic_det1_position(model, RandomStream(0))
    assert placed.analytic_entropy == pytest.approx(model.analytic_entropy)
    assert placed.mean == pytest.approx([0.0, 0.0], abs=1e-12)
    assert placed.covariance == pytest.approx(placed.covariance[0, 0] * np.eye(2))


# ─── Ball Mass Tests ────────────────────────────────────────────────────────

def test_ball_mass_of_the_ball_itself():
    model = uniform_body_model(unit_volume_ball(3))
    mass = ball_mass(model, RandomStream(1), m=2000)
    assert mass.mass == 1.0
    assert mass.mass_root == 1.0
    assert not mass.censored


def test_ball_mass_of_cube_between_zero_and_one():
    mass = ball_mass(uniform_cube(2), RandomStream(1), m=10_000)
    assert 0.5 < mass.mass < 1.0
    assert mass.mass_se > 0.0


@pytest.mark.parametrize("n", [1, 2, 4])
def test_mass_root_of_doubled_ball_is_one_half(n):
    # the unit-volume ball holds 2^{-n} of a ball with twice its radius
    model = uniform_body_model(Ball(np.zeros(n), 2.0 * unit_volume_ball(n).radius))
    mass = ball_mass(model, RandomStream(5), m=20_000)
    root_se = mass.mass_root * mass.mass_se / (n * mass.mass)
    assert mass.mass_root == pytest.approx(mass.mass ** (1.0 / n))
    assert mass.mass_root == pytest.approx(0.5, abs=4 * root_se)


def test_ball_mass_censored_when_nothing_lands():
    model = make_gaussian(1, 1e12)
    mass = ball_mass(model, RandomStream(1), m=1000)
    assert mass.censored
    assert mass.mass == pytest.approx(1e-3)


def test_m_position_search_recovers_isotropy():
    model = make_gaussian(2, [16.0, 1.0 / 16.0])
    amap, best = m_position_search(model, RandomStream(3), m=20_000)
    assert amap.log_det == pytest.approx(0.0, abs=1e-10)
    assert best.map is not None
    # isotropic optimum: 1 - exp(-1/(2 pi)) ~ 0.147
    assert best.mass > 0.1


def test_m_position_search_one_dim_is_centering_only():
    model = replace(make_gaussian(1, 0.01), name="narrow")
    amap, best = m_position_search(model, RandomStream(3), m=2000)
    assert amap.linear == pytest.approx(np.eye(1))
    assert best.mass > 0.99
