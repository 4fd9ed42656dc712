"""
Tests for the model zoo: families, affine images, convolutions, kappa algebra
and the maximal density.
"""
from dataclasses import replace
from math import e, log, pi

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from entropylab.core.errors import InvalidParameterError, UnsupportedOperationError
from entropylab.core.streams import RandomStream
from entropylab.geometry.bodies import Box
from entropylab.positioning.affine import AffineMap
from entropylab.zoo.families import (
    affine_image,
    convolve,
    exponential_product,
    laplace_product,
    make_exponential,
    make_gamma,
    make_gaussian,
    make_laplace,
    make_product,
    max_density,
    uniform_cube,
)
from entropylab.zoo.kappa import kappa_convolution
from entropylab.zoo.models import ConvolutionModel, DensityModel

kappas = st.floats(min_value=0.01, max_value=1.0)


# ─── Family Tests ───────────────────────────────────────────────────────────

def test_gaussian_closed_forms():
    model = make_gaussian(3, 2.0)
    assert model.analytic_entropy == pytest.approx(1.5 * log(2 * pi * e * 2.0))
    assert model.analytic_max_density == pytest.approx((2 * pi * 2.0) ** -1.5)
    assert model.kappa == 0.0
    assert model.is_gaussian


def test_gaussian_density_matches_max_at_mean():
    model = make_gaussian(2, [1.0, 4.0], mean=[1.0, -1.0])
    assert model.log_pdf(np.array([1.0, -1.0])) == pytest.approx(log(model.analytic_max_density))


def test_gaussian_rejects_indefinite_covariance():
    with pytest.raises(InvalidParameterError):
        make_gaussian(2, [[1.0, 2.0], [2.0, 1.0]])


def test_gaussian_rejects_asymmetric_covariance():
    with pytest.raises(InvalidParameterError):
        make_gaussian(2, [[1.0, 0.5], [0.0, 1.0]])


def test_exponential_product():
    model = exponential_product(3)
    assert model.dim == 3
    assert model.analytic_entropy == pytest.approx(3.0)
    assert model.analytic_max_density == pytest.approx(1.0)
    assert model.kappa == 0.0


def test_laplace_entropy():
    assert make_laplace(1.0).analytic_entropy == pytest.approx(1.0 + log(2.0))
    assert laplace_product(2).analytic_entropy == pytest.approx(2.0 * (1.0 + log(2.0)))


def test_gamma_requires_log_concave_shape():
    with pytest.raises(InvalidParameterError):
        make_gamma(0.5)
    assert make_gamma(2.0).mode[0] == pytest.approx(1.0)


def test_uniform_cube_is_one_over_n_concave():
    model = uniform_cube(3)
    assert model.analytic_entropy == pytest.approx(0.0)
    assert model.kappa == pytest.approx(1.0 / 3.0)
    assert model.flat
    assert isinstance(model.support, Box)


def test_product_requires_one_dim_factors():
    with pytest.raises(InvalidParameterError):
        make_product([make_gaussian(2)])


def test_kappa_above_one_over_n_rejected():
    with pytest.raises(InvalidParameterError):
        replace(uniform_cube(2), kappa=0.75)


def test_draws_have_model_shape():
    draws = exponential_product(4).draw(RandomStream(3), 1000)
    assert draws.shape == (1000, 4)
    assert np.all(draws >= 0.0)


# ─── Affine Image Tests ─────────────────────────────────────────────────────

def test_affine_image_shifts_entropy_by_log_det():
    model = exponential_product(2)
    amap = AffineMap(np.diag([2.0, 3.0]), np.array([1.0, 0.0]))
    image = affine_image(model, amap)
    assert image.analytic_entropy == pytest.approx(2.0 + log(6.0))
    assert image.analytic_max_density == pytest.approx(1.0 / 6.0)
    assert image.mean == pytest.approx([3.0, 3.0])


def test_affine_image_identity_returns_model():
    model = make_gaussian(2)
    assert affine_image(model, AffineMap.identity(2)) is model


def test_affine_image_of_cube_keeps_support():
    image = affine_image(uniform_cube(2), AffineMap.scaling(2.0, 2))
    assert image.support.contains(np.array([1.9, 1.9]))
    assert not image.support.contains(np.array([2.1, 0.5]))


def test_affine_image_dimension_mismatch():
    with pytest.raises(InvalidParameterError):
        affine_image(make_gaussian(2), AffineMap.identity(3))


# ─── Convolution Tests ──────────────────────────────────────────────────────

def test_gaussian_convolution_is_closed_form():
    conv = convolve(make_gaussian(2, 1.0), make_gaussian(2, 3.0))
    assert isinstance(conv, ConvolutionModel)
    assert conv.analytic_entropy == pytest.approx(log(2 * pi * e * 4.0))
    assert conv.params["gaussian_closure"]


def test_cube_convolution_kappa_and_support():
    conv = convolve(uniform_cube(2), uniform_cube(2))
    assert conv.kappa == pytest.approx(0.25)
    assert conv.support.log_volume() == pytest.approx(2 * log(2.0))
    assert conv.analytic_entropy is None
    assert conv.has_density
    assert conv.params["box_sum_density"]


def test_box_sum_density_is_a_product_of_trapezoids():
    conv = convolve(uniform_cube(1), uniform_cube(1))
    assert conv.log_pdf(np.array([1.0])) == pytest.approx(0.0)
    assert conv.log_pdf(np.array([0.5])) == pytest.approx(log(0.5))
    assert conv.log_pdf(np.array([2.5])) == -np.inf
    wide = convolve(uniform_cube(2), affine_image(uniform_cube(2), AffineMap(np.diag([2.0, 1.0]), np.zeros(2))))
    assert wide.analytic_max_density == pytest.approx(0.5)
    assert wide.log_pdf(np.array([1.5, 1.0])) == pytest.approx(log(0.5))
    assert wide.mode == pytest.approx([1.5, 1.0])


def test_box_sum_density_holds_in_high_dimension():
    conv = convolve(uniform_cube(8), uniform_cube(8))
    assert conv.has_density
    assert conv.log_pdf(np.full(8, 1.0)) == pytest.approx(0.0)
    assert conv.log_pdf(np.full(8, 0.1)) == pytest.approx(8 * log(0.1))


def test_nested_gaussian_sums_stay_closed():
    g = make_gaussian(2, 1.0)
    triple = convolve(convolve(g, g), g)
    assert triple.family == "gaussian"
    assert triple.is_gaussian
    assert triple.has_density
    assert triple.analytic_entropy == pytest.approx(log(2 * pi * e * 3.0))
    assert triple.analytic_max_density == pytest.approx(1.0 / (2 * pi * 3.0))

def test_log_concave_with_uniform_gives_log_concave():
    conv = convolve(exponential_product(2), uniform_cube(2))
    assert conv.kappa == 0.0


def test_convolve_dimension_mismatch():
    with pytest.raises(InvalidParameterError):
        convolve(make_gaussian(1), make_gaussian(2))


# ─── Kappa Algebra Tests ────────────────────────────────────────────────────

def test_kappa_convolution_values():
    assert kappa_convolution(1.0, 1.0) == pytest.approx(0.5)
    assert kappa_convolution(0.5, 0.5) == pytest.approx(0.25)
    assert kappa_convolution(0.0, 0.5) == 0.0


def test_kappa_convolution_domain():
    with pytest.raises(InvalidParameterError):
        kappa_convolution(-0.5, 0.5)
    with pytest.raises(InvalidParameterError):
        kappa_convolution(1.5, 0.5)


@given(kappas, kappas)
def test_kappa_convolution_symmetric_and_smaller(k1, k2):
    value = kappa_convolution(k1, k2)
    assert value == pytest.approx(kappa_convolution(k2, k1))
    assert 0.0 < value <= min(k1, k2)


# ─── Max Density Tests ──────────────────────────────────────────────────────

def test_max_density_analytic():
    md = max_density(make_gaussian(2))
    assert md.analytic
    assert md.value == pytest.approx(1.0 / (2 * pi))


def test_max_density_mode_search():
    model = replace(make_gaussian(2, [1.0, 2.0], mean=[0.5, -0.5]), analytic_max_density=None)
    md = max_density(model)
    assert not md.analytic
    assert md.value == pytest.approx(1.0 / (2 * pi * np.sqrt(2.0)), rel=1e-6)
    assert md.argmax == pytest.approx([0.5, -0.5], abs=1e-3)


def test_max_density_needs_log_concavity():
    model = replace(make_gaussian(1), analytic_max_density=None, kappa=None)
    with pytest.raises(UnsupportedOperationError):
        max_density(model)


def test_model_without_density():
    model = DensityModel(
        name="sampled_only",
        family="custom",
        dim=1,
        sampler=lambda g, size: g.random((size, 1)),
    )
    assert not model.has_density
    with pytest.raises(InvalidParameterError):
        model.log_pdf(np.zeros(1))


def test_exponential_rate_positive():
    with pytest.raises(InvalidParameterError):
        make_exponential(0.0)


# ─── Density Invariant Tests ────────────────────────────────────────────────

INVARIANT_MODELS = [
    lambda: make_gaussian(3, [0.5, 1.0, 2.0]),
    lambda: exponential_product(2),
    lambda: laplace_product(3),
    lambda: make_gamma(2.5),
    lambda: convolve(uniform_cube(2), uniform_cube(2)),
    lambda: convolve(make_gaussian(1), make_gaussian(1, 2.0)),
]


@pytest.mark.parametrize("build", INVARIANT_MODELS)
def test_density_integrates_to_one(build):
    model = build()
    # importance sampling from a heavy-tailed t matched to the model's moments
    proposal = stats.multivariate_t(loc=model.mean, shape=2.0 * model.covariance, df=3)
    draws = np.asarray(proposal.rvs(size=40_000, random_state=RandomStream(11).generator())).reshape(-1, model.dim)
    weights = np.exp(model.log_pdf(draws) - proposal.logpdf(draws))
    se = weights.std(ddof=1) / np.sqrt(weights.size)
    assert weights.mean() == pytest.approx(1.0, abs=4 * se + 1e-3)


@pytest.mark.parametrize("build", INVARIANT_MODELS)
def test_log_density_is_midpoint_concave(build):
    model = build()
    stream = RandomStream(12)
    x = model.draw(stream.child("x"), 1000)
    y = model.draw(stream.child("y"), 1000)
    mid = model.log_pdf(0.5 * (x + y))
    chord = 0.5 * (model.log_pdf(x) + model.log_pdf(y))
    assert np.all(mid >= chord - 1e-9)
