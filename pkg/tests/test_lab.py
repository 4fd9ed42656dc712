"""
Tests for verdict records, the check registry and the inequality checks.
"""
from dataclasses import replace
from math import e, isnan, log

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropylab.core.errors import ConfigError, InvalidParameterError, UnsupportedOperationError
from entropylab.core.streams import RandomStream
from entropylab.geometry.bodies import Ball, Box, Simplex
from entropylab.geometry.operations import uniform_body_model, unit_volume_ball
from entropylab.lab.checks import (
    check_entropy_sandwich,
    check_epi,
    check_estimator_agreement,
    check_gaussian_sandwich,
    check_kappa_entropy_lower,
    check_knn_accuracy,
    check_reverse_bm,
    check_submodularity,
    chi_square_tail,
    concentration_profile,
    concentration_reports,
    hyperplane_reports,
    hyperplane_scan,
    reverse_epi_pipeline,
    typical_set_mass,
    uniform_approximation_scan,
)
from entropylab.lab.registry import CheckRegistry
from entropylab.lab.reports import InequalityReport, failed_report, make_report, side, slack_for
from entropylab.zoo.families import convolve, exponential_product, make_gaussian, make_uniform_interval, uniform_cube

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
errors = st.floats(min_value=0.0, max_value=10.0)


# ─── Report Tests ───────────────────────────────────────────────────────────

def test_slack_for():
    assert slack_for(0.0, 0.0) == pytest.approx(1e-9)
    assert slack_for(3.0, 4.0) == pytest.approx(15.0)
    assert slack_for(1.0, slack=0.0) == 0.0


def test_make_report_verdict():
    ok = make_report("demo", lhs=1.0, rhs=2.0)
    assert ok.margin == pytest.approx(1.0)
    assert ok.satisfied
    within_slack = make_report("demo", lhs=2.1, rhs=2.0, lhs_se=0.1)
    assert within_slack.satisfied
    broken = make_report("demo", lhs=2.5, rhs=2.0, lhs_se=0.1)
    assert not broken.satisfied


def test_failing_side_fails_report():
    report = make_report("demo", lhs=0.0, rhs=1.0, sides=[side("lower", 2.0, 1.0)])
    assert report.margin > 0
    assert not report.satisfied
    assert not report.recompute_satisfied()


@given(finite, finite, errors, errors)
def test_verdict_matches_serialised_numbers(lhs, rhs, lhs_se, rhs_se):
    report = make_report("prop", lhs=lhs, rhs=rhs, lhs_se=lhs_se, rhs_se=rhs_se)
    assert report.satisfied == report.recompute_satisfied()
    assert report.satisfied == (report.rhs - report.lhs >= -report.slack)


def test_failed_report_survives_json():
    report = failed_report("epi", "ValueError: boom", {"seed": 1})
    assert not report.satisfied
    restored = InequalityReport.model_validate_json(report.model_dump_json())
    assert isnan(restored.lhs)
    assert restored.error == "ValueError: boom"
    assert not restored.recompute_satisfied()


# ─── Registry Tests ─────────────────────────────────────────────────────────

def test_registry_decorator_and_lookup():
    registry = CheckRegistry()

    @registry.check("always", "always satisfied")
    def always(spec, ctx):
        return "ran"

    assert "always" in registry
    assert len(registry) == 1
    assert registry.describe() == {"always": "always satisfied"}
    assert registry.invoke("always", None, None) == "ran"


def test_registry_unknown_check_is_config_error():
    registry = CheckRegistry()
    with pytest.raises(ConfigError) as info:
        registry.get("nope", location="checks[0].check")
    assert info.value.location == "checks[0].check"


def test_registry_rejects_non_callable():
    with pytest.raises(TypeError):
        CheckRegistry().register(42, name="bad")


# ─── Sandwich Tests ─────────────────────────────────────────────────────────

def test_entropy_sandwich_uniform_cube():
    report = check_entropy_sandwich(uniform_cube(4), RandomStream(0))
    assert report.satisfied
    assert report.margin == pytest.approx(1.0)
    assert report.sides[0].margin == pytest.approx(0.0, abs=1e-12)


def test_entropy_sandwich_gaussian_and_exponential():
    for model in (make_gaussian(3, 2.0), exponential_product(3)):
        report = check_entropy_sandwich(model, RandomStream(0))
        assert report.satisfied
        assert report.slack == pytest.approx(1e-9)


def test_gaussian_sandwich_is_tight_center_for_gaussians():
    report = check_gaussian_sandwich(make_gaussian(2, 3.0), RandomStream(0))
    assert report.margin == pytest.approx(0.5)
    assert report.sides[0].margin == pytest.approx(0.5)


def test_sandwich_needs_log_concavity():
    with pytest.raises(UnsupportedOperationError):
        check_entropy_sandwich(replace(make_gaussian(1), kappa=None), RandomStream(0))


# ─── Concentration Tests ────────────────────────────────────────────────────

def test_chi_square_tail():
    assert chi_square_tail(4, 0.0) == pytest.approx(1.0)
    assert 0.0 < chi_square_tail(16, 0.5) < 0.1


def test_concentration_profile_gaussian():
    profile = concentration_profile(make_gaussian(8), RandomStream(1), m=5000, eps_grid=[0.25, 0.5, 1.0])
    assert profile.oracle_tail is not None
    assert all(t <= b for t, b in zip(profile.empirical_tail, profile.tail_bound))
    assert profile.tail_bound[0] == pytest.approx(4.0 * np.exp(-0.25 ** 2 * 8 / 16.0))
    reports = concentration_reports(profile, {"seed": 1})
    assert len(reports) == 6
    assert all(r.satisfied for r in reports)
    assert {r.name for r in reports} == {"concentration_bound", "concentration_oracle"}


def test_concentration_profile_exponential_has_no_oracle():
    profile = concentration_profile(exponential_product(4), RandomStream(1), m=2000, eps_grid=[0.5])
    assert profile.oracle_tail is None
    assert len(concentration_reports(profile)) == 1


def test_concentration_rejects_large_eps():
    with pytest.raises(InvalidParameterError):
        concentration_profile(make_gaussian(2), RandomStream(0), m=100, eps_grid=[2.5])


def test_typical_set_mass_complements_tail():
    model = make_gaussian(4)
    profile = concentration_profile(model, RandomStream(2), m=3000, eps_grid=[0.5])
    mass, se = typical_set_mass(model, RandomStream(2), m=3000, eps=0.5)
    assert mass == pytest.approx(1.0 - profile.empirical_tail[0])
    assert se >= 0.0


# ─── Convolution Inequality Tests ───────────────────────────────────────────

def test_submodularity_gaussians_closed_form():
    report = check_submodularity(make_gaussian(2, 1.0), make_gaussian(2, 2.0), make_gaussian(2, 0.5), RandomStream(0))
    assert report.satisfied
    assert report.margin > 0.0
    assert report.slack == pytest.approx(1e-9)


def test_submodularity_margin_for_identical_gaussians():
    g = make_gaussian(1)
    report = check_submodularity(g, g, g, RandomStream(0))
    assert report.details["h_xyz"]["method"] == "analytic"
    assert report.margin == pytest.approx(0.5 * log(4.0 / 3.0), abs=1e-9)
    assert report.slack == pytest.approx(1e-9)


def test_submodularity_with_monte_carlo():
    cube = uniform_cube(1)
    report = check_submodularity(cube, cube, cube, RandomStream(0), m_outer=3000, m_inner=128)
    assert report.satisfied
    assert report.details["h_xyz"]["method"] == "convolution_mc"


def test_epi_equality_for_proportional_gaussians():
    report = check_epi(make_gaussian(3, 1.0), make_gaussian(3, 4.0), RandomStream(0))
    assert report.margin == pytest.approx(0.0, abs=1e-9)
    assert report.satisfied


def test_epi_cube_pair():
    report = check_epi(uniform_cube(1), uniform_cube(1), RandomStream(0), m=20_000, expected_ratio=e / 2)
    assert report.details["h_sum"]["method"] == "plugin_mc"
    assert report.sides[0].name == "epi_ratio"
    assert report.sides[0].satisfied
    assert report.satisfied


def test_epi_interval_ratio_via_knn():
    interval = make_uniform_interval()
    report = check_epi(interval, interval, RandomStream(0), m=50_000, method="knn", expected_ratio=e / 2)
    assert report.details["h_sum"]["method"] == "knn"
    assert report.details["ratio"] == pytest.approx(e / 2, abs=3 * report.details["ratio_se"])
    assert report.satisfied


def test_epi_ratio_side_fails_on_wrong_expectation():
    report = check_epi(make_gaussian(2, 1.0), make_gaussian(2, 4.0), RandomStream(0), expected_ratio=2.0)
    assert report.margin == pytest.approx(0.0, abs=1e-9)
    assert not report.sides[0].satisfied
    assert not report.satisfied


def test_reverse_epi_gaussians():
    report, stages = reverse_epi_pipeline(
        make_gaussian(2, 1.0), make_gaussian(2, [4.0, 0.25]), RandomStream(0), m=2000, ball_stage=False
    )
    assert [s.stage for s in stages] == ["position_x", "position_y", "sum"]
    assert report.lhs == pytest.approx(1.0)
    assert report.satisfied
    assert report.sides[0].name == "reverse_epi_lower"


def test_reverse_epi_high_dimensional_cube_and_ball():
    ball = uniform_body_model(unit_volume_ball(16))
    report, stages = reverse_epi_pipeline(uniform_cube(16), ball, RandomStream(42), m=4000, ball_stage=False)
    assert stages[-1].values["h_sum"]["method"] == "knn"
    assert np.isfinite(report.lhs)


def test_reverse_epi_with_ball_stage():
    report, stages = reverse_epi_pipeline(
        exponential_product(1), uniform_cube(1), RandomStream(0), m=2000, m_inner=64
    )
    assert stages[-1].stage == "ball"
    assert "N_x_plus_D" in stages[-1].values
    assert 1.0 <= report.lhs <= 30.0
    assert report.satisfied


# ─── Kappa Bound Tests ──────────────────────────────────────────────────────

def test_kappa_entropy_lower_is_tight_for_cube():
    report = check_kappa_entropy_lower(uniform_cube(2), Box.cube(2), 0.5, RandomStream(0))
    assert report.margin == pytest.approx(0.0, abs=1e-12)
    assert report.satisfied


def test_kappa_entropy_lower_simplex():
    simplex = Simplex.standard(3)
    report = check_kappa_entropy_lower(uniform_body_model(simplex), simplex, 1.0 / 3.0, RandomStream(0))
    assert report.satisfied


def test_kappa_entropy_lower_for_cube_sum():
    # Unif * Unif on [0, 1]^2 is 1/4-concave on [0, 2]^2, where the bound is 0
    conv = convolve(uniform_cube(2), uniform_cube(2))
    report = check_kappa_entropy_lower(conv, conv.support, conv.kappa, RandomStream(0), m=20_000)
    assert report.lhs == pytest.approx(0.0, abs=1e-12)
    assert report.rhs == pytest.approx(1.0, abs=4 * report.rhs_se)
    assert report.satisfied


def test_kappa_entropy_lower_rejects_kappa():
    with pytest.raises(InvalidParameterError):
        check_kappa_entropy_lower(uniform_cube(2), Box.cube(2), 0.75, RandomStream(0))


def test_reverse_bm_balls():
    ball = Ball(np.zeros(2), 1.0)
    report = check_reverse_bm(ball, ball, RandomStream(0), m=2000, m_inner=128)
    assert report.lhs == pytest.approx(log(np.pi))
    assert report.satisfied


def test_reverse_bm_interval_margin():
    interval = Box([0.0], [1.0])
    report = check_reverse_bm(interval, interval, RandomStream(0), m=20_000, expected_margin=0.5)
    assert report.lhs == pytest.approx(0.0, abs=1e-12)
    assert report.margin == pytest.approx(0.5, abs=3 * report.rhs_se)
    assert report.sides[0].name == "expected_margin"
    assert report.satisfied


def test_reverse_bm_needs_closed_form_sum():
    with pytest.raises(UnsupportedOperationError):
        check_reverse_bm(Box.cube(2), Ball(np.zeros(2), 1.0), RandomStream(0))


# ─── Hyperplane and Uniform Approximation Tests ─────────────────────────────

def test_hyperplane_gaussians_are_at_zero():
    rows = hyperplane_scan([make_gaussian(1), make_gaussian(4, [1.0, 2.0, 3.0, 4.0])], RandomStream(0))
    assert all(row.d_per_n == pytest.approx(0.0, abs=1e-12) for row in rows)
    assert not any(row.flagged for row in rows)
    reports = hyperplane_reports(rows)
    assert all(r.satisfied for r in reports)
    assert reports[1].rhs == pytest.approx(0.25 * log(4) + 1.0)


def test_hyperplane_skips_non_log_concave():
    rows = hyperplane_scan([replace(make_gaussian(1), kappa=None)], RandomStream(0))
    assert rows == []


def test_uniform_approximation_cube_is_exact():
    reports = uniform_approximation_scan([uniform_cube(3), make_gaussian(3)], RandomStream(0))
    assert len(reports) == 1
    assert reports[0].lhs == pytest.approx(0.0, abs=1e-12)
    assert reports[0].satisfied


# ─── Estimator Gate Tests ───────────────────────────────────────────────────

def test_knn_accuracy_gate():
    report = check_knn_accuracy(make_gaussian(2), RandomStream(0), m=10_000)
    assert report.slack == 0.0
    assert report.satisfied


def test_knn_accuracy_needs_closed_form():
    with pytest.raises(UnsupportedOperationError):
        check_knn_accuracy(replace(make_gaussian(1), analytic_entropy=None), RandomStream(0), m=100)


def test_estimator_agreement_convolution_against_knn():
    conv = convolve(exponential_product(1), uniform_cube(1))
    report = check_estimator_agreement(conv, RandomStream(0), m=3000, m_inner=256, knn_m=20_000)
    assert report.params["density_method"] == "convolution_mc"
    assert report.satisfied


def test_estimator_agreement_on_high_dimensional_cube_sum():
    conv = convolve(uniform_cube(8), uniform_cube(8))
    report = check_estimator_agreement(conv, RandomStream(42), m=5000, m_inner=256, knn_m=20_000)
    density = report.details["density"]
    assert report.params["density_method"] == "plugin_mc"
    assert density["value"] == pytest.approx(4.0, abs=4 * density["std_error"])
    assert np.isfinite(report.details["knn"]["value"])
