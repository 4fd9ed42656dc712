"""Affine normalisation of models and ball-mass measurement.

The volume-one ellipsoid carrying a large share of a normalised log-concave
measure is only known to exist; here it is approximated by the isotropic
det-1 position, optionally refined over diagonal det-1 maps, and the mass
actually achieved is measured rather than assumed.
"""

from __future__ import annotations

from math import exp
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from entropylab.core.config import get_settings
from entropylab.core.streams import RandomStream, as_stream, binomial_se
from entropylab.estimators.divergence import estimate_moments
from entropylab.geometry.operations import unit_volume_ball
from entropylab.observability.logger import get_logger
from entropylab.positioning.affine import AffineMap
from entropylab.zoo.families import affine_image, max_density
from entropylab.zoo.models import DensityModel

logger = get_logger(__name__)

UNIT_TOL = 1e-15
SEARCH_STEP = 0.5
SEARCH_MIN_STEP = 1e-3
SEARCH_ITERS = 20


class BallMass(BaseModel):
    """Share of the measure inside the centered unit-volume ball.

    A zero count is censored: ``mass`` is then the upper bound 1/m.
    """

    mass: float
    mass_se: float
    mass_root: float
    censored: bool = False
    m: int
    map: Optional[Dict[str, Any]] = None


def _mass_record(inside: int, m: int, n: int) -> BallMass:
    if inside == 0:
        bound = 1.0 / m
        logger.warning("ball_mass_censored", m=m, upper_bound=bound)
        return BallMass(mass=bound, mass_se=0.0, mass_root=bound ** (1.0 / n), censored=True, m=m)
    mass = inside / m
    return BallMass(mass=mass, mass_se=binomial_se(mass, m), mass_root=mass ** (1.0 / n), m=m)


def normalize_max_density(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    opt_budget: Optional[int] = None,
) -> Tuple[DensityModel, AffineMap]:
    """Y = λX with λ = ||f||_inf^{1/n}, so that ||f_Y||_inf = 1."""
    md = max_density(model, opt_budget=opt_budget, rng=rng)
    n = model.dim
    log_lam = md.log_value / n
    if abs(log_lam) <= UNIT_TOL:
        return model, AffineMap.identity(n)
    amap = AffineMap.scaling(exp(log_lam), n)
    logger.debug("normalize_max_density", model=model.name, lam=exp(log_lam), analytic=md.analytic)
    return affine_image(model, amap, name=f"normalized({model.name})"), amap


def isotropic_det1_map(mean: np.ndarray, covariance: np.ndarray) -> AffineMap:
    """x -> W (x - mean) with W ∝ Σ^{-1/2} and det W = 1."""
    eigvals, eigvecs = np.linalg.eigh(covariance)
    log_w = np.log(eigvals)
    scales = np.exp(-0.5 * log_w + 0.5 * float(np.mean(log_w)))
    linear = (eigvecs * scales) @ eigvecs.T
    return AffineMap(linear, -linear @ mean)


def isotropic_det1_position(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
) -> Tuple[DensityModel, AffineMap]:
    """Center the model and make its covariance a multiple of I with a det-1 map."""
    moments = estimate_moments(model, rng, m)
    if moments.regularized:
        logger.warning("isotropic_position_regularized", model=model.name)
    amap = isotropic_det1_map(moments.mean, moments.covariance)
    return affine_image(model, amap, name=f"isotropic({model.name})"), amap


def ball_mass(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    center: Optional[np.ndarray] = None,
) -> BallMass:
    """μ(D) for D the unit-volume ball centered at the model mean."""
    m = m or get_settings().default_m
    stream = as_stream(rng)
    if center is None:
        center = estimate_moments(model, stream.child("center")).mean
    radius = unit_volume_ball(model.dim).radius
    draws = model.draw(stream.child("ball_mass"), m)
    inside = int(np.sum(np.linalg.norm(draws - center, axis=1) <= radius))
    return _mass_record(inside, m, model.dim)


def m_position_search(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    axes_iters: int = SEARCH_ITERS,
) -> Tuple[AffineMap, BallMass]:
    """Coordinate search over diagonal det-1 maps for a larger ball mass.

    All candidates are scored on one fixed sample, so the returned mass is
    never below the starting mass on that sample. The map returned also
    centers the model at its mean.
    """
    m = m or get_settings().default_m
    n = model.dim
    stream = as_stream(rng)
    center = estimate_moments(model, stream.child("center")).mean
    centered = model.draw(stream.child("search"), m) - center
    radius = unit_volume_ball(n).radius

    def _count(t: np.ndarray) -> int:
        scaled = centered * np.exp(t - t.mean())
        return int(np.sum(np.linalg.norm(scaled, axis=1) <= radius))

    best_t = np.zeros(n)
    best = _count(best_t)
    start = best
    step = SEARCH_STEP
    iters = 0
    while n > 1 and iters < axes_iters and step >= SEARCH_MIN_STEP:
        iters += 1
        improved = False
        for i in range(n):
            for sign in (1.0, -1.0):
                trial = best_t.copy()
                trial[i] += sign * step
                count = _count(trial)
                if count > best:
                    best, best_t, improved = count, trial, True
        if not improved:
            step *= 0.5

    scales = np.exp(best_t - best_t.mean())
    amap = AffineMap(np.diag(scales), -scales * center)
    record = _mass_record(best, m, n)
    record.map = amap.to_dict()
    logger.debug("m_position_search", model=model.name, start=start / m, best=best / m, iterations=iters)
    return amap, record
