"""Operations on convex bodies: volumes, uniform sampling, Minkowski sums."""

from __future__ import annotations

from math import exp
from typing import Optional, Tuple

import numpy as np

from entropylab.core.config import get_settings
from entropylab.core.errors import InvalidParameterError, UnsupportedOperationError
from entropylab.core.streams import RandomStream, as_stream
from entropylab.geometry.bodies import (
    Ball,
    Box,
    ConvexBody,
    Ellipsoid,
    HPolytope,
    Simplex,
    VolumeEstimate,
    log_unit_ball_volume,
)
from entropylab.geometry.sampling import hit_and_run, hpolytope_volume_mc
from entropylab.observability.logger import get_logger
from entropylab.zoo.models import DensityModel

logger = get_logger(__name__)

HOMOTHETY_RTOL = 1e-10


def unit_volume_ball(n: int) -> Ball:
    """Centered Euclidean ball of volume one in R^n."""
    if n < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {n}")
    return Ball(np.zeros(n), exp(-log_unit_ball_volume(n) / n))


def volume(
    body: ConvexBody, rng: Optional[RandomStream] = None, m: Optional[int] = None
) -> VolumeEstimate:
    """Lebesgue volume; H-polytopes of dimension <= 4 by hit-or-miss MC."""
    if body.has_analytic_volume:
        return VolumeEstimate(value=exp(body.log_volume()))
    cfg = get_settings()
    if body.dim > cfg.hpolytope_mc_max_dim:
        raise UnsupportedOperationError(
            f"MC volume is limited to dim <= {cfg.hpolytope_mc_max_dim}, got {body.dim}"
        )
    m = m or cfg.hpolytope_volume_m
    value, se = hpolytope_volume_mc(body, as_stream(rng).child("volume").generator(), m)
    logger.debug("polytope_volume_mc", dim=body.dim, m=m, value=value, std_error=se)
    return VolumeEstimate(value=value, std_error=se, exact=False, sample_size=m)


def sample_uniform(
    body: ConvexBody, generator: np.random.Generator, size: int = 1
) -> np.ndarray:
    """Uniform draws ``(size, n)``: exact for analytic bodies, hit-and-run otherwise."""
    if isinstance(body, HPolytope):
        return hit_and_run(body, generator, size)
    return body.sample(generator, size)


def _ellipsoid_frame(body: ConvexBody) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    if isinstance(body, Ball):
        return body.center, body.radius * np.eye(body.dim)
    if isinstance(body, Ellipsoid):
        return body.center, body.shape
    return None


def _homothety_ratio(gram_a: np.ndarray, gram_b: np.ndarray) -> Optional[float]:
    """s with gram_b = s^2 gram_a, if one exists."""
    s2 = float(np.trace(gram_b) / np.trace(gram_a))
    if np.allclose(gram_b, s2 * gram_a, rtol=0.0, atol=HOMOTHETY_RTOL * float(np.abs(gram_b).max())):
        return float(np.sqrt(s2))
    return None


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """A + B for pairs with a closed form.

    Supported: Ball+Ball, Box+Box, homothetic ellipsoid/ball pairs and
    homothetic simplices (same vertex order).
    """
    if a.dim != b.dim:
        raise InvalidParameterError("Minkowski sum of bodies in different dimensions")
    if isinstance(a, Ball) and isinstance(b, Ball):
        return Ball(a.center + b.center, a.radius + b.radius)
    if isinstance(a, Box) and isinstance(b, Box):
        return Box(a.lower + b.lower, a.upper + b.upper)

    frame_a, frame_b = _ellipsoid_frame(a), _ellipsoid_frame(b)
    if frame_a is not None and frame_b is not None:
        (ca, la), (cb, lb) = frame_a, frame_b
        s = _homothety_ratio(la @ la.T, lb @ lb.T)
        if s is not None:
            return Ellipsoid((1.0 + s) * la, ca + cb)

    if isinstance(a, Simplex) and isinstance(b, Simplex):
        ea = a.vertices - a.centroid()
        eb = b.vertices - b.centroid()
        s = float(np.sum(ea * eb) / np.sum(ea * ea))
        if s > 0 and np.allclose(eb, s * ea, atol=HOMOTHETY_RTOL * float(np.abs(eb).max())):
            return Simplex((1.0 + s) * ea + a.centroid() + b.centroid())

    raise UnsupportedOperationError(
        f"no closed-form Minkowski sum for {a.variant} + {b.variant}"
    )


def uniform_body_model(body: ConvexBody, name: Optional[str] = None) -> DensityModel:
    """U_A: the uniform distribution on ``body`` (a 1/n-concave measure)."""
    if not body.has_analytic_volume:
        raise UnsupportedOperationError(
            "uniform model needs an analytic volume; H-polytope volumes are MC only"
        )
    n = body.dim
    log_vol = body.log_volume()

    def log_density(x: np.ndarray) -> np.ndarray:
        return np.where(body.contains(x), -log_vol, -np.inf)

    return DensityModel(
        name=name or f"uniform_{body.variant}_{n}",
        family="uniform",
        dim=n,
        sampler=body.sample,
        log_density=log_density,
        analytic_entropy=log_vol,
        analytic_max_density=exp(-log_vol),
        mean=body.centroid(),
        covariance=body.uniform_covariance(),
        kappa=1.0 / n,
        support=body,
        mode=body.centroid(),
        flat=True,
        params={"body": body.to_dict()},
    )
