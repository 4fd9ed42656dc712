"""Relative entropies expressed as entropy differences."""

from __future__ import annotations

from math import e, log, pi
from typing import NamedTuple, Optional

import numpy as np

from entropylab.core.config import get_settings
from entropylab.core.errors import InvalidParameterError
from entropylab.core.streams import RandomStream, as_stream
from entropylab.estimators.entropy import estimate_entropy, knn_entropy
from entropylab.estimators.estimate import EntropyEstimate, combined_se
from entropylab.geometry.bodies import Box, ConvexBody
from entropylab.geometry.operations import volume
from entropylab.observability.logger import get_logger
from entropylab.zoo.models import DensityModel

logger = get_logger(__name__)

LOG_2PIE = log(2.0 * pi * e)
SUPPORT_CHECK_M = 10_000


class Moments(NamedTuple):
    mean: np.ndarray
    covariance: np.ndarray
    regularized: bool
    sample_size: int


def estimate_moments(
    model: DensityModel, rng: Optional[RandomStream] = None, m: Optional[int] = None
) -> Moments:
    """Mean and covariance: exact when the model carries them, else from draws.

    Estimated covariances use at least max(10 n^2, 1000) draws and always get
    the ``covariance_ridge`` on the diagonal; ``regularized`` flags a sample
    covariance that was numerically singular before the ridge.
    """
    if model.mean is not None and model.covariance is not None:
        return Moments(np.array(model.mean), np.array(model.covariance), False, 0)
    cfg = get_settings()
    n = model.dim
    m = max(m or 0, 10 * n * n, 1000)
    draws = model.draw(as_stream(rng).child("moments"), m)
    mean = draws.mean(axis=0)
    cov = np.atleast_2d(np.cov(draws, rowvar=False, ddof=1))
    eigvals = np.linalg.eigvalsh(cov)
    regularized = bool(eigvals[0] <= 1e-12 * max(float(eigvals[-1]), 1e-300))
    if regularized:
        logger.warning("covariance_regularized", model=model.name, min_eigenvalue=float(eigvals[0]))
    cov = cov + cfg.covariance_ridge * np.eye(n)
    return Moments(mean, cov, regularized, m)


def gaussian_entropy(covariance: np.ndarray) -> float:
    """h(N(., covariance))."""
    cov = np.atleast_2d(covariance)
    sign, log_det = np.linalg.slogdet(cov)
    if sign <= 0:
        raise InvalidParameterError("covariance is not positive definite")
    return 0.5 * (cov.shape[0] * LOG_2PIE + float(log_det))


def relative_entropy_to_gaussian(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
) -> EntropyEstimate:
    """D(f) = h(g) - h(f) for the Gaussian g with the same mean and covariance."""
    stream = as_stream(rng)
    moments = estimate_moments(model, stream, m)
    h_f = estimate_entropy(model, stream.child("entropy"), m, method=method)
    notes = [h_f.bias_note] if h_f.bias_note else []
    if moments.sample_size:
        notes.append(f"covariance estimated from {moments.sample_size} draws")
    if moments.regularized:
        notes.append("covariance regularized")
    return EntropyEstimate(
        value=gaussian_entropy(moments.covariance) - h_f.value,
        std_error=h_f.std_error,
        method=h_f.method,
        sample_size=h_f.sample_size,
        bias_note="; ".join(notes) or None,
    )


def assert_supported_in(
    model: DensityModel, body: ConvexBody, rng: Optional[RandomStream] = None, m: Optional[int] = None
) -> None:
    """Raise if a draw of ``model`` falls outside ``body``."""
    if model.support is body:
        return
    draws = model.draw(as_stream(rng), min(m or SUPPORT_CHECK_M, SUPPORT_CHECK_M))
    outside = int(np.sum(~body.contains(draws)))
    if outside:
        raise InvalidParameterError(f"{outside} draws of {model.name!r} fall outside the {body.variant}")


def relative_entropy_to_uniform(
    model: DensityModel,
    body: ConvexBody,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
) -> EntropyEstimate:
    """D(f || U_A) = log|A| - h(X) for X supported in A."""
    if body.dim != model.dim:
        raise InvalidParameterError(f"body dimension {body.dim} != model dimension {model.dim}")
    stream = as_stream(rng)
    assert_supported_in(model, body, stream.child("support"), m)
    vol = volume(body, stream.child("volume"))
    h = estimate_entropy(model, stream.child("entropy"), m, method=method)
    log_vol_se = vol.std_error / vol.value
    return EntropyEstimate(
        value=log(vol.value) - h.value,
        std_error=combined_se(h.std_error, log_vol_se),
        method=h.method if vol.exact else "plugin_mc",
        sample_size=h.sample_size,
        bias_note=h.bias_note,
    )


def relative_entropy_to_independence(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
) -> EntropyEstimate:
    """D(f || f_1 x ... x f_n) = sum_i h(f_i) - h(f).

    Marginal entropies are exact for Gaussians and for product models;
    otherwise they come from 1-dim kNN on the columns of a sample.
    """
    stream = as_stream(rng)
    box_uniform = model.family == "uniform" and isinstance(model.support, Box)
    if box_uniform or ("factors" in model.params and model.analytic_entropy is not None):
        return EntropyEstimate.analytic(0.0, note="product measure")
    if model.is_gaussian and model.covariance is not None:
        marginal = 0.5 * float(np.sum(LOG_2PIE + np.log(np.diag(model.covariance))))
        return EntropyEstimate.analytic(marginal - gaussian_entropy(model.covariance))

    m = m or get_settings().default_m
    h = estimate_entropy(model, stream.child("joint"), m)
    draws = model.draw(stream.child("marginals"), m)
    marginals = [knn_entropy(draws[:, i]) for i in range(model.dim)]
    return EntropyEstimate(
        value=sum(est.value for est in marginals) - h.value,
        std_error=combined_se(h.std_error, *(est.std_error for est in marginals)),
        method="knn",
        sample_size=m,
        bias_note="marginals by 1-dim kNN",
    )
