"""Differential entropy estimators.

All values are in nats. Monte Carlo estimators draw through
:class:`~entropylab.core.streams.RandomStream` chunks, so a fixed seed and
chunk size give bit-identical results for any number of workers.
"""

from __future__ import annotations

from math import log
from typing import Any, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma, logsumexp
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from entropylab.core.config import get_settings
from entropylab.core.errors import (
    ConvolutionDensityError,
    InternalInconsistencyError,
    InvalidParameterError,
    UnsupportedOperationError,
)
from entropylab.core.streams import RandomStream, as_stream, map_chunks, mean_and_se
from entropylab.estimators.estimate import DensityEstimate, EntropyEstimate
from entropylab.geometry.bodies import log_unit_ball_volume
from entropylab.observability.logger import get_logger
from entropylab.zoo.models import ConvolutionModel, DensityModel

logger = get_logger(__name__)

# outer points per inner MC block in the convolution estimator
_OUTER_BLOCK = 256
_JITTER_KEY = "knn_jitter"
# auto routes sums of two flat factors to kNN from this dimension on
FLAT_SUM_KNN_DIM = 8


def information_content(model: DensityModel, x: np.ndarray) -> Any:
    """h̃(x) = -log f(x); ``+inf`` off the support."""
    values = -np.asarray(model.log_pdf(x), dtype=float)
    off = ~np.isfinite(values)
    if np.any(off):
        logger.warning("information_content_off_support", model=model.name, count=int(np.sum(off)))
    return float(values) if values.ndim == 0 else values


def plugin_entropy(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> EntropyEstimate:
    """Mean of -log f over ``m`` iid draws (unbiased)."""
    if not model.has_density:
        raise UnsupportedOperationError(f"model {model.name!r} has no evaluable density")
    m = m or get_settings().default_m
    if m < 2:
        raise InvalidParameterError(f"plug-in entropy needs m >= 2, got {m}")

    def _chunk(generator: np.random.Generator, count: int) -> np.ndarray:
        return -model.log_pdf(model.sample(generator, count))

    values = map_chunks(_chunk, m, as_stream(rng).child("plugin"), chunk_size, workers)
    if not np.all(np.isfinite(values)):
        bad = int(np.sum(~np.isfinite(values)))
        raise InternalInconsistencyError(
            f"sampler of {model.name!r} produced {bad} points where its density vanishes"
        )
    value, se = mean_and_se(values)
    logger.debug("plugin_entropy", model=model.name, m=m, value=value, std_error=se)
    return EntropyEstimate(value=value, std_error=se, method="plugin_mc", sample_size=m)


def _knn_value(samples: np.ndarray, k: int, workers: int) -> Tuple[float, int]:
    """Kozachenko-Leonenko estimate and the number of zero k-th distances."""
    m, n = samples.shape
    tree = cKDTree(samples, balanced_tree=True)
    distances, _ = tree.query(samples, k=k + 1, workers=workers)
    eps = distances[:, k]
    zeros = int(np.sum(eps <= 0.0))
    with np.errstate(divide="ignore"):
        log_eps = np.log(eps)
    value = float(digamma(m) - digamma(k) + log_unit_ball_volume(n) + n * np.mean(log_eps))
    return value, zeros


def knn_entropy(
    samples: np.ndarray,
    k: Optional[int] = None,
    splits: Optional[int] = None,
    workers: int = 1,
) -> EntropyEstimate:
    """Kozachenko-Leonenko k-nearest-neighbour entropy of a sample ``(m, n)``.

    The standard error is the spread of the estimates on ``splits`` disjoint
    folds, divided by sqrt(splits). Exact ties are broken by a deterministic
    jitter of relative size ``knn_jitter``.
    """
    cfg = get_settings()
    k = k or cfg.knn_k
    splits = splits or cfg.knn_splits
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    m = x.shape[0]
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    if m <= k:
        raise InvalidParameterError(f"kNN entropy needs more than k={k} points, got {m}")

    value, zeros = _knn_value(x, k, workers)
    if zeros:
        scale = max(float(np.max(np.std(x, axis=0))), 1.0)
        logger.warning("knn_duplicates_jittered", zero_distances=zeros, jitter=cfg.knn_jitter * scale)
        jitter = RandomStream(0, (_JITTER_KEY,)).generator().standard_normal(x.shape)
        x = x + cfg.knn_jitter * scale * jitter
        value, _ = _knn_value(x, k, workers)

    splits = min(splits, m // (k + 1))
    if splits >= 2:
        folds = [fold for fold in np.array_split(x, splits) if fold.shape[0] > k]
        fold_values = np.array([_knn_value(fold, k, workers)[0] for fold in folds])
        se = float(np.std(fold_values, ddof=1) / np.sqrt(len(fold_values)))
    else:
        logger.warning("knn_standard_error_unavailable", m=m, k=k)
        se = float("inf")
    return EntropyEstimate(value=value, std_error=se, method="knn", sample_size=m)


def _evaluable_factor(conv: ConvolutionModel) -> Tuple[DensityModel, DensityModel]:
    """(factor whose density is evaluated, factor that is sampled)."""
    left, right = conv.left, conv.right
    if not left.has_density and not right.has_density:
        raise UnsupportedOperationError(
            f"neither factor of {conv.name!r} has an evaluable density"
        )
    if left.has_density and right.has_density:
        if left.flat and not right.flat:
            return right, left
        return left, right
    return (left, right) if left.has_density else (right, left)


def _log_density_block(
    evaluated: DensityModel,
    sampled: DensityModel,
    x: np.ndarray,
    generator: np.random.Generator,
    m_inner: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """log p̂ and its relative standard error at a block of points ``(b, n)``."""
    b, n = x.shape
    y = sampled.sample(generator, b * m_inner).reshape(b, m_inner, n)
    log_f = evaluated.log_pdf((x[:, None, :] - y).reshape(-1, n)).reshape(b, m_inner)
    log_p = logsumexp(log_f, axis=1) - log(m_inner)
    with np.errstate(invalid="ignore", over="ignore"):
        ratio = np.exp(log_f - log_p[:, None])
        rel_se = np.std(ratio, axis=1, ddof=1) / np.sqrt(m_inner)
    return log_p, np.where(np.isfinite(log_p), rel_se, np.inf)


def _refined_log_density(
    conv: ConvolutionModel,
    x: np.ndarray,
    generator: np.random.Generator,
    m_inner: int,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Estimate at a block, refining m_inner (x4) on points with p̂ = 0."""
    evaluated, sampled = _evaluable_factor(conv)
    log_p, rel_se = _log_density_block(evaluated, sampled, x, generator, m_inner)
    current = m_inner
    zero = ~np.isfinite(log_p)
    if not np.any(zero):
        return log_p, rel_se, current

    refinements = get_settings().convolution_refinements
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(refinements),
            retry=retry_if_exception_type(ConvolutionDensityError),
            reraise=True,
        ):
            with attempt:
                current *= 4
                logger.warning(
                    "convolution_density_refine", model=conv.name, points=int(np.sum(zero)), m_inner=current
                )
                lp, rs = _log_density_block(evaluated, sampled, x[zero], generator, current)
                log_p[zero], rel_se[zero] = lp, rs
                zero = ~np.isfinite(log_p)
                if np.any(zero):
                    raise ConvolutionDensityError(
                        f"density estimate of {conv.name!r} is zero at {int(np.sum(zero))} points", current
                    )
    except ConvolutionDensityError:
        logger.error("convolution_density_zero", model=conv.name, m_inner=current)
        raise
    return log_p, rel_se, current


def estimate_convolution_density(
    conv: ConvolutionModel,
    x: np.ndarray,
    rng: Optional[RandomStream] = None,
    m_inner: Optional[int] = None,
) -> DensityEstimate:
    """p̂(x) = mean of f(x - Y_j) over ``m_inner`` draws of the other factor.

    The evaluated factor is the one with an evaluable density, preferring a
    non-flat one (for Z ~ Unif(D) this is p(x) = ∫_D f(x - z) dz).
    """
    m_inner = m_inner or get_settings().default_m_inner
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points).reshape(-1, conv.dim)
    log_p, rel_se, used = _refined_log_density(
        conv, points, as_stream(rng).child("conv_density").generator(), m_inner
    )
    value = np.exp(log_p)
    se = value * rel_se
    if single:
        return DensityEstimate(
            value=float(value[0]), std_error=float(se[0]), log_value=float(log_p[0]), m_inner=used
        )
    return DensityEstimate(value=value.tolist(), std_error=se.tolist(), log_value=log_p.tolist(), m_inner=used)


def convolution_entropy(
    conv: ConvolutionModel,
    rng: Optional[RandomStream] = None,
    m_outer: Optional[int] = None,
    m_inner: Optional[int] = None,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> EntropyEstimate:
    """-mean log p̂(S_i) over ``m_outer`` draws S_i of the sum.

    log p̂ is biased low (Jensen), so the estimate is biased high; the bias
    shrinks as ``m_inner`` grows and is not corrected.
    """
    cfg = get_settings()
    m_outer = m_outer or cfg.default_m
    m_inner = m_inner or cfg.default_m_inner
    if m_outer < 2:
        raise InvalidParameterError(f"convolution entropy needs m_outer >= 2, got {m_outer}")
    _evaluable_factor(conv)

    def _chunk(generator: np.random.Generator, count: int) -> np.ndarray:
        sums = conv.sample(generator, count)
        out = np.empty(count)
        for start in range(0, count, _OUTER_BLOCK):
            block = sums[start:start + _OUTER_BLOCK]
            log_p, _, _ = _refined_log_density(conv, block, generator, m_inner)
            out[start:start + block.shape[0]] = -log_p
        return out

    values = map_chunks(_chunk, m_outer, as_stream(rng).child("convolution"), chunk_size, workers)
    value, se = mean_and_se(values)
    logger.debug("convolution_entropy", model=conv.name, m_outer=m_outer, m_inner=m_inner, value=value)
    return EntropyEstimate(
        value=value,
        std_error=se,
        method="convolution_mc",
        sample_size=m_outer,
        bias_note=f"log of an unbiased density estimate: biased upward, not corrected; m_inner={m_inner}",
    )


def entropy_power(h: float, n: int) -> float:
    """N = exp(2h/n)."""
    if n < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {n}")
    with np.errstate(over="ignore"):
        return float(np.exp(2.0 * h / n))


def _convolution_ready(model: DensityModel) -> bool:
    if not isinstance(model, ConvolutionModel):
        return False
    if not (model.left.has_density or model.right.has_density):
        return False
    # flat * flat: p̂ vanishes near the support boundary faster than m_inner can follow
    return not (model.left.flat and model.right.flat and model.dim >= FLAT_SUM_KNN_DIM)


def _knn_on_draws(
    model: DensityModel,
    stream: RandomStream,
    m: Optional[int],
    k: Optional[int],
    chunk_size: Optional[int],
    workers: Optional[int],
) -> EntropyEstimate:
    m = m or get_settings().default_m
    samples = model.draw(stream.child("knn"), m, chunk_size, workers)
    return knn_entropy(samples, k=k)


def estimate_entropy(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
    m_inner: Optional[int] = None,
    k: Optional[int] = None,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> EntropyEstimate:
    """Entropy by the best available route.

    ``auto`` tries analytic, plug-in, convolution MC and finally kNN on draws.
    Sums of two flat factors in dimension 8 and up go straight to kNN. When
    the convolution density estimate stays zero after refinement, ``auto``
    falls back to kNN; the returned ``method`` and ``bias_note`` record the
    route taken.
    """
    auto = method == "auto"
    if auto:
        if model.analytic_entropy is not None:
            method = "analytic"
        elif model.has_density:
            method = "plugin_mc"
        elif _convolution_ready(model):
            method = "convolution_mc"
        else:
            method = "knn"

    stream = as_stream(rng)
    if method == "analytic":
        if model.analytic_entropy is None:
            raise UnsupportedOperationError(f"model {model.name!r} has no analytic entropy")
        return EntropyEstimate.analytic(model.analytic_entropy)
    if method == "plugin_mc":
        return plugin_entropy(model, stream, m, chunk_size, workers)
    if method == "convolution_mc":
        if not isinstance(model, ConvolutionModel):
            raise UnsupportedOperationError(f"model {model.name!r} is not a convolution")
        try:
            return convolution_entropy(model, stream, m, m_inner, chunk_size, workers)
        except ConvolutionDensityError as exc:
            if not auto:
                raise
            logger.warning("convolution_entropy_fallback", model=model.name, m_inner=exc.m_inner, method="knn")
            est = _knn_on_draws(model, stream, m, k, chunk_size, workers)
            return est.model_copy(
                update={"bias_note": f"convolution density vanished at m_inner={exc.m_inner}; kNN fallback"}
            )
    if method == "knn":
        return _knn_on_draws(model, stream, m, k, chunk_size, workers)
    raise InvalidParameterError(f"unknown entropy method {method!r}")
