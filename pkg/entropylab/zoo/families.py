"""Constructors for the density zoo and the operations that combine models.

Every family here has a closed-form entropy and maximal density, so each
estimator in the lab can be checked against an exact value.
"""

from __future__ import annotations

from math import exp, log, pi
from typing import Any, Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.linalg import solve_triangular
from scipy.optimize import minimize

from entropylab.core.config import get_settings
from entropylab.core.errors import InvalidParameterError, UnsupportedOperationError
from entropylab.core.streams import RandomStream, as_stream
from entropylab.geometry.bodies import Box
from entropylab.geometry.operations import minkowski_sum, uniform_body_model
from entropylab.observability.logger import get_logger
from entropylab.positioning.affine import AffineMap
from entropylab.zoo.kappa import kappa_convolution
from entropylab.zoo.models import ConvolutionModel, DensityModel, MaxDensity

logger = get_logger(__name__)

LOG_2PI = log(2.0 * pi)
SYMMETRY_ATOL = 1e-10


def _as_covariance(n: int, covariance: Any) -> np.ndarray:
    cov = np.asarray(covariance, dtype=float)
    if cov.ndim == 0:
        cov = float(cov) * np.eye(n)
    elif cov.ndim == 1:
        cov = np.diag(cov)
    if cov.shape != (n, n):
        raise InvalidParameterError(f"covariance has shape {cov.shape}, expected ({n}, {n})")
    if not np.allclose(cov, cov.T, atol=SYMMETRY_ATOL):
        raise InvalidParameterError("covariance must be symmetric")
    return 0.5 * (cov + cov.T)


def make_gaussian(
    n: int,
    covariance: Any = 1.0,
    mean: Optional[Any] = None,
    name: Optional[str] = None,
) -> DensityModel:
    """N(mean, covariance) on R^n.

    ``covariance`` may be a scalar (multiple of I), a vector (diagonal) or an
    n x n symmetric positive definite matrix.
    """
    if n < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {n}")
    cov = _as_covariance(n, covariance)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise InvalidParameterError("covariance is not positive definite") from exc
    if np.any(np.diag(chol) <= 0):
        raise InvalidParameterError("covariance is not positive definite")
    mu = np.zeros(n) if mean is None else np.asarray(mean, dtype=float).reshape(n)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    log_norm = -0.5 * (n * LOG_2PI + log_det)

    def log_density(x: np.ndarray) -> np.ndarray:
        z = solve_triangular(chol, (x - mu).T, lower=True)
        return log_norm - 0.5 * np.sum(z * z, axis=0)

    def sampler(generator: np.random.Generator, size: int) -> np.ndarray:
        return mu + generator.standard_normal((size, n)) @ chol.T

    return DensityModel(
        name=name or f"gaussian_{n}",
        family="gaussian",
        dim=n,
        sampler=sampler,
        log_density=log_density,
        analytic_entropy=0.5 * (n * (LOG_2PI + 1.0) + log_det),
        analytic_max_density=exp(log_norm),
        mean=mu,
        covariance=cov,
        kappa=0.0,
        mode=mu,
        params={"covariance": cov.tolist(), "mean": mu.tolist()},
    )


def _univariate(name: str, family: str, dist: Any, mode: float, params: dict) -> DensityModel:
    """1-dim log-concave model backed by a frozen scipy distribution."""

    def log_density(x: np.ndarray) -> np.ndarray:
        return dist.logpdf(x[:, 0])

    def sampler(generator: np.random.Generator, size: int) -> np.ndarray:
        return dist.rvs(size=size, random_state=generator).reshape(size, 1)

    return DensityModel(
        name=name,
        family=family,
        dim=1,
        sampler=sampler,
        log_density=log_density,
        analytic_entropy=float(dist.entropy()),
        analytic_max_density=float(dist.pdf(mode)),
        mean=[float(dist.mean())],
        covariance=[[float(dist.var())]],
        kappa=0.0,
        mode=[mode],
        params=params,
    )


def make_exponential(rate: float = 1.0, name: Optional[str] = None) -> DensityModel:
    if not rate > 0:
        raise InvalidParameterError(f"rate must be positive, got {rate}")
    return _univariate(
        name or "exponential", "exponential", stats.expon(scale=1.0 / rate), 0.0, {"rate": rate}
    )


def make_laplace(scale: float = 1.0, name: Optional[str] = None) -> DensityModel:
    if not scale > 0:
        raise InvalidParameterError(f"scale must be positive, got {scale}")
    return _univariate(
        name or "laplace", "laplace", stats.laplace(scale=scale), 0.0, {"scale": scale}
    )


def make_gamma(shape: float, scale: float = 1.0, name: Optional[str] = None) -> DensityModel:
    """Gamma(shape, scale); shape >= 1 keeps it log-concave."""
    if shape < 1.0:
        raise InvalidParameterError(f"gamma shape must be >= 1 for log-concavity, got {shape}")
    if not scale > 0:
        raise InvalidParameterError(f"scale must be positive, got {scale}")
    return _univariate(
        name or "gamma",
        "gamma",
        stats.gamma(shape, scale=scale),
        (shape - 1.0) * scale,
        {"shape": shape, "scale": scale},
    )


def make_uniform_interval(low: float = 0.0, high: float = 1.0, name: Optional[str] = None) -> DensityModel:
    return uniform_body_model(Box([low], [high]), name=name or "uniform")


def make_product(factors: Sequence[DensityModel], name: Optional[str] = None) -> DensityModel:
    """Product measure of 1-dim factors."""
    factors = list(factors)
    if not factors:
        raise InvalidParameterError("product needs at least one factor")
    for f in factors:
        if f.dim != 1:
            raise InvalidParameterError(f"product factors must be 1-dim, {f.name!r} has dim {f.dim}")
    n = len(factors)

    def log_density(x: np.ndarray) -> np.ndarray:
        total = np.zeros(x.shape[0])
        for i, f in enumerate(factors):
            total = total + f.log_pdf(x[:, i:i + 1])
        return total

    def sampler(generator: np.random.Generator, size: int) -> np.ndarray:
        return np.column_stack([f.sample(generator, size)[:, 0] for f in factors])

    def _all(attr: str) -> bool:
        return all(getattr(f, attr) is not None for f in factors)

    entropy = sum(f.analytic_entropy for f in factors) if _all("analytic_entropy") else None
    max_density = (
        float(np.prod([f.analytic_max_density for f in factors]))
        if _all("analytic_max_density")
        else None
    )
    support = None
    flat = all(f.flat for f in factors)
    if all(isinstance(f.support, Box) for f in factors):
        support = Box([f.support.lower[0] for f in factors], [f.support.upper[0] for f in factors])
    if flat and support is not None:
        kappa: Optional[float] = 1.0 / n
    elif all(f.is_log_concave for f in factors):
        kappa = 0.0
    else:
        kappa = None

    names = {f.name for f in factors}
    default_name = f"{factors[0].name}^{n}" if len(names) == 1 else "product(" + ",".join(f.name for f in factors) + ")"
    family = factors[0].family if len({f.family for f in factors}) == 1 and flat else "product"
    if all(f.is_gaussian for f in factors):
        family = "gaussian"

    return DensityModel(
        name=name or default_name,
        family=family,
        dim=n,
        sampler=sampler,
        log_density=log_density,
        analytic_entropy=entropy,
        analytic_max_density=max_density,
        mean=np.array([f.mean[0] for f in factors]) if _all("mean") else None,
        covariance=np.diag([f.covariance[0, 0] for f in factors]) if _all("covariance") else None,
        kappa=kappa,
        support=support,
        mode=np.array([f.mode[0] for f in factors]) if _all("mode") else None,
        flat=flat,
        params={"factors": [f.describe() for f in factors]},
    )


def affine_image(model: DensityModel, amap: AffineMap, name: Optional[str] = None) -> DensityModel:
    """Law of u(X) for X ~ model and the invertible affine map u."""
    if amap.dim != model.dim:
        raise InvalidParameterError(f"map dimension {amap.dim} != model dimension {model.dim}")
    if amap.is_identity():
        return model if name is None else model.with_name(name)

    if isinstance(model, ConvolutionModel):
        # u(X + Y) = u(X) + L Y
        linear_only = AffineMap(amap.linear, np.zeros(amap.dim))
        return convolve(
            affine_image(model.left, amap),
            affine_image(model.right, linear_only),
            name=name or f"affine({model.name})",
        )

    log_det = amap.log_det
    base_log_density = model.log_density

    log_density = None
    if base_log_density is not None:
        def log_density(y: np.ndarray) -> np.ndarray:
            return base_log_density(amap.apply_inverse(y)) - log_det

    def sampler(generator: np.random.Generator, size: int) -> np.ndarray:
        return amap.apply(model.sample(generator, size))

    family = model.family if model.family in ("gaussian", "uniform") else f"affine({model.family})"
    return DensityModel(
        name=name or f"affine({model.name})",
        family=family,
        dim=model.dim,
        sampler=sampler,
        log_density=log_density,
        analytic_entropy=None if model.analytic_entropy is None else model.analytic_entropy + log_det,
        analytic_max_density=(
            None if model.analytic_max_density is None else model.analytic_max_density * exp(-log_det)
        ),
        mean=None if model.mean is None else amap.apply(model.mean),
        covariance=None if model.covariance is None else amap.linear @ model.covariance @ amap.linear.T,
        kappa=model.kappa,
        support=None if model.support is None else model.support.transform(amap),
        mode=None if model.mode is None else amap.apply(model.mode),
        flat=model.flat,
        params={"base": model.describe(), "map": amap.to_dict()},
    )


def convolution_kappa(k1: Optional[float], k2: Optional[float]) -> Optional[float]:
    if k1 is None or k2 is None:
        return None
    if k1 > 0 and k2 > 0:
        return kappa_convolution(k1, k2)
    if k1 >= 0 and k2 >= 0:
        return 0.0
    return None


def _is_uniform_box(model: DensityModel) -> bool:
    return model.family == "uniform" and isinstance(model.support, Box)


def _box_sum_density(a: Box, b: Box) -> Tuple[Callable[[np.ndarray], np.ndarray], float, np.ndarray]:
    """Exact density of U_A + U_B for boxes: a product of trapezoids.

    p(x) = prod_i |[x_i - a_i^+, x_i - a_i^-] ∩ [b_i^-, b_i^+]| / (|A| |B|).
    """
    log_norm = a.log_volume() + b.log_volume()

    def log_density(x: np.ndarray) -> np.ndarray:
        overlap = np.minimum(x - a.lower, b.upper) - np.maximum(x - a.upper, b.lower)
        with np.errstate(divide="ignore"):
            return np.sum(np.log(np.clip(overlap, 0.0, None)), axis=1) - log_norm

    peak = float(np.exp(np.sum(np.log(np.minimum(a.widths, b.widths))) - log_norm))
    return log_density, peak, a.centroid() + b.centroid()


def convolve(left: DensityModel, right: DensityModel, name: Optional[str] = None) -> ConvolutionModel:
    """Law of X + Y for independent X ~ left and Y ~ right."""
    if left.dim != right.dim:
        raise InvalidParameterError(f"cannot convolve dim {left.dim} with dim {right.dim}")
    n = left.dim

    def sampler(generator: np.random.Generator, size: int) -> np.ndarray:
        return left.sample(generator, size) + right.sample(generator, size)

    mean = None if left.mean is None or right.mean is None else left.mean + right.mean
    cov = (
        None
        if left.covariance is None or right.covariance is None
        else left.covariance + right.covariance
    )

    support = None
    if left.support is not None and right.support is not None:
        try:
            support = minkowski_sum(left.support, right.support)
        except UnsupportedOperationError:
            logger.debug("convolution_support_unknown", left=left.name, right=right.name)

    entropy = max_density = None
    mode = log_density = None
    family = "convolution"
    params: dict = {"left": left.describe(), "right": right.describe()}
    if left.is_gaussian and right.is_gaussian and cov is not None:
        # the sum is N(mean, cov); nested sums of Gaussians stay closed
        closure = make_gaussian(n, cov, mean=mean)
        entropy = closure.analytic_entropy
        max_density = closure.analytic_max_density
        mode = closure.mode
        log_density = closure.log_density
        family = "gaussian"
        params["gaussian_closure"] = True
    elif _is_uniform_box(left) and _is_uniform_box(right):
        log_density, max_density, mode = _box_sum_density(left.support, right.support)
        params["box_sum_density"] = True

    return ConvolutionModel(
        name=name or f"{left.name}*{right.name}",
        family=family,
        dim=n,
        sampler=sampler,
        log_density=log_density,
        analytic_entropy=entropy,
        analytic_max_density=max_density,
        mean=mean,
        covariance=cov,
        kappa=convolution_kappa(left.kappa, right.kappa),
        support=support,
        mode=mode,
        params=params,
        left=left,
        right=right,
    )


def max_density(
    model: DensityModel,
    opt_budget: Optional[int] = None,
    rng: Optional[RandomStream] = None,
) -> MaxDensity:
    """||f||_inf: analytic when known, otherwise a convex mode search.

    The search minimises -log f with Nelder-Mead (derivative free, since
    log-densities such as the Laplace one are not smooth) from the mean, or
    from a sample mean when the mean is unknown. The returned value is an
    attained density value and therefore a lower bound on the maximum.
    """
    if model.analytic_max_density is not None:
        value = float(model.analytic_max_density)
        return MaxDensity(value, log(value), model.mode, True, 0, True)
    if not model.is_log_concave:
        raise UnsupportedOperationError(
            f"mode search needs a log-concave model; {model.name!r} has kappa={model.kappa}"
        )
    if not model.has_density:
        raise UnsupportedOperationError(f"model {model.name!r} has no evaluable density")

    cfg = get_settings()
    budget = opt_budget or cfg.mode_max_iter
    if model.mean is not None:
        start = np.array(model.mean)
    else:
        draws = model.draw(as_stream(rng).child("mode_start"), 1000)
        start = draws.mean(axis=0)

    def objective(x: np.ndarray) -> float:
        value = model.log_pdf(x)
        return float(-value) if np.isfinite(value) else np.inf

    f0 = objective(start)
    scale = max(1.0, abs(f0)) if np.isfinite(f0) else 1.0
    result = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={
            "maxiter": budget,
            "xatol": 1e-10,
            "fatol": cfg.mode_rtol * scale,
            "adaptive": model.dim > 2,
        },
    )
    if not result.success:
        logger.warning("mode_search_not_converged", model=model.name, message=str(result.message))
    log_value = -float(result.fun)
    return MaxDensity(
        value=exp(log_value),
        log_value=log_value,
        argmax=np.asarray(result.x),
        converged=bool(result.success),
        iterations=int(result.nit),
        analytic=False,
    )


# Convenience builders used by the acceptance suites.

def exponential_product(n: int, rate: float = 1.0) -> DensityModel:
    return make_product([make_exponential(rate)] * n, name=f"exponential^{n}")


def laplace_product(n: int, scale: float = 1.0) -> DensityModel:
    return make_product([make_laplace(scale)] * n, name=f"laplace^{n}")


def uniform_cube(n: int) -> DensityModel:
    return uniform_body_model(Box.cube(n), name=f"uniform_cube_{n}")
