"""Inequality checks for log-concave and kappa-concave measures.

Each check returns an :class:`InequalityReport` (or a list of them) whose
verdict follows one rule: satisfied ⇔ rhs - lhs >= -slack, with slack equal
to 3 combined standard errors, or 1e-9 when every input is exact.
"""

from __future__ import annotations

from math import exp, log
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from entropylab.core.config import get_settings
from entropylab.core.errors import InvalidParameterError, UnsupportedOperationError
from entropylab.core.streams import RandomStream, as_stream, binomial_se
from entropylab.estimators.divergence import (
    assert_supported_in,
    relative_entropy_to_gaussian,
    relative_entropy_to_independence,
    relative_entropy_to_uniform,
)
from entropylab.estimators.entropy import entropy_power, estimate_entropy, knn_entropy
from entropylab.estimators.estimate import EntropyEstimate, combined_se
from entropylab.geometry.bodies import ConvexBody
from entropylab.geometry.operations import minkowski_sum, uniform_body_model, unit_volume_ball, volume
from entropylab.lab.reports import (
    ConcentrationProfile,
    HyperplaneRow,
    InequalityReport,
    StageRecord,
    make_report,
    side,
)
from entropylab.observability.logger import get_logger
from entropylab.positioning.position import (
    ball_mass,
    isotropic_det1_position,
    normalize_max_density,
)
from entropylab.zoo.families import convolve, max_density
from entropylab.zoo.kappa import kappa_convolution
from entropylab.zoo.models import DensityModel

logger = get_logger(__name__)

KAPPA_TOL = 1e-12
EPS_MAX = 2.0

__all__ = [
    "check_entropy_sandwich",
    "check_epi",
    "check_estimator_agreement",
    "check_gaussian_sandwich",
    "check_kappa_entropy_lower",
    "check_knn_accuracy",
    "check_reverse_bm",
    "check_submodularity",
    "concentration_profile",
    "concentration_reports",
    "hyperplane_reports",
    "hyperplane_scan",
    "kappa_convolution",
    "reverse_epi_pipeline",
    "typical_set_mass",
    "uniform_approximation_scan",
]


def _params(stream: RandomStream, *models: DensityModel, **extra: Any) -> Dict[str, Any]:
    params: Dict[str, Any] = {"seed": stream.seed}
    if models:
        params["n"] = models[0].dim
        params["models"] = [m.name for m in models]
        params["families"] = [m.family for m in models]
    params.update({k: v for k, v in extra.items() if v is not None})
    return params


def _estimate(est: EntropyEstimate) -> Dict[str, Any]:
    return est.model_dump()


def _require_log_concave(model: DensityModel) -> None:
    if model.kappa is None or model.kappa < 0.0:
        raise UnsupportedOperationError(
            f"{model.name!r} is not known to be log-concave (kappa={model.kappa})"
        )


def _same_dim(*models: DensityModel) -> int:
    dims = {m.dim for m in models}
    if len(dims) != 1:
        raise InvalidParameterError(f"models have different dimensions {sorted(dims)}")
    return dims.pop()


def _tail_se(p: float, m: int) -> float:
    """Binomial SE with at least one expected hit (rare-event floor)."""
    return binomial_se(max(p, 1.0 / m), m)


# ---------------------------------------------------------------------------
# Entropy vs maximal density
# ---------------------------------------------------------------------------

def check_entropy_sandwich(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
) -> InequalityReport:
    """log ||f||^{-1/n} <= h/n <= 1 + log ||f||^{-1/n}."""
    _require_log_concave(model)
    stream = as_stream(rng)
    n = model.dim
    h = estimate_entropy(model, stream.child("entropy"), m, method=method)
    md = max_density(model, rng=stream.child("mode"))
    lower = -md.log_value / n
    h_n, se_n = h.value / n, h.std_error / n
    return make_report(
        "entropy_sandwich",
        lhs=h_n,
        rhs=1.0 + lower,
        lhs_se=se_n,
        params=_params(stream, model, m=h.sample_size or None),
        sides=[side("entropy_sandwich_lower", lower, h_n, rhs_se=se_n)],
        details={
            "entropy": _estimate(h),
            "max_density": md.to_dict(),
            "upper_gap": 1.0 + lower - h_n,
            "lower_gap": h_n - lower,
        },
    )


def check_gaussian_sandwich(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
) -> InequalityReport:
    """h(Z)/n - 1/2 <= h(X)/n <= h(Z)/n + 1/2 for Z Gaussian with the same ||f||_inf."""
    _require_log_concave(model)
    stream = as_stream(rng)
    n = model.dim
    h = estimate_entropy(model, stream.child("entropy"), m, method=method)
    md = max_density(model, rng=stream.child("mode"))
    # (2π σ²)^{-n/2} = ||f||_inf
    log_sigma2 = -2.0 * md.log_value / n - log(2.0 * np.pi)
    hz_n = 0.5 - md.log_value / n
    h_n, se_n = h.value / n, h.std_error / n
    return make_report(
        "gaussian_sandwich",
        lhs=h_n,
        rhs=hz_n + 0.5,
        lhs_se=se_n,
        params=_params(stream, model, m=h.sample_size or None),
        sides=[side("gaussian_sandwich_lower", hz_n - 0.5, h_n, rhs_se=se_n)],
        details={"entropy": _estimate(h), "sigma2": exp(log_sigma2), "gaussian_entropy_per_n": hz_n},
    )


# ---------------------------------------------------------------------------
# Concentration of information content
# ---------------------------------------------------------------------------

def _validate_eps(eps_grid: Sequence[float]) -> List[float]:
    grid = [float(e) for e in eps_grid]
    bad = [e for e in grid if not 0.0 <= e <= EPS_MAX]
    if bad:
        raise InvalidParameterError(f"eps must lie in [0, {EPS_MAX}], got {bad}")
    return grid


def _deviations(
    model: DensityModel, stream: RandomStream, m: int, method: str
) -> Tuple[np.ndarray, EntropyEstimate]:
    """|h̃(X_i)/n - h/n| for m draws, and the entropy used."""
    if not model.has_density:
        raise UnsupportedOperationError(f"model {model.name!r} has no evaluable density")
    h = estimate_entropy(model, stream.child("entropy"), m, method=method)
    draws = model.draw(stream.child("information"), m)
    info = -model.log_pdf(draws)
    return np.abs(info - h.value) / model.dim, h


def chi_square_tail(n: int, eps: float) -> float:
    """P{|χ²_n/n - 1| >= 2ε}."""
    upper = stats.chi2.sf(n * (1.0 + 2.0 * eps), n)
    lower_edge = n * (1.0 - 2.0 * eps)
    lower = stats.chi2.cdf(lower_edge, n) if lower_edge > 0 else 0.0
    return float(min(1.0, upper + lower))


def concentration_profile(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    eps_grid: Sequence[float] = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0),
    method: str = "auto",
) -> ConcentrationProfile:
    grid = _validate_eps(eps_grid)
    m = m or get_settings().default_m
    n = model.dim
    dev, h = _deviations(model, as_stream(rng), m, method)
    tails = [float(np.mean(dev >= e)) for e in grid]
    bounds = [4.0 * exp(-e * e * n / 16.0) for e in grid]
    oracle = [chi_square_tail(n, e) for e in grid] if model.is_gaussian else None
    return ConcentrationProfile(
        model=model.name,
        n=n,
        m=m,
        entropy=h.value,
        entropy_method=h.method,
        eps_grid=grid,
        empirical_tail=tails,
        tail_se=[binomial_se(t, m) for t in tails],
        tail_bound=bounds,
        oracle_tail=oracle,
        bound_ratio=[t / b for t, b in zip(tails, bounds)],
    )


def concentration_reports(
    profile: ConcentrationProfile, params: Optional[Dict[str, Any]] = None
) -> List[InequalityReport]:
    """One bound check per ε, plus one oracle-agreement check per ε for Gaussians."""
    reports: List[InequalityReport] = []
    base = dict(params or {}, n=profile.n, m=profile.m, models=[profile.model])
    for i, eps in enumerate(profile.eps_grid):
        tail = profile.empirical_tail[i]
        reports.append(
            make_report(
                "concentration_bound",
                lhs=tail,
                rhs=profile.tail_bound[i],
                lhs_se=_tail_se(tail, profile.m),
                params=dict(base, eps=eps),
                details={"bound_ratio": profile.bound_ratio[i]},
            )
        )
        if profile.oracle_tail is not None:
            oracle = profile.oracle_tail[i]
            reports.append(
                make_report(
                    "concentration_oracle",
                    lhs=abs(tail - oracle),
                    rhs=0.0,
                    lhs_se=_tail_se(oracle, profile.m),
                    params=dict(base, eps=eps),
                    details={"empirical_tail": tail, "oracle_tail": oracle},
                )
            )
    return reports


def typical_set_mass(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    eps: float = 0.5,
    method: str = "auto",
) -> Tuple[float, float]:
    """Share of draws with e^{-h-nε} < f(X) < e^{-h+nε}, and its SE.

    Uses the same draws as :func:`concentration_profile` for the same stream,
    so the mass is exactly 1 - tail(ε).
    """
    _validate_eps([eps])
    m = m or get_settings().default_m
    dev, _ = _deviations(model, as_stream(rng), m, method)
    mass = float(np.mean(dev < eps))
    return mass, binomial_se(mass, m)


# ---------------------------------------------------------------------------
# Convolution inequalities
# ---------------------------------------------------------------------------

def check_submodularity(
    mx: DensityModel,
    my: DensityModel,
    mz: DensityModel,
    rng: Optional[RandomStream] = None,
    m_outer: Optional[int] = None,
    m_inner: Optional[int] = None,
    method: str = "auto",
) -> InequalityReport:
    """h(X+Y+Z) + h(Z) <= h(X+Z) + h(Y+Z).

    Gaussian triples resolve to closed forms through the convolution closure.
    """
    _same_dim(mx, my, mz)
    stream = as_stream(rng)
    xz, yz = convolve(mx, mz), convolve(my, mz)
    xyz = convolve(convolve(mx, my), mz)

    def _h(model: DensityModel, key: str) -> EntropyEstimate:
        return estimate_entropy(model, stream.child(key), m_outer, method=method, m_inner=m_inner)

    h_xyz, h_z, h_xz, h_yz = _h(xyz, "xyz"), _h(mz, "z"), _h(xz, "xz"), _h(yz, "yz")
    return make_report(
        "submodularity",
        lhs=h_xyz.value + h_z.value,
        rhs=h_xz.value + h_yz.value,
        lhs_se=combined_se(h_xyz.std_error, h_z.std_error),
        rhs_se=combined_se(h_xz.std_error, h_yz.std_error),
        params=_params(stream, mx, my, mz, m_outer=m_outer, m_inner=m_inner),
        details={
            "h_xyz": _estimate(h_xyz),
            "h_z": _estimate(h_z),
            "h_xz": _estimate(h_xz),
            "h_yz": _estimate(h_yz),
        },
    )


def _power(h: EntropyEstimate, n: int) -> Tuple[float, float]:
    """N = exp(2h/n) and its delta-method SE."""
    value = entropy_power(h.value, n)
    return value, value * 2.0 / n * h.std_error


def check_epi(
    mx: DensityModel,
    my: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
    m_inner: Optional[int] = None,
    expected_ratio: Optional[float] = None,
) -> InequalityReport:
    """N(X) + N(Y) <= N(X+Y).

    With ``expected_ratio`` the report carries a side requiring
    N(X+Y) / (N(X) + N(Y)) to match it within the slack (e/2 for two
    uniform intervals, 1 for proportional Gaussians).
    """
    n = _same_dim(mx, my)
    stream = as_stream(rng)
    h_x = estimate_entropy(mx, stream.child("x"), m, method="auto")
    h_y = estimate_entropy(my, stream.child("y"), m, method="auto")
    h_s = estimate_entropy(convolve(mx, my), stream.child("sum"), m, method=method, m_inner=m_inner)
    (nx, nx_se), (ny, ny_se), (ns, ns_se) = _power(h_x, n), _power(h_y, n), _power(h_s, n)
    ratio = ns / (nx + ny)
    ratio_se = ratio * combined_se(2.0 / n * h_s.std_error, nx_se / (nx + ny), ny_se / (nx + ny))
    sides = []
    if expected_ratio is not None:
        sides.append(side("epi_ratio", abs(ratio - expected_ratio), 0.0, lhs_se=ratio_se))
    return make_report(
        "epi",
        lhs=nx + ny,
        rhs=ns,
        lhs_se=combined_se(nx_se, ny_se),
        rhs_se=ns_se,
        params=_params(stream, mx, my, m=m, expected_ratio=expected_ratio),
        sides=sides,
        details={
            "ratio": ratio,
            "ratio_se": ratio_se,
            "h_x": _estimate(h_x),
            "h_y": _estimate(h_y),
            "h_sum": _estimate(h_s),
        },
    )


def reverse_epi_pipeline(
    mx: DensityModel,
    my: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    m_inner: Optional[int] = None,
    method: str = "auto",
    ball_stage: bool = True,
) -> Tuple[InequalityReport, List[StageRecord]]:
    """Reverse EPI after max-density normalisation and det-1 positioning.

    Each model is first scaled to ||f||_inf = 1 and then moved to isotropic
    det-1 position; the second map preserves entropy, so N(X̃) is the entropy
    power of the normalised model. The report holds
    Ĉ = N(X̃+Ỹ) / (N(X̃) + N(Ỹ)) with the primary side Ĉ <= ceiling and the
    side Ĉ >= 1.
    """
    _require_log_concave(mx)
    _require_log_concave(my)
    n = _same_dim(mx, my)
    cfg = get_settings()
    stream = as_stream(rng)
    stages: List[StageRecord] = []

    positioned = []
    for key, model in (("x", mx), ("y", my)):
        normalized, scale_map = normalize_max_density(model, stream.child(key, "normalize"))
        placed, iso_map = isotropic_det1_position(normalized, stream.child(key, "position"), m)
        positioned.append(placed)
        stages.append(
            StageRecord(
                stage=f"position_{key}",
                values={
                    "model": model.name,
                    "lambda": exp(scale_map.log_det / n),
                    "scale_log_det": scale_map.log_det,
                    "position_log_det": iso_map.log_det,
                    "map": iso_map.compose(scale_map).to_dict(),
                },
            )
        )
    x_t, y_t = positioned

    h_x = estimate_entropy(x_t, stream.child("x", "entropy"), m)
    h_y = estimate_entropy(y_t, stream.child("y", "entropy"), m)
    h_s = estimate_entropy(convolve(x_t, y_t), stream.child("sum"), m, method=method, m_inner=m_inner)
    (nx, nx_se), (ny, ny_se), (ns, _) = _power(h_x, n), _power(h_y, n), _power(h_s, n)
    ratio = ns / (nx + ny)
    # delta method on log Ĉ = 2 h_s / n - log(N_x + N_y)
    ratio_se = ratio * combined_se(
        2.0 / n * h_s.std_error,
        nx_se / (nx + ny),
        ny_se / (nx + ny),
    )
    stages.append(
        StageRecord(
            stage="sum",
            values={"N_x": nx, "N_y": ny, "N_sum": ns, "C_hat": ratio, "h_sum": _estimate(h_s)},
        )
    )

    if ball_stage:
        uniform_d = uniform_body_model(unit_volume_ball(n), name=f"unif_D_{n}")
        values: Dict[str, Any] = {}
        for key, placed in (("x", x_t), ("y", y_t)):
            h_z = estimate_entropy(
                convolve(placed, uniform_d), stream.child(key, "plus_d"), m, m_inner=m_inner
            )
            values[f"N_{key}_plus_D"] = entropy_power(h_z.value, n)
            values[f"N_{key}_plus_D_se"] = _power(h_z, n)[1]
            values[f"ball_mass_{key}"] = ball_mass(placed, stream.child(key, "mass"), m).model_dump()
        stages.append(StageRecord(stage="ball", values=values))

    report = make_report(
        "reverse_epi",
        lhs=ratio,
        rhs=cfg.reverse_epi_ceiling,
        lhs_se=ratio_se,
        params=_params(stream, mx, my, m=m, m_inner=m_inner),
        sides=[side("reverse_epi_lower", 1.0, ratio, rhs_se=ratio_se)],
        details={"C_hat": ratio, "stages": [s.model_dump() for s in stages]},
    )
    return report, stages


# ---------------------------------------------------------------------------
# kappa-concave bounds
# ---------------------------------------------------------------------------

def _exact_log_volume(body: ConvexBody) -> float:
    vol = volume(body)
    if not vol.exact:
        raise UnsupportedOperationError(f"{body.variant} has no analytic volume")
    return log(vol.value)


def check_kappa_entropy_lower(
    model: DensityModel,
    body: ConvexBody,
    kappa: float,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
) -> InequalityReport:
    """h(X) >= log|A| + n log(κn) for κ-concave X supported on A."""
    n = _same_dim(model)
    if body.dim != n:
        raise InvalidParameterError(f"body dimension {body.dim} != model dimension {n}")
    if not 0.0 < kappa <= 1.0 / n + KAPPA_TOL:
        raise InvalidParameterError(f"kappa must lie in (0, 1/n], got {kappa}")
    stream = as_stream(rng)
    assert_supported_in(model, body, stream.child("support"), m)
    bound = _exact_log_volume(body) + n * log(kappa * n)
    h = estimate_entropy(model, stream.child("entropy"), m, method=method)
    return make_report(
        "kappa_entropy_lower",
        lhs=bound,
        rhs=h.value,
        rhs_se=h.std_error,
        params=_params(stream, model, kappa=kappa, m=m),
        details={"entropy": _estimate(h), "body": body.to_dict()},
    )


def check_reverse_bm(
    body1: ConvexBody,
    body2: ConvexBody,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    method: str = "auto",
    m_inner: Optional[int] = None,
    expected_margin: Optional[float] = None,
) -> InequalityReport:
    """h(X1 + X2) >= log|A1 + A2| - n log 2 for X_i ~ Unif(A_i).

    ``expected_margin`` adds a side pinning the margin where it is known in
    closed form (0.5 for two unit intervals).
    """
    total = minkowski_sum(body1, body2)
    n = total.dim
    stream = as_stream(rng)
    x1, x2 = uniform_body_model(body1), uniform_body_model(body2)
    conv = convolve(x1, x2)
    h = estimate_entropy(conv, stream.child("sum"), m, method=method, m_inner=m_inner)
    bound = _exact_log_volume(total) - n * log(2.0)
    sides = []
    if expected_margin is not None:
        sides.append(side("expected_margin", abs(h.value - bound - expected_margin), 0.0, lhs_se=h.std_error))
    return make_report(
        "reverse_bm",
        lhs=bound,
        rhs=h.value,
        rhs_se=h.std_error,
        params=_params(stream, x1, x2, m=m, expected_margin=expected_margin),
        sides=sides,
        details={"entropy": _estimate(h), "sum_body": total.to_dict()},
    )


# ---------------------------------------------------------------------------
# Distances to Gaussian and uniform comparisons
# ---------------------------------------------------------------------------

def hyperplane_scan(
    models: Sequence[DensityModel],
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    c_desk: Optional[float] = None,
    independence: bool = True,
) -> List[HyperplaneRow]:
    """D(f)/n per model against ¼ log n + c; values above the ceiling are flagged."""
    c = get_settings().hyperplane_c_desk if c_desk is None else c_desk
    stream = as_stream(rng)
    rows: List[HyperplaneRow] = []
    for i, model in enumerate(models):
        if not model.is_log_concave:
            logger.warning("hyperplane_scan_skipped", model=model.name, kappa=model.kappa)
            continue
        n = model.dim
        d = relative_entropy_to_gaussian(model, stream.child(i, "gaussian"), m)
        bound = 0.25 * log(n) + c
        row = HyperplaneRow(
            name=model.name,
            n=n,
            d_per_n=d.value / n,
            d_per_n_se=d.std_error / n,
            bound=bound,
            method=d.method,
            flagged=d.value / n > bound + get_settings().slack_sigmas * d.std_error / n,
        )
        if independence:
            ind = relative_entropy_to_independence(model, stream.child(i, "independence"), m)
            row.independence_per_n = ind.value / n
            row.independence_per_n_se = ind.std_error / n
        rows.append(row)
    return rows


def hyperplane_reports(
    rows: Sequence[HyperplaneRow], params: Optional[Dict[str, Any]] = None
) -> List[InequalityReport]:
    """0 <= D(f)/n <= ¼ log n + c for every scanned model."""
    return [
        make_report(
            "hyperplane",
            lhs=row.d_per_n,
            rhs=row.bound,
            lhs_se=row.d_per_n_se,
            params=dict(params or {}, n=row.n, models=[row.name]),
            sides=[side("relative_entropy_nonnegative", 0.0, row.d_per_n, rhs_se=row.d_per_n_se)],
            details=row.model_dump(),
        )
        for row in rows
    ]


def uniform_approximation_scan(
    models: Sequence[DensityModel],
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
) -> List[InequalityReport]:
    """0 <= D(f || U_A)/n <= -log(κn) for κ-concave f (κ > 0) on its support A.

    The value D(f || U_A)/n is the per-family constant; none is asserted.
    """
    stream = as_stream(rng)
    reports: List[InequalityReport] = []
    for i, model in enumerate(models):
        if model.kappa is None or model.kappa <= 0.0 or model.support is None:
            logger.warning("uniform_scan_skipped", model=model.name, kappa=model.kappa)
            continue
        n = model.dim
        d = relative_entropy_to_uniform(model, model.support, stream.child(i), m)
        value, se = d.value / n, d.std_error / n
        reports.append(
            make_report(
                "uniform_approximation",
                lhs=value,
                rhs=-log(model.kappa * n),
                lhs_se=se,
                params=_params(stream, model, kappa=model.kappa, m=m),
                sides=[side("uniform_approximation_nonnegative", 0.0, value, rhs_se=se)],
                details={"divergence": _estimate(d)},
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Estimator quality gates
# ---------------------------------------------------------------------------

def check_knn_accuracy(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: int = 20_000,
    k: Optional[int] = None,
    tolerance: float = 0.1,
) -> InequalityReport:
    """|ĥ_kNN - h| <= tolerance against the analytic entropy (fixed gate, no slack)."""
    if model.analytic_entropy is None:
        raise UnsupportedOperationError(f"model {model.name!r} has no analytic entropy")
    stream = as_stream(rng)
    est = knn_entropy(model.draw(stream.child("knn"), m), k=k)
    return make_report(
        "knn_accuracy",
        lhs=abs(est.value - model.analytic_entropy),
        rhs=tolerance,
        params=_params(stream, model, m=m, k=k or get_settings().knn_k),
        details={"estimate": _estimate(est), "analytic": model.analytic_entropy},
        slack=0.0,
    )


def check_estimator_agreement(
    model: DensityModel,
    rng: Optional[RandomStream] = None,
    m: Optional[int] = None,
    m_inner: Optional[int] = None,
    knn_m: Optional[int] = None,
) -> InequalityReport:
    """Density-based and kNN entropies agree within 3 combined SE.

    The density side is the plug-in estimate when the sum has an exact
    density (box pairs) and convolution MC otherwise.
    """
    stream = as_stream(rng)
    density_method = "plugin_mc" if model.has_density else "convolution_mc"
    density_est = estimate_entropy(model, stream.child("convolution"), m, method=density_method, m_inner=m_inner)
    knn_est = estimate_entropy(model, stream.child("knn"), knn_m or m, method="knn")
    return make_report(
        "estimator_agreement",
        lhs=abs(density_est.value - knn_est.value),
        rhs=0.0,
        lhs_se=combined_se(density_est.std_error, knn_est.std_error),
        params=_params(stream, model, m=m, m_inner=m_inner, density_method=density_method),
        details={"density": _estimate(density_est), "knn": _estimate(knn_est)},
    )
