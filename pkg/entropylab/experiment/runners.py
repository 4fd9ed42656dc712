"""Config-level runners, one per checker name.

A runner takes the :class:`CheckSpec` and a :class:`RunContext` and returns a
:class:`CheckResult`. Checks that take one model run once per listed model,
each on its own child stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp
from typing import Dict, List, Optional

from entropylab.core.config import get_settings
from entropylab.core.errors import ConfigError
from entropylab.core.streams import RandomStream, binomial_se
from entropylab.estimators.estimate import combined_se
from entropylab.experiment.spec import CheckSpec
from entropylab.experiment.task import CheckResult
from entropylab.geometry.bodies import ConvexBody
from entropylab.lab.checks import (
    check_entropy_sandwich,
    check_epi,
    check_estimator_agreement,
    check_gaussian_sandwich,
    check_kappa_entropy_lower,
    check_knn_accuracy,
    check_reverse_bm,
    check_submodularity,
    concentration_profile,
    concentration_reports,
    hyperplane_reports,
    hyperplane_scan,
    kappa_convolution,
    reverse_epi_pipeline,
    typical_set_mass,
    uniform_approximation_scan,
)
from entropylab.lab.registry import CheckRegistry, get_registry
from entropylab.lab.reports import make_report, side
from entropylab.positioning.position import (
    ball_mass,
    isotropic_det1_position,
    m_position_search,
    normalize_max_density,
)
from entropylab.zoo.models import DensityModel

DEFAULT_EPS_GRID = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
MASS_ROOT_FLOOR = 0.1
KNN_GATE_M = 20_000


@dataclass
class RunContext:
    """Everything a runner may touch: built objects and its own stream."""

    models: Dict[str, DensityModel]
    bodies: Dict[str, ConvexBody]
    stream: RandomStream
    index: int

    def location(self, field: str = "") -> str:
        return f"checks[{self.index}]" + (f".{field}" if field else "")

    def pick_models(self, spec: CheckSpec, count: Optional[int] = None) -> List[DensityModel]:
        if count is not None and len(spec.models) != count:
            raise ConfigError(f"{spec.check} needs exactly {count} models", self.location("models"))
        if not spec.models:
            raise ConfigError(f"{spec.check} needs at least one model", self.location("models"))
        return [self.models[name] for name in spec.models]

    def pick_bodies(self, spec: CheckSpec, count: int) -> List[ConvexBody]:
        if len(spec.bodies) != count:
            raise ConfigError(f"{spec.check} needs exactly {count} bodies", self.location("bodies"))
        return [self.bodies[name] for name in spec.bodies]


registry = get_registry()


def _mass_root_se(mass: float, mass_se: float, mass_root: float, n: int) -> float:
    return mass_root * mass_se / (n * mass)


@registry.check("entropy_sandwich", "h/n between log ||f||^{-1/n} and one more")
def run_entropy_sandwich(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    return CheckResult(
        reports=[
            check_entropy_sandwich(model, ctx.stream.child(j), spec.m, spec.method)
            for j, model in enumerate(ctx.pick_models(spec))
        ]
    )


@registry.check("gaussian_sandwich", "h/n within 1/2 of the Gaussian with the same max density")
def run_gaussian_sandwich(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    return CheckResult(
        reports=[
            check_gaussian_sandwich(model, ctx.stream.child(j), spec.m, spec.method)
            for j, model in enumerate(ctx.pick_models(spec))
        ]
    )


@registry.check("concentration", "tails of the information content against 4 exp(-eps^2 n / 16)")
def run_concentration(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    result = CheckResult()
    for j, model in enumerate(ctx.pick_models(spec)):
        profile = concentration_profile(
            model, ctx.stream.child(j), spec.m, spec.eps_grid or DEFAULT_EPS_GRID, spec.method
        )
        result.profiles.append(profile)
        result.reports.extend(concentration_reports(profile, {"seed": ctx.stream.seed}))
    return result


@registry.check("typical_set", "mass of the entropy-typical set")
def run_typical_set(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    result = CheckResult()
    for j, model in enumerate(ctx.pick_models(spec)):
        n = model.dim
        for eps in spec.eps_grid or DEFAULT_EPS_GRID:
            m = spec.m or get_settings().default_m
            mass, _ = typical_set_mass(model, ctx.stream.child(j), m, eps, spec.method)
            # at least one expected miss, so a full sample still carries error
            floor_se = binomial_se(min(mass, 1.0 - 1.0 / m), m)
            result.reports.append(
                make_report(
                    "typical_set_mass",
                    lhs=max(0.0, 1.0 - 4.0 * exp(-eps * eps * n / 16.0)),
                    rhs=mass,
                    rhs_se=floor_se,
                    params={"seed": ctx.stream.seed, "n": n, "models": [model.name], "eps": eps, "m": m},
                )
            )
    return result


@registry.check("submodularity", "h(X+Y+Z) + h(Z) <= h(X+Z) + h(Y+Z)")
def run_submodularity(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    mx, my, mz = ctx.pick_models(spec, 3)
    return CheckResult(
        reports=[check_submodularity(mx, my, mz, ctx.stream, spec.m, spec.m_inner, spec.method)]
    )


@registry.check("epi", "N(X) + N(Y) <= N(X+Y)")
def run_epi(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    mx, my = ctx.pick_models(spec, 2)
    expected = spec.params.get("expected_ratio")
    return CheckResult(
        reports=[
            check_epi(
                mx,
                my,
                ctx.stream,
                spec.m,
                spec.method,
                spec.m_inner,
                expected_ratio=None if expected is None else float(expected),
            )
        ]
    )


@registry.check("reverse_epi", "reverse EPI after normalisation and det-1 positioning")
def run_reverse_epi(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    mx, my = ctx.pick_models(spec, 2)
    report, _ = reverse_epi_pipeline(
        mx,
        my,
        ctx.stream,
        spec.m,
        spec.m_inner,
        spec.method,
        ball_stage=bool(spec.params.get("ball_stage", True)),
    )
    return CheckResult(reports=[report])


@registry.check("kappa_convolution", "kappa of a convolution against an expected value")
def run_kappa_convolution(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    try:
        k1, k2, expected = (float(spec.params[key]) for key in ("k1", "k2", "expected"))
    except KeyError as exc:
        raise ConfigError(f"kappa_convolution needs params k1, k2, expected; missing {exc}", ctx.location("params"))
    value = kappa_convolution(k1, k2)
    return CheckResult(
        reports=[
            make_report(
                "kappa_convolution",
                lhs=abs(value - expected),
                rhs=0.0,
                params={"k1": k1, "k2": k2, "expected": expected},
                details={"kappa": value},
            )
        ]
    )


@registry.check("kappa_entropy_lower", "h(X) >= log|A| + n log(kappa n)")
def run_kappa_entropy_lower(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    reports = []
    for j, model in enumerate(ctx.pick_models(spec)):
        body = ctx.pick_bodies(spec, 1)[0] if spec.bodies else model.support
        kappa = spec.kappa if spec.kappa is not None else model.kappa
        if body is None or kappa is None:
            raise ConfigError(
                f"{model.name!r} needs a body and a kappa for this check", ctx.location()
            )
        reports.append(check_kappa_entropy_lower(model, body, kappa, ctx.stream.child(j), spec.m, spec.method))
    return CheckResult(reports=reports)


@registry.check("reverse_bm", "h(X1+X2) >= log|A1+A2| - n log 2")
def run_reverse_bm(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    a, b = ctx.pick_bodies(spec, 2)
    expected = spec.params.get("expected_margin")
    report = check_reverse_bm(
        a,
        b,
        ctx.stream,
        spec.m,
        spec.method,
        spec.m_inner,
        expected_margin=None if expected is None else float(expected),
    )
    return CheckResult(reports=[report])


@registry.check("hyperplane", "D(f)/n against 1/4 log n + c")
def run_hyperplane(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    rows = hyperplane_scan(ctx.pick_models(spec), ctx.stream, spec.m, spec.params.get("c_desk"))
    return CheckResult(reports=hyperplane_reports(rows, {"seed": ctx.stream.seed}))


@registry.check("uniform_approximation", "D(f || U_A)/n for kappa-concave f")
def run_uniform_approximation(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    return CheckResult(reports=uniform_approximation_scan(ctx.pick_models(spec), ctx.stream, spec.m))


@registry.check("positioning", "unit-volume ball mass after normalisation and positioning")
def run_positioning(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    floor = float(spec.params.get("floor", MASS_ROOT_FLOOR))
    reports = []
    for j, model in enumerate(ctx.pick_models(spec)):
        stream = ctx.stream.child(j)
        normalized, scale_map = normalize_max_density(model, stream.child("normalize"))
        placed, iso_map = isotropic_det1_position(normalized, stream.child("position"), spec.m)
        mass = ball_mass(placed, stream.child("mass"), spec.m)
        mass.map = iso_map.compose(scale_map).to_dict()
        n = model.dim
        root_se = 0.0 if mass.censored else _mass_root_se(mass.mass, mass.mass_se, mass.mass_root, n)
        reports.append(
            make_report(
                "ball_mass_floor",
                lhs=floor,
                rhs=mass.mass_root,
                rhs_se=root_se,
                params={"seed": ctx.stream.seed, "n": n, "models": [model.name], "m": mass.m},
                sides=[side("position_log_det", abs(iso_map.log_det), 0.0, slack=1e-10)],
                details={"ball_mass": mass.model_dump(), "scale_log_det": scale_map.log_det},
            )
        )
    return CheckResult(reports=reports)


@registry.check("m_position", "diagonal det-1 refinement of the ball mass")
def run_m_position(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    reports = []
    for j, model in enumerate(ctx.pick_models(spec)):
        stream = ctx.stream.child(j)
        placed = model
        if spec.params.get("position", True):
            normalized, _ = normalize_max_density(model, stream.child("normalize"))
            placed, _ = isotropic_det1_position(normalized, stream.child("position"), spec.m)
        start = ball_mass(placed, stream.child("start"), spec.m)
        amap, best = m_position_search(placed, stream.child("search"), spec.m, int(spec.params.get("axes_iters", 20)))
        n = model.dim
        se_start = 0.0 if start.censored else _mass_root_se(start.mass, start.mass_se, start.mass_root, n)
        se_best = 0.0 if best.censored else _mass_root_se(best.mass, best.mass_se, best.mass_root, n)
        reports.append(
            make_report(
                "m_position_search",
                lhs=start.mass_root,
                rhs=best.mass_root,
                lhs_se=se_start,
                rhs_se=se_best,
                params={"seed": ctx.stream.seed, "n": n, "models": [model.name], "m": best.m},
                sides=[side("search_log_det", abs(amap.log_det), 0.0, slack=1e-10)],
                details={"start": start.model_dump(), "best": best.model_dump()},
                slack=2.0 * combined_se(se_start, se_best) or None,
            )
        )
    return CheckResult(reports=reports)


@registry.check("knn_accuracy", "estimator gate: kNN entropy against closed forms")
def run_knn_accuracy(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    repeats = int(spec.params.get("repeats", 1))
    tolerance = float(spec.params.get("tolerance", 0.1))
    return CheckResult(
        reports=[
            check_knn_accuracy(model, ctx.stream.child(j, r), spec.m or KNN_GATE_M, spec.k, tolerance)
            for j, model in enumerate(ctx.pick_models(spec))
            for r in range(repeats)
        ]
    )


@registry.check("estimator_agreement", "estimator gate: density-based vs kNN entropy")
def run_estimator_agreement(spec: CheckSpec, ctx: RunContext) -> CheckResult:
    knn_m = spec.params.get("knn_m")
    return CheckResult(
        reports=[
            check_estimator_agreement(model, ctx.stream.child(j), spec.m, spec.m_inner, knn_m)
            for j, model in enumerate(ctx.pick_models(spec))
        ]
    )


def default_registry() -> CheckRegistry:
    return registry
