"""Built-in acceptance suites.

Each suite is an :class:`ExperimentConfig` generated in code. ``quick`` shrinks
the dimension grids and sample sizes so the whole battery fits a CI run.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import exp
from typing import Any, Callable, Dict, List, Optional, Sequence

from entropylab.core.errors import ConfigError
from entropylab.experiment.spec import ExperimentConfig

Node = Dict[str, Any]

E_OVER_2 = exp(1.0) / 2.0


# ---------------------------------------------------------------------------
# Model nodes of the zoo
# ---------------------------------------------------------------------------

def gaussian(n: int, variance: float = 1.0, name: Optional[str] = None) -> Node:
    return {"name": name or f"gaussian_{n}", "family": "gaussian", "params": {"n": n, "covariance": variance}}


def exponential(n: int) -> Node:
    return {"name": f"exp_{n}", "family": "product", "of": [{"family": "exponential"}], "repeat": n}


def laplace(n: int) -> Node:
    return {"name": f"laplace_{n}", "family": "product", "of": [{"family": "laplace"}], "repeat": n}


def uniform(variant: str, n: int, name: Optional[str] = None) -> Node:
    return {
        "name": name or f"{variant}_{n}",
        "family": "uniform_body",
        "params": {"variant": variant, "params": {"n": n}},
    }


def cube(n: int) -> Node:
    return uniform("cube", n)


def ball(n: int) -> Node:
    return uniform("ball", n)


def simplex(n: int) -> Node:
    return uniform("simplex", n)


ZOO: Dict[str, Callable[[int], Node]] = {
    "gaussian": gaussian,
    "exp": exponential,
    "laplace": laplace,
    "cube": cube,
    "ball": ball,
    "simplex": simplex,
}


def _zoo(families: Sequence[str], dims: Sequence[int]) -> List[Node]:
    return [ZOO[f](n) for n in dims for f in families]


def _names(nodes: Sequence[Node]) -> List[str]:
    return [node["name"] for node in nodes]


def _unique(nodes: Sequence[Node]) -> List[Node]:
    """First node per name, in order."""
    seen: Dict[str, Node] = {}
    for node in nodes:
        seen.setdefault(node["name"], node)
    return list(seen.values())


def _self_sum(name: str) -> Node:
    return {"name": f"{name}*{name}", "family": "convolve", "of": [{"ref": name}, {"ref": name}]}


def _config(name: str, description: str, seed: int, models: List[Node], checks: List[Node], **extra: Any) -> ExperimentConfig:
    return ExperimentConfig.from_dict(
        {"name": name, "description": description, "seed": seed, "models": models, "checks": checks, **extra},
        source=f"suite:{name}",
    )


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def sandwich_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2, 4] if quick else [1, 2, 4, 8, 16, 32]
    models = _zoo(["gaussian", "exp", "laplace", "cube", "ball", "simplex"], dims)
    return _config(
        "sandwich",
        "entropy between log ||f||^{-1/n} and 1 + log ||f||^{-1/n}; Gaussian sandwich",
        seed,
        models,
        [
            {"check": "entropy_sandwich", "models": _names(models)},
            {"check": "gaussian_sandwich", "models": _names(models)},
        ],
    )


def concentration_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 4, 16] if quick else [1, 2, 4, 8, 16, 32, 64]
    m = 20_000 if quick else 100_000
    models = _zoo(["gaussian", "exp", "laplace", "cube"], dims)
    gaussians = [node["name"] for node in models if node["name"].startswith("gaussian")]
    return _config(
        "concentration",
        "P{|h~/n - h/n| >= eps} <= 4 exp(-eps^2 n/16) for 0 <= eps <= 2",
        seed,
        models,
        [
            {"check": "concentration", "models": _names(models), "m": m},
            {"check": "typical_set", "models": gaussians, "m": m, "eps_grid": [0.5, 1.0, 2.0]},
        ],
    )


def submodularity_suite(seed: int, quick: bool) -> ExperimentConfig:
    variances = [0.25, 1.0, 4.0]
    models: List[Node] = [gaussian(1, v, name=f"gaussian_1_var{v:g}") for v in variances]
    checks: List[Node] = [
        {"check": "submodularity", "models": [f"gaussian_1_var{a:g}", f"gaussian_1_var{b:g}", f"gaussian_1_var{c:g}"]}
        for a, b, c in product(variances, repeat=3)
    ]
    dims = [1, 2] if quick else [1, 2, 4]
    m = 5_000 if quick else 20_000
    for n in dims:
        models.append(cube(n))
        models.append(uniform("unit_volume_ball", n, name=f"unif_D_{n}"))
        checks.append(
            {"check": "submodularity", "models": [f"cube_{n}", f"cube_{n}", f"unif_D_{n}"], "m": m, "m_inner": 256}
        )
    return _config(
        "submodularity",
        "h(X+Y+Z) + h(Z) <= h(X+Z) + h(Y+Z)",
        seed,
        models,
        checks,
    )


def epi_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2] if quick else [1, 2, 4]
    m = 5_000 if quick else 20_000
    models: List[Node] = []
    checks: List[Node] = []
    for n in dims:
        models.extend([gaussian(n), gaussian(n, 4.0, name=f"gaussian_{n}_var4"), exponential(n), laplace(n), cube(n)])
        for x, y in [
            (f"gaussian_{n}", f"gaussian_{n}_var4"),
            (f"exp_{n}", f"exp_{n}"),
            (f"laplace_{n}", f"laplace_{n}"),
            (f"cube_{n}", f"cube_{n}"),
            (f"exp_{n}", f"cube_{n}"),
        ]:
            checks.append({"check": "epi", "models": [x, y], "m": m, "m_inner": 256})
    models.append({"name": "unit_interval", "family": "uniform", "params": {"low": 0.0, "high": 1.0}})
    checks.append(
        {
            "check": "epi",
            "label": "epi_interval_knn",
            "models": ["unit_interval", "unit_interval"],
            "m": 50_000,
            "method": "knn",
            "params": {"expected_ratio": E_OVER_2},
        }
    )
    return _config("epi", "N(X+Y) >= N(X) + N(Y)", seed, models, checks)


def reverse_epi_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2] if quick else [1, 2, 4, 8, 16]
    m = 4_000 if quick else 20_000
    models: List[Node] = []
    checks: List[Node] = []
    for n in dims:
        models.extend([gaussian(n), gaussian(n, 4.0, name=f"gaussian_{n}_var4"), exponential(n), cube(n), ball(n)])
        for x, y in [
            (f"gaussian_{n}", f"gaussian_{n}_var4"),
            (f"exp_{n}", f"cube_{n}"),
            (f"cube_{n}", f"ball_{n}"),
            (f"exp_{n}", f"exp_{n}"),
        ]:
            checks.append(
                {"check": "reverse_epi", "models": [x, y], "m": m, "m_inner": 128, "params": {"ball_stage": n <= 4}}
            )
    return _config(
        "reverse-epi",
        "N(X~+Y~) <= C (N(X~) + N(Y~)) after normalisation and det-1 positioning",
        seed,
        models,
        checks,
    )


def kappa_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2, 4] if quick else [1, 2, 4, 8, 16]
    models = _zoo(["cube", "ball", "simplex"], dims)
    checks: List[Node] = [
        {"check": "kappa_convolution", "params": {"k1": 1.0 / n, "k2": 1.0 / n, "expected": 1.0 / (2 * n)}}
        for n in dims
    ]
    checks.append({"check": "kappa_entropy_lower", "models": _names(models)})
    # Unif(A) * Unif(A) is 1/(2n)-concave on 2A = [0, 2]^n, where the bound is 0
    sums = [_self_sum(f"cube_{n}") for n in dims]
    models.extend(sums)
    checks.append({"check": "kappa_entropy_lower", "models": _names(sums), "m": 5_000 if quick else 20_000})
    return _config("kappa", "kappa algebra of convolutions and h(X) >= log|A| + n log(kappa n)", seed, models, checks)


def reverse_bm_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2] if quick else [1, 2, 4]
    m = 5_000 if quick else 20_000
    bodies: List[Node] = []
    checks: List[Node] = []
    for n in dims:
        bodies.extend(
            [
                {"name": f"cube_{n}", "variant": "cube", "params": {"n": n}},
                {"name": f"box_{n}", "variant": "box", "params": {"lower": [0.0] * n, "upper": [2.0] + [1.0] * (n - 1)}},
                {"name": f"ball_{n}", "variant": "ball", "params": {"n": n}},
                {"name": f"half_ball_{n}", "variant": "ball", "params": {"n": n, "radius": 0.5}},
            ]
        )
        for a, b in [(f"cube_{n}", f"cube_{n}"), (f"cube_{n}", f"box_{n}"), (f"ball_{n}", f"half_ball_{n}")]:
            check: Node = {"check": "reverse_bm", "bodies": [a, b], "m": m, "m_inner": 256}
            if n == 1 and a == b:
                # triangular law on [0, 2]: h = 1/2 against a bound of 0
                check["params"] = {"expected_margin": 0.5}
            checks.append(check)
    return _config("reverse-bm", "h(X1+X2) >= log|A1+A2| - n log 2", seed, [], checks, bodies=bodies)


def hyperplane_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2, 4] if quick else [1, 2, 4, 8, 16, 32]
    m = 20_000 if quick else 100_000
    models = _zoo(["gaussian", "exp", "laplace", "cube", "ball", "simplex"], dims)
    flat = [node["name"] for node in models if node["family"] == "uniform_body"]
    return _config(
        "hyperplane",
        "D(f)/n <= 1/4 log n + c and 0 <= D(f || U_A)/n <= -log(kappa n)",
        seed,
        models,
        [
            {"check": "hyperplane", "models": _names(models), "m": m},
            {"check": "uniform_approximation", "models": flat, "m": m},
        ],
    )


def positioning_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2, 4] if quick else [1, 2, 4, 8, 16]
    m = 20_000 if quick else 100_000
    models = _zoo(["gaussian", "exp", "laplace", "cube", "ball", "simplex"], dims)
    return _config(
        "positioning",
        "unit-volume ball mass mu(D)^{1/n} after normalisation and isotropic det-1 position",
        seed,
        models,
        [
            {"check": "positioning", "models": _names(models), "m": m},
            {"check": "m_position", "models": [f"exp_{n}" for n in dims], "m": m // 2},
        ],
    )


def estimators_suite(seed: int, quick: bool) -> ExperimentConfig:
    dims = [1, 2] if quick else [1, 2, 4, 8]
    models: List[Node] = [gaussian(4)]
    conv_names: List[str] = []
    for n in dims:
        models.extend([cube(n), gaussian(n), exponential(n)])
        for x, y in [(f"cube_{n}", f"gaussian_{n}"), (f"exp_{n}", f"cube_{n}"), (f"cube_{n}", f"cube_{n}")]:
            name = f"{x}*{y}"
            models.append({"name": name, "family": "convolve", "of": [{"ref": x}, {"ref": y}]})
            conv_names.append(name)
    return _config(
        "estimators",
        "kNN entropy against closed forms; density-based entropy against kNN",
        seed,
        _unique(models),
        [
            {"check": "knn_accuracy", "models": ["gaussian_4"], "m": 20_000, "k": 5, "params": {"repeats": 3}},
            {
                "check": "estimator_agreement",
                "models": conv_names,
                "m": 2_000 if quick else 5_000,
                "m_inner": 256,
                "params": {"knn_m": 20_000},
            },
        ],
    )


@dataclass(frozen=True)
class Suite:
    name: str
    result: str
    build: Callable[[int, bool], ExperimentConfig]

    def config(self, seed: int, quick: bool = False) -> ExperimentConfig:
        return self.build(seed, quick)

    def describe(self) -> str:
        return f"{self.name}: {self.result}"


SUITES: Dict[str, Suite] = {
    suite.name: suite
    for suite in (
        Suite("sandwich", "Theorem 3 (with the Gaussian sandwich of Remark 3)", sandwich_suite),
        Suite("concentration", "Theorem 2", concentration_suite),
        Suite("submodularity", "submodularity of entropy under convolution", submodularity_suite),
        Suite("epi", "entropy power inequality", epi_suite),
        Suite("reverse-epi", "Theorem 1", reverse_epi_suite),
        Suite("kappa", "Remark 1, kappa-concave entropy bound", kappa_suite),
        Suite("reverse-bm", "Remark 1, reverse Brunn-Minkowski", reverse_bm_suite),
        Suite("hyperplane", "Remark 3 and the entropic hyperplane form", hyperplane_suite),
        Suite("positioning", "Corollary 1, ball mass after positioning", positioning_suite),
        Suite("estimators", "estimator quality gates", estimators_suite),
    )
}


def list_suites() -> List[str]:
    return [suite.describe() for suite in SUITES.values()]


def get_suite(name: str) -> Suite:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r} (known: {', '.join(SUITES)})", "--suite")
    return SUITES[name]


def suite_configs(names: Optional[Sequence[str]], seed: int, quick: bool = False) -> List[ExperimentConfig]:
    selected = list(names) if names else list(SUITES)
    return [get_suite(name).config(seed, quick) for name in selected]
