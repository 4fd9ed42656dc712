"""Build density models and convex bodies from configuration nodes."""

from __future__ import annotations

from functools import reduce
from typing import Callable, Dict, List

import numpy as np

from entropylab.core.errors import ConfigError, EntropyLabError
from entropylab.experiment.spec import BodyNode, ExperimentConfig, MapNode, ModelNode
from entropylab.geometry.bodies import Ball, Box, ConvexBody, Ellipsoid, HPolytope, Simplex
from entropylab.geometry.operations import uniform_body_model, unit_volume_ball
from entropylab.positioning.affine import AffineMap
from entropylab.zoo.families import (
    affine_image,
    convolve,
    make_exponential,
    make_gamma,
    make_gaussian,
    make_laplace,
    make_product,
    make_uniform_interval,
)
from entropylab.zoo.models import DensityModel


def build_body(node: BodyNode, location: str = "bodies") -> ConvexBody:
    p = node.params
    try:
        if node.variant == "ball":
            center = p["center"] if "center" in p else np.zeros(int(p["n"]))
            return Ball(center, float(p.get("radius", 1.0)))
        if node.variant == "box":
            return Box(p["lower"], p["upper"])
        if node.variant == "cube":
            return Box.cube(int(p["n"]), float(p.get("side", 1.0)))
        if node.variant == "simplex":
            return Simplex(p["vertices"]) if "vertices" in p else Simplex.standard(int(p["n"]))
        if node.variant == "ellipsoid":
            shape = np.asarray(p["shape"], dtype=float)
            return Ellipsoid(shape, p.get("center", np.zeros(shape.shape[0])))
        if node.variant == "hpolytope":
            return HPolytope(p["A"], p["b"])
        if node.variant == "unit_volume_ball":
            return unit_volume_ball(int(p["n"]))
    except KeyError as exc:
        raise ConfigError(f"{node.variant} is missing parameter {exc.args[0]!r}", location) from exc
    except EntropyLabError as exc:
        raise ConfigError(str(exc), location) from exc
    raise ConfigError(f"unknown body variant {node.variant!r}", location)


class ModelBuilder:
    """Turns the model trees of an :class:`ExperimentConfig` into models."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.bodies: Dict[str, ConvexBody] = {}
        self.models: Dict[str, DensityModel] = {}
        self._families: Dict[str, Callable[[ModelNode, str], DensityModel]] = {
            "gaussian": self._gaussian,
            "exponential": lambda node, loc: make_exponential(**node.params),
            "laplace": lambda node, loc: make_laplace(**node.params),
            "gamma": lambda node, loc: make_gamma(**node.params),
            "uniform": lambda node, loc: make_uniform_interval(**node.params),
            "uniform_body": self._uniform_body,
            "product": self._product,
            "affine": self._affine,
            "convolve": self._convolve,
        }

    def build(self) -> Dict[str, DensityModel]:
        for i, node in enumerate(self.config.bodies):
            self.bodies[node.name] = build_body(node, f"bodies[{i}]")
        for i, node in enumerate(self.config.models):
            self.models[node.name] = self.build_node(node, f"models[{i}]")
        return self.models

    def build_node(self, node: ModelNode, location: str) -> DensityModel:
        if node.ref is not None:
            if node.ref not in self.models:
                raise ConfigError(f"unknown model reference {node.ref!r}", location)
            model = self.models[node.ref]
            return model.with_name(node.name) if node.name else model
        try:
            model = self._families[node.family](node, location)
        except ConfigError:
            raise
        except TypeError as exc:
            raise ConfigError(f"bad parameters for {node.family}: {exc}", location) from exc
        except EntropyLabError as exc:
            raise ConfigError(str(exc), location) from exc
        return model.with_name(node.name) if node.name else model

    def _children(self, node: ModelNode, location: str) -> List[DensityModel]:
        children = [self.build_node(child, f"{location}.of[{j}]") for j, child in enumerate(node.of)]
        return children * node.repeat

    def _gaussian(self, node: ModelNode, location: str) -> DensityModel:
        p = dict(node.params)
        if "n" not in p:
            raise ConfigError("gaussian needs parameter 'n'", location)
        return make_gaussian(int(p.pop("n")), p.pop("covariance", 1.0), p.pop("mean", None), **p)

    def _uniform_body(self, node: ModelNode, location: str) -> DensityModel:
        p = node.params
        if "body" in p:
            ref = p["body"]
            if ref not in self.bodies:
                raise ConfigError(f"unknown body {ref!r}", location)
            body = self.bodies[ref]
        elif "variant" in p:
            body = build_body(
                BodyNode(name="inline", variant=p["variant"], params=p.get("params", {})), location
            )
        else:
            raise ConfigError("uniform_body needs 'body' or an inline 'variant'", location)
        return uniform_body_model(body)

    def _product(self, node: ModelNode, location: str) -> DensityModel:
        return make_product(self._children(node, location))

    def _affine(self, node: ModelNode, location: str) -> DensityModel:
        children = self._children(node, location)
        if len(children) != 1 or node.map is None:
            raise ConfigError("affine needs exactly one child in 'of' and a 'map'", location)
        return affine_image(children[0], self._map(node.map, children[0].dim, location))

    def _convolve(self, node: ModelNode, location: str) -> DensityModel:
        children = self._children(node, location)
        if len(children) < 2:
            raise ConfigError("convolve needs at least two children in 'of'", location)
        return reduce(convolve, children)

    @staticmethod
    def _map(node: MapNode, n: int, location: str) -> AffineMap:
        if node.scale is not None:
            linear = node.scale * np.eye(n)
        elif node.linear is not None:
            linear = np.asarray(node.linear, dtype=float)
        else:
            linear = np.eye(n)
        shift = np.zeros(n) if node.shift is None else node.shift
        try:
            return AffineMap(linear, shift)
        except EntropyLabError as exc:
            raise ConfigError(str(exc), f"{location}.map") from exc


def build_models(config: ExperimentConfig) -> ModelBuilder:
    builder = ModelBuilder(config)
    builder.build()
    return builder