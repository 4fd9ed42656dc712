"""Declarative experiment configuration (YAML or JSON)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from entropylab.core.errors import ConfigError

MODEL_FAMILIES = (
    "gaussian",
    "exponential",
    "laplace",
    "gamma",
    "uniform",
    "uniform_body",
    "product",
    "affine",
    "convolve",
)
BODY_VARIANTS = ("ball", "box", "cube", "simplex", "ellipsoid", "hpolytope", "unit_volume_ball")


class MapNode(BaseModel):
    """An affine map: ``linear``/``shift``, or a scalar ``scale``."""

    model_config = ConfigDict(extra="forbid")

    linear: Optional[List[List[float]]] = None
    shift: Optional[List[float]] = None
    scale: Optional[float] = None


class ModelNode(BaseModel):
    """A node of a model tree: a family with parameters, or a reference."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    family: Optional[str] = None
    params: Dict[str, Any] = {}
    of: List["ModelNode"] = []
    repeat: int = Field(default=1, ge=1)
    ref: Optional[str] = None
    map: Optional[MapNode] = None

    @model_validator(mode="after")
    def family_or_ref(self) -> "ModelNode":
        if (self.family is None) == (self.ref is None):
            raise ValueError("a model node needs exactly one of 'family' or 'ref'")
        if self.family is not None and self.family not in MODEL_FAMILIES:
            raise ValueError(f"unknown family {self.family!r} (known: {', '.join(MODEL_FAMILIES)})")
        return self

    def references(self) -> List[str]:
        refs = [self.ref] if self.ref else []
        for child in self.of:
            refs.extend(child.references())
        return refs


ModelNode.model_rebuild()


class BodyNode(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    variant: str
    params: Dict[str, Any] = {}

    @field_validator("variant")
    @classmethod
    def known_variant(cls, v: str) -> str:
        if v not in BODY_VARIANTS:
            raise ValueError(f"unknown body variant {v!r} (known: {', '.join(BODY_VARIANTS)})")
        return v


class CheckSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    check: str
    label: Optional[str] = None
    models: List[str] = []
    bodies: List[str] = []
    m: Optional[int] = Field(default=None, ge=2)
    m_inner: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=1)
    eps_grid: Optional[List[float]] = None
    kappa: Optional[float] = None
    method: str = "auto"
    params: Dict[str, Any] = {}


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: Optional[str] = None
    svg: Optional[bool] = None
    jsonl: bool = True
    csv: bool = True


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    description: str = ""
    seed: int = Field(default=42, ge=0, lt=2 ** 64)
    models: List[ModelNode] = []
    bodies: List[BodyNode] = []
    checks: List[CheckSpec]
    output: OutputSpec = OutputSpec()

    @field_validator("checks")
    @classmethod
    def checks_not_empty(cls, v):
        if not v:
            raise ValueError("Experiment must have at least one check.")
        return v

    @model_validator(mode="after")
    def references_resolve(self) -> "ExperimentConfig":
        model_names: List[str] = []
        for i, node in enumerate(self.models):
            if not node.name:
                raise ValueError(f"models[{i}]: top-level models need a name")
            if node.name in model_names:
                raise ValueError(f"models[{i}]: duplicate model name {node.name!r}")
            for ref in node.references():
                if ref not in model_names:
                    raise ValueError(f"models[{i}]: reference {ref!r} is not a previously declared model")
            model_names.append(node.name)
        body_names = [b.name for b in self.bodies]
        if len(set(body_names)) != len(body_names):
            raise ValueError("bodies: duplicate body names")
        for i, check in enumerate(self.checks):
            for j, ref in enumerate(check.models):
                if ref not in model_names:
                    raise ValueError(f"checks[{i}].models[{j}]: unknown model {ref!r}")
            for j, ref in enumerate(check.bodies):
                if ref not in body_names:
                    raise ValueError(f"checks[{i}].bodies[{j}]: unknown body {ref!r}")
        return self

    @classmethod
    def from_yaml(cls, path: str | Path) -> "ExperimentConfig":
        raw = _read(path)
        try:
            data = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML: {exc}", str(path)) from exc
        return cls.from_dict(data, source=str(path))

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        raw = _read(path)
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}") from exc
        return cls.from_dict(data, source=str(path))

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        if Path(path).suffix.lower() == ".json":
            return cls.from_json(path)
        return cls.from_yaml(path)

    @classmethod
    def from_dict(cls, data: Any, source: Optional[str] = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping", source)
        try:
            return cls(**data)
        except ValidationError as exc:
            first = exc.errors()[0]
            loc = ".".join(str(part) for part in first["loc"])
            where = ":".join(part for part in (source, loc) if part) or None
            raise ConfigError(first["msg"], where) from exc


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror}", str(path)) from exc
