"""JSON run configuration for the command-line front end."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from dodiff import problems
from dodiff.dparam import DeltaMixture, DiffusionParameter, TabulatedDensity, UniformBand
from dodiff.spectral import QuadratureSpec

__all__ = ["RunConfig", "ConfigError", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Raised for unreadable or invalid configuration documents."""


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# --- diffusion parameters ----------------------------------------------------


class DeltaModel(_Model):
    type: Literal["delta"]
    components: list[tuple[float, float]]
    normalized: bool = False

    def build(self) -> DiffusionParameter:
        return DeltaMixture(tuple(self.components), normalized=self.normalized)


class BandModel(_Model):
    type: Literal["band"]
    nu1: float
    nu2: float
    weight: float = 1.0
    normalized: bool = False

    def build(self) -> DiffusionParameter:
        return UniformBand(self.nu1, self.nu2, self.weight, normalized=self.normalized)


class TabulatedModel(_Model):
    type: Literal["tabulated"]
    nodes: list[float]
    values: list[float]
    normalized: bool = False

    def build(self) -> DiffusionParameter:
        return TabulatedDensity(tuple(self.nodes), tuple(self.values), normalized=self.normalized)


ParamModel = Annotated[Union[DeltaModel, BandModel, TabulatedModel], Field(discriminator="type")]


# --- initial data --------------------------------------------------------------


class ModeInit(_Model):
    type: Literal["sine_mode", "cosine_mode"]
    k: int = 1

    def build(self):
        return problems.ClosedForm(self.type, k=self.k)


class ParabolaInit(_Model):
    type: Literal["parabola"]

    def build(self):
        return problems.ClosedForm("parabola")


class GaussianInit(_Model):
    type: Literal["gaussian"]
    center: float = 0.0
    width: float = 0.1

    def build(self):
        return problems.ClosedForm("gaussian", center=self.center, width=self.width)


class CoefficientsInit(_Model):
    type: Literal["coefficients"]
    values: list[float]

    def build(self):
        return problems.Coefficients(tuple(self.values))


class SamplesInit(_Model):
    type: Literal["samples"]
    x: list[float]
    f: list[float]

    def build(self):
        return problems.Samples(tuple(self.x), tuple(self.f))


InitModel = Annotated[
    Union[ModeInit, ParabolaInit, GaussianInit, CoefficientsInit, SamplesInit],
    Field(discriminator="type"),
]


class ProblemModel(_Model):
    boundary: Literal["dirichlet", "neumann", "cauchy"]
    initial: InitModel
    modes: int = problems.DEFAULT_MODES
    half_width: float = 5.0

    def build(self) -> problems.ProblemSpec:
        return problems.ProblemSpec(self.boundary, self.initial.build(), self.modes, self.half_width)


# --- grids and numerics ------------------------------------------------------------


class GridModel(_Model):
    """Either explicit ``values`` or ``min``/``max``/``count``/``spacing``."""

    values: Optional[list[float]] = None
    min: Optional[float] = None
    max: Optional[float] = None
    count: Optional[int] = None
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _check(self) -> GridModel:
        if self.values is not None:
            if len(self.values) == 0:
                raise ValueError("grid values must be nonempty")
            return self
        if self.min is None or self.max is None or self.count is None:
            raise ValueError("grid needs either values or min, max and count")
        if self.count < 1:
            raise ValueError("grid count must be >= 1")
        if self.max < self.min:
            raise ValueError("grid max must be >= min")
        if self.spacing == "log" and not self.min > 0:
            raise ValueError("log spacing requires min > 0")
        return self

    def build(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.spacing == "log":
            return np.logspace(np.log10(self.min), np.log10(self.max), self.count)
        return np.linspace(self.min, self.max, self.count)


class QuadratureModel(_Model):
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    split_point: float = 1.0
    max_subdivisions: int = 6000

    def build(self) -> QuadratureSpec:
        return QuadratureSpec(self.rel_tol, self.abs_tol, self.split_point, self.max_subdivisions)


class RunConfig(_Model):
    """Everything one CLI run needs.

    ``second_parameter`` is only used by ``compare``; ``modes`` lists the
    integers ``n`` with ``kappa = n pi`` for ``kernel``, ``bounds`` and
    ``compare``.
    """

    diffusion_parameter: ParamModel
    second_parameter: Optional[ParamModel] = None
    modes: list[int] = [1]
    t_grid: GridModel = GridModel(min=0.1, max=100.0, count=20, spacing="log")
    x_grid: GridModel = GridModel(min=0.0, max=1.0, count=101)
    problem: Optional[ProblemModel] = None
    quadrature: QuadratureModel = QuadratureModel()

    @model_validator(mode="after")
    def _check(self) -> RunConfig:
        if not self.modes or any(n < 1 for n in self.modes):
            raise ValueError("modes must be a nonempty list of positive integers")
        return self

    def dump(self) -> str:
        return self.model_dump_json(indent=2)


def parse_config(text: str) -> RunConfig:
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(text)
