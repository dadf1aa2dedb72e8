"""Declarative experiment configs.

Configs are flat text files with dotted keys (`graph.kind = proximity`),
parsed into nested dicts and validated by the pydantic models below; the same
models are the request schema of the service. Validation failures carry the
offending field path.

Grammar (one statement per line):

    key.subkey = value        # comment
    value := int | float | true | false | "zeros" | string | v1,v2,...
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import (BaseModel, BeforeValidator, ConfigDict, Field,
                      ValidationError, field_validator)

from .errors import ConfigError
from .graphs import GraphSpec
from .maps import (AveragedRotation, Contraction, Identity, MonotoneAverage,
                   Rotation, SelfMap, SquareShift)
from .pipelines import PipelineSettings
from .vecspace import Ball, BallPlusPoint, Box, ConvexSet, NormTag, OrderInterval

PIPELINES = ("T35", "T37", "C38", "S4", "VERIFY_ONLY", "CENTER_ONLY")


def _listify(v):
    return [v] if isinstance(v, (int, float)) and not isinstance(v, bool) else v


Coords = Annotated[Union[Literal["zeros"], list[float]], BeforeValidator(_listify)]


class SpaceCfg(BaseModel):
    model_config = ConfigDict(extra="forbid")
    dim: int = Field(default=16, ge=2)
    p: float = Field(default=2.0, gt=1.0)


class SetCfg(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["ball", "ball_plus_point", "box", "order_interval"] = "ball"
    center: Coords = "zeros"
    radius: float = Field(default=0.5, gt=0.0)
    extra: Optional[Coords] = None
    lo: Optional[Coords] = None
    hi: Optional[Coords] = None


class GraphCfg(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["full", "proximity", "order"] = "full"
    eps: Optional[float] = Field(default=None, gt=0.0)


class MapCfg(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["square_shift", "contraction", "rotation", "averaged_rotation",
                  "monotone_average", "identity"]
    lam: Optional[float] = None
    anchor: Optional[Coords] = None
    theta: Optional[float] = None
    plane: list[int] = Field(default_factory=lambda: [0, 1])
    u: Optional[Coords] = None
    damping: Union[float, list[float]] = 0.9


class TolCfg(BaseModel):
    model_config = ConfigDict(extra="forbid")
    fixed_point: float = Field(default=1e-8, gt=0.0)
    center_match: float = Field(default=1e-6, gt=0.0)
    cauchy: float = Field(default=1e-9, gt=0.0)
    center_solver: float = Field(default=1e-8, gt=0.0)
    decay: float = Field(default=1e-9, gt=0.0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    pipeline: Literal["T35", "T37", "C38", "S4", "VERIFY_ONLY", "CENTER_ONLY"]
    space: SpaceCfg = SpaceCfg()
    set_: SetCfg = Field(default_factory=SetCfg, alias="set")
    graph: GraphCfg = GraphCfg()
    map_: MapCfg = Field(alias="map")
    x0: Annotated[list[float], BeforeValidator(_listify)]
    iterations: int = Field(default=10000, ge=2)
    seed: int = 0
    samples: int = Field(default=2000, ge=0)
    alpha_steps: int = Field(default=10, ge=1)
    L: Optional[int] = Field(default=None, ge=1)
    eps: Optional[float] = Field(default=None, gt=0.0)
    detect_window: int = Field(default=50, ge=2)
    tol: TolCfg = TolCfg()
    center_solver: Literal["projected_subgradient", "coreset_meb", "grid_oracle"] = \
        "projected_subgradient"
    center_max_iter: int = Field(default=100000, ge=1)
    output_dir: Optional[str] = None

    @field_validator("x0")
    @classmethod
    def _x0_finite(cls, v):
        if not v or not all(np.isfinite(c) for c in v):
            raise ValueError("x0 must be a non-empty list of finite reals")
        return v


def format_validation_error(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        parts.append(f"{loc}: {e['msg']}")
    return "; ".join(parts)


def _coords(value, dim, fieldname) -> np.ndarray:
    if value == "zeros" or value is None:
        return np.zeros(dim)
    arr = np.asarray(value, dtype=float)
    if arr.size > dim:
        raise ConfigError(fieldname, f"has {arr.size} coordinates but dim is {dim}")
    out = np.zeros(dim)
    out[:arr.size] = arr  # shorter coordinate lists are zero-padded
    return out


def build_set(cfg: ExperimentConfig) -> ConvexSet:
    d = cfg.space.dim
    sc = cfg.set_
    if sc.kind == "ball":
        return Ball(_coords(sc.center, d, "set.center"), sc.radius)
    if sc.kind == "ball_plus_point":
        if sc.extra is None:
            raise ConfigError("set.extra", "required for ball_plus_point")
        return BallPlusPoint(_coords(sc.center, d, "set.center"), sc.radius,
                             _coords(sc.extra, d, "set.extra"))
    if sc.lo is None or sc.hi is None:
        raise ConfigError("set.lo", f"lo and hi are required for {sc.kind}")
    lo, hi = _coords(sc.lo, d, "set.lo"), _coords(sc.hi, d, "set.hi")
    cls = Box if sc.kind == "box" else OrderInterval
    try:
        return cls(lo, hi)
    except ValueError as e:
        raise ConfigError("set.lo", str(e)) from e


def build_graph(cfg: ExperimentConfig, tag: NormTag) -> GraphSpec:
    gc = cfg.graph
    try:
        if gc.kind == "proximity":
            if gc.eps is None:
                raise ConfigError("graph.eps", "required for proximity graphs")
            return GraphSpec.proximity(gc.eps, tag)
        if gc.eps is not None:
            raise ConfigError("graph.eps", f"not accepted by {gc.kind} graphs")
        return GraphSpec.full() if gc.kind == "full" else GraphSpec.order()
    except ValueError as e:
        raise ConfigError("graph", str(e)) from e


def build_map(cfg: ExperimentConfig, K: ConvexSet) -> SelfMap:
    mc = cfg.map_
    d = cfg.space.dim
    try:
        if mc.kind == "identity":
            return Identity(K)
        if mc.kind == "contraction":
            if mc.lam is None:
                raise ConfigError("map.lam", "required for contraction")
            return Contraction(mc.lam, _coords(mc.anchor, d, "map.anchor"), K)
        if mc.kind in ("rotation", "averaged_rotation"):
            if mc.theta is None:
                raise ConfigError("map.theta", "required for rotations")
            cls = Rotation if mc.kind == "rotation" else AveragedRotation
            return cls(mc.theta, mc.plane, K)
        if mc.kind == "monotone_average":
            if mc.u is None:
                raise ConfigError("map.u", "required for monotone_average")
            return MonotoneAverage(_coords(mc.u, d, "map.u"), K)
        damping = mc.damping if np.isscalar(mc.damping) else np.asarray(mc.damping, dtype=float)
        return SquareShift(damping, K)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError("map", str(e)) from e


def build_settings(cfg: ExperimentConfig) -> PipelineSettings:
    return PipelineSettings(
        iterations=cfg.iterations,
        seed=cfg.seed,
        samples=cfg.samples,
        alpha_steps=cfg.alpha_steps,
        tol_fp=cfg.tol.fixed_point,
        tol_center=cfg.tol.center_match,
        tol_cauchy=cfg.tol.cauchy,
        decay_tol=cfg.tol.decay,
        detect_window=cfg.detect_window,
        center_tol=cfg.tol.center_solver,
        center_max_iter=cfg.center_max_iter,
        center_solver=cfg.center_solver,
        tag=NormTag(cfg.space.p),
    )


def build_x0(cfg: ExperimentConfig, K: ConvexSet) -> np.ndarray:
    x0 = _coords(cfg.x0, cfg.space.dim, "x0")
    if not K.contains(x0, 1e-9):
        raise ConfigError("x0", f"lies outside the feasible set by {K.distance_to(x0):.3e}")
    return x0


def _parse_scalar(token: str):
    t = token.strip()
    if t.lower() in ("true", "false"):
        return t.lower() == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def _parse_value(raw: str):
    raw = raw.strip()
    if "," in raw:
        return [_parse_scalar(t) for t in raw.split(",") if t.strip() != ""]
    return _parse_scalar(raw)


def parse_config_text(text: str) -> dict:
    """Dotted-key lines -> nested dict; `#` starts a comment."""
    tree: dict = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected `key = value`, got {rawline.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(key, "conflicts with an earlier scalar value")
        node[parts[-1]] = _parse_value(value)
    return tree


def config_from_dict(data: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError("config", format_validation_error(err)) from err


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(parse_config_text(fh.read()))
