"""Run configuration: pydantic models, YAML loading and resolution.

Complex numbers are written as ``[re, im]`` pairs.  Node positions may also
be expressions in ``omega1``, ``omega3`` and ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigurationError
from .presets import PRESETS, eval_expr, get_preset

__all__ = [
    "BackgroundBlock",
    "NodeEntry",
    "GridBlock",
    "AsymBlock",
    "RunConfig",
    "ResolvedRun",
    "parse_config",
    "load_config",
    "resolve",
    "TASKS",
]

TASKS = ("background", "dress", "asym-line", "asym-region", "verify", "figure")

Pair = List[float]
ComplexIn = Union[float, Pair]


def _to_complex(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if len(v) != 2:
        raise ValueError("complex values are [re, im] pairs")
    return complex(v[0], v[1])


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BackgroundBlock(_Model):
    kappa: ComplexIn
    rho: ComplexIn
    omega1: ComplexIn
    omega3: ComplexIn

    @field_validator("kappa", "rho", "omega1", "omega3")
    @classmethod
    def _pair(cls, v):
        _to_complex(v)
        return v

    def values(self):
        return tuple(_to_complex(getattr(self, k)) for k in ("kappa", "rho", "omega1", "omega3"))


class NodeEntry(_Model):
    z: Union[Pair, str]
    alpha: ComplexIn = 1.0

    @field_validator("z")
    @classmethod
    def _z(cls, v):
        if not isinstance(v, str):
            _to_complex(v)
        return v


class GridBlock(_Model):
    xi_min: float
    xi_max: float
    n_xi: int = Field(ge=2)
    t_min: float
    t_max: float
    n_t: int = Field(ge=2)

    @model_validator(mode="after")
    def _ranges(self):
        if not self.xi_max > self.xi_min:
            raise ValueError("xi_max must exceed xi_min")
        if not self.t_max > self.t_min:
            raise ValueError("t_max must exceed t_min")
        return self


class AsymBlock(_Model):
    kind: Optional[Literal["line", "region"]] = None
    k: Optional[int] = Field(default=None, ge=1)
    sign: Optional[Literal["+", "-"]] = None
    t: Optional[List[float]] = None


class RunConfig(_Model):
    task: Literal["background", "dress", "asym-line", "asym-region", "verify", "figure"] = "dress"
    preset: Optional[str] = None
    background: Optional[BackgroundBlock] = None
    dressing: Optional[List[NodeEntry]] = None
    grid: Optional[GridBlock] = None
    asym: Optional[AsymBlock] = None
    output: Optional[str] = None

    @model_validator(mode="after")
    def _consistency(self):
        if self.preset is not None:
            if self.preset not in PRESETS:
                raise ValueError(f"unknown preset {self.preset!r}; choose from {', '.join(PRESETS)}")
            if self.background is not None or self.dressing is not None:
                raise ValueError("preset and explicit background/dressing blocks are mutually exclusive")
        else:
            if self.task == "figure":
                raise ValueError("task 'figure' needs a preset")
            if self.background is None:
                raise ValueError("either a preset or a background block is required")
            if self.task != "background" and not self.dressing and self.task != "verify":
                raise ValueError(f"task {self.task!r} needs a non-empty dressing block")
        return self


def _format_validation(exc: ValidationError):
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data) -> RunConfig:
    """Validate a mapping; raises :class:`ConfigurationError` with field paths."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a mapping")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {_format_validation(exc)}") from None


def load_config(path) -> RunConfig:
    """Read a YAML (or JSON) configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigurationError(f"malformed YAML in {path}{where}: {getattr(exc, 'problem', exc)}") from None
    return parse_config(data)


@dataclass(frozen=True)
class ResolvedRun:
    """A configuration with preset values and expressions filled in."""

    label: str
    task: str
    kappa: complex
    rho: complex
    omega1: complex
    omega3: complex
    z: tuple
    alphas: tuple
    grid: dict
    asym: dict
    output: Optional[str]


def resolve(cfg: RunConfig) -> ResolvedRun:
    task = cfg.task
    asym = cfg.asym.model_dump(exclude_none=True) if cfg.asym else {}
    if cfg.preset is not None:
        p = get_preset(cfg.preset)
        kappa, rho, w1, w3 = p.kappa, p.rho, p.omega1, p.omega3
        zs, alphas = p.nodes(), tuple(complex(a) for a in p.alphas)
        grid = dict(p.grid)
        if task == "figure":
            task = p.task
            asym = {**p.asym, **asym}
        elif task in ("asym-line", "asym-region"):
            asym = {**{k: v for k, v in p.asym.items() if k == "t"}, **asym}
        label = p.name
    else:
        kappa, rho, w1, w3 = cfg.background.values()
        entries = cfg.dressing or []
        try:
            zs = tuple(eval_expr(e.z, w1, w3) if isinstance(e.z, str) else _to_complex(e.z) for e in entries)
        except ValueError as exc:
            raise ConfigurationError(f"dressing.z: {exc}") from None
        alphas = tuple(_to_complex(e.alpha) for e in entries)
        grid = {"xi_min": -20.0, "xi_max": 20.0, "n_xi": 400, "t_min": -20.0, "t_max": 20.0, "n_t": 400}
        label = "custom"
    if cfg.grid is not None:
        grid = cfg.grid.model_dump()
    if task == "asym-line":
        asym.setdefault("kind", "line")
    elif task == "asym-region":
        asym.setdefault("kind", "region")
    return ResolvedRun(label, task, kappa, rho, w1, w3, zs, alphas, grid, asym, cfg.output)
