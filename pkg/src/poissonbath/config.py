"""Strict JSON experiment configuration.

Units: frequencies and rates are in units of the emission noise rate
``gamma2_plus`` (1 by default); times in units of its inverse; ``beta`` is
the inverse temperature in the same energy units.
"""
import json
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

EXPERIMENTS = ("simulate", "steady", "corr", "decay_rate", "converge", "multitime", "sweep")


class ConfigParseError(Exception):
    """The config file is unreadable or not valid JSON."""


class ConfigValidationError(Exception):
    """The config parsed but violates the schema or a cross-constraint."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ModelBlock(_Strict):
    model: Literal["collective", "qubit"] = "collective"
    N: int = Field(1, ge=1, description="number of two-level systems")
    omega: float = Field(1.0, description="system level splitting")
    representation: Literal["symmetric", "full"] = "symmetric"
    initial: Literal["ground", "dicke1", "superposition", "excited", "gibbs"] = "ground"

    @model_validator(mode="after")
    def _qubit_is_single(self):
        if self.model == "qubit" and self.N != 1:
            raise ValueError("model 'qubit' requires N = 1")
        return self


class PoissonBlock(_Strict):
    mu: float = Field(..., gt=0, description="effective coupling lam / G1-")
    gamma2_plus: float = Field(1.0, ge=0, description="emission-type noise rate")
    gamma1_plus: Optional[float] = Field(None, ge=0, description="absorption-type noise rate")
    beta: Optional[float] = Field(None, description="inverse temperature; fixes gamma1_plus by detailed balance")


class BathBlock(_Strict):
    """Telegraph bath.

    ``white_noise``: ``G1- = G2- = gamma_minus`` and ``lam = mu * gamma_minus``,
    with the bath frequencies either given or fixed by detailed balance.
    ``explicit``: every parameter given; with ``beta`` set, the rates must obey
    detailed balance.
    """

    mode: Literal["white_noise", "explicit", "detailed_balance"] = "white_noise"
    gamma_minus: Optional[Union[float, List[float]]] = None
    detailed_balance: bool = False
    omega1: Optional[float] = None
    omega2: Optional[float] = None
    gamma1_plus: Optional[float] = Field(None, ge=0)
    gamma1_minus: Optional[float] = Field(None, ge=0)
    gamma2_plus: Optional[float] = Field(None, ge=0)
    gamma2_minus: Optional[float] = Field(None, ge=0)
    lam: Optional[float] = None
    beta: Optional[float] = None

    @model_validator(mode="after")
    def _mode_fields(self):
        if self.mode == "white_noise":
            if self.gamma_minus is None:
                raise ValueError("white_noise bath needs gamma_minus")
            if not self.detailed_balance and (self.omega1 is None or self.omega2 is None):
                raise ValueError("white_noise bath needs omega1 and omega2 unless detailed_balance is true")
        elif self.mode == "explicit":
            missing = [k for k in ("omega1", "omega2", "gamma1_plus", "gamma1_minus",
                                   "gamma2_plus", "gamma2_minus", "lam") if getattr(self, k) is None]
            if missing:
                raise ValueError(f"explicit bath is missing {missing}")
        else:
            missing = [k for k in ("omega1", "omega2", "beta", "gamma1_plus", "gamma2_plus", "lam")
                       if getattr(self, k) is None]
            if missing:
                raise ValueError(f"detailed_balance bath is missing {missing}")
        return self

    def ladder(self):
        g = self.gamma_minus
        return [float(x) for x in (g if isinstance(g, list) else [g])]


class TimesBlock(_Strict):
    t_max: Optional[float] = Field(None, gt=0)
    n_points: int = Field(201, ge=2)
    values: Optional[List[float]] = None

    @model_validator(mode="after")
    def _one_grid(self):
        if self.values is not None:
            if len(self.values) == 0:
                raise ValueError("times.values is empty")
            if self.values[0] != 0 or any(b < a for a, b in zip(self.values, self.values[1:])):
                raise ValueError("times.values must start at 0 and ascend")
        elif self.t_max is None:
            raise ValueError("times needs either values or t_max")
        return self

    def grid(self):
        if self.values is not None:
            return np.array(self.values, dtype=float)
        return np.linspace(0.0, self.t_max, self.n_points)


Sign = Literal["+", "-"]


class CorrBlock(_Strict):
    kind: Literal["two_point", "correlationlike", "npoint"] = "two_point"
    indices: List[Tuple[Sign, Sign]] = Field(..., description="(l, k) sign pairs")
    init: Optional[Sign] = None
    t: List[float] = Field(default_factory=list)
    s: List[float] = Field(default_factory=list)
    times: List[List[float]] = Field(default_factory=list, description="descending time tuples for npoint")

    @model_validator(mode="after")
    def _shape(self):
        n = len(self.indices)
        if self.kind in ("two_point", "correlationlike") and n != 2:
            raise ValueError(f"{self.kind} needs exactly two indices")
        if self.kind == "two_point" and not self.t:
            raise ValueError("two_point needs a non-empty t list")
        if self.kind == "correlationlike":
            if self.init is None:
                raise ValueError("correlationlike needs init")
            if not self.t or not self.s:
                raise ValueError("correlationlike needs non-empty t and s lists")
        if self.kind == "npoint":
            if not self.times:
                raise ValueError("npoint needs a non-empty times list")
            if any(len(ts) != n for ts in self.times):
                raise ValueError("each npoint time tuple must match the number of indices")
        return self


class DecayRateBlock(_Strict):
    x_min: float = Field(1e-3, gt=0, description="smallest mu^2 N")
    x_max: float = Field(1e3, gt=0)
    n_points: int = Field(61, ge=2)
    N: int = Field(1, ge=1, description="spins used to convert mu^2 N into mu")

    @model_validator(mode="after")
    def _order(self):
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        return self


class MultiTimeBlock(_Strict):
    operator: Literal["jx", "jy", "jz", "p_ground"] = "jx"
    times: List[List[float]] = Field(..., description="descending insertion times t1 >= t2 >= ...")

    @model_validator(mode="after")
    def _times(self):
        if not self.times:
            raise ValueError("multitime.times is empty")
        for ts in self.times:
            if not 1 <= len(ts) <= 4:
                raise ValueError("each insertion tuple needs 1..4 times")
            if any(t < 0 for t in ts) or any(a < b for a, b in zip(ts, ts[1:])):
                raise ValueError(f"insertion times {ts} must be non-negative and descending")
        return self


class SweepBlock(_Strict):
    configs: List[Union[str, dict]] = Field(..., min_length=1)
    workers: int = Field(1, ge=1)


class ExperimentConfig(_Strict):
    experiment: Literal[EXPERIMENTS]
    model: ModelBlock = ModelBlock()
    poisson: Optional[PoissonBlock] = None
    bath: Optional[BathBlock] = None
    times: Optional[TimesBlock] = None
    engine: Literal["poisson", "gaussian", "composite"] = "poisson"
    corr: Optional[CorrBlock] = None
    decay_rate: Optional[DecayRateBlock] = None
    multitime: Optional[MultiTimeBlock] = None
    sweep: Optional[SweepBlock] = None
    output: str = "out"

    @model_validator(mode="after")
    def _cross(self):
        kind = self.experiment
        need = {
            "simulate": ("poisson", "times"),
            "steady": ("poisson",),
            "corr": ("bath", "corr"),
            "decay_rate": (),
            "converge": ("poisson", "bath", "times"),
            "multitime": ("poisson", "bath", "multitime"),
            "sweep": ("sweep",),
        }[kind]
        for block in need:
            if getattr(self, block) is None:
                raise ValueError(f"experiment '{kind}' requires a '{block}' block")
        if kind == "simulate" and self.engine == "composite" and self.bath is None:
            raise ValueError("engine 'composite' requires a 'bath' block")
        if self.model.initial == "gibbs" and (self.poisson is None or self.poisson.beta is None):
            raise ValueError("initial 'gibbs' requires poisson.beta")
        if self.bath is not None and self.bath.mode == "white_noise":
            if self.poisson is None:
                raise ValueError("white_noise bath takes mu from the 'poisson' block")
            if self.bath.detailed_balance and self.poisson.beta is None:
                raise ValueError("detailed-balance bath requires poisson.beta")
            ladder = self.bath.ladder()
            if any(g <= 0 for g in ladder):
                raise ValueError("gamma_minus must be positive")
            if kind == "converge" and any(b <= a for a, b in zip(ladder, ladder[1:])):
                raise ValueError("converge needs a strictly ascending gamma_minus list")
            if kind in ("simulate", "multitime") and len(ladder) != 1:
                raise ValueError(f"experiment '{kind}' needs a single gamma_minus value")
        if self.bath is not None and self.bath.mode != "white_noise" and self.poisson is not None:
            b = self.bath
            gm1 = b.gamma1_minus if b.mode == "explicit" else b.gamma1_plus * np.exp(b.beta * b.omega1)
            if not np.isclose(b.lam, self.poisson.mu * gm1, rtol=1e-12, atol=0.0):
                raise ValueError("bath.lam must equal poisson.mu * gamma1_minus")
        if kind == "converge" and self.bath.mode != "white_noise":
            raise ValueError("converge requires a white_noise bath ladder")
        if kind == "sweep" and any(isinstance(c, dict) and c.get("experiment") == "sweep"
                                   for c in self.sweep.configs):
            raise ValueError("nested sweeps are not supported")
        return self


def parse_config(source, experiment=None):
    """Load a config from a path, JSON text or dict.

    ``experiment`` (the CLI subcommand) fills in a missing ``experiment`` key
    and must agree with it otherwise.
    """
    if isinstance(source, dict):
        data = dict(source)
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigParseError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigParseError("config root must be a JSON object")
    if experiment is not None:
        data.setdefault("experiment", experiment)
        if data["experiment"] != experiment:
            raise ConfigValidationError(
                f"config experiment '{data['experiment']}' does not match subcommand '{experiment}'"
            )
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigValidationError(_format_errors(exc)) from exc


def _format_errors(exc: ValidationError):
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)
